// dynamics.hpp: Time derivatives of a BlockDensity.
//
// Three generators contribute to d(rho)/dt (in 1/fs):
//   coherent   -(i/hbar)[H0, rho]
//   quench     excited-state population decay into the ground block at rate gamma
//   control    -(i/hbar)[Hc, rho], Hc = -eps * mu on both off-diagonal blocks
//
// The free functions below evaluate each generator directly from the dense
// blocks and are the reference semantics. LiouvilleGenerator is the fused
// version used inside the propagation loop.

#pragma once

#include <Eigen/Dense>

#include "qtrack/block_density.hpp"
#include "qtrack/model.hpp"

namespace qtrack {

struct LindbladSpec {
    double gamma_q{0.003};  ///< quench rate, 1/fs

    void validate() const;
};

struct GeneratorFlags {
    bool dissipation{false};
    bool control{false};
};

BlockDensity coherent_derivative(const HamiltonianBlocks& h, const BlockDensity& rho);

/// d(rho_e) = -g rho_e, d(rho_g) = +g rho_e, d(rho_eg) = -g rho_eg/2, d(rho_ge) = -g rho_ge/2.
BlockDensity quench_dissipator(const LindbladSpec& spec, const BlockDensity& rho);

BlockDensity control_derivative(double epsilon, const Eigen::MatrixXd& mu_matrix,
                                const BlockDensity& rho);

/// Sum of the enabled generators. With both flags off this is coherent_derivative.
BlockDensity total_derivative(const HamiltonianBlocks& h, const LindbladSpec& spec, double epsilon,
                              const BlockDensity& rho, GeneratorFlags flags);

/// Fused evaluation of total_derivative for Hermitian-paired states.
///
/// Uses the structure T + diag(V) of the diagonal blocks and the diagonal
/// coupling/dipole: the kinetic commutators cost one real GEMM of T against the
/// packed real and imaginary parts of (rho_e, rho_g, rho_eg) plus one for
/// rho_eg * T. Everything else is elementwise. Holds scratch buffers, so one
/// instance per thread.
class LiouvilleGenerator {
public:
    LiouvilleGenerator(const HamiltonianBlocks& h, const LindbladSpec& spec);

    void apply(const BlockDensity& rho, double epsilon, GeneratorFlags flags,
               BlockDensity& out);

    /// Bound on |Im lambda| over the spectrum of the generator at field epsilon (1/fs).
    double spectral_radius(double epsilon) const;
    double gamma() const { return gamma_; }
    Eigen::Index size() const { return n_; }

private:
    Eigen::Index n_;
    Eigen::MatrixXd kinetic_;
    Eigen::ArrayXd v_e_, v_g_, coupling_, dipole_;
    double gamma_;
    double energy_span_;  ///< E_max - E_min of the field-free 2N x 2N Hamiltonian
    double dipole_max_;

    Eigen::MatrixXd packed_;    // N x 6N: Re/Im of e, g, eg
    Eigen::MatrixXd left_;      // T * packed_
    Eigen::MatrixXd eg_packed_; // 2N x N: Re(eg) over Im(eg)
    Eigen::MatrixXd right_;     // eg_packed_ * T
};

}  // namespace qtrack
