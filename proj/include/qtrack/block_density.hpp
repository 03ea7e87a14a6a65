// block_density.hpp: Two-surface density operator stored as four N x N blocks.
//
//   rho = | rho_e   rho_eg |
//         | rho_ge  rho_g  |
//
// Each block lives in the coordinate representation of the nuclear grid.

#pragma once

#include <Eigen/Dense>

#include <complex>

namespace qtrack {

using cplx = std::complex<double>;

struct BlockDensity {
    Eigen::MatrixXcd e;
    Eigen::MatrixXcd g;
    Eigen::MatrixXcd eg;
    Eigen::MatrixXcd ge;

    static BlockDensity zero(Eigen::Index n);
    /// Assemble from a 2N x 2N operator ordered (e, g).
    static BlockDensity from_full(const Eigen::MatrixXcd& full);
    /// Pure state |psi><psi| from its excited and ground components.
    static BlockDensity pure(const Eigen::VectorXcd& psi_e, const Eigen::VectorXcd& psi_g);

    Eigen::Index size() const { return e.rows(); }
    Eigen::MatrixXcd full() const;

    cplx trace() const { return e.trace() + g.trace(); }
    /// Largest absolute entry over all four blocks.
    double max_abs() const;

    /// rho <- (rho + rho^dagger)/2 in block form.
    void hermitize();

    BlockDensity& operator+=(const BlockDensity& other);
    BlockDensity& operator-=(const BlockDensity& other);
    BlockDensity& operator*=(cplx s);
    /// this += s * other, without temporaries.
    void axpy(cplx s, const BlockDensity& other);
};

BlockDensity operator+(BlockDensity a, const BlockDensity& b);
BlockDensity operator-(BlockDensity a, const BlockDensity& b);
BlockDensity operator*(cplx s, BlockDensity a);

/// Blockwise max |a - b|.
double max_block_difference(const BlockDensity& a, const BlockDensity& b);

/// Worst violation of the Hermitian pairing: rho_e, rho_g Hermitian and
/// rho_ge = rho_eg^dagger. Absolute, max entry.
double hermiticity_defect(const BlockDensity& rho);

}  // namespace qtrack
