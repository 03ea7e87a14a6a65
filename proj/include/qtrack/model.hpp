// model.hpp: Grid, diabatic two-surface model and the initial vibronic state.

#pragma once

#include <Eigen/Dense>

#include "qtrack/block_density.hpp"

namespace qtrack {

/// 1-D discretization of the dimensionless normal coordinate Q.
struct GridSpec {
    int n_points{64};
    double q_min{-8.0};
    double q_max{8.0};

    double dq() const { return (q_max - q_min) / n_points; }
    /// Throws std::invalid_argument if the grid is unusable.
    void validate() const;
};

struct Grid {
    GridSpec spec;
    Eigen::VectorXd q;  ///< q_i = q_min + i*dq
    Eigen::VectorXd p;  ///< DFT ordering: 0, dp, ..., then negative momenta
    double dq{0.0};
    double dp{0.0};

    Eigen::Index size() const { return q.size(); }
};

Grid build_grid(const GridSpec& spec);

/// Two diabatic harmonic surfaces with a constant (optionally linear) coupling.
/// Defaults reproduce the reference model: w_g = w_e = 0.07 eV, Delta = 0.7 eV,
/// V_ge = 0.05 eV, Q_g = 0, Q_e = -0.1, mu = 1.
struct VibronicModel {
    double omega_g{0.07};
    double omega_e{0.07};
    double delta{0.7};      ///< half of the adiabatic gap
    double q_g{0.0};
    double q_e{-0.1};
    double v_ge{0.05};
    double v_ge_slope{0.0}; ///< coupling profile V(Q) = v_ge + v_ge_slope*Q
    double mu{1.0};
    double mu_slope{0.0};   ///< dipole profile mu(Q) = mu + mu_slope*Q
    double omega_ref{0.07}; ///< kinetic prefactor, T = (omega_ref/2) P^2

    void validate() const;
};

struct Potentials {
    Eigen::VectorXd ground;
    Eigen::VectorXd excited;
};

/// V_g = -Delta + (w_g/2)(Q-Q_g)^2, V_e = Delta + (w_e/2)(Q-Q_e)^2.
Potentials build_potentials(const VibronicModel& model, const Grid& grid);

/// Dense Fourier-grid kinetic matrix (omega_ref/2) P^2. Real symmetric.
Eigen::MatrixXd build_kinetic(const Grid& grid, double omega_ref);

/// Hamiltonian blocks in the coordinate representation. The coupling and the
/// dipole are diagonal in Q; their diagonals are kept next to the dense
/// matrices so the propagator can use the structure.
struct HamiltonianBlocks {
    Eigen::MatrixXd kinetic;
    Eigen::VectorXd v_g;
    Eigen::VectorXd v_e;
    Eigen::VectorXd coupling;  ///< diagonal of v_eg
    Eigen::VectorXd dipole;    ///< diagonal of mu_matrix

    Eigen::MatrixXd h_g;
    Eigen::MatrixXd h_e;
    Eigen::MatrixXd v_eg;
    Eigen::MatrixXd mu_matrix;

    Eigen::Index size() const { return kinetic.rows(); }
};

HamiltonianBlocks build_hamiltonian(const VibronicModel& model, const Grid& grid);

/// Vertical excitation energy V_e - V_g at Q = 0, used to tune the pump.
double vertical_gap(const VibronicModel& model);

struct GroundState {
    BlockDensity rho;
    Eigen::VectorXd phi;  ///< unit-norm lowest eigenvector of h_g
    double energy{0.0};
    double residual{0.0}; ///< ||h_g phi - E phi||
};

/// Lowest eigenvector of h_g placed in the ground block. Rejects non-symmetric input.
GroundState ground_vibronic_state(const Eigen::MatrixXd& h_g);

}  // namespace qtrack
