// Shared fixtures for the unit tests.

#pragma once

#include <Eigen/Dense>

#include <random>

#include "qtrack/block_density.hpp"
#include "qtrack/model.hpp"

namespace qtrack::testing {

/// Random density operator on 2n levels: A A^dagger / Tr.
inline BlockDensity random_density(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = {g(rng), g(rng)};
    }
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace();
    return BlockDensity::from_full(rho);
}

/// Random pure state on 2n levels.
inline BlockDensity random_pure(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd e(n), gr(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        e(i) = {g(rng), g(rng)};
        gr(i) = {g(rng), g(rng)};
    }
    const double norm = std::sqrt(e.squaredNorm() + gr.squaredNorm());
    return BlockDensity::pure(e / norm, gr / norm);
}

/// Single-grid-point two-level system: H_e = e_e, H_g = e_g, coupling v, dipole mu.
inline HamiltonianBlocks two_level(double e_e, double e_g, double v, double mu = 1.0) {
    HamiltonianBlocks h;
    h.kinetic = Eigen::MatrixXd::Zero(1, 1);
    h.v_e = Eigen::VectorXd::Constant(1, e_e);
    h.v_g = Eigen::VectorXd::Constant(1, e_g);
    h.coupling = Eigen::VectorXd::Constant(1, v);
    h.dipole = Eigen::VectorXd::Constant(1, mu);
    h.h_e = Eigen::MatrixXd::Constant(1, 1, e_e);
    h.h_g = Eigen::MatrixXd::Constant(1, 1, e_g);
    h.v_eg = Eigen::MatrixXd::Constant(1, 1, v);
    h.mu_matrix = Eigen::MatrixXd::Constant(1, 1, mu);
    return h;
}

/// Default model on a coarser grid, for tests that propagate.
inline HamiltonianBlocks small_model(int n_points = 32) {
    GridSpec spec;
    spec.n_points = n_points;
    return build_hamiltonian(VibronicModel{}, build_grid(spec));
}

}  // namespace qtrack::testing
