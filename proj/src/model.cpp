#include "qtrack/model.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft_lock.hpp"

namespace qtrack {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double relative_asymmetry(const Eigen::MatrixXd& m) {
    const double scale = m.norm();
    if (scale == 0.0) return 0.0;
    return (m - m.transpose()).norm() / scale;
}

}  // namespace

void GridSpec::validate() const {
    if (n_points < 8 || !is_power_of_two(n_points)) {
        throw std::invalid_argument("grid: n_points must be a power of two >= 8, got " +
                                    std::to_string(n_points));
    }
    if (!(q_max > q_min)) {
        throw std::invalid_argument("grid: q_max must exceed q_min");
    }
}

Grid build_grid(const GridSpec& spec) {
    spec.validate();
    Grid grid;
    grid.spec = spec;
    const int n = spec.n_points;
    grid.dq = spec.dq();
    grid.dp = 2.0 * std::numbers::pi / (n * grid.dq);
    grid.q.resize(n);
    grid.p.resize(n);
    for (int i = 0; i < n; ++i) {
        grid.q[i] = spec.q_min + i * grid.dq;
        const int k = i < n / 2 ? i : i - n;
        grid.p[i] = k * grid.dp;
    }
    return grid;
}

void VibronicModel::validate() const {
    if (!(omega_g > 0.0) || !(omega_e > 0.0) || !(omega_ref > 0.0)) {
        throw std::invalid_argument("model: vibrational frequencies must be positive");
    }
}

Potentials build_potentials(const VibronicModel& model, const Grid& grid) {
    Potentials v;
    v.ground = (-model.delta +
                0.5 * model.omega_g * (grid.q.array() - model.q_g).square()).matrix();
    v.excited = (model.delta +
                 0.5 * model.omega_e * (grid.q.array() - model.q_e).square()).matrix();
    return v;
}

Eigen::MatrixXd build_kinetic(const Grid& grid, double omega_ref) {
    const int n = static_cast<int>(grid.size());
    // Columns of the identity, transformed to momentum space, scaled by the
    // kinetic symbol and transformed back.
    Eigen::MatrixXcd work = Eigen::MatrixXcd::Identity(n, n);
    auto* data = reinterpret_cast<fftw_complex*>(work.data());
    std::unique_lock lock(detail::fftw_planner_mutex());
    fftw_plan forward = fftw_plan_many_dft(1, &n, n, data, nullptr, 1, n, data, nullptr, 1, n,
                                           FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan backward = fftw_plan_many_dft(1, &n, n, data, nullptr, 1, n, data, nullptr, 1, n,
                                            FFTW_BACKWARD, FFTW_ESTIMATE);
    lock.unlock();
    fftw_execute(forward);
    const Eigen::ArrayXd symbol = 0.5 * omega_ref * grid.p.array().square() / n;
    for (int j = 0; j < n; ++j) work.col(j).array() *= symbol;
    fftw_execute(backward);
    lock.lock();
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);

    Eigen::MatrixXd t = work.real();
    return 0.5 * (t + t.transpose());
}

HamiltonianBlocks build_hamiltonian(const VibronicModel& model, const Grid& grid) {
    model.validate();
    HamiltonianBlocks h;
    const Potentials v = build_potentials(model, grid);
    h.kinetic = build_kinetic(grid, model.omega_ref);
    h.v_g = v.ground;
    h.v_e = v.excited;
    h.coupling = (model.v_ge + model.v_ge_slope * grid.q.array()).matrix();
    h.dipole = (model.mu + model.mu_slope * grid.q.array()).matrix();

    h.h_g = h.kinetic;
    h.h_g.diagonal() += h.v_g;
    h.h_e = h.kinetic;
    h.h_e.diagonal() += h.v_e;
    h.v_eg = h.coupling.asDiagonal();
    h.mu_matrix = h.dipole.asDiagonal();
    return h;
}

double vertical_gap(const VibronicModel& model) {
    const double ve = model.delta + 0.5 * model.omega_e * model.q_e * model.q_e;
    const double vg = -model.delta + 0.5 * model.omega_g * model.q_g * model.q_g;
    return ve - vg;
}

GroundState ground_vibronic_state(const Eigen::MatrixXd& h_g) {
    if (h_g.rows() != h_g.cols() || h_g.rows() == 0) {
        throw std::invalid_argument("ground_vibronic_state: h_g must be square and non-empty");
    }
    if (relative_asymmetry(h_g) > 1e-12) {
        throw std::invalid_argument("ground_vibronic_state: h_g is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h_g);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("ground_vibronic_state: eigensolver failed");
    }
    GroundState gs;
    gs.energy = solver.eigenvalues()[0];
    gs.phi = solver.eigenvectors().col(0).normalized();
    // Fix the sign so the largest lobe is positive.
    Eigen::Index imax = 0;
    gs.phi.cwiseAbs().maxCoeff(&imax);
    if (gs.phi[imax] < 0.0) gs.phi = -gs.phi;
    gs.residual = (h_g * gs.phi - gs.energy * gs.phi).norm();

    const Eigen::Index n = h_g.rows();
    gs.rho = BlockDensity::pure(Eigen::VectorXcd::Zero(n), gs.phi.cast<cplx>());
    return gs;
}

}  // namespace qtrack
