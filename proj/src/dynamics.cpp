#include "qtrack/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "qtrack/units.hpp"

namespace qtrack {

namespace {

constexpr cplx kMinusIOverHbar{0.0, -1.0 / kHbar};

void check_size(const HamiltonianBlocks& h, const BlockDensity& rho) {
    if (h.size() != rho.size()) {
        throw std::invalid_argument("dynamics: Hamiltonian and density sizes differ");
    }
}

}  // namespace

void LindbladSpec::validate() const {
    if (!(gamma_q >= 0.0)) {
        throw std::invalid_argument("lindblad: gamma must be non-negative");
    }
}

BlockDensity coherent_derivative(const HamiltonianBlocks& h, const BlockDensity& rho) {
    check_size(h, rho);
    const Eigen::MatrixXcd he = h.h_e.cast<cplx>();
    const Eigen::MatrixXcd hg = h.h_g.cast<cplx>();
    const Eigen::MatrixXcd v = h.v_eg.cast<cplx>();
    const Eigen::MatrixXcd vd = v.adjoint();

    BlockDensity d;
    d.e = he * rho.e + v * rho.ge - rho.e * he - rho.eg * vd;
    d.eg = he * rho.eg + v * rho.g - rho.e * v - rho.eg * hg;
    d.ge = vd * rho.e + hg * rho.ge - rho.ge * he - rho.g * vd;
    d.g = vd * rho.eg + hg * rho.g - rho.ge * v - rho.g * hg;
    d *= kMinusIOverHbar;
    return d;
}

BlockDensity quench_dissipator(const LindbladSpec& spec, const BlockDensity& rho) {
    spec.validate();
    const double gamma = spec.gamma_q;
    BlockDensity d;
    d.e = -gamma * rho.e;
    d.g = gamma * rho.e;
    d.eg = -0.5 * gamma * rho.eg;
    d.ge = -0.5 * gamma * rho.ge;
    return d;
}

BlockDensity control_derivative(double epsilon, const Eigen::MatrixXd& mu_matrix,
                                const BlockDensity& rho) {
    if (mu_matrix.rows() != rho.size()) {
        throw std::invalid_argument("control_derivative: dipole and density sizes differ");
    }
    // Off-diagonal block of Hc.
    const Eigen::MatrixXcd c = (-epsilon * mu_matrix).cast<cplx>();
    BlockDensity d;
    d.e = c * rho.ge - rho.eg * c;
    d.eg = c * rho.g - rho.e * c;
    d.ge = c * rho.e - rho.g * c;
    d.g = c * rho.eg - rho.ge * c;
    d *= kMinusIOverHbar;
    return d;
}

BlockDensity total_derivative(const HamiltonianBlocks& h, const LindbladSpec& spec, double epsilon,
                              const BlockDensity& rho, GeneratorFlags flags) {
    BlockDensity d = coherent_derivative(h, rho);
    if (flags.dissipation) d += quench_dissipator(spec, rho);
    if (flags.control) d += control_derivative(epsilon, h.mu_matrix, rho);
    return d;
}

LiouvilleGenerator::LiouvilleGenerator(const HamiltonianBlocks& h, const LindbladSpec& spec)
    : n_(h.size()),
      kinetic_(h.kinetic),
      v_e_(h.v_e.array()),
      v_g_(h.v_g.array()),
      coupling_(h.coupling.array()),
      dipole_(h.dipole.array()),
      gamma_(spec.gamma_q),
      packed_(n_, 6 * n_),
      left_(n_, 6 * n_),
      eg_packed_(2 * n_, n_),
      right_(2 * n_, n_) {
    spec.validate();
    Eigen::MatrixXd full(2 * n_, 2 * n_);
    full.topLeftCorner(n_, n_) = h.h_e;
    full.bottomRightCorner(n_, n_) = h.h_g;
    full.topRightCorner(n_, n_) = h.v_eg;
    full.bottomLeftCorner(n_, n_) = h.v_eg.transpose();
    const Eigen::VectorXd evals =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(full, Eigen::EigenvaluesOnly).eigenvalues();
    energy_span_ = evals.maxCoeff() - evals.minCoeff();
    dipole_max_ = dipole_.abs().maxCoeff();
}

double LiouvilleGenerator::spectral_radius(double epsilon) const {
    return (energy_span_ + 2.0 * std::abs(epsilon) * dipole_max_) / kHbar;
}

void LiouvilleGenerator::apply(const BlockDensity& rho, double epsilon, GeneratorFlags flags,
                               BlockDensity& out) {
    const Eigen::Index n = n_;
    if (rho.size() != n) {
        throw std::invalid_argument("LiouvilleGenerator: density size mismatch");
    }
    packed_.middleCols(0, n) = rho.e.real();
    packed_.middleCols(n, n) = rho.e.imag();
    packed_.middleCols(2 * n, n) = rho.g.real();
    packed_.middleCols(3 * n, n) = rho.g.imag();
    packed_.middleCols(4 * n, n) = rho.eg.real();
    packed_.middleCols(5 * n, n) = rho.eg.imag();
    left_.noalias() = kinetic_ * packed_;
    eg_packed_.topRows(n) = rho.eg.real();
    eg_packed_.bottomRows(n) = rho.eg.imag();
    right_.noalias() = eg_packed_ * kinetic_;

    const double field = flags.control ? epsilon : 0.0;
    const Eigen::ArrayXd w = coupling_ - field * dipole_;
    const double gamma = flags.dissipation ? gamma_ : 0.0;

    out.e.resize(n, n);
    out.g.resize(n, n);
    out.eg.resize(n, n);
    out.ge.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const cplx te_ij{left_(i, j), left_(i, n + j)};
            const cplx te_ji{left_(j, i), left_(j, n + i)};
            const cplx tg_ij{left_(i, 2 * n + j), left_(i, 3 * n + j)};
            const cplx tg_ji{left_(j, 2 * n + i), left_(j, 3 * n + i)};
            const cplx teg_ij{left_(i, 4 * n + j), left_(i, 5 * n + j)};
            const cplx egt_ij{right_(i, j), right_(n + i, j)};

            const cplx re = rho.e(i, j);
            const cplx rg = rho.g(i, j);
            const cplx reg = rho.eg(i, j);
            const cplx rge = rho.ge(i, j);

            const cplx ce = (te_ij - std::conj(te_ji)) + (v_e_[i] - v_e_[j]) * re +
                            w[i] * rge - reg * w[j];
            const cplx cg = (tg_ij - std::conj(tg_ji)) + (v_g_[i] - v_g_[j]) * rg +
                            w[i] * reg - rge * w[j];
            const cplx ceg = (teg_ij - egt_ij) + (v_e_[i] - v_g_[j]) * reg + w[i] * rg -
                             re * w[j];

            out.e(i, j) = kMinusIOverHbar * ce - gamma * re;
            out.g(i, j) = kMinusIOverHbar * cg + gamma * re;
            out.eg(i, j) = kMinusIOverHbar * ceg - 0.5 * gamma * reg;
        }
    }
    out.ge = out.eg.adjoint();
}

}  // namespace qtrack
