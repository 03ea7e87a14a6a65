#include "qtrack/control.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qtrack/dynamics.hpp"
#include "qtrack/observables.hpp"
#include "qtrack/units.hpp"

namespace qtrack {

namespace {

constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

void check_pair(const BlockDensity& a, const BlockDensity& b, Eigen::Index mu_size) {
    if (a.size() != b.size() || a.size() != mu_size) {
        throw std::invalid_argument("tracking field: states and dipole live on different grids");
    }
}

bool is_diagonal(const Eigen::MatrixXd& m) {
    return (m - Eigen::MatrixXd(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

// The field is a small difference of O(1) traces near convergence, so the
// traces are accumulated in extended precision.
using xcplx = std::complex<long double>;
using XMatrix = Eigen::Matrix<xcplx, Eigen::Dynamic, Eigen::Dynamic>;

// Tr(A diag(m) B) = sum_ij A_ij m_j B_ji
xcplx trace_amb(const Eigen::MatrixXcd& a, const Eigen::VectorXd& m, const Eigen::MatrixXcd& b) {
    xcplx sum = 0.0L;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        xcplx col = 0.0L;
        for (Eigen::Index i = 0; i < a.rows(); ++i) col += xcplx(a(i, j)) * xcplx(b(j, i));
        sum += static_cast<long double>(m(j)) * col;
    }
    return sum;
}

xcplx trace_amb(const Eigen::MatrixXcd& a, const Eigen::MatrixXd& m, const Eigen::MatrixXcd& b) {
    const XMatrix am = a.cast<xcplx>() * m.cast<xcplx>();
    return am.cwiseProduct(b.transpose().cast<xcplx>()).sum();
}

template <typename Dipole>
double block_field(const BlockDensity& c, const BlockDensity& t, const Dipole& mu, double k) {
    const xcplx sum = trace_amb(c.ge, mu, t.g) + trace_amb(c.e, mu, t.ge) -
                      trace_amb(t.ge, mu, c.g) - trace_amb(t.e, mu, c.ge) -
                      trace_amb(t.g, mu, c.eg) + trace_amb(c.g, mu, t.eg) -
                      trace_amb(t.eg, mu, c.e) + trace_amb(c.eg, mu, t.e);
    return k * static_cast<double>(sum.imag());
}

}  // namespace

double fwhm_to_sigma(double fwhm) { return fwhm / kFwhmPerSigma; }

double PumpPulse::fwhm() const { return sigma_l * kFwhmPerSigma; }

void PumpPulse::set_fwhm(double fwhm) { sigma_l = fwhm_to_sigma(fwhm); }

void PumpPulse::validate() const {
    if (!(sigma_l > 0.0)) throw std::invalid_argument("pump: width must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("pump: t_end must be non-negative");
}

double pump_envelope(double t, const PumpPulse& pulse) {
    const double x = (t - pulse.t_max) / pulse.sigma_l;
    return std::exp(-0.5 * x * x);
}

double pump_field(double t, const PumpPulse& pulse) {
    return pulse.epsilon0 * pump_envelope(t, pulse) * std::cos(pulse.carrier / kHbar * t);
}

void ControlSchedule::validate() const {
    if (k_value && !(*k_value >= 0.0)) {
        throw std::invalid_argument("control: k_value must be non-negative");
    }
    if (!(loop_rate > 0.0)) throw std::invalid_argument("control: loop_rate must be positive");
    double last_end = -std::numeric_limits<double>::infinity();
    for (const auto& [start, end] : off_windows) {
        if (!(end >= start)) {
            throw std::invalid_argument("control: off window ends before it starts");
        }
        if (start < last_end) {
            throw std::invalid_argument("control: off windows must be disjoint and ordered");
        }
        last_end = end;
    }
}

double tracking_field_general(const BlockDensity& rho_c, const BlockDensity& rho_tar,
                              const Eigen::MatrixXd& mu_matrix, double k_value) {
    check_pair(rho_c, rho_tar, mu_matrix.rows());
    const Eigen::Index n = rho_c.size();
    XMatrix m = XMatrix::Zero(2 * n, 2 * n);
    m.topRightCorner(n, n) = -mu_matrix.cast<xcplx>();
    m.bottomLeftCorner(n, n) = -mu_matrix.transpose().cast<xcplx>();
    const XMatrix c = rho_c.full().cast<xcplx>();
    const XMatrix t = rho_tar.full().cast<xcplx>();
    const xcplx xl = (c * m * t - t * m * c).trace();
    const cplx x{static_cast<double>(xl.real()), static_cast<double>(xl.imag())};
    const cplx eps = cplx{0.0, -k_value} * std::conj(x);
    if (std::abs(eps.imag()) > 1e-12 * std::max(1.0, k_value)) {
        throw std::domain_error("tracking_field_general: field has an imaginary part; "
                                "states are not Hermitian");
    }
    return eps.real();
}

double tracking_field_blocks(const BlockDensity& rho_c, const BlockDensity& rho_tar,
                             const Eigen::MatrixXd& mu_matrix, double k_value) {
    check_pair(rho_c, rho_tar, mu_matrix.rows());
    if (is_diagonal(mu_matrix)) {
        const Eigen::VectorXd d = mu_matrix.diagonal();
        return block_field(rho_c, rho_tar, d, k_value);
    }
    return block_field(rho_c, rho_tar, mu_matrix, k_value);
}

double tracking_field_blocks(const BlockDensity& rho_c, const BlockDensity& rho_tar,
                             const Eigen::VectorXd& dipole, double k_value) {
    check_pair(rho_c, rho_tar, dipole.size());
    return block_field(rho_c, rho_tar, dipole, k_value);
}

double gated_field(double t, double raw_field, const ControlSchedule& schedule) {
    if (!schedule.enabled) return 0.0;
    for (const auto& [start, end] : schedule.off_windows) {
        if (t >= start && t < end) return 0.0;
    }
    return raw_field;
}

double control_overlap_rate(const BlockDensity& rho_c, const BlockDensity& rho_tar,
                            const Eigen::MatrixXd& mu_matrix, double epsilon) {
    const BlockDensity d = control_derivative(epsilon, mu_matrix, rho_c);
    return trace_product(d, rho_tar).real();
}

double control_stiffness(const BlockDensity& rho, const Eigen::MatrixXd& mu_matrix) {
    // control_derivative at unit field is -(i/hbar)[M, rho].
    const BlockDensity d = control_derivative(1.0, mu_matrix, rho);
    const double norm2 =
        d.e.squaredNorm() + d.g.squaredNorm() + d.eg.squaredNorm() + d.ge.squaredNorm();
    return norm2 * kHbar * kHbar;
}

double calibrate_gain(const BlockDensity& rho_tar, const Eigen::MatrixXd& mu_matrix,
                      double loop_rate) {
    if (!(loop_rate > 0.0)) throw std::invalid_argument("calibrate_gain: loop_rate must be positive");
    const double stiffness = control_stiffness(rho_tar, mu_matrix);
    if (!(stiffness > 0.0)) {
        throw std::domain_error("calibrate_gain: target state does not couple to the dipole");
    }
    return loop_rate * kHbar / stiffness;
}

}  // namespace qtrack
