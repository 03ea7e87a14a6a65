#include "qtrack/observables.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft_lock.hpp"
#include "qtrack/units.hpp"

namespace qtrack {

namespace {

constexpr double kResidueLimit = 1e-12;

cplx trace_of_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return a.transpose().cwiseProduct(b).sum();
}

double checked_real(cplx value, const char* what) {
    if (std::abs(value.imag()) > kResidueLimit * std::max(1.0, std::abs(value.real()))) {
        throw std::domain_error(std::string(what) + ": imaginary residue " +
                                std::to_string(value.imag()) + " exceeds 1e-12");
    }
    return value.real();
}

std::vector<double> window_weights(std::size_t n, Window window) {
    std::vector<double> w(n, 1.0);
    if (window == Window::hann && n > 1) {
        for (std::size_t i = 0; i < n; ++i) {
            const double s = std::sin(std::numbers::pi * static_cast<double>(i) /
                                      static_cast<double>(n - 1));
            w[i] = s * s;
        }
    }
    return w;
}

}  // namespace

cplx trace_product(const BlockDensity& a, const BlockDensity& b) {
    if (a.size() != b.size()) throw std::invalid_argument("trace_product: grid mismatch");
    return trace_of_product(a.e, b.e) + trace_of_product(a.eg, b.ge) +
           trace_of_product(a.ge, b.eg) + trace_of_product(a.g, b.g);
}

double excited_population(const BlockDensity& rho) {
    return checked_real(rho.e.trace(), "excited_population");
}

double ground_population(const BlockDensity& rho) {
    return checked_real(rho.g.trace(), "ground_population");
}

double purity(const BlockDensity& rho) {
    return rho.e.squaredNorm() + rho.g.squaredNorm() +
           2.0 * trace_of_product(rho.eg, rho.ge).real();
}

double overlap(const BlockDensity& rho_c, const BlockDensity& rho_tar) {
    return checked_real(trace_product(rho_c, rho_tar), "overlap");
}

double normalized_overlap(const BlockDensity& rho_c, const BlockDensity& rho_tar) {
    return overlap(rho_c, rho_tar) / std::sqrt(purity(rho_c) * purity(rho_tar));
}

double energy(const HamiltonianBlocks& h, const BlockDensity& rho) {
    if (h.size() != rho.size()) throw std::invalid_argument("energy: grid mismatch");
    const cplx value = trace_of_product(h.h_e.cast<cplx>(), rho.e) +
                       trace_of_product(h.v_eg.cast<cplx>(), rho.ge) +
                       trace_of_product(h.v_eg.transpose().cast<cplx>(), rho.eg) +
                       trace_of_product(h.h_g.cast<cplx>(), rho.g);
    return value.real();
}

double min_eigenvalue(const BlockDensity& rho) {
    Eigen::MatrixXcd full = rho.full();
    full = (0.5 * (full + full.adjoint())).eval();
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(full, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
}

const char* to_string(Window window) {
    return window == Window::hann ? "hann" : "rectangular";
}

Window window_from_string(const std::string& name) {
    if (name == "hann") return Window::hann;
    if (name == "rectangular" || name == "none") return Window::rectangular;
    throw std::invalid_argument("unknown spectrum window '" + name + "'");
}

std::pair<double, double> Spectrum::peak() const {
    if (magnitude.size() < 2) return {0.0, 0.0};
    const auto it = std::max_element(magnitude.begin() + 1, magnitude.end());
    const auto k = static_cast<std::size_t>(it - magnitude.begin());
    return {energy_ev[k], *it};
}

Spectrum field_spectrum(const std::vector<double>& series, double dt, Window window,
                        int zero_pad) {
    if (series.size() < 16) {
        throw std::invalid_argument("field_spectrum: need at least 16 samples");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("field_spectrum: dt must be positive");
    if (zero_pad < 1) throw std::invalid_argument("field_spectrum: zero_pad must be >= 1");

    const std::size_t n = series.size();
    const std::size_t m = n * static_cast<std::size_t>(zero_pad);
    const std::vector<double> w = window_weights(n, window);

    std::vector<double> in(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) in[i] = w[i] * series[i];
    std::vector<cplx> out(m / 2 + 1);

    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    Spectrum s;
    s.window = window;
    s.zero_pad = zero_pad;
    s.padded_length = m;
    s.dt = dt;
    s.energy_ev.resize(out.size());
    s.magnitude.resize(out.size());
    const double de = kHbar * 2.0 * std::numbers::pi / (static_cast<double>(m) * dt);
    for (std::size_t k = 0; k < out.size(); ++k) {
        s.energy_ev[k] = de * static_cast<double>(k);
        s.magnitude[k] = dt * std::abs(out[k]);
    }
    return s;
}

double windowed_energy(const std::vector<double>& series, double dt, Window window) {
    const std::vector<double> w = window_weights(series.size(), window);
    double sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) sum += std::pow(w[i] * series[i], 2);
    return sum * dt;
}

double spectral_energy(const Spectrum& spectrum) {
    // Parseval for a real series of even padded length M:
    //   sum |x|^2 dt = (1/(M dt)) [ |X_0|^2 + |X_{M/2}|^2 + 2 sum_{0<k<M/2} |X_k|^2 ] dt^2
    const std::size_t m = spectrum.padded_length;
    const std::size_t last = spectrum.magnitude.size() - 1;
    double sum = 0.0;
    for (std::size_t k = 0; k <= last; ++k) {
        const bool single = k == 0 || (m % 2 == 0 && k == last);
        sum += (single ? 1.0 : 2.0) * spectrum.magnitude[k] * spectrum.magnitude[k];
    }
    return sum / (static_cast<double>(m) * spectrum.dt);
}

}  // namespace qtrack
