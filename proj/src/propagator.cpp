#include "qtrack/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qtrack/observables.hpp"

namespace qtrack {

namespace {

constexpr double kTraceDriftLimit = 1e-6;
constexpr int kMaxChebyshevOrder = 4096;

double frobenius_squared(const BlockDensity& rho) {
    return rho.e.squaredNorm() + rho.g.squaredNorm() + rho.eg.squaredNorm() +
           rho.ge.squaredNorm();
}

void check_step(cplx tr0, const BlockDensity& after, double dt) {
    const cplx tr1 = after.trace();
    const double norm2 = frobenius_squared(after);
    if (!std::isfinite(norm2) || !std::isfinite(tr1.real()) || !std::isfinite(tr1.imag())) {
        throw StepError("step produced non-finite entries (dt = " + std::to_string(dt) + " fs)");
    }
    if (std::abs(tr1 - tr0) > kTraceDriftLimit) {
        std::ostringstream msg;
        msg << "trace drifted by " << std::abs(tr1 - tr0) << " in one step (dt = " << dt
            << " fs); reduce dt";
        throw StepError(msg.str());
    }
    // Tr(rho^2) <= (Tr rho)^2 for any positive operator; runaway growth of an
    // unstable step breaks it long before the trace moves.
    const double bound = std::norm(tr1) * (1.0 + kTraceDriftLimit) + kTraceDriftLimit;
    if (norm2 > bound) {
        std::ostringstream msg;
        msg << "state norm grew beyond the positive-state bound (Tr rho^2 = " << norm2
            << ", dt = " << dt << " fs); reduce dt";
        throw StepError(msg.str());
    }
}

double order_from_ratio(double ratio, double a, double b, double r) {
    // (a^p - r^p) / (b^p - r^p) is increasing in p for a > b > r > 0.
    auto f = [&](double p) {
        return (std::pow(a, p) - std::pow(r, p)) / (std::pow(b, p) - std::pow(r, p)) - ratio;
    };
    double lo = 1e-3;
    double hi = 30.0;
    if (f(lo) > 0.0 || f(hi) < 0.0) return std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::rk4: return "rk4";
        case Scheme::chebyshev: return "chebyshev";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "rk4") return Scheme::rk4;
    if (name == "chebyshev") return Scheme::chebyshev;
    throw std::invalid_argument("unknown propagation scheme '" + name + "'");
}

void PropagatorConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("propagator: dt must be positive");
    if (!(tolerance > 0.0)) throw std::invalid_argument("propagator: tolerance must be positive");
}

Derivative frozen(LiouvilleGenerator& generator, double epsilon, GeneratorFlags flags) {
    Derivative d;
    d.apply = [&generator, epsilon, flags](const BlockDensity& rho, BlockDensity& out) {
        generator.apply(rho, epsilon, flags, out);
    };
    d.spectral_radius = generator.spectral_radius(flags.control ? epsilon : 0.0);
    d.max_decay = flags.dissipation ? generator.gamma() : 0.0;
    return d;
}

Stepper::Stepper(PropagatorConfig config) : config_(config) { config_.validate(); }

void Stepper::step(BlockDensity& rho, const Derivative& f, double dt) {
    const cplx tr0 = rho.trace();
    switch (config_.scheme) {
        case Scheme::rk4: rk4(rho, f, dt); break;
        case Scheme::chebyshev: chebyshev(rho, f, dt); break;
    }
    if (config_.symmetrize) rho.hermitize();
    check_step(tr0, rho, dt);
}

void Stepper::rk4(BlockDensity& rho, const Derivative& f, double dt) {
    last_order_ = 0;
    f.apply(rho, k1_);
    stage_ = rho;
    stage_.axpy(0.5 * dt, k1_);
    f.apply(stage_, k2_);
    stage_ = rho;
    stage_.axpy(0.5 * dt, k2_);
    f.apply(stage_, k3_);
    stage_ = rho;
    stage_.axpy(dt, k3_);
    f.apply(stage_, k4_);
    rho.axpy(dt / 6.0, k1_);
    rho.axpy(dt / 3.0, k2_);
    rho.axpy(dt / 3.0, k3_);
    rho.axpy(dt / 6.0, k4_);
}

void Stepper::chebyshev(BlockDensity& rho, const Derivative& f, double dt) {
    // exp(L dt) = exp(c dt) * sum_k (2 - delta_k0) i^k J_k(R dt) T_k(Y),
    // with L = c + i R Y, c = -max_decay/2 and R covering the spread of Im(spec L)
    // plus the decay band. The terms are carried as phi_k = i^k T_k(Y) rho, which
    // obey phi_{k+1} = 2 (L - c) phi_k / R + phi_{k-1} and stay Hermitian, as the
    // fused generator requires.
    const double shift = -0.5 * f.max_decay;
    const double radius = f.spectral_radius + 0.5 * f.max_decay;
    const double tau = radius * dt;
    if (radius <= 0.0) {
        last_order_ = 0;
        return;
    }
    auto apply_scaled = [&](const BlockDensity& in, BlockDensity& out) {
        f.apply(in, out);
        out.axpy(-shift, in);
        out *= 1.0 / radius;
    };

    BlockDensity& prev = k1_;
    BlockDensity& curr = k2_;
    BlockDensity& next = k3_;
    BlockDensity& acc = k4_;
    prev = rho;
    acc = rho;
    acc *= std::cyl_bessel_j(0.0, tau);
    apply_scaled(prev, curr);
    acc.axpy(2.0 * std::cyl_bessel_j(1.0, tau), curr);

    int k = 1;
    while (true) {
        ++k;
        if (k > kMaxChebyshevOrder) {
            throw StepError("Chebyshev expansion did not converge within the order limit");
        }
        const double jk = std::cyl_bessel_j(static_cast<double>(k), tau);
        apply_scaled(curr, next);
        next *= 2.0;
        next += prev;
        acc.axpy(2.0 * jk, next);
        std::swap(prev, curr);
        std::swap(curr, next);
        if (k > tau && std::abs(jk) < config_.tolerance) break;
    }
    last_order_ = k;
    acc *= std::exp(shift * dt);
    rho = acc;
}

long step_count(double t0, double t1, double dt) {
    const double span = t1 - t0;
    if (span < 0.0) throw std::invalid_argument("propagate: t1 precedes t0");
    const double steps = span / dt;
    const long n = std::lround(steps);
    if (std::abs(steps - static_cast<double>(n)) > 1e-6) {
        throw std::invalid_argument("propagate: interval is not a whole number of steps");
    }
    return n;
}

BlockDensity propagate(const BlockDensity& rho0, LiouvilleGenerator& generator,
                       GeneratorFlags flags, const FieldSource& field, double t0, double t1,
                       const PropagatorConfig& config, const Observer& observer) {
    config.validate();
    const long n = step_count(t0, t1, config.dt);
    Stepper stepper(config);
    BlockDensity rho = rho0;
    for (long i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) * config.dt;
        const double eps = field ? field(t + 0.5 * config.dt) : 0.0;
        stepper.step(rho, frozen(generator, eps, flags));
        if (observer) observer(t0 + static_cast<double>(i + 1) * config.dt, rho, eps);
    }
    return rho;
}

ConvergenceReport convergence_report(const ConvergenceScenario& scenario,
                                     std::vector<double> dt_list) {
    std::sort(dt_list.begin(), dt_list.end());
    ConvergenceReport report;

    struct Result {
        double dt;
        double population;
        double purity;
    };
    std::vector<Result> stable;
    for (const double dt : dt_list) {
        try {
            PropagatorConfig cfg;
            cfg.dt = dt;
            cfg.scheme = scenario.scheme;
            LiouvilleGenerator generator(scenario.hamiltonian, scenario.lindblad);
            const BlockDensity out = propagate(scenario.initial, generator, scenario.flags,
                                               scenario.field, 0.0, scenario.duration, cfg);
            stable.push_back({dt, excited_population(out), purity(out)});
        } catch (const StepError& err) {
            report.flagged.push_back({dt, err.what()});
        } catch (const std::invalid_argument& err) {
            report.flagged.push_back({dt, err.what()});
        }
    }
    if (stable.empty()) return report;

    const Result& ref = stable.front();
    report.reference_dt = ref.dt;
    report.reference_population = ref.population;
    report.reference_purity = ref.purity;
    // Coarsest first.
    for (auto it = stable.rbegin(); it != stable.rend() - 1; ++it) {
        report.rows.push_back({it->dt, it->population, it->purity,
                               std::abs(it->population - ref.population),
                               std::abs(it->purity - ref.purity)});
    }
    if (report.rows.size() >= 2) {
        const ConvergenceRow& a = report.rows[report.rows.size() - 2];
        const ConvergenceRow& b = report.rows.back();
        if (a.delta_population > 0.0 && b.delta_population > 0.0) {
            const double p = order_from_ratio(a.delta_population / b.delta_population, a.dt, b.dt,
                                              ref.dt);
            if (std::isfinite(p)) report.observed_order = p;
        }
    }
    return report;
}

}  // namespace qtrack
