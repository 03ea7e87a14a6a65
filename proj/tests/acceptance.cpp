// Acceptance suite: one PASS/FAIL line per criterion with the achieved values.
//
//   qtrack_acceptance [--only 1,4,9] [--strict]
//
// Exit status is 0 when every selected criterion was evaluated (pass or fail),
// 1 on an unexpected error, and with --strict also 1 when any criterion fails.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qtrack/experiment.hpp"

using namespace qtrack;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Time for J to first fall below J(0)/e, measured from the first sample.
std::optional<double> decoherence_time(const TrajectoryRecord& r, const std::vector<double>& j) {
    const double threshold = j.front() / std::exp(1.0);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i] < threshold) return r.times[i] - r.times.front();
    }
    return std::nullopt;
}

double value_at(const TrajectoryRecord& r, const std::vector<double>& series, double t) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r.times[i] >= t - 1e-9) return series[i];
    }
    return series.back();
}

// Least-squares slope of series over t in [t0, t1].
double fit_slope(const TrajectoryRecord& r, const std::vector<double>& series, double t0,
                 double t1) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double t = r.times[i];
        if (t < t0 - 1e-9 || t > t1 + 1e-9) continue;
        n += 1;
        sx += t;
        sy += series[i];
        sxx += t * t;
        sxy += t * series[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

BlockDensity random_density(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = {g(rng), g(rng)};
    }
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace();
    return BlockDensity::from_full(rho);
}

// Shared expensive runs, computed on first use.
class Runs {
public:
    Runs() { shared_.schedule.k_value = sweep_gain(base_); }

    const ExperimentConfig& base() const { return base_; }

    const ExperimentResult& default_run() { return cell(base_.lindblad.gamma_q, base_.model.delta); }

    const ExperimentResult& cell(double gamma, double delta) {
        const SweepKey key{gamma, delta};
        auto it = cells_.find(key);
        if (it == cells_.end()) {
            // Cells share the sweep gain, as in run_sweep; for the base cell it
            // equals the run's own calibration.
            it = cells_.emplace(key, run_experiment(sweep_cell_config(shared_, gamma, delta))).first;
        }
        return it->second;
    }

private:
    ExperimentConfig base_ = default_config();
    ExperimentConfig shared_ = base_;
    std::map<SweepKey, ExperimentResult> cells_;
};

Outcome criterion1() {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig c = default_config();
    c.model.v_ge = 0.0;
    const Grid grid = build_grid(c.grid);
    const HamiltonianBlocks h = build_hamiltonian(c.model, grid);
    const GroundState ground = ground_vibronic_state(h.h_g);
    const Eigen::VectorXcd phi = ground.phi.cast<cplx>();
    const BlockDensity rho0 = BlockDensity::pure(phi, Eigen::VectorXcd::Zero(phi.size()));
    LiouvilleGenerator gen(h, c.lindblad);
    // The generator is time independent, so the Chebyshev stepper can take
    // long steps; per unit time it is cheapest at large dt.
    PropagatorConfig pc;
    pc.scheme = Scheme::chebyshev;
    pc.dt = 1.0;
    const double gamma = c.lindblad.gamma_q;
    const double p0 = excited_population(rho0);
    double worst = 0.0;
    propagate(rho0, gen, {true, false}, {}, 0.0, 500.0, pc,
              [&](double t, const BlockDensity& rho, double) {
                  worst = std::max(worst,
                                   std::abs(excited_population(rho) - p0 * std::exp(-gamma * t)));
              });
    const double elapsed = seconds_since(start);
    return {c.grid.n_points == 64 && worst < 1e-5 && elapsed < 10.0,
            fmt("N=%d chebyshev dt=1 max|pop_e - pop_e(0)exp(-gt)| = %.3g (< 1e-5), runtime %.2f s (< 10)",
                c.grid.n_points, worst, elapsed)};
}

Outcome criterion2() {
    ExperimentConfig c = default_config();
    c.lindblad.gamma_q = 0.0;
    const BlockDensity rho0 = pump_stage(c);
    const Grid grid = build_grid(c.grid);
    const HamiltonianBlocks h = build_hamiltonian(c.model, grid);
    LiouvilleGenerator gen(h, c.lindblad);
    PropagatorConfig pc;
    pc.scheme = Scheme::chebyshev;
    pc.dt = 1.0;
    pc.tolerance = 1e-14;
    const cplx tr0 = rho0.trace();
    const double pur0 = purity(rho0);
    const double e0 = energy(h, rho0);
    double d_tr = 0.0, d_pur = 0.0, d_e = 0.0;
    propagate(rho0, gen, {false, false}, {}, 0.0, 1000.0, pc,
              [&](double, const BlockDensity& rho, double) {
                  d_tr = std::max(d_tr, std::abs(rho.trace() - tr0));
                  d_pur = std::max(d_pur, std::abs(purity(rho) - pur0));
                  d_e = std::max(d_e, std::abs(energy(h, rho) - e0));
              });
    return {d_tr < 1e-10 && d_pur < 1e-8 && d_e < 1e-6,
            fmt("chebyshev dt=1 fs over 1000 fs: trace %.3g (< 1e-10), purity %.3g (< 1e-8), "
                "energy %.3g eV (< 1e-6)",
                d_tr, d_pur, d_e)};
}

Outcome criterion3() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    double worst = 0.0;
    for (const Eigen::Index n : {1, 4, 16}) {
        for (int k = 0; k < 1000; ++k) {
            Eigen::VectorXd dipole(n);
            for (Eigen::Index i = 0; i < n; ++i) dipole(i) = u(rng);
            const Eigen::MatrixXd mu = dipole.asDiagonal();
            const BlockDensity c = random_density(n, rng);
            const BlockDensity t = random_density(n, rng);
            const double kv = u(rng);
            const double general = tracking_field_general(c, t, mu, kv);
            const double blocks = tracking_field_blocks(c, t, mu, kv);
            worst = std::max(worst, std::abs(blocks - general) / std::abs(general));
        }
    }
    return {worst < 1e-12,
            fmt("3000 random state pairs, N in {1,4,16}: max relative difference %.3g (< 1e-12)",
                worst)};
}

Outcome criterion4(Runs& runs) {
    const auto& r = runs.default_run().record;
    double lowest = r.control_rate.front();
    for (double v : r.control_rate) lowest = std::min(lowest, v);
    return {lowest >= -1e-14,
            fmt("min control contribution to dJ/dt over %zu samples = %.3g 1/fs (>= -1e-14)",
                r.size(), lowest)};
}

Outcome criterion5(Runs& runs) {
    const auto& r = runs.default_run().record;
    const auto tau_s = decoherence_time(r, r.system.overlap);
    const auto tau_c = decoherence_time(r, r.controlled.overlap);
    const double horizon = r.times.back() - r.times.front();
    const double j0 = r.system.overlap.front();
    auto text = [&](const std::optional<double>& tau) {
        return tau ? fmt("%.1f fs", *tau) : fmt("> %.0f fs (never)", horizon);
    };
    const std::string values =
        fmt("tau_system %s, tau_controlled %s; threshold J0/e = %.4f, J_system min %.4f",
            text(tau_s).c_str(), text(tau_c).c_str(), j0 / std::exp(1.0),
            *std::min_element(r.system.overlap.begin(), r.system.overlap.end()));
    if (!tau_s) return {false, values + "; ratio undefined (system never decoheres to 1/e)"};
    const double ratio = (tau_c ? *tau_c : horizon) / *tau_s;
    return {ratio >= 5.0, values + fmt("; ratio %s%.2f (>= 5)", tau_c ? "" : ">= ", ratio)};
}

Outcome criterion6(Runs& runs) {
    const auto& r = runs.default_run().record;
    const double jc = mean(r.controlled.overlap);
    const double two_over_gamma = 2.0 / runs.base().lindblad.gamma_q;
    const double js = value_at(r, r.system.overlap, two_over_gamma);
    return {jc >= 0.8 && js < 0.3,
            fmt("mean J_controlled %.4f (>= 0.8), J_system(2/gamma = %.0f fs) %.4f (< 0.3), "
                "mean J_system %.4f",
                jc, two_over_gamma, js, mean(r.system.overlap))};
}

Outcome criterion7(Runs& runs) {
    const double gamma = 0.003;
    std::vector<double> means;
    std::string text;
    for (const double delta : {0.5, 0.7, 0.9}) {
        means.push_back(mean(runs.cell(gamma, delta).record.controlled.overlap));
        text += fmt("%sDelta %.1f: %.4f", text.empty() ? "" : ", ", delta, means.back());
    }
    const bool ok = means[0] <= means[1] && means[1] <= means[2];
    return {ok, "mean J_controlled at gamma 0.003: " + text + " (non-decreasing)"};
}

Outcome criterion8(Runs& runs) {
    const double t_off = 300.0;
    const double t_on = 400.0;
    const auto result = run_onoff(runs.base(), {t_off, t_on});
    const auto& r = result.record;
    const auto& j = r.controlled.overlap;
    const auto& p = r.controlled.purity;
    const double dj = value_at(r, j, t_on) - value_at(r, j, t_off);
    const double dp = value_at(r, p, t_on) - value_at(r, p, t_off);
    const double sj = fit_slope(r, j, t_on, t_on + 50.0);
    const double sp = fit_slope(r, p, t_on, t_on + 50.0);
    return {dj < 0.0 && dp < 0.0 && sj >= 0.0 && sp >= 0.0,
            fmt("off [%.0f, %.0f) fs: change during window J %.4g, purity %.4g (< 0); "
                "slope over 50 fs after resume J %.3g /fs, purity %.3g /fs (>= 0)",
                t_off, t_on, dj, dp, sj, sp)};
}

Outcome criterion9(Runs& runs) {
    const auto& result = runs.default_run();
    const auto& r = result.record;
    const Window w = runs.base().spectrum_window;
    const Spectrum s = field_spectrum(r.field, r.record_dt, w, runs.base().spectrum_zero_pad);
    const auto [peak, magnitude] = s.peak();
    const double gap = 2.0 * runs.base().model.delta;
    const double tol = 2.0 * runs.base().model.omega_g;
    return {std::abs(peak - gap) <= tol,
            fmt("peak %.4f eV, 2*Delta %.4f eV, |difference| %.4f (<= 2*hbar*omega_g = %.3f)", peak,
                gap, std::abs(peak - gap), tol)};
}

Outcome criterion10(Runs& runs) {
    const auto& coarse = runs.default_run().record;
    ExperimentConfig fine_cfg = runs.base();
    fine_cfg.propagator.dt = runs.base().propagator.dt / 2.0;
    fine_cfg.record_stride = runs.base().record_stride * 2;
    const auto fine = run_experiment(fine_cfg).record;
    double worst = 0.0;
    std::string worst_name;
    auto cmp = [&](const char* name, const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
            const double d = std::abs(a[i] - b[i]);
            if (d > worst) {
                worst = d;
                worst_name = name;
            }
        }
    };
    const bool aligned = coarse.size() == fine.size();
    cmp("pop_e_target", coarse.target.excited_population, fine.target.excited_population);
    cmp("pop_e_system", coarse.system.excited_population, fine.system.excited_population);
    cmp("pop_e_controlled", coarse.controlled.excited_population,
        fine.controlled.excited_population);
    cmp("purity_target", coarse.target.purity, fine.target.purity);
    cmp("purity_system", coarse.system.purity, fine.system.purity);
    cmp("purity_controlled", coarse.controlled.purity, fine.controlled.purity);
    cmp("J_system", coarse.system.overlap, fine.system.overlap);
    cmp("J_controlled", coarse.controlled.overlap, fine.controlled.overlap);
    cmp("field", coarse.field, fine.field);

    // Order check on a field-free dissipative scenario: the excited surface
    // populated impulsively with the ground vibrational state.
    const ExperimentConfig& c = runs.base();
    const Grid grid = build_grid(c.grid);
    ConvergenceScenario sc;
    sc.hamiltonian = build_hamiltonian(c.model, grid);
    sc.lindblad = c.lindblad;
    const Eigen::VectorXcd phi = ground_vibronic_state(sc.hamiltonian.h_g).phi.cast<cplx>();
    sc.initial = BlockDensity::pure(phi, Eigen::VectorXcd::Zero(phi.size()));
    sc.flags = {true, false};
    sc.duration = 20.0;
    const auto report = convergence_report(sc, {0.16, 0.08, 0.04, 0.02, 0.01});
    const double nominal = 4.0;
    const bool order_ok = report.observed_order && *report.observed_order >= nominal / 2.0 &&
                          *report.observed_order <= nominal * 2.0;
    return {aligned && worst < 1e-4 && order_ok,
            fmt("dt 0.01 -> 0.005: max change %.3g (%s) (< 1e-4); rk4 observed order %.3f "
                "(nominal 4, accepted [2, 8])",
                worst, worst_name.c_str(), report.observed_order.value_or(NAN))};
}

Outcome criterion11(Runs& runs) {
    ExperimentConfig free_cfg = runs.base();
    free_cfg.lindblad.gamma_q = 0.0;
    double eps_max = 0.0;
    double ct = 0.0;
    run_experiment(free_cfg, [&](double, const TrackStates& s, double eps) {
        eps_max = std::max(eps_max, std::abs(eps));
        ct = std::max(ct, max_block_difference(s.controlled, s.target));
    });

    ExperimentConfig off_cfg = runs.base();
    off_cfg.schedule.enabled = false;
    double cs = 0.0;
    run_experiment(off_cfg, [&](double, const TrackStates& s, double) {
        cs = std::max(cs, max_block_difference(s.controlled, s.system));
    });
    return {eps_max < 1e-10 && ct < 1e-10 && cs < 1e-12,
            fmt("gamma=0: max|eps| %.3g (< 1e-10), max|C - T| %.3g (< 1e-10); "
                "disabled: max|C - S| %.3g (< 1e-12)",
                eps_max, ct, cs)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    bool strict = false;
    app.add_option("--only", only, "Criteria to evaluate")->delimiter(',');
    app.add_flag("--strict", strict, "Non-zero exit when any criterion fails");
    CLI11_PARSE(app, argc, argv);

    Runs runs;
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, criterion1},
        {2, criterion2},
        {3, criterion3},
        {4, [&] { return criterion4(runs); }},
        {5, [&] { return criterion5(runs); }},
        {6, [&] { return criterion6(runs); }},
        {7, [&] { return criterion7(runs); }},
        {8, [&] { return criterion8(runs); }},
        {9, [&] { return criterion9(runs); }},
        {10, [&] { return criterion10(runs); }},
        {11, [&] { return criterion11(runs); }},
    };
    const std::set<int> selected(only.begin(), only.end());

    int passed = 0;
    int evaluated = 0;
    for (const auto& [id, fn] : criteria) {
        if (!selected.empty() && !selected.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            std::printf("criterion %2d: ERROR %s\n", id, e.what());
            return 1;
        }
        ++evaluated;
        passed += o.pass;
        std::printf("criterion %2d: %s  %s  [%.1f s]\n", id, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str(), seconds_since(start));
        std::fflush(stdout);
    }
    std::printf("summary: %d/%d criteria passed\n", passed, evaluated);
    return strict && passed != evaluated ? 1 : 0;
}
