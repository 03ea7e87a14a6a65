#include "qtrack/experiment.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

#include "qtrack/control.hpp"
#include "qtrack/version.hpp"

namespace qtrack {

namespace {

std::string failure_message(const std::string& track, double time, const std::string& reason) {
    std::ostringstream msg;
    msg << "track " << track << " failed at t = " << time << " fs: " << reason;
    return msg.str();
}

void append_track(TrackSeries& series, const BlockDensity& rho, const BlockDensity& target) {
    series.excited_population.push_back(excited_population(rho));
    series.purity.push_back(purity(rho));
    series.overlap.push_back(overlap(rho, target));
    series.normalized_overlap.push_back(normalized_overlap(rho, target));
}

void step_track(Stepper& stepper, BlockDensity& rho, LiouvilleGenerator& generator, double eps,
                GeneratorFlags flags, const char* name, double t) {
    try {
        stepper.step(rho, frozen(generator, eps, flags));
    } catch (const StepError& e) {
        throw PropagationFailure(name, t, e.what());
    }
}

std::string windows_text(const std::vector<std::pair<double, double>>& windows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (i) out << ", ";
        out << windows[i].first << ":" << windows[i].second;
    }
    return out.str();
}

}  // namespace

PropagationFailure::PropagationFailure(std::string track, double time, const std::string& reason)
    : std::runtime_error(failure_message(track, time, reason)),
      track_(std::move(track)),
      time_(time) {}

BlockDensity pump_stage(const ExperimentConfig& config) {
    config.validate();
    const Grid grid = build_grid(config.grid);
    const HamiltonianBlocks h = build_hamiltonian(config.model, grid);
    const GroundState ground = ground_vibronic_state(h.h_g);
    LiouvilleGenerator generator(h, config.lindblad);
    const GeneratorFlags flags{config.dissipation_during_pump, true};
    const PumpPulse pulse = config.pump;
    try {
        return propagate(ground.rho, generator, flags,
                         [&pulse](double t) { return pump_field(t, pulse); }, 0.0,
                         config.pump.t_end, config.propagator);
    } catch (const StepError& e) {
        throw PropagationFailure("pump", config.pump.t_end, e.what());
    }
}

ExperimentResult run_experiment(const ExperimentConfig& config, const TrackObserver& observer) {
    config.validate();
    const Grid grid = build_grid(config.grid);
    const HamiltonianBlocks h = build_hamiltonian(config.model, grid);
    LiouvilleGenerator generator(h, config.lindblad);
    Stepper stepper(config.propagator);

    ExperimentResult result;
    result.post_pump = pump_stage(config);
    result.pump_end = config.pump.t_end;

    const ControlSchedule& schedule = config.schedule;
    const double k_value =
        schedule.k_value ? *schedule.k_value
                         : calibrate_gain(result.post_pump, h.mu_matrix, schedule.loop_rate);

    TrackStates s{result.post_pump, result.post_pump, result.post_pump};
    TrajectoryRecord& rec = result.record;
    rec.k_value = k_value;
    rec.record_dt = config.propagator.dt * config.record_stride;
    rec.off_windows = schedule.off_windows;
    rec.metadata["config"] = emit_config(config);
    rec.metadata["k_value"] = std::to_string(k_value);
    rec.metadata["k_rule"] = schedule.k_value ? "fixed" : "loop_rate";
    rec.metadata["pump_end_fs"] = std::to_string(result.pump_end);
    rec.metadata["off_windows"] = windows_text(schedule.off_windows);
    rec.metadata["code_version"] = kVersion;

    const GeneratorFlags free_flags{false, false};
    const GeneratorFlags system_flags{true, false};
    const GeneratorFlags controlled_flags{true, true};

    const double dt = config.propagator.dt;
    const double t0 = result.pump_end;
    const long n = step_count(t0, config.t_final, dt);
    for (long i = 0;; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        const double raw = tracking_field_blocks(s.controlled, s.target, h.dipole, k_value);
        const double eps = gated_field(t, raw, schedule);
        if (i % config.record_stride == 0) {
            rec.times.push_back(t);
            append_track(rec.target, s.target, s.target);
            append_track(rec.system, s.system, s.target);
            append_track(rec.controlled, s.controlled, s.target);
            rec.field.push_back(eps);
            rec.control_rate.push_back(
                control_overlap_rate(s.controlled, s.target, h.mu_matrix, eps));
        }
        if (i == n) break;
        step_track(stepper, s.target, generator, 0.0, free_flags, "target", t);
        step_track(stepper, s.system, generator, 0.0, system_flags, "system", t);
        step_track(stepper, s.controlled, generator, eps, controlled_flags, "controlled", t);
        if (observer) observer(t + dt, s, eps);
    }
    result.final_states = std::move(s);
    return result;
}

ExperimentResult run_onoff(const ExperimentConfig& config, std::pair<double, double> window,
                           const TrackObserver& observer) {
    if (!(window.second >= window.first)) {
        throw ConfigError("onoff: window end precedes its start");
    }
    if (window.first < config.pump.t_end || window.second > config.t_final) {
        throw ConfigError("onoff: window must lie between the pump end and t_final");
    }
    ExperimentConfig c = config;
    c.schedule.off_windows = {window};
    return run_experiment(c, observer);
}

double sweep_gain(const ExperimentConfig& base) {
    if (base.schedule.k_value) return *base.schedule.k_value;
    const Grid grid = build_grid(base.grid);
    const HamiltonianBlocks h = build_hamiltonian(base.model, grid);
    return calibrate_gain(pump_stage(base), h.mu_matrix, base.schedule.loop_rate);
}

std::map<SweepKey, SweepCell> run_sweep(const SweepSpec& spec, int jobs) {
    spec.validate();
    ExperimentConfig base = spec.base;
    base.schedule.k_value = sweep_gain(spec.base);
    std::vector<SweepCell> cells;
    for (double g : spec.gamma_values) {
        for (double d : spec.delta_values) cells.push_back({g, d, std::nullopt, {}});
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            SweepCell& cell = cells[i];
            try {
                cell.result = run_experiment(sweep_cell_config(base, cell.gamma, cell.delta));
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    std::map<SweepKey, SweepCell> out;
    for (auto& cell : cells) {
        const SweepKey key{cell.gamma, cell.delta};
        out.emplace(key, std::move(cell));
    }
    return out;
}

BlockDensity free_propagation(const ExperimentConfig& config, const BlockDensity& rho, double t0,
                              double t1) {
    const Grid grid = build_grid(config.grid);
    const HamiltonianBlocks h = build_hamiltonian(config.model, grid);
    LiouvilleGenerator generator(h, config.lindblad);
    return propagate(rho, generator, GeneratorFlags{false, false}, {}, t0, t1, config.propagator);
}

}  // namespace qtrack
