// experiment.hpp: Pump stage, three-track co-propagation, on/off protocol and sweeps.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "qtrack/config.hpp"
#include "qtrack/observables.hpp"

namespace qtrack {

/// Propagation failure with the track and time at which it happened.
class PropagationFailure : public std::runtime_error {
public:
    PropagationFailure(std::string track, double time, const std::string& reason);
    const std::string& track() const { return track_; }
    double time() const { return time_; }

private:
    std::string track_;
    double time_;
};

struct TrackStates {
    BlockDensity target;
    BlockDensity system;
    BlockDensity controlled;
};

/// Called after every tracking step with the new time, the three states and
/// the field that drove the controlled track over the step.
using TrackObserver = std::function<void(double t, const TrackStates& states, double epsilon)>;

struct ExperimentResult {
    TrajectoryRecord record;
    BlockDensity post_pump;
    TrackStates final_states;
    double pump_end{0.0};
};

/// Ground state, then the pump stage with dissipation off unless
/// config.dissipation_during_pump.
BlockDensity pump_stage(const ExperimentConfig& config);

/// Full experiment: pump stage, then target / system / controlled tracks
/// stepped in lockstep with the tracking field computed from the states at the
/// start of each step.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const TrackObserver& observer = {});

/// run_experiment with the feedback switched off over [window.first, window.second).
ExperimentResult run_onoff(const ExperimentConfig& config, std::pair<double, double> window,
                           const TrackObserver& observer = {});

struct SweepCell {
    double gamma{0.0};
    double delta{0.0};
    std::optional<ExperimentResult> result;
    std::string error;  ///< non-empty when the cell failed
};

using SweepKey = std::pair<double, double>;  ///< (gamma, delta)

/// Gain shared by every cell of a sweep over `base`: its fixed k_value, or the
/// loop-rate calibration at the base configuration's post-pump state. Holding K
/// fixed across cells keeps gamma and Delta the only parameters that vary.
double sweep_gain(const ExperimentConfig& base);

/// Runs every (gamma, delta) cell with the gain from sweep_gain; cells are
/// independent and may run on up to `jobs` threads. Failures are confined to
/// their cell.
std::map<SweepKey, SweepCell> run_sweep(const SweepSpec& spec, int jobs = 1);

/// Free propagation of `rho` from t0 to t1 with no field and no dissipation.
BlockDensity free_propagation(const ExperimentConfig& config, const BlockDensity& rho, double t0,
                              double t1);

}  // namespace qtrack
