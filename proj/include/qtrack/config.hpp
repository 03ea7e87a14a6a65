// config.hpp: Experiment configuration and its sectioned key-value text format.
//
//   # comment
//   [model]
//   delta = 0.7
//   [control]
//   k_value = auto
//
// Every section must be present (it may be empty); keys left out take their
// defaults; unknown sections or keys are errors. See docs/config.md.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qtrack/control.hpp"
#include "qtrack/dynamics.hpp"
#include "qtrack/model.hpp"
#include "qtrack/observables.hpp"
#include "qtrack/propagator.hpp"

namespace qtrack {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    VibronicModel model;
    GridSpec grid;
    PropagatorConfig propagator;
    PumpPulse pump;
    ControlSchedule schedule;
    LindbladSpec lindblad;
    double t_final{700.0};          ///< fs, end of the tracking phase
    int record_stride{20};          ///< steps per recorded sample
    bool dissipation_during_pump{false};
    Window spectrum_window{Window::hann};
    int spectrum_zero_pad{4};

    /// Throws ConfigError naming the offending key.
    void validate() const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Defaults with the pump carrier tuned to the vertical gap of the model.
ExperimentConfig default_config();

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Text that parse_config maps back to an identical configuration.
std::string emit_config(const ExperimentConfig& config);

/// Parse "a:b, c:d" into ordered windows.
std::vector<std::pair<double, double>> parse_windows(const std::string& text);

struct SweepSpec {
    std::vector<double> gamma_values;  ///< 1/fs
    std::vector<double> delta_values;  ///< eV
    ExperimentConfig base;

    void validate() const;
};

/// Cell configuration: gamma and Delta replaced, pump carrier retuned to the
/// new vertical gap.
ExperimentConfig sweep_cell_config(const ExperimentConfig& base, double gamma, double delta);

}  // namespace qtrack
