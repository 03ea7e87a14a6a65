// propagator.hpp: Fixed-step time propagation of BlockDensity states.
//
// The field is frozen across each step: the caller supplies the value used on
// [t, t + dt), computed from states at t. Two steppers share the interface:
// classical RK4 (default) and a Chebyshev expansion of the frozen-field
// propagator exp(L dt) truncated at the configured tolerance.

#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtrack/block_density.hpp"
#include "qtrack/dynamics.hpp"

namespace qtrack {

enum class Scheme { rk4, chebyshev };

const char* to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct PropagatorConfig {
    double dt{0.01};            ///< fs
    /// rk4 damps the gap-frequency coherence by ~1e-12 per step at dt = 0.01,
    /// which adds up to ~1e-8 in purity over a full run.
    Scheme scheme{Scheme::chebyshev};
    double tolerance{1e-12};    ///< Chebyshev truncation threshold
    bool symmetrize{true};      ///< rho <- (rho + rho^dagger)/2 after each step

    void validate() const;
};

/// Raised when a step produces a non-physical state (trace drift above 1e-6,
/// norm growth beyond the positive-state bound, or non-finite entries).
class StepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A linear generator with the field already frozen.
struct Derivative {
    std::function<void(const BlockDensity&, BlockDensity&)> apply;
    double spectral_radius{0.0};  ///< bound on |Im lambda|, 1/fs (Chebyshev only)
    double max_decay{0.0};        ///< largest decay rate, 1/fs (Chebyshev only)
};

Derivative frozen(LiouvilleGenerator& generator, double epsilon, GeneratorFlags flags);

class Stepper {
public:
    explicit Stepper(PropagatorConfig config);

    const PropagatorConfig& config() const { return config_; }

    /// Advance rho by dt in place. Throws StepError on instability.
    void step(BlockDensity& rho, const Derivative& f, double dt);
    void step(BlockDensity& rho, const Derivative& f) { step(rho, f, config_.dt); }

    /// Terms used by the last Chebyshev step (0 for RK4).
    int last_expansion_order() const { return last_order_; }

private:
    void rk4(BlockDensity& rho, const Derivative& f, double dt);
    void chebyshev(BlockDensity& rho, const Derivative& f, double dt);

    PropagatorConfig config_;
    BlockDensity k1_, k2_, k3_, k4_, stage_;
    int last_order_{0};
};

using FieldSource = std::function<double(double t)>;
using Observer = std::function<void(double t, const BlockDensity& rho, double epsilon)>;

/// Number of whole steps covering [t0, t1]; throws if the interval is not a
/// multiple of dt.
long step_count(double t0, double t1, double dt);

/// Step from t0 to t1. The field is held at its midpoint value field(t + dt/2)
/// over each step, which keeps the field sampling second order; the observer
/// sees (t + dt, rho(t + dt), field(t + dt/2)) after every step.
BlockDensity propagate(const BlockDensity& rho0, LiouvilleGenerator& generator,
                       GeneratorFlags flags, const FieldSource& field, double t0, double t1,
                       const PropagatorConfig& config, const Observer& observer = {});

struct ConvergenceScenario {
    HamiltonianBlocks hamiltonian;
    LindbladSpec lindblad;
    BlockDensity initial;
    GeneratorFlags flags;
    FieldSource field;  ///< empty means zero field
    double duration{100.0};
    Scheme scheme{Scheme::rk4};
};

struct ConvergenceRow {
    double dt{0.0};
    double population{0.0};
    double purity{0.0};
    double delta_population{0.0};  ///< against the smallest stable dt
    double delta_purity{0.0};
};

struct FlaggedStep {
    double dt{0.0};
    std::string reason;
};

struct ConvergenceReport {
    double reference_dt{0.0};
    double reference_population{0.0};
    double reference_purity{0.0};
    std::vector<ConvergenceRow> rows;  ///< coarser stable step sizes only
    std::vector<FlaggedStep> flagged;
    /// Order p solving delta(dt_a)/delta(dt_b) = (a^p - r^p)/(b^p - r^p) for the
    /// two finest rows.
    std::optional<double> observed_order;
};

ConvergenceReport convergence_report(const ConvergenceScenario& scenario,
                                     std::vector<double> dt_list);

}  // namespace qtrack
