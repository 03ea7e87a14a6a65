#include <doctest.h>

#include <cmath>

#include "qtrack/control.hpp"
#include "qtrack/observables.hpp"
#include "qtrack/propagator.hpp"
#include "qtrack/units.hpp"
#include "support.hpp"

using namespace qtrack;
using qtrack::testing::small_model;
using qtrack::testing::two_level;

namespace {

PropagatorConfig config(Scheme scheme, double dt) {
    PropagatorConfig c;
    c.scheme = scheme;
    c.dt = dt;
    return c;
}

BlockDensity excited_copy_of_ground(const HamiltonianBlocks& h, double excited_weight) {
    const Eigen::VectorXcd phi = ground_vibronic_state(h.h_g).phi.cast<cplx>();
    BlockDensity rho = BlockDensity::zero(h.size());
    const Eigen::MatrixXcd proj = phi * phi.adjoint();
    rho.e = excited_weight * proj;
    rho.g = (1.0 - excited_weight) * proj;
    return rho;
}

}  // namespace

TEST_CASE("free harmonic ground state is stationary") {
    VibronicModel m;
    m.v_ge = 0.0;
    const HamiltonianBlocks h = build_hamiltonian(m, build_grid({32, -8.0, 8.0}));
    const BlockDensity rho0 = ground_vibronic_state(h.h_g).rho;
    LiouvilleGenerator gen(h, LindbladSpec{0.0});
    for (const Scheme s : {Scheme::rk4, Scheme::chebyshev}) {
        const BlockDensity rho =
            propagate(rho0, gen, {}, {}, 0.0, 100.0, config(s, s == Scheme::rk4 ? 0.01 : 0.5));
        CHECK(std::abs(ground_population(rho) - 1.0) < 1e-8);
        CHECK(std::abs(purity(rho) - 1.0) < 1e-8);
    }
}

TEST_CASE("two-level Rabi oscillation with detuning") {
    const double half_gap = 0.7;
    const double v = 0.05;
    const HamiltonianBlocks h = two_level(half_gap, -half_gap, v);
    LiouvilleGenerator gen(h, LindbladSpec{0.0});
    const BlockDensity rho0 = BlockDensity::pure(Eigen::VectorXcd::Zero(1), Eigen::VectorXcd::Ones(1));
    const double omega = std::sqrt(half_gap * half_gap + v * v);
    for (const Scheme s : {Scheme::rk4, Scheme::chebyshev}) {
        double worst = 0.0;
        propagate(rho0, gen, {}, {}, 0.0, 100.0, config(s, 0.01),
                  [&](double t, const BlockDensity& rho, double) {
                      const double sn = std::sin(omega * t / kHbar);
                      const double exact = v * v / (omega * omega) * sn * sn;
                      worst = std::max(worst, std::abs(excited_population(rho) - exact));
                  });
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("excited population decays exponentially without coupling") {
    VibronicModel m;
    m.v_ge = 0.0;
    const HamiltonianBlocks h = build_hamiltonian(m, build_grid({32, -8.0, 8.0}));
    LiouvilleGenerator gen(h, LindbladSpec{0.003});
    const BlockDensity rho0 = excited_copy_of_ground(h, 0.5);
    for (const Scheme s : {Scheme::rk4, Scheme::chebyshev}) {
        const BlockDensity rho = propagate(rho0, gen, {true, false}, {}, 0.0, 100.0, config(s, 0.05));
        CHECK(excited_population(rho) == doctest::Approx(0.370409).epsilon(1e-5 / 0.37));
        CHECK(std::abs(excited_population(rho) - 0.5 * std::exp(-0.3)) < 1e-10);
    }
}

TEST_CASE("zero-duration propagation returns the input") {
    const HamiltonianBlocks h = small_model(16);
    LiouvilleGenerator gen(h, LindbladSpec{});
    const BlockDensity rho0 = excited_copy_of_ground(h, 0.3);
    CHECK(max_block_difference(propagate(rho0, gen, {true, false}, {}, 5.0, 5.0, {}), rho0) == 0.0);
}

TEST_CASE("propagation composes over consecutive intervals") {
    const HamiltonianBlocks h = small_model(32);
    LiouvilleGenerator gen(h, LindbladSpec{0.003});
    const BlockDensity rho0 = excited_copy_of_ground(h, 0.6);
    PumpPulse pulse;
    const FieldSource field = [&](double t) { return pump_field(t, pulse); };
    const PropagatorConfig pc = config(Scheme::rk4, 0.01);
    const BlockDensity whole = propagate(rho0, gen, {true, true}, field, 0.0, 100.0, pc);
    const BlockDensity half = propagate(rho0, gen, {true, true}, field, 0.0, 50.0, pc);
    const BlockDensity split = propagate(half, gen, {true, true}, field, 50.0, 100.0, pc);
    CHECK(max_block_difference(whole, split) < 1e-12);
}

TEST_CASE("propagation is deterministic") {
    const HamiltonianBlocks h = small_model(16);
    LiouvilleGenerator gen(h, LindbladSpec{0.003});
    const BlockDensity rho0 = excited_copy_of_ground(h, 0.6);
    const auto a = propagate(rho0, gen, {true, false}, {}, 0.0, 20.0, config(Scheme::rk4, 0.01));
    const auto b = propagate(rho0, gen, {true, false}, {}, 0.0, 20.0, config(Scheme::rk4, 0.01));
    CHECK(max_block_difference(a, b) == 0.0);
}

TEST_CASE("chebyshev and rk4 agree with dissipation and a static field") {
    const HamiltonianBlocks h = small_model(32);
    LiouvilleGenerator gen(h, LindbladSpec{0.006});
    const BlockDensity rho0 = excited_copy_of_ground(h, 0.7);
    const FieldSource field = [](double) { return 0.05; };
    PropagatorConfig cheb = config(Scheme::chebyshev, 0.5);
    const auto a = propagate(rho0, gen, {true, true}, field, 0.0, 30.0, cheb);
    const auto b = propagate(rho0, gen, {true, true}, field, 0.0, 30.0, config(Scheme::rk4, 0.0025));
    CHECK(max_block_difference(a, b) < 1e-9);
    CHECK(hermiticity_defect(a) < 1e-12);
}

TEST_CASE("observer sees every step with the field in force") {
    const HamiltonianBlocks h = small_model(16);
    LiouvilleGenerator gen(h, LindbladSpec{});
    const BlockDensity rho0 = excited_copy_of_ground(h, 0.5);
    std::vector<double> times;
    std::vector<double> fields;
    propagate(rho0, gen, {false, true}, [](double t) { return t; }, 1.0, 1.05,
              config(Scheme::rk4, 0.01), [&](double t, const BlockDensity&, double eps) {
                  times.push_back(t);
                  fields.push_back(eps);
              });
    REQUIRE(times.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(times[i] == doctest::Approx(1.0 + 0.01 * (i + 1)));
        CHECK(fields[i] == doctest::Approx(1.005 + 0.01 * i));  // field sampled at the midpoint
    }
}

TEST_CASE("convergence report shows fourth order") {
    ConvergenceScenario sc;
    sc.hamiltonian = small_model(32);
    sc.lindblad = LindbladSpec{0.003};
    sc.initial = excited_copy_of_ground(sc.hamiltonian, 1.0);
    sc.flags = {true, false};
    sc.duration = 20.0;
    const ConvergenceReport report = convergence_report(sc, {0.02, 0.01, 0.005});
    CHECK(report.reference_dt == 0.005);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].dt == 0.02);
    CHECK(report.flagged.empty());
    const double ratio = report.rows[0].delta_population / report.rows[1].delta_population;
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 32.0);
    REQUIRE(report.observed_order);
    CHECK(*report.observed_order == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("time-dependent fields converge at second order") {
    ConvergenceScenario sc;
    sc.hamiltonian = small_model(32);
    sc.initial = ground_vibronic_state(sc.hamiltonian.h_g).rho;
    sc.flags = {false, true};
    PumpPulse pulse;
    sc.field = [pulse](double t) { return pump_field(t, pulse); };
    sc.duration = 40.0;
    const ConvergenceReport report = convergence_report(sc, {0.04, 0.02, 0.01, 0.005});
    REQUIRE(report.observed_order);
    CHECK(*report.observed_order == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("convergence report edge cases") {
    ConvergenceScenario sc;
    sc.hamiltonian = small_model(32);
    sc.initial = ground_vibronic_state(sc.hamiltonian.h_g).rho;
    sc.flags = {false, true};
    PumpPulse pulse;
    sc.field = [pulse](double t) { return pump_field(t, pulse); };
    sc.duration = 20.0;

    const ConvergenceReport single = convergence_report(sc, {0.01});
    CHECK(single.rows.empty());
    CHECK_FALSE(single.observed_order);

    const ConvergenceReport unstable = convergence_report(sc, {1.0, 0.01, 0.005});
    REQUIRE(unstable.flagged.size() == 1);
    CHECK(unstable.flagged[0].dt == 1.0);
    CHECK(unstable.rows.size() == 1);
}

TEST_CASE("unstable step is rejected") {
    const HamiltonianBlocks h = small_model(32);
    LiouvilleGenerator gen(h, LindbladSpec{});
    const BlockDensity rho0 = excited_copy_of_ground(h, 0.5);
    CHECK_THROWS_AS(propagate(rho0, gen, {}, {}, 0.0, 10.0, config(Scheme::rk4, 1.0)), StepError);
}

TEST_CASE("propagator configuration validation") {
    CHECK_THROWS_AS(config(Scheme::rk4, 0.0).validate(), std::invalid_argument);
    PropagatorConfig c;
    c.tolerance = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK_THROWS_AS(step_count(0.0, 1.005, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(step_count(1.0, 0.0, 0.01), std::invalid_argument);
    CHECK(step_count(40.0, 700.0, 0.01) == 66000);
    CHECK(scheme_from_string("chebyshev") == Scheme::chebyshev);
    CHECK(std::string(to_string(Scheme::rk4)) == "rk4");
    CHECK_THROWS_AS(scheme_from_string("euler"), std::invalid_argument);
}
