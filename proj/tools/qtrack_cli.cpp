// qtrack: command-line driver for the tracking experiments.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qtrack/experiment.hpp"
#include "qtrack/record_io.hpp"
#include "qtrack/version.hpp"

namespace {

enum Exit { kOk = 0, kRuntime = 1, kConfig = 2, kNumerical = 3 };

qtrack::ExperimentConfig config_or_default(const std::string& path) {
    return path.empty() ? qtrack::default_config() : qtrack::load_config(path);
}

std::pair<double, double> parse_window(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw qtrack::ConfigError("--window expects t0,t1");
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw qtrack::ConfigError("--window expects two numbers, got '" + text + "'");
    }
}

void print_summary(const qtrack::ExperimentResult& r) {
    const auto& rec = r.record;
    const std::size_t last = rec.size() - 1;
    std::printf("K = %.6g   samples = %zu   t = %.6g..%.6g fs\n", rec.k_value, rec.size(),
                rec.times.front(), rec.times[last]);
    std::printf("final  pop_e  target %.6f  system %.6f  controlled %.6f\n",
                rec.target.excited_population[last], rec.system.excited_population[last],
                rec.controlled.excited_population[last]);
    std::printf("final  J      system %.6f  controlled %.6f\n", rec.system.overlap[last],
                rec.controlled.overlap[last]);
}

int relax(const std::string& path) {
    const auto config = config_or_default(path);
    config.validate();
    const auto grid = qtrack::build_grid(config.grid);
    const auto h = qtrack::build_hamiltonian(config.model, grid);
    const auto ground = qtrack::ground_vibronic_state(h.h_g);
    const Eigen::VectorXd prob = ground.phi.cwiseAbs2();
    const double norm = prob.sum();
    const double mean = prob.dot(grid.q) / norm;
    const double second = prob.dot(grid.q.cwiseAbs2()) / norm;
    std::printf("energy_eV    %.12g\n", ground.energy);
    std::printf("residual     %.3g\n", ground.residual);
    std::printf("norm         %.12g\n", norm);
    std::printf("mean_q       %.12g\n", mean);
    std::printf("var_q        %.12g\n", second - mean * mean);
    return kOk;
}

int run(const std::string& path, const std::string& out) {
    const auto result = qtrack::run_experiment(qtrack::load_config(path));
    qtrack::emit_record(result.record, out);
    print_summary(result);
    return kOk;
}

int onoff(const std::string& path, const std::string& window, const std::string& out) {
    const auto result = qtrack::run_onoff(qtrack::load_config(path), parse_window(window));
    qtrack::emit_record(result.record, out);
    print_summary(result);
    return kOk;
}

int sweep(const std::string& path, const std::vector<double>& gammas,
          const std::vector<double>& deltas, int jobs, const std::string& out) {
    qtrack::SweepSpec spec{gammas, deltas, qtrack::load_config(path)};
    const auto cells = qtrack::run_sweep(spec, jobs);
    int status = kOk;
    for (const auto& [key, cell] : cells) {
        const auto name = qtrack::sweep_cell_name(key.first, key.second);
        if (!cell.error.empty()) {
            std::fprintf(stderr, "%s: %s\n", name.c_str(), cell.error.c_str());
            status = kNumerical;
            continue;
        }
        qtrack::emit_record(cell.result->record, std::filesystem::path(out) / name);
        const auto& j = cell.result->record.controlled.overlap;
        double mean = 0.0;
        for (double v : j) mean += v;
        std::printf("%-16s mean J_controlled %.6f\n", name.c_str(), mean / j.size());
    }
    return status;
}

int spectrum(const std::string& csv, const std::string& window, int pad) {
    const auto series = qtrack::read_field_series(csv);
    if (series.times.size() < 2) throw std::runtime_error("trajectory has fewer than two rows");
    const double dt = series.times[1] - series.times[0];
    const auto s = qtrack::field_spectrum(series.field, dt, qtrack::window_from_string(window), pad);
    std::cout << qtrack::spectrum_csv(s);
    const auto [e, m] = s.peak();
    std::fprintf(stderr, "peak %.6g eV  magnitude %.6g\n", e, m);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decoherence control by tracking: simulation driver"};
    app.set_version_flag("--version", qtrack::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string window;
    std::vector<double> gammas;
    std::vector<double> deltas;
    int jobs = 1;
    std::string csv_path;
    std::string spectrum_window = "hann";
    int zero_pad = 4;

    auto* relax_cmd = app.add_subcommand("relax", "Ground-state energy and moments");
    relax_cmd->add_option("config", config_path, "Config file (defaults when omitted)");

    auto* defaults_cmd = app.add_subcommand("defaults", "Print the default configuration");

    auto* run_cmd = app.add_subcommand("run", "Single tracking experiment");
    run_cmd->add_option("config", config_path)->required()->check(CLI::ExistingFile);
    run_cmd->add_option("-o,--out", out_dir, "Output directory");

    auto* onoff_cmd = app.add_subcommand("onoff", "Experiment with the feedback paused");
    onoff_cmd->add_option("config", config_path)->required()->check(CLI::ExistingFile);
    onoff_cmd->add_option("--window", window, "Off window t0,t1 in fs")->required();
    onoff_cmd->add_option("-o,--out", out_dir, "Output directory");

    auto* sweep_cmd = app.add_subcommand("sweep", "Grid of (gamma, Delta) experiments");
    sweep_cmd->add_option("config", config_path)->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--gammas", gammas, "Quench rates, 1/fs")->required()->delimiter(',');
    sweep_cmd->add_option("--deltas", deltas, "Gap half-widths, eV")->required()->delimiter(',');
    sweep_cmd->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("-o,--out", out_dir, "Output directory");

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Field spectrum of a trajectory.csv");
    spectrum_cmd->add_option("trajectory", csv_path)->required()->check(CLI::ExistingFile);
    spectrum_cmd->add_option("--window", spectrum_window, "hann or rectangular");
    spectrum_cmd->add_option("--zero-pad", zero_pad, "Padding factor")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*relax_cmd) return relax(config_path);
        if (*defaults_cmd) {
            std::cout << qtrack::emit_config(qtrack::default_config());
            return kOk;
        }
        if (*run_cmd) return run(config_path, out_dir);
        if (*onoff_cmd) return onoff(config_path, window, out_dir);
        if (*sweep_cmd) return sweep(config_path, gammas, deltas, jobs, out_dir);
        if (*spectrum_cmd) return spectrum(csv_path, spectrum_window, zero_pad);
    } catch (const qtrack::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const qtrack::PropagationFailure& e) {
        std::fprintf(stderr, "numerical failure: track %s at t = %g fs: %s\n", e.track().c_str(),
                     e.time(), e.what());
        return kNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntime;
    }
    return kOk;
}
