#include "qtrack/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace qtrack {

namespace {

const std::vector<std::string> kSections = {"model", "grid",     "propagator", "pump",
                                            "control", "lindblad", "run"};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
    return out;
}

int to_int(const std::string& key, const std::string& value) {
    int out = 0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "yes" || value == "on" || value == "1") return true;
    if (value == "false" || value == "no" || value == "off" || value == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key + ": " + what);
}

std::string num(double v) {
    // Shortest text that parses back to the same double.
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Values resolved only after the whole file is read.
struct Pending {
    std::optional<double> omega_ref;
    std::optional<double> carrier;
};

using Setter = std::function<void(ExperimentConfig&, Pending&, const std::string& key,
                                  const std::string& value)>;

template <typename Fn>
Setter number(Fn assign) {
    return [assign](ExperimentConfig& c, Pending&, const std::string& key,
                    const std::string& value) { assign(c, to_double(key, value), key); };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        // model
        {"model.omega_g", number([](auto& c, double v, auto& k) {
             require(v > 0.0, k, "must be positive");
             c.model.omega_g = v;
         })},
        {"model.omega_e", number([](auto& c, double v, auto& k) {
             require(v > 0.0, k, "must be positive");
             c.model.omega_e = v;
         })},
        {"model.omega_ref",
         [](ExperimentConfig&, Pending& p, const std::string& k, const std::string& v) {
             const double x = to_double(k, v);
             require(x > 0.0, k, "must be positive");
             p.omega_ref = x;
         }},
        {"model.delta", number([](auto& c, double v, auto&) { c.model.delta = v; })},
        {"model.q_g", number([](auto& c, double v, auto&) { c.model.q_g = v; })},
        {"model.q_e", number([](auto& c, double v, auto&) { c.model.q_e = v; })},
        {"model.v_ge", number([](auto& c, double v, auto&) { c.model.v_ge = v; })},
        {"model.v_ge_slope", number([](auto& c, double v, auto&) { c.model.v_ge_slope = v; })},
        {"model.mu", number([](auto& c, double v, auto&) { c.model.mu = v; })},
        {"model.mu_slope", number([](auto& c, double v, auto&) { c.model.mu_slope = v; })},
        // grid
        {"grid.n_points",
         [](ExperimentConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.grid.n_points = to_int(k, v);
         }},
        {"grid.q_min", number([](auto& c, double v, auto&) { c.grid.q_min = v; })},
        {"grid.q_max", number([](auto& c, double v, auto&) { c.grid.q_max = v; })},
        // propagator
        {"propagator.dt", number([](auto& c, double v, auto& k) {
             require(v > 0.0, k, "must be positive");
             c.propagator.dt = v;
         })},
        {"propagator.tolerance", number([](auto& c, double v, auto& k) {
             require(v > 0.0, k, "must be positive");
             c.propagator.tolerance = v;
         })},
        {"propagator.scheme",
         [](ExperimentConfig& c, Pending&, const std::string& k, const std::string& v) {
             try {
                 c.propagator.scheme = scheme_from_string(v);
             } catch (const std::invalid_argument&) {
                 throw ConfigError(k + ": expected rk4 or chebyshev, got '" + v + "'");
             }
         }},
        {"propagator.symmetrize",
         [](ExperimentConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.propagator.symmetrize = to_bool(k, v);
         }},
        // pump
        {"pump.epsilon0", number([](auto& c, double v, auto&) { c.pump.epsilon0 = v; })},
        {"pump.fwhm", number([](auto& c, double v, auto& k) {
             require(v > 0.0, k, "must be positive");
             c.pump.set_fwhm(v);
         })},
        {"pump.sigma", number([](auto& c, double v, auto& k) {
             require(v > 0.0, k, "must be positive");
             c.pump.sigma_l = v;
         })},
        {"pump.t_max", number([](auto& c, double v, auto&) { c.pump.t_max = v; })},
        {"pump.t_end", number([](auto& c, double v, auto& k) {
             require(v >= 0.0, k, "must be non-negative");
             c.pump.t_end = v;
         })},
        {"pump.carrier",
         [](ExperimentConfig&, Pending& p, const std::string& k, const std::string& v) {
             if (v == "auto") {
                 p.carrier.reset();
             } else {
                 p.carrier = to_double(k, v);
             }
         }},
        // control
        {"control.enabled",
         [](ExperimentConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.schedule.enabled = to_bool(k, v);
         }},
        {"control.k_value",
         [](ExperimentConfig& c, Pending&, const std::string& k, const std::string& v) {
             if (v == "auto") {
                 c.schedule.k_value.reset();
                 return;
             }
             const double x = to_double(k, v);
             require(x >= 0.0, k, "must be non-negative");
             c.schedule.k_value = x;
         }},
        {"control.loop_rate", number([](auto& c, double v, auto& k) {
             require(v > 0.0, k, "must be positive");
             c.schedule.loop_rate = v;
         })},
        {"control.off_windows",
         [](ExperimentConfig& c, Pending&, const std::string& k, const std::string& v) {
             try {
                 ControlSchedule check;
                 check.off_windows = parse_windows(v);
                 check.validate();
                 c.schedule.off_windows = std::move(check.off_windows);
             } catch (const std::exception& e) {
                 throw ConfigError(k + ": " + e.what());
             }
         }},
        // lindblad
        {"lindblad.gamma", number([](auto& c, double v, auto& k) {
             require(v >= 0.0, k, "quench rate must be non-negative");
             c.lindblad.gamma_q = v;
         })},
        // run
        {"run.t_final", number([](auto& c, double v, auto&) { c.t_final = v; })},
        {"run.record_stride",
         [](ExperimentConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.record_stride = to_int(k, v);
             require(c.record_stride >= 1, k, "must be >= 1");
         }},
        {"run.dissipation_during_pump",
         [](ExperimentConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.dissipation_during_pump = to_bool(k, v);
         }},
        {"run.spectrum_window",
         [](ExperimentConfig& c, Pending&, const std::string& k, const std::string& v) {
             try {
                 c.spectrum_window = window_from_string(v);
             } catch (const std::invalid_argument&) {
                 throw ConfigError(k + ": expected hann or rectangular, got '" + v + "'");
             }
         }},
        {"run.spectrum_zero_pad",
         [](ExperimentConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.spectrum_zero_pad = to_int(k, v);
             require(c.spectrum_zero_pad >= 1, k, "must be >= 1");
         }},
    };
    return table;
}

bool is_whole_multiple(double span, double dt) {
    const double steps = span / dt;
    return std::abs(steps - std::round(steps)) <= 1e-6;
}

}  // namespace

void ExperimentConfig::validate() const {
    auto wrap = [](const std::string& prefix, auto&& fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(prefix + ": " + e.what());
        }
    };
    wrap("grid", [&] { grid.validate(); });
    wrap("model", [&] { model.validate(); });
    wrap("propagator", [&] { propagator.validate(); });
    wrap("pump", [&] { pump.validate(); });
    wrap("control", [&] { schedule.validate(); });
    wrap("lindblad", [&] { lindblad.validate(); });
    require(t_final > pump.t_end, "run.t_final", "must exceed pump.t_end");
    require(record_stride >= 1, "run.record_stride", "must be >= 1");
    require(spectrum_zero_pad >= 1, "run.spectrum_zero_pad", "must be >= 1");
    require(is_whole_multiple(pump.t_end, propagator.dt), "pump.t_end",
            "must be a whole number of time steps");
    require(is_whole_multiple(t_final - pump.t_end, propagator.dt), "run.t_final",
            "tracking interval must be a whole number of time steps");
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    const auto& ma = a.model;
    const auto& mb = b.model;
    return ma.omega_g == mb.omega_g && ma.omega_e == mb.omega_e && ma.delta == mb.delta &&
           ma.q_g == mb.q_g && ma.q_e == mb.q_e && ma.v_ge == mb.v_ge &&
           ma.v_ge_slope == mb.v_ge_slope && ma.mu == mb.mu && ma.mu_slope == mb.mu_slope &&
           ma.omega_ref == mb.omega_ref && a.grid.n_points == b.grid.n_points &&
           a.grid.q_min == b.grid.q_min && a.grid.q_max == b.grid.q_max &&
           a.propagator.dt == b.propagator.dt && a.propagator.scheme == b.propagator.scheme &&
           a.propagator.tolerance == b.propagator.tolerance &&
           a.propagator.symmetrize == b.propagator.symmetrize &&
           a.pump.epsilon0 == b.pump.epsilon0 && a.pump.t_max == b.pump.t_max &&
           a.pump.sigma_l == b.pump.sigma_l && a.pump.carrier == b.pump.carrier &&
           a.pump.t_end == b.pump.t_end && a.schedule.k_value == b.schedule.k_value &&
           a.schedule.loop_rate == b.schedule.loop_rate &&
           a.schedule.off_windows == b.schedule.off_windows &&
           a.schedule.enabled == b.schedule.enabled &&
           a.lindblad.gamma_q == b.lindblad.gamma_q && a.t_final == b.t_final &&
           a.record_stride == b.record_stride &&
           a.dissipation_during_pump == b.dissipation_during_pump &&
           a.spectrum_window == b.spectrum_window && a.spectrum_zero_pad == b.spectrum_zero_pad;
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.pump.carrier = vertical_gap(c.model);
    return c;
}

std::vector<std::pair<double, double>> parse_windows(const std::string& text) {
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("window '" + item + "' is not of the form start:end");
        }
        const double start = to_double("window start", trim(item.substr(0, colon)));
        const double end = to_double("window end", trim(item.substr(colon + 1)));
        out.emplace_back(start, end);
    }
    return out;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig config;
    Pending pending;
    std::set<std::string> seen_sections;
    std::set<std::string> seen_keys;
    std::string section;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
                throw ConfigError(where + ": unknown section [" + section + "]");
            }
            if (!seen_sections.insert(section).second) {
                throw ConfigError(where + ": duplicate section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        if (section.empty()) throw ConfigError(where + ": key outside of any section");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(where + ": unknown key " + key);
        if (!seen_keys.insert(key).second) throw ConfigError(where + ": duplicate key " + key);
        if ((key == "pump.fwhm" && seen_keys.count("pump.sigma")) ||
            (key == "pump.sigma" && seen_keys.count("pump.fwhm"))) {
            throw ConfigError(where + ": give either pump.fwhm or pump.sigma, not both");
        }
        if (value.empty() && key != "control.off_windows") {
            throw ConfigError(key + ": missing value");
        }
        it->second(config, pending, key, value);
    }
    for (const auto& s : kSections) {
        if (!seen_sections.count(s)) throw ConfigError("missing required section [" + s + "]");
    }
    config.model.omega_ref = pending.omega_ref.value_or(config.model.omega_g);
    config.pump.carrier = pending.carrier.value_or(vertical_gap(config.model));
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string emit_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[model]\n"
        << "omega_g = " << num(c.model.omega_g) << "\n"
        << "omega_e = " << num(c.model.omega_e) << "\n"
        << "omega_ref = " << num(c.model.omega_ref) << "\n"
        << "delta = " << num(c.model.delta) << "\n"
        << "q_g = " << num(c.model.q_g) << "\n"
        << "q_e = " << num(c.model.q_e) << "\n"
        << "v_ge = " << num(c.model.v_ge) << "\n"
        << "v_ge_slope = " << num(c.model.v_ge_slope) << "\n"
        << "mu = " << num(c.model.mu) << "\n"
        << "mu_slope = " << num(c.model.mu_slope) << "\n\n"
        << "[grid]\n"
        << "n_points = " << c.grid.n_points << "\n"
        << "q_min = " << num(c.grid.q_min) << "\n"
        << "q_max = " << num(c.grid.q_max) << "\n\n"
        << "[propagator]\n"
        << "dt = " << num(c.propagator.dt) << "\n"
        << "scheme = " << to_string(c.propagator.scheme) << "\n"
        << "tolerance = " << num(c.propagator.tolerance) << "\n"
        << "symmetrize = " << (c.propagator.symmetrize ? "true" : "false") << "\n\n"
        << "[pump]\n"
        << "epsilon0 = " << num(c.pump.epsilon0) << "\n"
        << "sigma = " << num(c.pump.sigma_l) << "  # fwhm " << num(c.pump.fwhm()) << " fs\n"
        << "t_max = " << num(c.pump.t_max) << "\n"
        << "t_end = " << num(c.pump.t_end) << "\n"
        << "carrier = " << num(c.pump.carrier) << "\n\n"
        << "[control]\n"
        << "enabled = " << (c.schedule.enabled ? "true" : "false") << "\n"
        << "k_value = " << (c.schedule.k_value ? num(*c.schedule.k_value) : "auto") << "\n"
        << "loop_rate = " << num(c.schedule.loop_rate) << "\n"
        << "off_windows = ";
    for (std::size_t i = 0; i < c.schedule.off_windows.size(); ++i) {
        if (i) out << ", ";
        out << num(c.schedule.off_windows[i].first) << ":"
            << num(c.schedule.off_windows[i].second);
    }
    out << "\n\n"
        << "[lindblad]\n"
        << "gamma = " << num(c.lindblad.gamma_q) << "\n\n"
        << "[run]\n"
        << "t_final = " << num(c.t_final) << "\n"
        << "record_stride = " << c.record_stride << "\n"
        << "dissipation_during_pump = " << (c.dissipation_during_pump ? "true" : "false")
        << "\n"
        << "spectrum_window = " << to_string(c.spectrum_window) << "\n"
        << "spectrum_zero_pad = " << c.spectrum_zero_pad << "\n";
    return out.str();
}

void SweepSpec::validate() const {
    if (gamma_values.empty()) throw ConfigError("sweep: gamma list is empty");
    if (delta_values.empty()) throw ConfigError("sweep: delta list is empty");
    for (double g : gamma_values) {
        if (!(g >= 0.0)) throw ConfigError("sweep: gamma values must be non-negative");
    }
    base.validate();
}

ExperimentConfig sweep_cell_config(const ExperimentConfig& base, double gamma, double delta) {
    ExperimentConfig c = base;
    c.lindblad.gamma_q = gamma;
    c.model.delta = delta;
    c.pump.carrier = vertical_gap(c.model);
    return c;
}

}  // namespace qtrack
