#include "qtrack/record_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qtrack {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t\r");
        const auto last = cell.find_last_not_of(" \t\r");
        out.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
    }
    return out;
}

std::string metadata_or(const TrajectoryRecord& r, const std::string& key,
                        const std::string& fallback) {
    const auto it = r.metadata.find(key);
    return it == r.metadata.end() ? fallback : it->second;
}

}  // namespace

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

Spectrum record_spectrum(const TrajectoryRecord& record) {
    const Window window = window_from_string(metadata_or(record, "spectrum_window", "hann"));
    const int pad = std::stoi(metadata_or(record, "spectrum_zero_pad", "4"));
    return field_spectrum(record.field, record.record_dt, window, pad);
}

std::string trajectory_csv(const TrajectoryRecord& r) {
    std::string out = std::string(kTrajectoryHeader) + "\n";
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double row[] = {r.times[i],
                              r.target.excited_population[i],
                              r.system.excited_population[i],
                              r.controlled.excited_population[i],
                              r.target.purity[i],
                              r.system.purity[i],
                              r.controlled.purity[i],
                              r.system.overlap[i],
                              r.controlled.overlap[i],
                              r.field[i]};
        for (std::size_t c = 0; c < std::size(row); ++c) {
            if (c) out += ',';
            out += format_number(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string spectrum_csv(const Spectrum& s) {
    std::string out = "energy_eV,magnitude\n";
    for (std::size_t k = 0; k < s.magnitude.size(); ++k) {
        out += format_number(s.energy_ev[k]) + "," + format_number(s.magnitude[k]) + "\n";
    }
    return out;
}

std::string diagnostics_csv(const TrajectoryRecord& r) {
    std::string out = "t_fs,Jn_system,Jn_controlled,control_dJdt\n";
    for (std::size_t i = 0; i < r.size(); ++i) {
        out += format_number(r.times[i]) + "," + format_number(r.system.normalized_overlap[i]) +
               "," + format_number(r.controlled.normalized_overlap[i]) + "," +
               format_number(r.control_rate[i]) + "\n";
    }
    return out;
}

std::string meta_text(const TrajectoryRecord& r, const Spectrum& s) {
    std::ostringstream out;
    out << "# run metadata\n"
        << "code_version = " << metadata_or(r, "code_version", "unknown") << "\n"
        << "k_value = " << format_number(r.k_value) << "\n"
        << "k_rule = " << metadata_or(r, "k_rule", "unknown") << "\n"
        << "pump_end_fs = " << metadata_or(r, "pump_end_fs", "") << "\n"
        << "off_windows = " << metadata_or(r, "off_windows", "") << "\n"
        << "samples = " << r.size() << "\n"
        << "record_dt_fs = " << format_number(r.record_dt) << "\n"
        << "spectrum_window = " << to_string(s.window) << "\n"
        << "spectrum_zero_pad = " << s.zero_pad << "\n"
        << "spectrum_peak_eV = " << format_number(s.peak().first) << "\n"
        << "\n# configuration\n"
        << metadata_or(r, "config", "");
    return out.str();
}

void emit_record(const TrajectoryRecord& record, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
    const Spectrum spectrum = record_spectrum(record);
    write_file(dir / "trajectory.csv", trajectory_csv(record));
    write_file(dir / "spectrum.csv", spectrum_csv(spectrum));
    write_file(dir / "diagnostics.csv", diagnostics_csv(record));
    write_file(dir / "meta", meta_text(record, spectrum));
}

std::string sweep_cell_name(double gamma, double delta) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "g%g_d%g", gamma, delta);
    return buf;
}

FieldSeries read_field_series(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("cannot read '" + csv.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file '" + csv.string() + "'");
    const auto header = split_csv(line);
    int t_col = -1;
    int f_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "t_fs") t_col = static_cast<int>(i);
        if (header[i] == "field") f_col = static_cast<int>(i);
    }
    if (t_col < 0 || f_col < 0) {
        throw std::runtime_error("'" + csv.string() + "' lacks t_fs or field columns");
    }
    FieldSeries out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error("ragged row in '" + csv.string() + "'");
        }
        out.times.push_back(std::stod(cells[t_col]));
        out.field.push_back(std::stod(cells[f_col]));
    }
    return out;
}

}  // namespace qtrack
