// record_io.hpp: CSV and metadata output for trajectory records.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qtrack/observables.hpp"

namespace qtrack {

inline constexpr const char* kTrajectoryHeader =
    "t_fs,pop_e_target,pop_e_system,pop_e_controlled,purity_target,purity_system,"
    "purity_controlled,J_system,J_controlled,field";

/// Numbers are written with 12 significant digits.
std::string format_number(double value);

/// Spectrum of the record's field series using the window and zero padding
/// stored in its metadata (hann, 4x when absent).
Spectrum record_spectrum(const TrajectoryRecord& record);

std::string trajectory_csv(const TrajectoryRecord& record);
std::string spectrum_csv(const Spectrum& spectrum);
std::string diagnostics_csv(const TrajectoryRecord& record);
std::string meta_text(const TrajectoryRecord& record, const Spectrum& spectrum);

/// Writes trajectory.csv, spectrum.csv, diagnostics.csv and meta into dir
/// (created if needed). Throws std::runtime_error if dir is not writable.
void emit_record(const TrajectoryRecord& record, const std::filesystem::path& dir);

/// Directory name for a sweep cell: g<gamma>_d<delta>.
std::string sweep_cell_name(double gamma, double delta);

struct FieldSeries {
    std::vector<double> times;
    std::vector<double> field;
};

/// Reads the t_fs and field columns back from a trajectory.csv file.
FieldSeries read_field_series(const std::filesystem::path& csv);

}  // namespace qtrack
