// observables.hpp: Populations, purity, target overlap, energy and field spectra.

#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

#include "qtrack/block_density.hpp"
#include "qtrack/model.hpp"

namespace qtrack {

/// Tr rho_e. Throws std::domain_error if the imaginary residue exceeds 1e-12.
double excited_population(const BlockDensity& rho);
double ground_population(const BlockDensity& rho);

/// Tr rho^2 over the full two-surface space.
double purity(const BlockDensity& rho);

/// J = Tr(rho_c rho_tar), real part; residue checked as for populations.
double overlap(const BlockDensity& rho_c, const BlockDensity& rho_tar);

/// J / sqrt(purity_c * purity_tar).
double normalized_overlap(const BlockDensity& rho_c, const BlockDensity& rho_tar);

/// Tr(H0 rho) in eV.
double energy(const HamiltonianBlocks& h, const BlockDensity& rho);

/// Smallest eigenvalue of the assembled 2N x 2N operator.
double min_eigenvalue(const BlockDensity& rho);

/// Tr(A B) for two block operators, full complex value.
cplx trace_product(const BlockDensity& a, const BlockDensity& b);

enum class Window { hann, rectangular };

const char* to_string(Window window);
Window window_from_string(const std::string& name);

struct Spectrum {
    std::vector<double> energy_ev;
    std::vector<double> magnitude;  ///< dt * |DFT| of the windowed, zero-padded series
    Window window{Window::hann};
    int zero_pad{4};
    std::size_t padded_length{0};
    double dt{0.0};

    /// (energy, magnitude) of the largest bin, excluding DC.
    std::pair<double, double> peak() const;
};

/// One-sided magnitude spectrum. The series is windowed, zero-padded to
/// zero_pad times its length and transformed; bin k sits at hbar*2*pi*k/(M*dt).
Spectrum field_spectrum(const std::vector<double>& series, double dt,
                        Window window = Window::hann, int zero_pad = 4);

/// sum_n |w_n x_n|^2 dt for the same window as field_spectrum.
double windowed_energy(const std::vector<double>& series, double dt, Window window);
/// Parseval counterpart of windowed_energy computed from the one-sided table.
double spectral_energy(const Spectrum& spectrum);

struct TrackSeries {
    std::vector<double> excited_population;
    std::vector<double> purity;
    std::vector<double> overlap;             ///< J with the target track
    std::vector<double> normalized_overlap;
};

/// Time series for the target, uncontrolled and controlled tracks.
struct TrajectoryRecord {
    std::vector<double> times;  ///< fs
    TrackSeries target;
    TrackSeries system;
    TrackSeries controlled;
    std::vector<double> field;         ///< field applied on [t, t + dt), eV per unit dipole
    std::vector<double> control_rate;  ///< control contribution to dJ/dt, 1/fs
    double k_value{0.0};
    double record_dt{0.0};             ///< spacing of the samples, fs
    std::vector<std::pair<double, double>> off_windows;
    std::map<std::string, std::string> metadata;

    std::size_t size() const { return times.size(); }
};

}  // namespace qtrack
