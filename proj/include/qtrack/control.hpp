// control.hpp: External fields: the Gaussian pump and the tracking feedback.
//
// Sign convention: the control Hamiltonian is Hc = eps * M with
//   M = | 0    -mu |
//       | -mu   0  |
// so a positive field lowers the off-diagonal blocks. The tracking field
//   eps = -i K conj(Tr{rho_c M rho_tar - rho_tar M rho_c})
// makes the control part of dJ/dt equal to (K/hbar)|Tr{...}|^2 >= 0.

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

#include "qtrack/block_density.hpp"

namespace qtrack {

/// Gaussian pump with a cosine carrier.
struct PumpPulse {
    double epsilon0{0.228};  ///< peak field, eV per unit dipole
    double t_max{20.0};      ///< envelope centre, fs
    double sigma_l{12.0 / 2.3548200450309493};  ///< envelope width, fs (FWHM 12 fs)
    double carrier{1.40035}; ///< hbar * omega_L, eV
    double t_end{40.0};      ///< end of the pump stage, fs

    double fwhm() const;
    void set_fwhm(double fwhm);
    void validate() const;
};

/// Field envelope factor at FWHM/2 from the peak is exactly 1/2.
double fwhm_to_sigma(double fwhm);

double pump_envelope(double t, const PumpPulse& pulse);
/// epsilon0 * exp(-(t - t_max)^2 / (2 sigma^2)) * cos(omega_L t)
double pump_field(double t, const PumpPulse& pulse);

struct ControlSchedule {
    /// Gain K in eV per dipole^2; unset means calibrate from loop_rate.
    std::optional<double> k_value;
    /// Target relaxation rate of the linearized feedback loop, 1/fs.
    double loop_rate{0.015};
    std::vector<std::pair<double, double>> off_windows;  ///< [start, end), fs
    bool enabled{true};

    void validate() const;
};

/// Full-space evaluation of the tracking field from 2N x 2N operators.
double tracking_field_general(const BlockDensity& rho_c, const BlockDensity& rho_tar,
                              const Eigen::MatrixXd& mu_matrix, double k_value);

/// Block evaluation with partial traces over the coordinate:
///   eps = K Im( Tr{c_ge mu t_g} + Tr{c_e mu t_ge} - Tr{t_ge mu c_g} - Tr{t_e mu c_ge}
///             - Tr{t_g mu c_eg} + Tr{c_g mu t_eg} - Tr{t_eg mu c_e} + Tr{c_eg mu t_e} )
double tracking_field_blocks(const BlockDensity& rho_c, const BlockDensity& rho_tar,
                             const Eigen::MatrixXd& mu_matrix, double k_value);
/// Same, for a diagonal dipole given by its diagonal.
double tracking_field_blocks(const BlockDensity& rho_c, const BlockDensity& rho_tar,
                             const Eigen::VectorXd& dipole, double k_value);

/// Zero inside any off window or when the schedule is disabled.
double gated_field(double t, double raw_field, const ControlSchedule& schedule);

/// Control contribution to dJ/dt = Re Tr{ -(i/hbar)[eps M, rho_c] rho_tar }, 1/fs.
double control_overlap_rate(const BlockDensity& rho_c, const BlockDensity& rho_tar,
                            const Eigen::MatrixXd& mu_matrix, double epsilon);

/// ||[M, rho]||_F^2, the curvature of the overlap along the control direction.
double control_stiffness(const BlockDensity& rho, const Eigen::MatrixXd& mu_matrix);

/// K = loop_rate * hbar / ||[M, rho_tar]||_F^2: the gain at which a small
/// tracking error relaxes at loop_rate under the frozen-state linearization.
double calibrate_gain(const BlockDensity& rho_tar, const Eigen::MatrixXd& mu_matrix,
                      double loop_rate);

}  // namespace qtrack
