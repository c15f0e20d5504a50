#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace risgame {

using Rng = std::mt19937_64;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Scene description in linear units (watts, linear gains).  The JSON loader
/// accepts the log-unit fields and converts them.
struct SceneConfig {
    Point2 pos_S{0.0, 100.0};
    Point2 pos_D{400.0, 0.0};
    Point2 pos_J{100.0, 400.0};
    Point3 pos_R{200.0, 0.0, 200.0};

    int N_S = 4;
    int N_D = 2;
    int N_J = 4;
    int N = 20;  // 0 disables the surface

    double P_S_max = 5.0;
    double P_J_max = 10.0;
    double P_R_max = 0.1;             // 20 dBm
    double lambda_max = 3.1622776601683795;  // 10 dB amplitude
    double sigma_R2 = 1e-14;          // -140 dBW
    double sigma_D2 = 1e-14;
    double c_S = 2.0;
    double c_J = 3.0;
    double eta_ground = 3.5;
    double eta_ris = 2.3;
    double L0 = 1e-2;                 // -20 dB
    double rician_K = 10.0;
    double delta = 0.05;
    std::uint64_t seed = 42;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

double db_to_linear(double db);
double linear_to_db(double lin);
double dbm_to_watts(double dbm);
double watts_to_dbm(double w);
/// Amplitude gain from a dB figure (20 log10 convention).
double db_to_amplitude(double db);
double amplitude_to_db(double a);

/// Reads a scene from JSON.  Missing fields keep their defaults.  Power-like
/// fields are given in log units: P_R_max_dBm, lambda_max_dB, sigma_R2_dBW,
/// sigma_D2_dBW, L0_dB.  P_S_max and P_J_max are in watts.
SceneConfig scene_from_json(const std::string& text);
SceneConfig load_scene(const std::string& path);
std::string scene_to_json(const SceneConfig& cfg);

/// L0 * d^-eta.  Throws std::domain_error for d < 1.
double path_loss_gain(double d, double eta, double L0);

struct ChannelSet {
    Eigen::MatrixXcd H_SD;  // N_D x N_S
    Eigen::MatrixXcd H_SR;  // N x N_S
    Eigen::MatrixXcd H_RD;  // N_D x N
    Eigen::MatrixXcd H_JD;  // N_D x N_J
    Eigen::MatrixXcd H_JR;  // N x N_J
    Eigen::MatrixXcd Hhat_JD;
    Eigen::MatrixXcd Hhat_JR;
    double eps_JD = 0.0;  // squared Frobenius radius
    double eps_JR = 0.0;

    int N() const { return static_cast<int>(H_SR.rows()); }
    /// Copy with the estimates replaced by the truth and zero radii.
    ChannelSet perfect() const;
    /// Copy in which the estimates are treated as the truth, zero radii.
    ChannelSet estimates_as_truth() const;
    /// Copy with the surface removed (N = 0).
    ChannelSet without_surface() const;
};

struct UncertainEstimate {
    Eigen::MatrixXcd estimate;
    double radius = 0.0;
};

/// Error of Frobenius norm delta * ||truth|| with uniform direction;
/// estimate = truth - error, radius = (delta * ||truth||)^2.
UncertainEstimate make_uncertainty(const Eigen::MatrixXcd& truth, double delta, Rng& rng);

/// ULA steering vector with half-wavelength spacing for direction cosine u.
Eigen::VectorXcd ula_steering(int m, double u);

ChannelSet draw_channels(const SceneConfig& cfg, Rng& rng);

}  // namespace risgame
