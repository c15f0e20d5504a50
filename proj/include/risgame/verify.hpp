#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "risgame/game.hpp"
#include "risgame/scene.hpp"

namespace risgame {

struct OracleConfig {
    int power_points = 512;
    int direction_samples = 10000;
    int ball_samples = 10000;
    double tol = 1e-6;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument when a count is below 1.
    void validate() const;
};

struct FollowerSample {
    double P_J = 0.0;
    Eigen::VectorXcd w_J;
    double u_J = 0.0;
};

/// Best jammer utility over a power grid on [0, P_J_max] times random unit
/// directions on the true channels.  `candidate`, when given, joins the
/// candidate set (direction and power).
FollowerSample follower_oracle(const ChannelSet& ch, const LeaderStrategy& l, const SceneConfig& cfg,
                               const OracleConfig& oc, const std::optional<JammerStrategy>& candidate = {});

struct WorstCaseSamples {
    double max_psi_jd = 0.0;  // max ||w_D^H H~_JD||^2
    double min_psi_jd = 0.0;  // min of the same
    double max_psi_jr = 0.0;  // max ||Theta H_JR w_J||^2
    double nominal_jd = 0.0;  // value at the estimates
};

/// Samples the error balls of `estimates` (boundary and interior, nominal
/// point included) at the leader strategy and jammer direction w_J.
WorstCaseSamples worst_case_sampler(const LeaderStrategy& l, const Eigen::VectorXcd& w_J,
                                    const ChannelSet& estimates, const OracleConfig& oc);

struct CertificateCheck {
    bool ok = true;
    /// Excess over the certificate, relative to max(certificate, nominal).
    double psi_jd_excess = 0.0;
    double phi_jd_excess = 0.0;
    double psi_jr_excess = 0.0;
};

CertificateCheck check_certificates(const WorstCaseSamples& s, double psi_JD, double phi_JD, double psi_JR,
                                    double tol);

struct MonotonicityResult {
    bool ok = true;
    int first_violation = -1;  // index k+1 of the first u[k+1] < u[k] - slack
};

MonotonicityResult monotonicity_check(const std::vector<double>& trace, double slack);

}  // namespace risgame
