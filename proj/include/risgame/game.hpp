#pragma once

#include <Eigen/Dense>

#include "risgame/scene.hpp"

namespace risgame {

struct LeaderStrategy {
    double P_S = 0.0;
    Eigen::VectorXcd w_S;    // unit norm, N_S
    Eigen::VectorXcd w_D;    // unit norm, N_D
    Eigen::VectorXcd theta;  // surface gains, N
};

struct JammerStrategy {
    double P_J = 0.0;
    Eigen::VectorXcd w_J;  // unit norm, N_J
};

struct EffectiveChannels {
    Eigen::MatrixXcd H_SRD;  // H_RD diag(theta) H_SR
    Eigen::MatrixXcd H_JRD;  // H_RD diag(theta) H_JR
    Eigen::MatrixXcd Ht_SD;  // H_SD + H_SRD
    Eigen::MatrixXcd Ht_JD;  // H_JD + H_JRD
};

/// Effective channels on the true matrices of `ch`.
EffectiveChannels effective_channels(const ChannelSet& ch, const Eigen::VectorXcd& theta);
/// Effective jammer channel H_JD + H_RD diag(theta) H_JR for arbitrary matrices.
Eigen::MatrixXcd effective_jammer_channel(const Eigen::MatrixXcd& H_JD, const Eigen::MatrixXcd& H_RD,
                                          const Eigen::VectorXcd& theta, const Eigen::MatrixXcd& H_JR);

/// True when the strategies satisfy unit norms and box limits of cfg.
bool leader_feasible(const LeaderStrategy& l, const SceneConfig& cfg, double tol = 1e-9);
bool jammer_feasible(const JammerStrategy& j, const SceneConfig& cfg, double tol = 1e-9);

double sinr(const ChannelSet& ch, const LeaderStrategy& l, const JammerStrategy& j, double sigma_R2,
            double sigma_D2);

/// -SINR - c_J P_J on the true channels.
double utility_jammer(const ChannelSet& ch, const LeaderStrategy& l, const JammerStrategy& j,
                      const SceneConfig& cfg);
/// SINR - c_S P_S on the true channels.
double utility_leader_exact(const ChannelSet& ch, const LeaderStrategy& l, const JammerStrategy& j,
                            const SceneConfig& cfg);

/// Closed-form follower reply on the true channels of `ch`: matched
/// direction and the clamped stationary power.  A zero effective jamming
/// channel yields e1 with zero power.
JammerStrategy jammer_best_response(const ChannelSet& ch, const LeaderStrategy& l, const SceneConfig& cfg);

}  // namespace risgame
