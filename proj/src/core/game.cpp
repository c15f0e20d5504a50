#include "risgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace risgame {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

MatrixXcd effective_jammer_channel(const MatrixXcd& H_JD, const MatrixXcd& H_RD, const VectorXcd& theta,
                                   const MatrixXcd& H_JR)
{
    if (H_RD.cols() != theta.size() || H_JR.rows() != theta.size() || H_RD.rows() != H_JD.rows() ||
        H_JR.cols() != H_JD.cols()) {
        throw std::invalid_argument("effective_jammer_channel: shape mismatch");
    }
    if (theta.size() == 0) return H_JD;
    return H_JD + H_RD * theta.asDiagonal() * H_JR;
}

EffectiveChannels effective_channels(const ChannelSet& ch, const VectorXcd& theta)
{
    const auto n = theta.size();
    if (ch.H_SR.rows() != n || ch.H_RD.cols() != n || ch.H_JR.rows() != n ||
        ch.H_SD.rows() != ch.H_RD.rows() || ch.H_SD.cols() != ch.H_SR.cols() ||
        ch.H_JD.rows() != ch.H_RD.rows() || ch.H_JD.cols() != ch.H_JR.cols()) {
        throw std::invalid_argument("effective_channels: shape mismatch");
    }
    EffectiveChannels e;
    if (n == 0) {
        e.H_SRD = MatrixXcd::Zero(ch.H_SD.rows(), ch.H_SD.cols());
        e.H_JRD = MatrixXcd::Zero(ch.H_JD.rows(), ch.H_JD.cols());
    } else {
        e.H_SRD = ch.H_RD * theta.asDiagonal() * ch.H_SR;
        e.H_JRD = ch.H_RD * theta.asDiagonal() * ch.H_JR;
    }
    e.Ht_SD = ch.H_SD + e.H_SRD;
    e.Ht_JD = ch.H_JD + e.H_JRD;
    return e;
}

bool leader_feasible(const LeaderStrategy& l, const SceneConfig& cfg, double tol)
{
    if (std::abs(l.w_S.norm() - 1.0) > tol || std::abs(l.w_D.norm() - 1.0) > tol) return false;
    if (l.P_S < -tol || l.P_S > cfg.P_S_max + tol) return false;
    for (Eigen::Index n = 0; n < l.theta.size(); ++n) {
        if (std::abs(l.theta(n)) > cfg.lambda_max * (1.0 + tol)) return false;
    }
    return true;
}

bool jammer_feasible(const JammerStrategy& j, const SceneConfig& cfg, double tol)
{
    return std::abs(j.w_J.norm() - 1.0) <= tol && j.P_J >= -tol && j.P_J <= cfg.P_J_max + tol;
}

double sinr(const ChannelSet& ch, const LeaderStrategy& l, const JammerStrategy& j, double sigma_R2,
            double sigma_D2)
{
    const EffectiveChannels e = effective_channels(ch, l.theta);
    const double signal = l.P_S * std::norm(l.w_D.dot(e.Ht_SD * l.w_S));
    const double jam = j.P_J * std::norm(l.w_D.dot(e.Ht_JD * j.w_J));
    double relay = 0.0;
    if (l.theta.size() > 0) relay = sigma_R2 * (l.w_D.adjoint() * ch.H_RD * l.theta.asDiagonal()).squaredNorm();
    return signal / (jam + relay + sigma_D2);
}

double utility_jammer(const ChannelSet& ch, const LeaderStrategy& l, const JammerStrategy& j,
                      const SceneConfig& cfg)
{
    return -sinr(ch, l, j, cfg.sigma_R2, cfg.sigma_D2) - cfg.c_J * j.P_J;
}

double utility_leader_exact(const ChannelSet& ch, const LeaderStrategy& l, const JammerStrategy& j,
                            const SceneConfig& cfg)
{
    return sinr(ch, l, j, cfg.sigma_R2, cfg.sigma_D2) - cfg.c_S * l.P_S;
}

JammerStrategy jammer_best_response(const ChannelSet& ch, const LeaderStrategy& l, const SceneConfig& cfg)
{
    const EffectiveChannels e = effective_channels(ch, l.theta);
    const VectorXcd g = e.Ht_JD.adjoint() * l.w_D;
    const double gn = g.norm();
    JammerStrategy out;
    if (gn == 0.0) {
        out.w_J = VectorXcd::Zero(ch.H_JD.cols());
        out.w_J(0) = 1.0;
        out.P_J = 0.0;
        return out;
    }
    out.w_J = g / gn;
    const double signal = std::sqrt(l.P_S) * std::abs(l.w_D.dot(e.Ht_SD * l.w_S));
    double noise = cfg.sigma_D2;
    if (l.theta.size() > 0) noise += cfg.sigma_R2 * (l.w_D.adjoint() * ch.H_RD * l.theta.asDiagonal()).squaredNorm();
    const double p = signal / (std::sqrt(cfg.c_J) * gn) - noise / (gn * gn);
    out.P_J = std::clamp(p, 0.0, cfg.P_J_max);
    return out;
}

}  // namespace risgame
