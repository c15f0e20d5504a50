#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "risgame/verify.hpp"

namespace risgame {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

MatrixXcd cascade(const MatrixXcd& H_RD, const VectorXcd& theta, const MatrixXcd& H_R)
{
    if (theta.size() == 0) return MatrixXcd::Zero(H_RD.rows(), H_R.cols());
    return H_RD * theta.asDiagonal() * H_R;
}

MatrixXcd gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    std::normal_distribution<double> g;
    MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = {g(rng), g(rng)};
    return m;
}

// Uniform point of the Frobenius ball of squared radius eps; on the
// boundary when `boundary`, otherwise radius sqrt(eps) u^(1/dim).
MatrixXcd ball_point(Eigen::Index rows, Eigen::Index cols, double eps, bool boundary, Rng& rng)
{
    if (eps <= 0.0 || rows * cols == 0) return MatrixXcd::Zero(rows, cols);
    MatrixXcd d = gaussian(rows, cols, rng);
    double r = std::sqrt(eps);
    if (!boundary) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        r *= std::pow(u(rng), 1.0 / static_cast<double>(2 * rows * cols));
    }
    return d * (r / d.norm());
}

}  // namespace

void OracleConfig::validate() const
{
    if (power_points < 1) throw std::invalid_argument("power_points must be >= 1");
    if (direction_samples < 1) throw std::invalid_argument("direction_samples must be >= 1");
    if (ball_samples < 1) throw std::invalid_argument("ball_samples must be >= 1");
}

FollowerSample follower_oracle(const ChannelSet& ch, const LeaderStrategy& l, const SceneConfig& cfg,
                               const OracleConfig& oc, const std::optional<JammerStrategy>& candidate)
{
    oc.validate();
    const MatrixXcd Ht_SD = ch.H_SD + cascade(ch.H_RD, l.theta, ch.H_SR);
    const MatrixXcd Ht_JD = ch.H_JD + cascade(ch.H_RD, l.theta, ch.H_JR);
    const double signal = l.P_S * std::norm(l.w_D.dot(Ht_SD * l.w_S));
    double noise = cfg.sigma_D2 * l.w_D.squaredNorm();
    if (l.theta.size() > 0)
        noise += cfg.sigma_R2 * (l.w_D.adjoint() * ch.H_RD * l.theta.asDiagonal()).squaredNorm();
    const VectorXcd h = Ht_JD.adjoint() * l.w_D;

    std::vector<double> powers;
    for (int i = 0; i < oc.power_points; ++i)
        powers.push_back(oc.power_points == 1 ? 0.0 : cfg.P_J_max * i / (oc.power_points - 1));

    FollowerSample best;
    best.u_J = -INFINITY;
    const auto consider = [&](const VectorXcd& w, const std::vector<double>& ps) {
        const double g = std::norm(h.dot(w));
        const double* arg = nullptr;
        for (const double& p : ps) {
            const double u = -signal / (p * g + noise) - cfg.c_J * p;
            if (u > best.u_J) {
                best.u_J = u;
                arg = &p;
            }
        }
        if (arg) {
            best.P_J = *arg;
            best.w_J = w;
        }
    };

    Rng rng(oc.seed);
    const auto nj = ch.H_JD.cols();
    for (int k = 0; k < oc.direction_samples; ++k) {
        VectorXcd w = gaussian(nj, 1, rng);
        w /= w.norm();
        consider(w, powers);
    }
    if (candidate) {
        consider(candidate->w_J, powers);
        consider(candidate->w_J, {candidate->P_J});
    }
    return best;
}

WorstCaseSamples worst_case_sampler(const LeaderStrategy& l, const VectorXcd& w_J, const ChannelSet& est,
                                    const OracleConfig& oc)
{
    oc.validate();
    const bool surface = l.theta.size() > 0;
    const auto value_jd = [&](const MatrixXcd& D_JD, const MatrixXcd& D_JR) {
        MatrixXcd H = est.Hhat_JD + D_JD;
        if (surface) H += cascade(est.H_RD, l.theta, est.Hhat_JR + D_JR);
        return (l.w_D.adjoint() * H).squaredNorm();
    };
    const auto value_jr = [&](const MatrixXcd& D_JR) {
        if (!surface) return 0.0;
        return (l.theta.asDiagonal() * ((est.Hhat_JR + D_JR) * w_J)).squaredNorm();
    };

    const MatrixXcd Z_JD = MatrixXcd::Zero(est.Hhat_JD.rows(), est.Hhat_JD.cols());
    const MatrixXcd Z_JR = MatrixXcd::Zero(est.Hhat_JR.rows(), est.Hhat_JR.cols());
    WorstCaseSamples s;
    s.nominal_jd = value_jd(Z_JD, Z_JR);
    s.max_psi_jd = s.min_psi_jd = s.nominal_jd;
    s.max_psi_jr = value_jr(Z_JR);

    Rng rng(oc.seed);
    for (int k = 0; k < oc.ball_samples; ++k) {
        const bool boundary = k % 2 == 0;
        const MatrixXcd D_JD = ball_point(Z_JD.rows(), Z_JD.cols(), est.eps_JD, boundary, rng);
        const MatrixXcd D_JR = ball_point(Z_JR.rows(), Z_JR.cols(), est.eps_JR, boundary, rng);
        const double v = value_jd(D_JD, D_JR);
        s.max_psi_jd = std::max(s.max_psi_jd, v);
        s.min_psi_jd = std::min(s.min_psi_jd, v);
        s.max_psi_jr = std::max(s.max_psi_jr, value_jr(D_JR));
    }
    return s;
}

CertificateCheck check_certificates(const WorstCaseSamples& s, double psi_JD, double phi_JD, double psi_JR,
                                    double tol)
{
    CertificateCheck c;
    const double jd_scale = std::max({psi_JD, s.nominal_jd, 1e-300});
    const double jr_scale = std::max({psi_JR, s.max_psi_jr, 1e-300});
    c.psi_jd_excess = std::max(0.0, s.max_psi_jd - psi_JD) / jd_scale;
    c.phi_jd_excess = std::max(0.0, phi_JD - s.min_psi_jd) / jd_scale;
    c.psi_jr_excess = std::max(0.0, s.max_psi_jr - psi_JR) / jr_scale;
    c.ok = c.psi_jd_excess <= tol && c.phi_jd_excess <= tol && c.psi_jr_excess <= tol;
    return c;
}

MonotonicityResult monotonicity_check(const std::vector<double>& trace, double slack)
{
    MonotonicityResult r;
    for (std::size_t k = 1; k < trace.size(); ++k) {
        if (trace[k] < trace[k - 1] - slack) {
            r.ok = false;
            r.first_violation = static_cast<int>(k);
            break;
        }
    }
    return r;
}

}  // namespace risgame
