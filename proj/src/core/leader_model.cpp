#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/SVD>

#include "risgame/bsum.hpp"

namespace risgame {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

const char* to_string(Scheme s)
{
    switch (s) {
    case Scheme::Robust: return "robust";
    case Scheme::Perfect: return "perfect";
    case Scheme::NonRobust: return "nonrobust";
    case Scheme::NoRis: return "noris";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(const std::string& name)
{
    for (Scheme s : {Scheme::Robust, Scheme::Perfect, Scheme::NonRobust, Scheme::NoRis}) {
        if (name == to_string(s)) return s;
    }
    return std::nullopt;
}

ChannelSet leader_view(const ChannelSet& ch, Scheme s)
{
    switch (s) {
    case Scheme::Robust: return ch;
    case Scheme::Perfect: return ch.perfect();
    case Scheme::NonRobust: return ch.estimates_as_truth();
    case Scheme::NoRis: return ch.without_surface();
    }
    return ch;
}

LeaderModel LeaderModel::from_view(const ChannelSet& view, const SceneConfig& cfg)
{
    LeaderModel m;
    m.cfg = cfg;
    m.kappa = 1.0 / std::sqrt(cfg.sigma_D2);
    const double jr = view.Hhat_JR.norm();
    if (view.N() > 0 && jr > 0.0) m.s = std::sqrt(static_cast<double>(view.Hhat_JR.cols())) / jr;
    m.H_SD = m.kappa * view.H_SD;
    m.Hhat_JD = m.kappa * view.Hhat_JD;
    m.H_RD = (m.kappa / m.s) * view.H_RD;
    m.H_SR = m.s * view.H_SR;
    m.Hhat_JR = m.s * view.Hhat_JR;
    m.eps_JD = m.kappa * m.kappa * view.eps_JD;
    m.eps_JR = m.s * m.s * view.eps_JR;
    m.sigma_R2 = m.s * m.s * cfg.sigma_R2;
    m.sigma_D2 = 1.0;
    m.P_R_max = m.s * m.s * cfg.P_R_max;
    return m;
}

JammerLinkData LeaderModel::link() const
{
    JammerLinkData d;
    d.H_RD = H_RD;
    d.Hhat_JD = Hhat_JD;
    d.Hhat_JR = Hhat_JR;
    d.eps_JD = eps_JD;
    d.eps_JR = eps_JR;
    return d;
}

MatrixXcd LeaderModel::Ht_SD(const VectorXcd& theta) const
{
    if (N() == 0) return H_SD;
    return H_SD + H_RD * theta.asDiagonal() * H_SR;
}

MatrixXcd LeaderModel::Ht_JD(const VectorXcd& theta) const
{
    if (N() == 0) return Hhat_JD;
    return Hhat_JD + H_RD * theta.asDiagonal() * Hhat_JR;
}

std::complex<double> signal_gain(const LeaderModel& m, const LeaderStrategy& l)
{
    return l.w_D.dot(m.Ht_SD(l.theta) * l.w_S);
}

double noise_term(const LeaderModel& m, const LeaderStrategy& l)
{
    double n = m.sigma_D2 * l.w_D.squaredNorm();
    if (m.N() > 0) n += m.sigma_R2 * (l.w_D.adjoint() * m.H_RD * l.theta.asDiagonal()).squaredNorm();
    return n;
}

double signal_ratio(const LeaderModel& m, const LeaderState& st, double floor)
{
    return std::abs(signal_gain(m, st.leader)) / std::sqrt(std::max(st.cert.psi_JD, floor));
}

double leader_objective(const LeaderModel& m, const LeaderState& st, double floor)
{
    const double ps = st.leader.P_S;
    return std::sqrt(m.cfg.c_J * ps) * signal_ratio(m, st, floor) - m.cfg.c_S * ps;
}

double jamming_lower_bound(const LeaderModel& m, const LeaderState& st, double floor)
{
    const double a = std::abs(signal_gain(m, st.leader));
    return std::sqrt(st.leader.P_S) * a / (std::sqrt(m.cfg.c_J) * std::sqrt(std::max(st.cert.phi_JD, floor))) -
           noise_term(m, st.leader) / std::max(st.cert.psi_JD, floor);
}

double surface_power(const LeaderModel& m, const LeaderState& st)
{
    if (m.N() == 0) return 0.0;
    const VectorXcd& t = st.leader.theta;
    const VectorXcd hs = m.H_SR * st.leader.w_S;
    return st.leader.P_S * (hs.array() * t.array()).matrix().squaredNorm() + st.jammer.P_J * st.cert.psi_JR +
           m.sigma_R2 * t.squaredNorm();
}

double leader_violation(const LeaderModel& m, const LeaderState& st, double floor)
{
    const SceneConfig& c = m.cfg;
    const LeaderStrategy& l = st.leader;
    double v = 0.0;
    v = std::max(v, std::abs(l.w_S.norm() - 1.0));
    v = std::max(v, std::abs(l.w_D.norm() - 1.0));
    v = std::max(v, -l.P_S / c.P_S_max);
    v = std::max(v, (l.P_S - c.P_S_max) / c.P_S_max);
    v = std::max(v, -st.jammer.P_J / c.P_J_max);
    v = std::max(v, (st.jammer.P_J - c.P_J_max) / c.P_J_max);
    for (Eigen::Index n = 0; n < l.theta.size(); ++n) {
        v = std::max(v, std::abs(l.theta(n)) / c.lambda_max - 1.0);
    }
    if (m.N() > 0) v = std::max(v, (surface_power(m, st) - m.P_R_max) / m.P_R_max);
    v = std::max(v, (jamming_lower_bound(m, st, floor) - st.jammer.P_J) / c.P_J_max);
    return v;
}

VectorXcd anticipated_direction(const LeaderModel& m, const LeaderStrategy& l)
{
    const VectorXcd g = m.Ht_JD(l.theta).adjoint() * l.w_D;
    const double n = g.norm();
    if (n == 0.0) return VectorXcd::Unit(m.Hhat_JD.cols(), 0);
    return g / n;
}

bool certify(const LeaderModel& m, LeaderState& st, const BsumOptions& o, bool keep_psi_jr)
{
    const WorstCaseJD wc = worst_case_jd(st.leader.w_D, st.leader.theta, m.link());
    if (!std::isfinite(wc.max)) return false;
    st.cert.psi_JD = wc.max;
    st.cert.phi_JD = wc.min;
    if (o.sdp_certificates) {
        const JammerLinkData d = m.link();
        const auto psi = certify_psi_jd(st.leader.w_D, st.leader.theta, d);
        const auto phi = certify_phi_jd(st.leader.w_D, st.leader.theta, d, !o.full_phi_block);
        if (!psi || !phi) return false;
        st.cert.psi_JD = std::max(*psi, 0.0);
        st.cert.phi_JD = std::clamp(*phi, 0.0, st.cert.psi_JD);
    }
    if (keep_psi_jr) return true;
    st.cert.psi_JR = 0.0;
    if (m.N() > 0) {
        if (o.sdp_certificates) {
            const auto jr = certify_psi_jr(st.leader.theta, st.jammer.w_J, m.Hhat_JR, m.eps_JR);
            if (!jr) return false;
            st.cert.psi_JR = std::max(*jr, 0.0);
        } else {
            st.cert.psi_JR = worst_case_jr(st.leader.theta, st.jammer.w_J, m.Hhat_JR, m.eps_JR);
        }
    }
    return true;
}

namespace {

double bisect_increasing(const std::function<double(double)>& f, double lo, double hi, double target)
{
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) <= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

}  // namespace

PowerResult power_allocation(const LeaderModel& m, const LeaderState& st, double floor)
{
    const SceneConfig& c = m.cfg;
    const double a = std::abs(signal_gain(m, st.leader));
    const double psi = std::max(st.cert.psi_JD, floor);
    const double phi = std::max(st.cert.phi_JD, floor);
    const double slope = std::sqrt(c.c_J) * a / std::sqrt(psi);
    const double k1 = a / (std::sqrt(c.c_J) * std::sqrt(phi));
    const double k2 = noise_term(m, st.leader) / psi;
    const auto pj_of = [&](double g) { return std::max(0.0, g * k1 - k2); };

    double q = 0.0, r0 = 0.0;
    if (m.N() > 0) {
        const VectorXcd hs = m.H_SR * st.leader.w_S;
        q = (hs.array() * st.leader.theta.array()).matrix().squaredNorm();
        r0 = m.sigma_R2 * st.leader.theta.squaredNorm();
    }
    const double jr = st.cert.psi_JR;

    PowerResult r;
    if (m.N() > 0 && r0 > m.P_R_max) {
        r.feasible = false;
        return r;
    }
    double gmax = std::sqrt(c.P_S_max);
    if (k1 > 0.0) gmax = std::min(gmax, (c.P_J_max + k2) / k1);
    bool binding = false;
    if (m.N() > 0) {
        const auto f = [&](double g) { return g * g * q + pj_of(g) * jr + r0; };
        if (f(gmax) > m.P_R_max) {
            gmax = bisect_increasing(f, 0.0, gmax, m.P_R_max);
            binding = true;
        }
    }
    double g = slope / (2.0 * c.c_S);
    if (g >= gmax) {
        g = gmax;
        r.surface_binding = binding;
    }
    r.gamma = std::max(g, 0.0);
    r.P_S = r.gamma * r.gamma;
    r.P_J = std::min(pj_of(r.gamma), c.P_J_max);
    return r;
}

TransmitResult transmit_beamforming(const VectorXcd& wD, const MatrixXcd& Ht_SD)
{
    TransmitResult r;
    const VectorXcd g = Ht_SD.adjoint() * wD;
    const double n = g.norm();
    if (n == 0.0) {
        r.w_S = VectorXcd::Unit(Ht_SD.cols(), 0);
        r.degenerate = true;
        return r;
    }
    r.w_S = g / n;
    return r;
}

LeaderState initial_state(const LeaderModel& m, const BsumOptions& o)
{
    const SceneConfig& c = m.cfg;
    const int n = m.N();
    const double amp = c.lambda_max / std::sqrt(2.0);
    LeaderState st;
    st.leader.theta = VectorXcd::Constant(n, amp);

    const auto beams = [&]() {
        Eigen::JacobiSVD<MatrixXcd> svd(m.Ht_SD(st.leader.theta), Eigen::ComputeThinU);
        st.leader.w_D = svd.matrixU().col(0);
        st.leader.w_S = transmit_beamforming(st.leader.w_D, m.Ht_SD(st.leader.theta)).w_S;
    };
    beams();
    if (n > 0) {
        const std::complex<double> beta = st.leader.w_D.dot(m.H_SD * st.leader.w_S);
        const VectorXcd row = (st.leader.w_D.adjoint() * m.H_RD).transpose().cwiseProduct(m.H_SR * st.leader.w_S);
        for (int k = 0; k < n; ++k) {
            if (std::abs(row(k)) > 0.0) st.leader.theta(k) = amp * std::polar(1.0, std::arg(beta) - std::arg(row(k)));
        }
        beams();
    }
    st.leader.P_S = c.P_S_max / 2.0;
    st.jammer.w_J = anticipated_direction(m, st.leader);
    if (!certify(m, st, o)) throw std::runtime_error("initial_state: certification failed");

    for (int k = 0; k < 60 && jamming_lower_bound(m, st, o.floor) > c.P_J_max; ++k) st.leader.P_S *= 0.5;
    st.jammer.P_J = std::clamp(jamming_lower_bound(m, st, o.floor), 0.0, c.P_J_max);
    for (int k = 0; k < 40 && n > 0 && surface_power(m, st) > m.P_R_max; ++k) {
        st.leader.theta *= 0.5;
        if (k == 39) st.leader.theta.setZero();
        if (!certify(m, st, o)) throw std::runtime_error("initial_state: certification failed");
        st.jammer.P_J = std::clamp(jamming_lower_bound(m, st, o.floor), 0.0, c.P_J_max);
    }
    return st;
}

}  // namespace risgame
