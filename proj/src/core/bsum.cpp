#include <algorithm>
#include <chrono>
#include <cmath>

#include "risgame/bsum.hpp"

namespace risgame {

using Eigen::VectorXcd;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool acceptable(const LeaderModel& m, const LeaderState& cand, double base, const BsumOptions& o)
{
    return leader_violation(m, cand, o.floor) <= 1e-6 && leader_objective(m, cand, o.floor) >= base;
}

// MRT, pulled back toward the current beamformer when the full step breaks
// the jamming-power or surface-power limits.
void transmit_block(const LeaderModel& m, LeaderState& st, SolverReport& rep, const BsumOptions& o)
{
    const TransmitResult tx = transmit_beamforming(st.leader.w_D, m.Ht_SD(st.leader.theta));
    if (tx.degenerate) {
        rep.warnings.push_back("transmit: zero effective channel");
        return;
    }
    const VectorXcd g = m.Ht_SD(st.leader.theta).adjoint() * st.leader.w_D;
    const std::complex<double> inner = g.dot(st.leader.w_S);
    VectorXcd old = st.leader.w_S;
    if (std::abs(inner) > 0.0) old *= std::polar(1.0, -std::arg(inner));
    const double base = leader_objective(m, st, o.floor);
    double t = 1.0;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
        LeaderState cand = st;
        const VectorXcd mix = (1.0 - t) * old + t * tx.w_S;
        cand.leader.w_S = mix / mix.norm();
        cand.jammer.P_J = std::clamp(jamming_lower_bound(m, cand, o.floor), 0.0, m.cfg.P_J_max);
        if (acceptable(m, cand, base, o)) {
            st = cand;
            if (k > 0) rep.warnings.push_back("transmit: step shortened");
            return;
        }
    }
    rep.warnings.push_back("transmit: no feasible ascent step");
}

// Anticipated jammer direction on the leader's estimates; kept only when
// the surface-power limit still holds.
void refresh_jammer(const LeaderModel& m, LeaderState& st, SolverReport& rep, const BsumOptions& o)
{
    LeaderState cand = st;
    cand.jammer.w_J = anticipated_direction(m, st.leader);
    if (m.N() > 0) {
        if (!certify(m, cand, o)) {
            rep.warnings.push_back("jammer refresh: psi_JR certification failed");
            return;
        }
    }
    if (leader_violation(m, cand, o.floor) > 1e-6) {
        rep.warnings.push_back("jammer refresh: kept previous direction (surface power)");
        return;
    }
    st = cand;
}

RobustAuxiliaries to_physical(const LeaderModel& m, RobustAuxiliaries c)
{
    const double k2 = m.kappa * m.kappa, s2 = m.s * m.s;
    c.psi_JD /= k2;
    c.phi_JD /= k2;
    c.psi_JR /= s2;
    c.rho1 /= k2;
    c.rho2 /= k2;
    c.eta1 /= k2;
    c.eta2 /= k2;
    return c;
}

}  // namespace

LeaderSolution solve_leader(const ChannelSet& view, const SceneConfig& cfg, const BsumOptions& o)
{
    const auto t_start = Clock::now();
    const LeaderModel m = LeaderModel::from_view(view, cfg);
    LeaderState st = initial_state(m, o);
    SolverReport rep;
    double u = leader_objective(m, st, o.floor);
    rep.utility_trace.push_back(u);
    rep.termination = "max_outer";

    for (int k = 0; k < o.max_outer; ++k) {
        auto t0 = Clock::now();
        const PowerResult pr = power_allocation(m, st, o.floor);
        if (pr.feasible) {
            LeaderState cand = st;
            cand.leader.P_S = pr.P_S;
            cand.jammer.P_J = pr.P_J;
            if (acceptable(m, cand, leader_objective(m, st, o.floor), o)) {
                st = cand;
            } else {
                rep.warnings.push_back("power: solution rejected");
            }
        } else {
            rep.warnings.push_back("power: infeasible");
        }
        rep.ms_power += ms_since(t0);

        t0 = Clock::now();
        transmit_block(m, st, rep, o);
        rep.ms_transmit += ms_since(t0);

        t0 = Clock::now();
        InnerResult rw = receive_beamforming_sca(m, st, o);
        rep.ms_receive += ms_since(t0);
        rep.inner_wd.push_back(rw.iterations);
        if (!rw.ok) rep.warnings.push_back("receive: " + rw.message);
        rep.wd_traces.push_back(std::move(rw.trace));

        t0 = Clock::now();
        refresh_jammer(m, st, rep, o);
        rep.ms_jammer += ms_since(t0);

        t0 = Clock::now();
        InnerResult rt = reflection_sca(m, st, o);
        rep.ms_reflection += ms_since(t0);
        rep.inner_theta.push_back(rt.iterations);
        if (!rt.ok) rep.warnings.push_back("reflection: " + rt.message);
        rep.theta_traces.push_back(std::move(rt.trace));

        const double next = leader_objective(m, st, o.floor);
        rep.utility_trace.push_back(next);
        rep.outer_iterations = k + 1;
        if (std::abs(next - u) < o.outer_tol) {
            rep.converged = true;
            rep.termination = "converged";
            u = next;
            break;
        }
        u = next;
    }
    refresh_jammer(m, st, rep, o);
    st.jammer.P_J = std::clamp(jamming_lower_bound(m, st, o.floor), 0.0, m.cfg.P_J_max);
    rep.pj_slack = (st.jammer.P_J - jamming_lower_bound(m, st, o.floor)) / m.cfg.P_J_max;
    rep.ms_total = ms_since(t_start);

    LeaderSolution sol;
    sol.leader = st.leader;
    sol.anticipated = st.jammer;
    sol.cert = to_physical(m, st.cert);
    sol.objective = leader_objective(m, st, o.floor);
    sol.report = std::move(rep);
    return sol;
}

Equilibrium assemble_equilibrium(const LeaderSolution& sol, const ChannelSet& truth, const SceneConfig& cfg)
{
    Equilibrium e;
    e.leader = sol.leader;
    e.anticipated = sol.anticipated;
    e.realized = jammer_best_response(truth, sol.leader, cfg);
    e.u_L = utility_leader_exact(truth, sol.leader, e.realized, cfg);
    e.u_J = utility_jammer(truth, sol.leader, e.realized, cfg);
    e.u_L_worst = sol.objective;
    e.sinr = sinr(truth, sol.leader, e.realized, cfg.sigma_R2, cfg.sigma_D2);
    e.dP_J = e.realized.P_J - e.anticipated.P_J;
    e.w_J_overlap = std::abs(e.realized.w_J.dot(e.anticipated.w_J));
    return e;
}

}  // namespace risgame
