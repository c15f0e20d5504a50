#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "risgame/bsum.hpp"

using namespace risgame;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

SceneConfig small_scene(int N = 4)
{
    SceneConfig cfg;
    cfg.N = N;
    return cfg;
}

ChannelSet draw(const SceneConfig& cfg, std::uint64_t seed)
{
    Rng rng(seed);
    return draw_channels(cfg, rng);
}

LeaderState model_state(const LeaderModel& m, const LeaderSolution& sol, const BsumOptions& o)
{
    LeaderState st;
    st.leader = sol.leader;
    st.jammer = sol.anticipated;
    certify(m, st, o);
    return st;
}

// Brute-force power oracle: dense grid on sqrt(P_S), P_J at its lower bound.
double grid_power_best(const LeaderModel& m, const LeaderState& st, int points)
{
    double best = -INFINITY;
    for (int i = 0; i <= points; ++i) {
        LeaderState c = st;
        c.leader.P_S = m.cfg.P_S_max * std::pow(static_cast<double>(i) / points, 2);
        c.jammer.P_J = std::max(0.0, jamming_lower_bound(m, c));
        if (c.jammer.P_J > m.cfg.P_J_max || leader_violation(m, c) > 1e-9) continue;
        best = std::max(best, leader_objective(m, c));
    }
    return best;
}

}  // namespace

TEST_CASE("power allocation matches a grid oracle")
{
    const BsumOptions o;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (double prm : {0.1, 1e-6, 1e-8}) {
            SceneConfig cfg = small_scene();
            cfg.P_R_max = prm;
            const LeaderModel m = LeaderModel::from_view(draw(cfg, seed), cfg);
            LeaderState st = initial_state(m, o);
            const PowerResult pr = power_allocation(m, st);
            REQUIRE(pr.feasible);
            LeaderState c = st;
            c.leader.P_S = pr.P_S;
            c.jammer.P_J = pr.P_J;
            CHECK(leader_violation(m, c) <= 1e-9);
            CHECK(leader_objective(m, c) >= grid_power_best(m, st, 20000) - 1e-6);
        }
    }
}

TEST_CASE("power allocation: interior optimum and binding surface limit")
{
    SceneConfig cfg = small_scene();
    cfg.P_S_max = 1e6;
    cfg.P_J_max = 1e6;
    cfg.P_R_max = 1e6;
    const LeaderModel m = LeaderModel::from_view(draw(cfg, 5), cfg);
    const LeaderState st = initial_state(m, BsumOptions{});
    const PowerResult pr = power_allocation(m, st);
    const double a = std::abs(signal_gain(m, st.leader));
    const double g = std::sqrt(cfg.c_J) * a / (2.0 * cfg.c_S * std::sqrt(st.cert.psi_JD));
    CHECK(pr.gamma == doctest::Approx(g).epsilon(1e-12));
    CHECK(pr.P_S == doctest::Approx(g * g).epsilon(1e-12));
    CHECK_FALSE(pr.surface_binding);

    LeaderModel mt = LeaderModel::from_view(draw(small_scene(), 5), small_scene());
    LeaderState s2 = initial_state(mt, BsumOptions{});
    const PowerResult free = power_allocation(mt, s2);
    LeaderState idle = s2;
    idle.leader.P_S = 0.0;
    idle.jammer.P_J = 0.0;
    s2.leader.P_S = free.P_S;
    s2.jammer.P_J = free.P_J;
    mt.P_R_max = 0.5 * (surface_power(mt, idle) + surface_power(mt, s2));
    const PowerResult pb = power_allocation(mt, s2);
    REQUIRE(pb.feasible);
    CHECK(pb.surface_binding);
    s2.leader.P_S = pb.P_S;
    s2.jammer.P_J = pb.P_J;
    CHECK(surface_power(mt, s2) == doctest::Approx(mt.P_R_max).epsilon(1e-8));
}

TEST_CASE("power allocation: zero signal gives zero powers")
{
    SceneConfig cfg = small_scene(0);
    ChannelSet ch = draw(cfg, 6);
    ch.H_SD.setZero();
    const LeaderModel m = LeaderModel::from_view(ch, cfg);
    LeaderState st = initial_state(m, BsumOptions{});
    const PowerResult pr = power_allocation(m, st);
    CHECK(pr.P_S == 0.0);
    CHECK(pr.P_J == 0.0);

    // P_S = 0 leaves nothing to jam.
    st.leader.P_S = 0.0;
    const ChannelSet full = draw(small_scene(), 6);
    LeaderStrategy l = st.leader;
    l.theta = VectorXcd::Ones(4);
    CHECK(jammer_best_response(full, l, small_scene()).P_J == 0.0);
}

TEST_CASE("transmit beamforming is maximum ratio")
{
    Rng rng(7);
    std::normal_distribution<double> g;
    MatrixXcd H(3, 5);
    for (Eigen::Index i = 0; i < H.size(); ++i) H.data()[i] = {g(rng), g(rng)};
    VectorXcd wD = VectorXcd::Random(3);
    wD.normalize();
    const TransmitResult t = transmit_beamforming(wD, H);
    CHECK_FALSE(t.degenerate);
    const double best = (H.adjoint() * wD).norm();
    CHECK(std::abs(wD.dot(H * t.w_S)) == doctest::Approx(best).epsilon(1e-12));
    for (int k = 0; k < 50; ++k) {
        VectorXcd v = VectorXcd::Random(5);
        v.normalize();
        CHECK(std::abs(wD.dot(H * v)) <= best + 1e-12);
    }
    CHECK(transmit_beamforming(wD, MatrixXcd::Zero(3, 5)).degenerate);
}

TEST_CASE("closed-form recertification equals the certificate SDPs")
{
    SceneConfig cfg = small_scene();
    cfg.delta = 0.2;
    const LeaderModel m = LeaderModel::from_view(draw(cfg, 8), cfg);
    BsumOptions fast, sdp;
    sdp.sdp_certificates = true;
    LeaderState a = initial_state(m, fast);
    LeaderState b = a;
    REQUIRE(certify(m, a, fast));
    REQUIRE(certify(m, b, sdp));
    CHECK(a.cert.psi_JD == doctest::Approx(b.cert.psi_JD).epsilon(1e-6));
    CHECK(a.cert.phi_JD == doctest::Approx(b.cert.phi_JD).epsilon(1e-6));
    CHECK(a.cert.psi_JR == doctest::Approx(b.cert.psi_JR).epsilon(1e-6));
}

TEST_CASE("leader solve: monotone traces, feasibility and fixed point")
{
    const SceneConfig cfg = small_scene();
    const ChannelSet ch = draw(cfg, 9);
    const BsumOptions o;
    const LeaderSolution sol = solve_leader(ch, cfg, o);
    const auto& rep = sol.report;
    REQUIRE(rep.utility_trace.size() >= 2);
    for (std::size_t k = 1; k < rep.utility_trace.size(); ++k)
        CHECK(rep.utility_trace[k] >= rep.utility_trace[k - 1] - 1e-6);
    for (const auto* traces : {&rep.wd_traces, &rep.theta_traces})
        for (const auto& t : *traces)
            for (std::size_t k = 1; k < t.size(); ++k) CHECK(t[k] >= t[k - 1] - 1e-6);
    CHECK(rep.outer_iterations <= o.max_outer);
    CHECK(leader_feasible(sol.leader, cfg, 1e-8));
    CHECK(jammer_feasible(sol.anticipated, cfg, 1e-8));

    const LeaderModel m = LeaderModel::from_view(ch, cfg);
    LeaderState st = model_state(m, sol, o);
    CHECK(leader_violation(m, st) <= 1e-6);
    const double before = leader_objective(m, st);
    BsumOptions one = o;
    one.max_inner = 1;
    LeaderState rx = st;
    receive_beamforming_sca(m, rx, one);
    CHECK(std::abs(leader_objective(m, rx) - before) < 1e-6);
}

TEST_CASE("realized utility is at least the certified worst case")
{
    const SceneConfig cfg = small_scene();
    for (std::uint64_t seed : {10u, 11u}) {
        const ChannelSet ch = draw(cfg, seed);
        const LeaderSolution sol = solve_leader(leader_view(ch, Scheme::Robust), cfg);
        const Equilibrium e = assemble_equilibrium(sol, ch, cfg);
        CHECK(e.u_L >= e.u_L_worst - 1e-9 * std::abs(e.u_L_worst));
    }
}

TEST_CASE("perfect scheme: anticipated and realized jammer agree")
{
    const SceneConfig cfg = small_scene();
    const ChannelSet ch = draw(cfg, 12);
    const LeaderSolution sol = solve_leader(leader_view(ch, Scheme::Perfect), cfg);
    const Equilibrium e = assemble_equilibrium(sol, ch, cfg);
    CHECK(std::abs(e.dP_J) <= 1e-4 * cfg.P_J_max);
    CHECK(e.w_J_overlap >= 1.0 - 1e-6);
    CHECK(e.u_L == doctest::Approx(sol.objective).epsilon(1e-4));
}

TEST_CASE("noris scheme equals a surface-free scene")
{
    const SceneConfig cfg = small_scene();
    const SceneConfig bare = small_scene(0);
    const ChannelSet ch = draw(cfg, 13);
    const ChannelSet ch0 = draw(bare, 13);
    CHECK((ch.H_SD - ch0.H_SD).norm() == 0.0);
    const LeaderSolution a = solve_leader(leader_view(ch, Scheme::NoRis), cfg);
    const LeaderSolution b = solve_leader(ch0, bare);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
    CHECK(a.leader.theta.size() == 0);
}

TEST_CASE("vanishing amplification approaches the surface-free solution")
{
    SceneConfig cfg = small_scene();
    cfg.lambda_max = 1e-6;
    const ChannelSet ch = draw(cfg, 14);
    const LeaderSolution a = solve_leader(ch, cfg);
    const LeaderSolution b = solve_leader(leader_view(ch, Scheme::NoRis), cfg);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-4));
}
