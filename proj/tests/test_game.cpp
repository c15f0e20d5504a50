#include <doctest.h>

#include <cmath>
#include <random>

#include "risgame/game.hpp"

using namespace risgame;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

namespace {

ChannelSet scalar_set(cplx sd, cplx jd)
{
    ChannelSet ch;
    ch.H_SD = MatrixXcd::Constant(1, 1, sd);
    ch.H_JD = MatrixXcd::Constant(1, 1, jd);
    ch.H_SR.resize(0, 1);
    ch.H_RD.resize(1, 0);
    ch.H_JR.resize(0, 1);
    ch.Hhat_JD = ch.H_JD;
    ch.Hhat_JR = ch.H_JR;
    return ch;
}

VectorXcd unit(int n, int k)
{
    VectorXcd v = VectorXcd::Zero(n);
    v(k) = 1.0;
    return v;
}

VectorXcd random_unit(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
    return v / v.norm();
}

}  // namespace

TEST_CASE("effective channels")
{
    SceneConfig cfg;
    Rng rng(1);
    ChannelSet ch = draw_channels(cfg, rng);
    auto e0 = effective_channels(ch, VectorXcd::Zero(cfg.N));
    CHECK((e0.Ht_SD - ch.H_SD).norm() == 0.0);

    ChannelSet s;
    s.H_SD = MatrixXcd::Zero(1, 1);
    s.H_SR = MatrixXcd::Ones(1, 1);
    s.H_RD = MatrixXcd::Ones(1, 1);
    s.H_JD = MatrixXcd::Zero(1, 1);
    s.H_JR = MatrixXcd::Zero(1, 1);
    VectorXcd th(1);
    th << 2.0;
    CHECK(std::abs(effective_channels(s, th).Ht_SD(0, 0) - cplx(2.0)) < 1e-15);

    std::mt19937_64 r(2);
    VectorXcd theta = random_unit(cfg.N, r) * 3.0;
    auto e = effective_channels(ch, theta);
    for (int i = 0; i < cfg.N_D; ++i) {
        for (int j = 0; j < cfg.N_S; ++j) {
            cplx acc = 0.0;
            for (int n = 0; n < cfg.N; ++n) acc += ch.H_RD(i, n) * theta(n) * ch.H_SR(n, j);
            CHECK(std::abs(acc - e.H_SRD(i, j)) <= 1e-12 * std::abs(acc) + 1e-30);
        }
    }
}

TEST_CASE("SINR examples")
{
    ChannelSet id;
    id.H_SD = MatrixXcd::Identity(2, 2);
    id.H_JD = MatrixXcd::Identity(2, 2);
    id.H_SR.resize(0, 2);
    id.H_RD.resize(2, 0);
    id.H_JR.resize(0, 2);
    LeaderStrategy l{1.0, unit(2, 0), unit(2, 0), VectorXcd()};
    JammerStrategy j{0.0, unit(2, 0)};
    CHECK(sinr(id, l, j, 1.0, 1.0) == doctest::Approx(1.0));
    l.P_S = 0.0;
    CHECK(sinr(id, l, j, 1.0, 1.0) == 0.0);

    ChannelSet s = scalar_set(2.0, 1.0);
    LeaderStrategy ls{1.0, unit(1, 0), unit(1, 0), VectorXcd()};
    JammerStrategy js{3.0, unit(1, 0)};
    CHECK(sinr(s, ls, js, 1.0, 1.0) == doctest::Approx(4.0 / (3.0 + 1.0)));
}

TEST_CASE("utility recomposition")
{
    SceneConfig cfg;
    cfg.sigma_D2 = 1.0;
    ChannelSet s = scalar_set(1.0, 1.0);
    LeaderStrategy l{0.0, unit(1, 0), unit(1, 0), VectorXcd()};
    JammerStrategy j{0.0, unit(1, 0)};
    CHECK(utility_leader_exact(s, l, j, cfg) == 0.0);

    // Gamma = 1 at P_S = 1, P_J = 0, unit channels and noise.
    l.P_S = 1.0;
    CHECK(utility_jammer(s, l, j, cfg) == doctest::Approx(-1.0));

    Rng rng(4);
    SceneConfig dc;
    ChannelSet ch = draw_channels(dc, rng);
    std::mt19937_64 r(5);
    LeaderStrategy lr{2.0, random_unit(4, r), random_unit(2, r), random_unit(20, r)};
    JammerStrategy jr{1.5, random_unit(4, r)};
    const double g = sinr(ch, lr, jr, dc.sigma_R2, dc.sigma_D2);
    CHECK(utility_jammer(ch, lr, jr, dc) == doctest::Approx(-g - dc.c_J * 1.5).epsilon(1e-14));
    CHECK(utility_leader_exact(ch, lr, jr, dc) == doctest::Approx(g - dc.c_S * 2.0).epsilon(1e-14));
}

TEST_CASE("SINR is phase invariant in the jammer direction and monotone in jamming power")
{
    SceneConfig cfg;
    Rng rng(8);
    ChannelSet ch = draw_channels(cfg, rng);
    std::mt19937_64 r(9);
    LeaderStrategy l{3.0, random_unit(4, r), random_unit(2, r), random_unit(20, r) * 2.0};
    JammerStrategy j{2.0, random_unit(4, r)};
    const double g = sinr(ch, l, j, cfg.sigma_R2, cfg.sigma_D2);
    JammerStrategy jp = j;
    jp.w_J *= std::polar(1.0, 1.234);
    CHECK(sinr(ch, l, jp, cfg.sigma_R2, cfg.sigma_D2) == doctest::Approx(g).epsilon(1e-12));

    double prev = INFINITY;
    for (double p = 0.0; p <= 10.0; p += 0.5) {
        j.P_J = p;
        const double v = sinr(ch, l, j, cfg.sigma_R2, cfg.sigma_D2);
        CHECK(v <= prev);
        prev = v;
    }
    // Midpoint concavity of u_J in P_J.
    for (double a : {0.0, 1.0, 3.0}) {
        const double b = a + 4.0;
        auto u = [&](double p) {
            JammerStrategy t = j;
            t.P_J = p;
            return utility_jammer(ch, l, t, cfg);
        };
        CHECK(u(0.5 * (a + b)) >= 0.5 * (u(a) + u(b)) - 1e-12);
    }
}

TEST_CASE("best response: zero signal and expensive jamming give zero power")
{
    SceneConfig cfg;
    Rng rng(10);
    ChannelSet ch = draw_channels(cfg, rng);
    std::mt19937_64 r(11);
    LeaderStrategy l{0.0, random_unit(4, r), random_unit(2, r), random_unit(20, r)};
    CHECK(jammer_best_response(ch, l, cfg).P_J == 0.0);

    l.P_S = 5.0;
    SceneConfig pricey = cfg;
    pricey.c_J = 1e12;
    CHECK(jammer_best_response(ch, l, pricey).P_J == 0.0);
}

TEST_CASE("best response direction is collinear with the effective jamming channel")
{
    SceneConfig cfg;
    Rng rng(12);
    ChannelSet ch = draw_channels(cfg, rng);
    std::mt19937_64 r(13);
    LeaderStrategy l{4.0, random_unit(4, r), random_unit(2, r), random_unit(20, r)};
    JammerStrategy j = jammer_best_response(ch, l, cfg);
    VectorXcd g = effective_channels(ch, l.theta).Ht_JD.adjoint() * l.w_D;
    CHECK(std::abs(j.w_J.dot(g)) == doctest::Approx(g.norm()).epsilon(1e-12));
    CHECK(j.w_J.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(jammer_feasible(j, cfg));
}

TEST_CASE("zero effective jamming channel returns e1 with zero power")
{
    ChannelSet s = scalar_set(1.0, 0.0);
    SceneConfig cfg;
    LeaderStrategy l{1.0, unit(1, 0), unit(1, 0), VectorXcd()};
    JammerStrategy j = jammer_best_response(s, l, cfg);
    CHECK(j.P_J == 0.0);
    CHECK(std::abs(j.w_J(0) - cplx(1.0)) == 0.0);
}

TEST_CASE("best response power matches a scalar stationary point")
{
    // u_J(P) = -a/(P b + c) - c_J P with a = 4, b = 1, c = 1, c_J = 1: P* = sqrt(4) - 1 = 1.
    ChannelSet s = scalar_set(2.0, 1.0);
    SceneConfig cfg;
    cfg.c_J = 1.0;
    cfg.sigma_D2 = 1.0;
    LeaderStrategy l{1.0, unit(1, 0), unit(1, 0), VectorXcd()};
    CHECK(jammer_best_response(s, l, cfg).P_J == doctest::Approx(1.0).epsilon(1e-12));
    cfg.P_J_max = 0.25;
    CHECK(jammer_best_response(s, l, cfg).P_J == doctest::Approx(0.25));
}
