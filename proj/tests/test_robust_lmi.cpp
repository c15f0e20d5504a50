#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "risgame/robust_lmi.hpp"

using namespace risgame;
using conic::CAffMat;
using conic::ConicProgram;
using conic::cplx;
using conic::LinExpr;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

MatrixXcd randn(int r, int c, std::mt19937_64& rng, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    MatrixXcd m(r, c);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) m(i, j) = cplx(g(rng), g(rng));
    }
    return m;
}

VectorXcd unit(int n, std::mt19937_64& rng)
{
    VectorXcd v = randn(n, 1, rng);
    return v / v.norm();
}

MatrixXcd sphere_point(int r, int c, double radius, std::mt19937_64& rng)
{
    MatrixXcd m = randn(r, c, rng);
    return m * (radius / m.norm());
}

JammerLinkData random_link(int nd, int nj, int n, std::mt19937_64& rng, double eps_jd, double eps_jr)
{
    JammerLinkData d;
    d.H_RD = randn(nd, n, rng);
    d.Hhat_JD = randn(nd, nj, rng);
    d.Hhat_JR = randn(n, nj, rng, 0.5);
    d.eps_JD = eps_jd;
    d.eps_JR = eps_jr;
    return d;
}

// w_D^H (H_JD + H_RD diag(theta) H_JR) for explicit matrices.
VectorXcd jam_row(const VectorXcd& wD, const VectorXcd& theta, const MatrixXcd& H_RD, const MatrixXcd& H_JD,
                  const MatrixXcd& H_JR)
{
    MatrixXcd eff = H_JD;
    if (theta.size() > 0) eff += H_RD * theta.asDiagonal() * H_JR;
    return (wD.adjoint() * eff).transpose();
}

}  // namespace

TEST_CASE("Kronecker lift reproduces the stacked jammer gain")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const int nd = 1 + trial % 3, nj = 1 + trial % 4, n = trial % 5;
        const VectorXcd wD = randn(nd, 1, rng), theta = randn(n, 1, rng);
        const MatrixXcd H_RD = randn(nd, n, rng), H_JD = randn(nd, nj, rng), H_JR = randn(n, nj, rng);
        const StackedJammerChannel s = stack_jammer_channel(wD, theta, H_RD, H_JD, H_JR);
        const VectorXcd h = vec(s.Hhat_J);
        const double lifted = (h.adjoint() * s.B * h)(0, 0).real();
        const double direct = jam_row(wD, theta, H_RD, H_JD, H_JR).squaredNorm();
        CHECK(std::abs(lifted - direct) <= 1e-10 * (1.0 + direct));
        CHECK((s.B - s.B.adjoint()).norm() < 1e-12);
        CHECK(s.B.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff() > -1e-10);
        const Eigen::MatrixXd sum = s.Upsilon_JD + s.Upsilon_JR;
        CHECK(sum.isIdentity());
        CHECK((s.Upsilon_JD * s.Upsilon_JD - s.Upsilon_JD).norm() == 0.0);
        CHECK((s.Upsilon_JR * s.Upsilon_JR - s.Upsilon_JR).norm() == 0.0);
    }
}

TEST_CASE("zero radius: certificates equal the nominal gains")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 4; ++trial) {
        const JammerLinkData d = random_link(2, 2 + trial % 2, 3 + trial, rng, 0.0, 0.0);
        const VectorXcd wD = unit(d.N_D(), rng), theta = randn(d.N(), 1, rng);
        const double nominal = jam_row(wD, theta, d.H_RD, d.Hhat_JD, d.Hhat_JR).squaredNorm();
        const auto psi = certify_psi_jd(wD, theta, d);
        const auto phi = certify_phi_jd(wD, theta, d);
        REQUIRE(psi);
        REQUIRE(phi);
        CHECK(std::abs(*psi - nominal) <= 1e-6 * (1.0 + nominal));
        CHECK(std::abs(*phi - nominal) <= 1e-6 * (1.0 + nominal));

        const VectorXcd wJ = unit(d.N_J(), rng);
        const double jr = (theta.asDiagonal() * d.Hhat_JR * wJ).squaredNorm();
        const auto psi_jr = certify_psi_jr(theta, wJ, d.Hhat_JR, 0.0);
        REQUIRE(psi_jr);
        CHECK(std::abs(*psi_jr - jr) <= 1e-6 * (1.0 + jr));
    }
}

TEST_CASE("zero channels and zero reflection certify at zero")
{
    JammerLinkData d;
    d.H_RD = MatrixXcd::Zero(2, 3);
    d.Hhat_JD = MatrixXcd::Zero(2, 2);
    d.Hhat_JR = MatrixXcd::Zero(3, 2);
    const VectorXcd wD = VectorXcd::Unit(2, 0), theta = VectorXcd::Ones(3);
    const auto psi = certify_psi_jd(wD, theta, d);
    REQUIRE(psi);
    CHECK(std::abs(*psi) < 1e-7);

    std::mt19937_64 rng(4);
    const auto jr = certify_psi_jr(VectorXcd::Zero(3), unit(2, rng), randn(3, 2, rng), 0.0);
    REQUIRE(jr);
    CHECK(std::abs(*jr) < 1e-7);
}

TEST_CASE("single ball: certificates match the closed-form worst case")
{
    // With only H_JD uncertain the worst case of ||r + w^H Delta|| over
    // ||Delta||_F <= sqrt(eps) is ||r|| +- sqrt(eps) ||w||.
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 4; ++trial) {
        JammerLinkData d = random_link(2, 3, 4, rng, 0.0, 0.0);
        const VectorXcd wD = unit(2, rng), theta = randn(4, 1, rng);
        const double r = jam_row(wD, theta, d.H_RD, d.Hhat_JD, d.Hhat_JR).norm();
        d.eps_JD = std::pow(0.3 * r, 2);
        const double s = std::sqrt(d.eps_JD);
        const auto psi = certify_psi_jd(wD, theta, d);
        const auto phi = certify_phi_jd(wD, theta, d);
        REQUIRE(psi);
        REQUIRE(phi);
        CHECK(*psi == doctest::Approx(std::pow(r + s, 2)).epsilon(1e-6));
        CHECK(*phi == doctest::Approx(std::pow(r - s, 2)).epsilon(1e-6));
    }
}

TEST_CASE("two balls: certificates bracket the aligned worst case")
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 4; ++trial) {
        JammerLinkData d = random_link(2, 2, 3, rng, 0.0, 0.0);
        const VectorXcd wD = unit(2, rng), theta = randn(3, 1, rng);
        const VectorXcd u = (wD.adjoint() * d.H_RD * theta.asDiagonal()).transpose();
        const double r = jam_row(wD, theta, d.H_RD, d.Hhat_JD, d.Hhat_JR).norm();
        d.eps_JD = std::pow(0.1 * r, 2);
        d.eps_JR = std::pow(0.1 * r / u.norm(), 2);
        const double hi = r + std::sqrt(d.eps_JD) + std::sqrt(d.eps_JR) * u.norm();
        const double lo = r - std::sqrt(d.eps_JD) - std::sqrt(d.eps_JR) * u.norm();
        const auto psi = certify_psi_jd(wD, theta, d);
        const auto phi = certify_phi_jd(wD, theta, d);
        REQUIRE(psi);
        REQUIRE(phi);
        // Aligned errors attain hi and lo, so a sound certificate cannot beat them.
        CHECK(*psi >= hi * hi * (1.0 - 1e-7));
        CHECK(*phi <= lo * lo * (1.0 + 1e-7));
        MESSAGE("psi/hi^2 = " << *psi / (hi * hi) << ", phi/lo^2 = " << *phi / (lo * lo));
    }
}

TEST_CASE("compact phi block agrees with the full block")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 3; ++trial) {
        JammerLinkData d = random_link(2, 2 + trial, 3, rng, 0.02, 0.01);
        const VectorXcd wD = unit(2, rng), theta = randn(3, 1, rng);
        const auto full = certify_phi_jd(wD, theta, d, false);
        const auto compact = certify_phi_jd(wD, theta, d, true);
        REQUIRE(full);
        REQUIRE(compact);
        CHECK(*compact == doctest::Approx(*full).epsilon(1e-6));
    }
}

TEST_CASE("sampled errors never beat the certificates")
{
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        JammerLinkData d = random_link(2, 3, 4, rng, 0.0, 0.0);
        d.eps_JD = 0.05 * d.Hhat_JD.squaredNorm();
        d.eps_JR = 0.05 * d.Hhat_JR.squaredNorm();
        const VectorXcd wD = unit(2, rng), theta = randn(4, 1, rng), wJ = unit(3, rng);
        const auto psi = certify_psi_jd(wD, theta, d);
        const auto phi = certify_phi_jd(wD, theta, d);
        const auto psi_jr = certify_psi_jr(theta, wJ, d.Hhat_JR, d.eps_JR);
        REQUIRE(psi);
        REQUIRE(phi);
        REQUIRE(psi_jr);
        double max_jd = 0.0, min_jd = 1e300, max_jr = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const bool boundary = k % 2 == 0;
            const double f1 = boundary ? 1.0 : std::pow(uni(rng), 1.0 / (2.0 * 2 * 3));
            const double f2 = boundary ? 1.0 : std::pow(uni(rng), 1.0 / (2.0 * 4 * 3));
            const MatrixXcd H_JD = d.Hhat_JD + sphere_point(2, 3, f1 * std::sqrt(d.eps_JD), rng);
            const MatrixXcd H_JR = d.Hhat_JR + sphere_point(4, 3, f2 * std::sqrt(d.eps_JR), rng);
            const double g = jam_row(wD, theta, d.H_RD, H_JD, H_JR).squaredNorm();
            max_jd = std::max(max_jd, g);
            min_jd = std::min(min_jd, g);
            max_jr = std::max(max_jr, (theta.asDiagonal() * H_JR * wJ).squaredNorm());
        }
        CHECK(max_jd <= *psi + 1e-6);
        CHECK(min_jd >= *phi - 1e-6);
        CHECK(max_jr <= *psi_jr + 1e-6);
    }
}

TEST_CASE("symbolic blocks evaluate to their numeric counterparts")
{
    std::mt19937_64 rng(31);
    const JammerLinkData d = random_link(2, 2, 3, rng, 0.04, 0.02);
    const VectorXcd wD0 = unit(2, rng), theta0 = randn(3, 1, rng), wJ = unit(2, rng);

    ConicProgram p;
    const auto wre = p.add_variables("wre", 2), wim = p.add_variables("wim", 2);
    const auto tre = p.add_variables("tre", 3), tim = p.add_variables("tim", 3);
    const auto aux = p.add_variables("aux", 3);
    const CAffMat wD = CAffMat::complex_vector(wre, wim), theta = CAffMat::complex_vector(tre, tim);
    const LinExpr a0 = LinExpr::var(aux[0]), a1 = LinExpr::var(aux[1]), a2 = LinExpr::var(aux[2]);

    std::vector<double> x(p.num_variables());
    std::normal_distribution<double> g;
    for (double& v : x) v = g(rng);
    const VectorXcd wx = CAffMat::complex_vector(wre, wim).eval(x).col(0);
    const VectorXcd tx = CAffMat::complex_vector(tre, tim).eval(x).col(0);
    const CAffMat wxc{MatrixXcd(wx)}, txc{MatrixXcd(tx)}, t0c{MatrixXcd(theta0)}, w0c{MatrixXcd(wD0)};

    SUBCASE("psi_JD with w_D symbolic")
    {
        const MatrixXcd sym = lmi_psi_jd(wD, t0c, d, a0, a1, a2).eval(x);
        const MatrixXcd num = lmi_psi_jd(wxc, t0c, d, x[aux[0]], x[aux[1]], x[aux[2]]).constant();
        CHECK((sym - num).norm() < 1e-12);
    }
    SUBCASE("psi_JD with theta symbolic")
    {
        const MatrixXcd sym = lmi_psi_jd(w0c, theta, d, a0, a1, a2).eval(x);
        const MatrixXcd num = lmi_psi_jd(w0c, txc, d, x[aux[0]], x[aux[1]], x[aux[2]]).constant();
        CHECK((sym - num).norm() < 1e-12);
    }
    SUBCASE("psi_JR with theta symbolic")
    {
        const MatrixXcd sym = lmi_psi_jr(theta, wJ, d.Hhat_JR, d.eps_JR, a0, a1).eval(x);
        const MatrixXcd num = lmi_psi_jr(txc, wJ, d.Hhat_JR, d.eps_JR, x[aux[0]], x[aux[1]]).constant();
        CHECK((sym - num).norm() < 1e-12);
    }
    SUBCASE("both strategies symbolic is rejected")
    {
        CHECK_THROWS_AS(lmi_psi_jd(wD, theta, d, a0, a1, a2), std::invalid_argument);
        CHECK_THROWS_AS(phi_lift(PhiMode::ExactFixed, wD, t0c, wD0, theta0, d.H_RD), std::invalid_argument);
        CHECK_THROWS_AS(phi_lift(PhiMode::ScaWd, wD, theta, wD0, theta0, d.H_RD), std::invalid_argument);
        CHECK_THROWS_AS(phi_lift(PhiMode::ScaTheta, wD, theta, wD0, theta0, d.H_RD), std::invalid_argument);
    }
    SUBCASE("surrogate lifts are minorants, tight at the expansion point")
    {
        const StackedJammerChannel at_x = stack_jammer_channel(wx, theta0, d.H_RD, d.Hhat_JD, d.Hhat_JR);
        const MatrixXcd A = phi_lift(PhiMode::ScaWd, wD, t0c, wD0, theta0, d.H_RD).eval(x);
        const MatrixXcd gap = at_x.b * at_x.b.adjoint() - A;
        CHECK(gap.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff() > -1e-10);

        const StackedJammerChannel at_t = stack_jammer_channel(wD0, tx, d.H_RD, d.Hhat_JD, d.Hhat_JR);
        const MatrixXcd At = phi_lift(PhiMode::ScaTheta, w0c, theta, wD0, theta0, d.H_RD).eval(x);
        const MatrixXcd gap_t = at_t.b * at_t.b.adjoint() - At;
        CHECK(gap_t.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff() > -1e-10);

        std::vector<double> x0(x.size(), 0.0);
        for (int k = 0; k < 2; ++k) {
            x0[wre[k]] = wD0(k).real();
            x0[wim[k]] = wD0(k).imag();
        }
        for (int k = 0; k < 3; ++k) {
            x0[tre[k]] = theta0(k).real();
            x0[tim[k]] = theta0(k).imag();
        }
        const StackedJammerChannel at_0 = stack_jammer_channel(wD0, theta0, d.H_RD, d.Hhat_JD, d.Hhat_JR);
        const MatrixXcd bb = at_0.b * at_0.b.adjoint();
        CHECK((phi_lift(PhiMode::ScaWd, wD, t0c, wD0, theta0, d.H_RD).eval(x0) - bb).norm() < 1e-12);
        CHECK((phi_lift(PhiMode::ScaTheta, w0c, theta, wD0, theta0, d.H_RD).eval(x0) - bb).norm() < 1e-12);
    }
}

TEST_CASE("closed-form worst cases equal the optimal certificates")
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 6; ++trial) {
        JammerLinkData d = random_link(2, 3, 4, rng, 0.0, 0.0);
        // Later trials push the radii past the nominal gain, where phi hits 0.
        const double f = trial < 3 ? 0.05 : 2.0;
        d.eps_JD = f * d.Hhat_JD.squaredNorm();
        d.eps_JR = f * d.Hhat_JR.squaredNorm();
        const VectorXcd wD = unit(2, rng), theta = randn(4, 1, rng), wJ = unit(3, rng);
        const WorstCaseJD wc = worst_case_jd(wD, theta, d);
        const auto psi = certify_psi_jd(wD, theta, d);
        const auto phi = certify_phi_jd(wD, theta, d);
        const auto jr = certify_psi_jr(theta, wJ, d.Hhat_JR, d.eps_JR);
        REQUIRE(psi);
        REQUIRE(phi);
        REQUIRE(jr);
        CHECK(wc.max == doctest::Approx(*psi).epsilon(1e-6));
        CHECK(wc.min == doctest::Approx(*phi).epsilon(1e-6).scale(1e-3 * wc.max));
        CHECK(worst_case_jr(theta, wJ, d.Hhat_JR, d.eps_JR) == doctest::Approx(*jr).epsilon(1e-6));
    }
}

TEST_CASE("surface worst case: hard case and zero radius")
{
    std::mt19937_64 rng(43);
    MatrixXcd H = randn(3, 2, rng);
    const VectorXcd wJ = unit(2, rng);
    // Make the largest reflection entry see no nominal signal.
    H.row(0) -= (H.row(0) * wJ)(0) * wJ.adjoint();
    VectorXcd theta(3);
    theta << cplx(3.0, 0.0), cplx(0.0, 1.0), cplx(0.5, 0.5);
    const double eps = 0.3;
    const auto jr = certify_psi_jr(theta, wJ, H, eps);
    REQUIRE(jr);
    CHECK(worst_case_jr(theta, wJ, H, eps) == doctest::Approx(*jr).epsilon(1e-6));
    CHECK(worst_case_jr(theta, wJ, H, 0.0) == doctest::Approx((theta.asDiagonal() * H * wJ).squaredNorm()));
    CHECK(worst_case_jr(VectorXcd(), VectorXcd::Ones(2), MatrixXcd(0, 2), 1.0) == 0.0);
}

namespace {

// min psi over the cone forms, mirroring certify_psi_jd / certify_psi_jr.
std::optional<double> cone_psi_jd(const VectorXcd& wD, const VectorXcd& theta, const JammerLinkData& d)
{
    ConicProgram p;
    const auto v = p.add_variables("psi_rho", 3);
    p.maximize(-LinExpr::var(v[0]));
    add_psi_jd_cones(p, CAffMat{MatrixXcd(wD)}, CAffMat{MatrixXcd(theta)}, d, LinExpr::var(v[0]),
                     LinExpr::var(v[1]), LinExpr::var(v[2]));
    const auto r = conic::solve(p);
    if (!r.ok()) return std::nullopt;
    return r.value(v[0]);
}

std::optional<double> cone_psi_jr(const VectorXcd& theta, const VectorXcd& wJ, const MatrixXcd& H, double eps)
{
    ConicProgram p;
    const auto v = p.add_variables("psi_rho", 2);
    p.maximize(-LinExpr::var(v[0]));
    add_psi_jr_cones(p, CAffMat{MatrixXcd(theta)}, wJ, H, eps, LinExpr::var(v[0]), LinExpr::var(v[1]));
    const auto r = conic::solve(p);
    if (!r.ok()) return std::nullopt;
    return r.value(v[0]);
}

}  // namespace

TEST_CASE("cone forms certify the same values as the LMIs")
{
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 4; ++trial) {
        const int n = trial == 3 ? 0 : 3 + trial;
        JammerLinkData d = random_link(2, 3, n, rng, 0.0, 0.0);
        d.eps_JD = trial == 1 ? 0.0 : 0.05 * d.Hhat_JD.squaredNorm();
        d.eps_JR = 0.05 * d.Hhat_JR.squaredNorm();
        const VectorXcd wD = unit(2, rng), theta = randn(n, 1, rng), wJ = unit(3, rng);
        const auto lmi = certify_psi_jd(wD, theta, d);
        const auto cone = cone_psi_jd(wD, theta, d);
        REQUIRE(lmi);
        REQUIRE(cone);
        CHECK(*cone == doctest::Approx(*lmi).epsilon(1e-6));
        if (n > 0) {
            const auto jl = certify_psi_jr(theta, wJ, d.Hhat_JR, d.eps_JR);
            const auto jc = cone_psi_jr(theta, wJ, d.Hhat_JR, d.eps_JR);
            REQUIRE(jl);
            REQUIRE(jc);
            CHECK(*jc == doctest::Approx(*jl).epsilon(1e-6));
        }
    }
}
