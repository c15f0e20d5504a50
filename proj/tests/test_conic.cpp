#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "conic/ipm.hpp"
#include "risgame/conic/program.hpp"

using namespace risgame::conic;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

namespace {

MatrixXcd random_hermitian(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    }
    return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST_CASE("hsvec preserves the trace inner product")
{
    std::mt19937_64 rng(3);
    const MatrixXcd a = random_hermitian(5, rng), b = random_hermitian(5, rng);
    CHECK(detail::hsvec(a).size() == 25);
    CHECK(detail::hsvec(a).dot(detail::hsvec(b)) == doctest::Approx((a * b).trace().real()).epsilon(1e-12));
    CHECK((detail::hsmat(detail::hsvec(a), 5) - a).norm() < 1e-12);
}

TEST_CASE("herm_embed of identity and of a skew pair")
{
    SymAffMat e = herm_embed(CAffMat(MatrixXcd::Identity(2, 2)));
    CHECK((e.constant - MatrixXd::Identity(4, 4)).norm() == 0.0);

    MatrixXcd m(2, 2);
    m << 0.0, cplx(0, 1), cplx(0, -1), 0.0;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(herm_embed(CAffMat(m)).constant);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(1) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(2) == doctest::Approx(1.0));
    CHECK(es.eigenvalues()(3) == doctest::Approx(1.0));
}

TEST_CASE("herm_embed spectrum matches the complex spectrum")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        MatrixXcd m = random_hermitian(2 + trial % 5, rng);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> ec(m);
        Eigen::SelfAdjointEigenSolver<MatrixXd> er(herm_embed(CAffMat(m)).constant);
        CHECK(std::abs(ec.eigenvalues()(0) - er.eigenvalues()(0)) < 1e-10);
    }
}

TEST_CASE("herm_embed is linear and rejects non-Hermitian input")
{
    std::mt19937_64 rng(11);
    MatrixXcd a = random_hermitian(3, rng), b = random_hermitian(3, rng);
    MatrixXd lhs = herm_embed(CAffMat(MatrixXcd(a + b))).constant;
    MatrixXd rhs = herm_embed(CAffMat(a)).constant + herm_embed(CAffMat(b)).constant;
    CHECK((lhs - rhs).norm() < 1e-14);

    MatrixXcd bad = MatrixXcd::Zero(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(herm_embed(CAffMat(bad)), std::invalid_argument);
}

TEST_CASE("scalar upper bound")
{
    ConicProgram p;
    auto x = p.add_variables("x");
    p.maximize(LinExpr::var(x[0]));
    p.add_nonneg(3.0 - LinExpr::var(x[0]));
    SolveResult r = solve(p);
    REQUIRE(r.ok());
    CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("2x2 PSD determinant bound")
{
    ConicProgram p;
    auto t = p.add_variables("t");
    p.maximize(LinExpr::var(t[0]));
    SymAffMat m;
    m.constant = MatrixXd::Identity(2, 2);
    MatrixXd off(2, 2);
    off << 0, 1, 1, 0;
    m.terms[t[0]] = off;
    p.add_psd(m);
    SolveResult r = solve(p);
    REQUIRE(r.ok());
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("quad-over-linear through a rotated cone")
{
    // minimize s with s * nu >= mu^2, mu = 2, nu = 4.
    ConicProgram p;
    auto v = p.add_variables("v", 3);  // s, mu, nu
    p.maximize(-LinExpr::var(v[0]));
    p.add_equality(LinExpr::var(v[1]) - 2.0);
    p.add_equality(LinExpr::var(v[2]) - 4.0);
    p.add_rotated_soc(LinExpr::var(v[0]), LinExpr::var(v[2]), {LinExpr::var(v[1])});
    SolveResult r = solve(p);
    REQUIRE(r.ok());
    CHECK(r.value(v[0]) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("linear objective over a Euclidean ball")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 3 + trial;
        ConicProgram p;
        auto x = p.add_variables("x", n);
        Eigen::VectorXd c(n);
        LinExpr obj;
        std::vector<LinExpr> u;
        for (int i = 0; i < n; ++i) {
            c(i) = g(rng);
            obj += LinExpr::var(x[i], c(i));
            u.push_back(LinExpr::var(x[i]));
        }
        p.maximize(obj);
        p.add_soc(2.0, u);
        SolveResult r = solve(p);
        REQUIRE(r.ok());
        CHECK(r.objective == doctest::Approx(2.0 * c.norm()).epsilon(1e-7));
    }
}

TEST_CASE("Hermitian LMI recovers the smallest eigenvalue")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 2 + trial;
        MatrixXcd m = random_hermitian(n, rng);
        ConicProgram p;
        auto t = p.add_variables("t");
        p.maximize(LinExpr::var(t[0]));
        p.add_hermitian_psd(CAffMat(m) - CAffMat::identity(n, LinExpr::var(t[0])));
        SolveResult r = solve(p);
        REQUIRE(r.ok());
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
        CHECK(r.objective == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-7));
    }
}

TEST_CASE("complex vector in an LMI: maximum of a Rayleigh bound")
{
    // max Re(a^H v) s.t. [[1, v^H],[v, I]] >= 0  (i.e. ||v|| <= 1) -> ||a||.
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    const int n = 4;
    Eigen::VectorXcd a(n);
    for (int i = 0; i < n; ++i) a(i) = cplx(g(rng), g(rng));
    ConicProgram p;
    auto re = p.add_variables("re", n);
    auto im = p.add_variables("im", n);
    CAffMat v = CAffMat::complex_vector(re, im);
    p.maximize((MatrixXcd(a.adjoint()) * v).real_part());
    CAffMat blk(n + 1, n + 1);
    blk.set_block(0, 0, CAffMat(MatrixXcd::Identity(1, 1)));
    blk.set_block(0, 1, v.adjoint());
    blk.set_block(1, 0, v);
    blk.set_block(1, 1, CAffMat(MatrixXcd::Identity(n, n)));
    p.add_hermitian_psd(blk);
    SolveResult r = solve(p);
    REQUIRE(r.ok());
    CHECK(r.objective == doctest::Approx(a.norm()).epsilon(1e-7));
    CHECK((r.complex_values(re, im) - a / a.norm()).norm() < 1e-5);
}

TEST_CASE("infeasible and unbounded programs are reported")
{
    {
        ConicProgram p;
        auto x = p.add_variables("x");
        p.maximize(LinExpr::var(x[0]));
        p.add_nonneg(LinExpr::var(x[0]) - 1.0);
        p.add_nonneg(-LinExpr::var(x[0]));
        CHECK(solve(p).status == SolveStatus::Infeasible);
    }
    {
        ConicProgram p;
        auto x = p.add_variables("x");
        p.maximize(LinExpr::var(x[0]));
        p.add_nonneg(LinExpr::var(x[0]));
        CHECK(solve(p).status == SolveStatus::Unbounded);
    }
    {
        // t with [[-1, t],[t, -1]] >= 0 has no solution.
        ConicProgram p;
        auto t = p.add_variables("t");
        p.maximize(LinExpr::var(t[0]));
        SymAffMat m;
        m.constant = -MatrixXd::Identity(2, 2);
        MatrixXd off(2, 2);
        off << 0, 1, 1, 0;
        m.terms[t[0]] = off;
        p.add_psd(m);
        CHECK(solve(p).status == SolveStatus::Infeasible);
    }
}

TEST_CASE("constraints must reference declared variables")
{
    ConicProgram p;
    p.add_variables("x");
    CHECK_THROWS_AS(p.add_nonneg(LinExpr::var(4)), std::out_of_range);
}
