#include <doctest.h>

#include <cmath>
#include <sstream>

#include "risgame/suite.hpp"

using namespace risgame;

namespace {

// Mean rows of one sweep: u_L[scheme][point], u_J = -u_L.
ExperimentResult synthetic(Sweep s, const std::vector<double>& values,
                           const std::vector<std::pair<Scheme, std::vector<double>>>& u_L)
{
    ExperimentResult r;
    for (const auto& [scheme, us] : u_L) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            ResultRow row;
            row.sweep = to_string(s);
            row.value = values[i];
            row.scheme = scheme;
            row.trial = -1;
            row.u_L = us[i];
            row.u_J = -us[i];
            r.rows.push_back(row);
        }
    }
    return r;
}

void add(TrendData& d, Sweep s, const std::vector<double>& values,
         const std::vector<std::pair<Scheme, std::vector<double>>>& u_L)
{
    ExperimentSpec spec;
    spec.sweep = s;
    spec.values = values;
    d.specs.push_back(spec);
    d.results.push_back(synthetic(s, values, u_L));
}

TrendData paper_like()
{
    TrendData d;
    const std::vector<double> v{1, 2, 3};
    add(d, Sweep::Cj, v,
        {{Scheme::Perfect, {4, 5, 6}}, {Scheme::Robust, {3, 4, 5}}, {Scheme::NonRobust, {2, 3, 4}},
         {Scheme::NoRis, {1, 2, 3}}});
    add(d, Sweep::Cs, v,
        {{Scheme::Perfect, {6, 5, 4}}, {Scheme::Robust, {5, 4, 3}}, {Scheme::NonRobust, {4, 3, 2}},
         {Scheme::NoRis, {3, 2, 1}}});
    add(d, Sweep::N, v,
        {{Scheme::Perfect, {4, 5, 6}}, {Scheme::Robust, {3, 4, 5}}, {Scheme::NonRobust, {2, 3, 4}},
         {Scheme::NoRis, {1, 1, 1}}});
    add(d, Sweep::Xj, v,
        {{Scheme::Perfect, {6, 5, 4}}, {Scheme::Robust, {5, 4, 3}}, {Scheme::NonRobust, {4, 3, 2}},
         {Scheme::NoRis, {3, 2, 1}}});
    return d;
}

}  // namespace

TEST_CASE("log-log slope of a power law")
{
    const std::vector<double> x{41, 73, 137};
    std::vector<double> y;
    for (double v : x) y.push_back(0.5 * std::pow(v, 3.0));
    CHECK(loglog_slope(x, y) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("bisection finds the feasibility threshold in both directions")
{
    CHECK(bisect_threshold([](double t) { return t >= 0.3; }, 0.0, 1.0, 60) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(bisect_threshold([](double t) { return t <= 0.7; }, 0.0, 1.0, 60, true) ==
          doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("trend check accepts the expected orderings")
{
    const SuiteProfile p;
    const CheckResult r = check_trends(p, paper_like());
    CHECK(r.pass);
    CHECK(r.id == 6);
}

TEST_CASE("trend check names a broken ordering")
{
    const SuiteProfile p;
    TrendData d = paper_like();
    // nonrobust above robust at one c_J point
    for (ResultRow& row : d.results[0].rows) {
        if (row.scheme == Scheme::NonRobust && row.value == 2.0) row.u_L = 4.5;
    }
    const CheckResult r = check_trends(p, d);
    CHECK_FALSE(r.pass);
    bool named = false;
    for (const auto& l : r.details) named = named || (l.rfind("FAIL", 0) == 0 && l.find("robust >= nonrobust") != std::string::npos);
    CHECK(named);
}

TEST_CASE("trend check fails when a sweep is missing or noris moves with N")
{
    const SuiteProfile p;
    TrendData d = paper_like();
    d.specs.pop_back();
    d.results.pop_back();
    CHECK_FALSE(check_trends(p, d).pass);

    d = paper_like();
    for (ResultRow& row : d.results[2].rows) {
        if (row.scheme == Scheme::NoRis && row.value == 3.0) row.u_L = 1.01;
    }
    CHECK_FALSE(check_trends(p, d).pass);
}

TEST_CASE("jammer paradox check compares mean jammer utilities")
{
    const SuiteProfile p;
    TrendData d = paper_like();
    CHECK_FALSE(check_jammer_paradox(p, d).pass);  // u_J = -u_L, robust below nonrobust
    for (ResultRow& row : d.results[0].rows) {
        if (row.scheme == Scheme::Robust) row.u_J = 0.0;
    }
    CHECK(check_jammer_paradox(p, d).pass);
    CHECK_FALSE(check_jammer_paradox(p, TrendData{}).pass);
}

TEST_CASE("print_result writes one status line plus details")
{
    CheckResult r;
    r.id = 4;
    r.name = "x";
    r.pass = false;
    r.tolerance = "1e-06";
    r.summary = "s";
    r.details = {"d1"};
    std::ostringstream os;
    print_result(os, r);
    CHECK(os.str() == "FAIL [4] x (tol 1e-06): s\n       d1\n");
}
