#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "risgame/bsum.hpp"
#include "risgame/harness.hpp"
#include "risgame/verify.hpp"

namespace risgame {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string tolerance;
    std::string summary;
    std::vector<std::string> details;
    double seconds = 0.0;
};

struct SweepPlan {
    Sweep sweep = Sweep::Cj;
    std::vector<double> values;
};

/// Sizes and tolerances of the end-to-end checks.
struct SuiteProfile {
    SceneConfig base;
    std::uint64_t seed = 42;
    OracleConfig oracle;
    BsumOptions solver;
    /// Criterion numbers to run.
    std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9};

    int dominance_scenes = 100;
    int soundness_instances = 50;
    int collapse_draws = 5;
    int convergence_scenes = 100;
    int convergence_required = 95;
    int fixed_point_instances = 10;
    int trend_trials = 20;
    std::vector<SweepPlan> trend_sweeps;
    std::vector<int> complexity_N{8, 16, 32};
    int complexity_repeats = 3;
    int consistency_draws = 10;

    double dominance_tol = 1e-6;
    double soundness_tol = 1e-6;
    double collapse_lmi_tol = 1e-6;
    double collapse_utility_tol = 1e-4;
    double monotone_tol = 1e-6;
    double fixed_point_tol = 1e-6;
    double fixed_point_polish_tol = 1e-10;
    int fixed_point_polish_iterations = 300;
    double trend_tol = 1e-6;
    double slope_lo = 2.0;
    double slope_hi = 4.5;
    double consistency_power_tol = 1e-4;  // times P_J_max
    double consistency_overlap_tol = 1e-6;

    /// Criteria 1-9 at the sizes of the acceptance run.
    static SuiteProfile acceptance();
    /// Small scene and counts, for a quick self-check.
    static SuiteProfile quick();
};

std::vector<CheckResult> run_suite(const SuiteProfile& p, std::ostream* log = nullptr);

CheckResult check_follower_dominance(const SuiteProfile& p);
CheckResult check_zero_radius_collapse(const SuiteProfile& p);
CheckResult check_complexity(const SuiteProfile& p);
CheckResult check_perfect_consistency(const SuiteProfile& p);

/// Robust solves on seeded default scenes, shared by criteria 2, 4 and 5.
struct SolvedInstance {
    SceneConfig cfg;
    ChannelSet channels;
    LeaderSolution solution;
    bool ok = false;
    std::string message;
};

std::vector<SolvedInstance> solve_instances(const SuiteProfile& p, int count, std::ostream* log = nullptr);
CheckResult check_certificate_soundness(const SuiteProfile& p, const std::vector<SolvedInstance>& inst);
CheckResult check_convergence(const SuiteProfile& p, const std::vector<SolvedInstance>& inst);
CheckResult check_inner_loops(const SuiteProfile& p, const std::vector<SolvedInstance>& inst);

/// Sweep results shared by criteria 6 and 7.
struct TrendData {
    std::vector<ExperimentSpec> specs;
    std::vector<ExperimentResult> results;
};

TrendData run_trend_sweeps(const SuiteProfile& p, std::ostream* log = nullptr);
CheckResult check_trends(const SuiteProfile& p, const TrendData& d);
CheckResult check_jammer_paradox(const SuiteProfile& p, const TrendData& d);

/// "PASS" / "FAIL" line plus indented details.
void print_result(std::ostream& os, const CheckResult& r);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Smallest t in [lo, hi] with feasible(t), for a monotone predicate that
/// holds at hi.  `upward` flips the direction: largest t with feasible(t).
double bisect_threshold(const std::function<bool(double)>& feasible, double lo, double hi, int steps,
                        bool upward = false);

}  // namespace risgame
