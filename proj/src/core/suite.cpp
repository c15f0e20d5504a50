#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "risgame/robust_lmi.hpp"
#include "risgame/suite.hpp"

namespace risgame {

using conic::CAffMat;
using conic::ConicProgram;
using conic::LinExpr;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

VectorXcd random_unit(Eigen::Index n, Rng& rng)
{
    std::normal_distribution<double> g;
    VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
    return v / v.norm();
}

MatrixXcd random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    std::normal_distribution<double> g;
    MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = {g(rng), g(rng)};
    return m / std::sqrt(2.0);
}

// Gains with uniform phase and amplitude up to lambda_max.
VectorXcd random_reflection(int n, double lambda_max, Rng& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    VectorXcd t(n);
    for (int i = 0; i < n; ++i) t(i) = std::polar(lambda_max * u(rng), 2.0 * std::numbers::pi * u(rng));
    return t;
}

LeaderStrategy random_leader(const SceneConfig& cfg, Rng& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LeaderStrategy l;
    l.P_S = cfg.P_S_max * u(rng);
    l.w_S = random_unit(cfg.N_S, rng);
    l.w_D = random_unit(cfg.N_D, rng);
    l.theta = random_reflection(cfg.N, cfg.lambda_max, rng);
    return l;
}

ChannelSet draw(const SceneConfig& cfg, std::uint64_t seed)
{
    Rng rng(seed);
    return draw_channels(cfg, rng);
}

bool wanted(const SuiteProfile& p, int id)
{
    return std::find(p.criteria.begin(), p.criteria.end(), id) != p.criteria.end();
}

void note(std::ostream* log, const std::string& line)
{
    if (log) *log << line << std::endl;
}

// The program is feasible when the solver returns an optimal point.
bool feasible(const ConicProgram& p)
{
    return conic::solve(p).ok();
}

bool psi_jd_feasible(const VectorXcd& wD, const VectorXcd& theta, const JammerLinkData& d, double t)
{
    ConicProgram p;
    const auto v = p.add_variables("rho", 2);
    p.maximize(-(LinExpr::var(v[0]) + LinExpr::var(v[1])));
    p.add_nonneg(LinExpr::var(v[0]));
    p.add_nonneg(LinExpr::var(v[1]));
    p.add_hermitian_psd(lmi_psi_jd(CAffMat(MatrixXcd(wD)), CAffMat(MatrixXcd(theta)), d, LinExpr(t),
                                   LinExpr::var(v[0]), LinExpr::var(v[1])));
    return feasible(p);
}

bool phi_jd_feasible(const VectorXcd& wD, const VectorXcd& theta, const JammerLinkData& d, double t)
{
    ConicProgram p;
    const auto v = p.add_variables("eta", 2);
    p.maximize(-(LinExpr::var(v[0]) + LinExpr::var(v[1])));
    p.add_nonneg(LinExpr::var(v[0]));
    p.add_nonneg(LinExpr::var(v[1]));
    const CAffMat A = phi_lift(PhiMode::ExactFixed, CAffMat(MatrixXcd(wD)), CAffMat(MatrixXcd(theta)), wD, theta,
                               d.H_RD);
    add_phi_jd_compact(p, A, d, LinExpr(t), LinExpr::var(v[0]), LinExpr::var(v[1]));
    return feasible(p);
}

bool psi_jr_feasible(const VectorXcd& theta, const VectorXcd& wJ, const MatrixXcd& Hhat_JR, double t)
{
    ConicProgram p;
    const auto v = p.add_variables("rho", 1);
    p.maximize(-LinExpr::var(v[0]));
    p.add_nonneg(LinExpr::var(v[0]));
    p.add_hermitian_psd(lmi_psi_jr(CAffMat(MatrixXcd(theta)), wJ, Hhat_JR, 0.0, LinExpr(t), LinExpr::var(v[0])));
    return feasible(p);
}

const ExperimentResult* find_sweep(const TrendData& d, Sweep s, const ExperimentSpec** spec = nullptr)
{
    for (std::size_t k = 0; k < d.specs.size(); ++k) {
        if (d.specs[k].sweep == s) {
            if (spec) *spec = &d.specs[k];
            return &d.results[k];
        }
    }
    return nullptr;
}

// Mean rows of one scheme, in sweep order.
std::vector<ResultRow> means(const ExperimentResult& r, Scheme s)
{
    std::vector<ResultRow> out;
    for (const ResultRow& row : r.rows) {
        if (row.trial < 0 && row.scheme == s) out.push_back(row);
    }
    return out;
}

const std::vector<Scheme> kAllSchemes{Scheme::Robust, Scheme::Perfect, Scheme::NonRobust, Scheme::NoRis};
const std::vector<Scheme> kSurfaceSchemes{Scheme::Robust, Scheme::Perfect, Scheme::NonRobust};

std::string series(const std::vector<ResultRow>& rows, double ResultRow::*field)
{
    std::string s;
    for (const ResultRow& r : rows) s += (s.empty() ? "" : " ") + fmt("%.6g", r.*field);
    return s;
}

// Non-decreasing (sign = +1) or non-increasing (sign = -1) within tol.
bool directed(const std::vector<ResultRow>& rows, double ResultRow::*field, int sign, double tol)
{
    if (rows.empty()) return false;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].failed || !std::isfinite(rows[k].*field)) return false;
        if (k > 0 && sign * (rows[k].*field - rows[k - 1].*field) < -tol) return false;
    }
    return true;
}

struct SubCheck {
    bool pass = true;
    std::vector<std::string> lines;

    void add(bool ok, const std::string& text)
    {
        pass = pass && ok;
        lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + text);
    }
};

}  // namespace

SuiteProfile SuiteProfile::acceptance()
{
    SuiteProfile p;
    p.trend_sweeps = {
        {Sweep::Cj, {1.0, 3.0, 5.0}},
        {Sweep::Cs, {1.0, 2.5, 4.0}},
        {Sweep::N, {4.0, 12.0, 20.0}},
        {Sweep::Xj, {0.0, 200.0, 400.0}},
    };
    return p;
}

SuiteProfile SuiteProfile::quick()
{
    SuiteProfile p;
    p.base.N = 4;
    p.oracle.direction_samples = 2000;
    p.oracle.power_points = 256;
    p.oracle.ball_samples = 2000;
    p.criteria = {1, 2, 3, 4, 5, 9};
    p.dominance_scenes = 10;
    p.soundness_instances = 4;
    p.collapse_draws = 2;
    p.convergence_scenes = 4;
    p.convergence_required = 4;
    p.fixed_point_instances = 2;
    p.trend_trials = 2;
    p.trend_sweeps = {{Sweep::Cj, {1.0, 5.0}}};
    p.complexity_N = {4, 8, 12};
    p.complexity_repeats = 1;
    p.consistency_draws = 2;
    return p;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = std::min(x.size(), y.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

double bisect_threshold(const std::function<bool(double)>& feasible, double lo, double hi, int steps, bool upward)
{
    for (int k = 0; k < steps; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid) != upward) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

CheckResult check_follower_dominance(const SuiteProfile& p)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = 1;
    r.name = "follower closed-form dominance";
    r.tolerance = fmt("%g", p.dominance_tol);
    double worst = -INFINITY;
    int bad = 0;
    for (int k = 0; k < p.dominance_scenes; ++k) {
        const std::uint64_t seed = trial_seed(p.seed, k);
        const ChannelSet ch = draw(p.base, seed);
        Rng rng(seed ^ 0x5eedULL);
        const LeaderStrategy l = random_leader(p.base, rng);
        const JammerStrategy j = jammer_best_response(ch, l, p.base);
        const double closed = utility_jammer(ch, l, j, p.base);
        OracleConfig oc = p.oracle;
        oc.seed = seed;
        const double sampled = follower_oracle(ch, l, p.base, oc).u_J;
        const double excess = sampled - closed;
        worst = std::max(worst, excess);
        if (excess > p.dominance_tol) ++bad;
    }
    r.pass = bad == 0;
    r.summary = std::to_string(p.dominance_scenes - bad) + "/" + std::to_string(p.dominance_scenes) +
                " scenes, max(oracle - closed form) = " + fmt("%.3g", worst);
    r.seconds = seconds_since(t0);
    return r;
}

std::vector<SolvedInstance> solve_instances(const SuiteProfile& p, int count, std::ostream* log)
{
    std::vector<SolvedInstance> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        SolvedInstance inst;
        inst.cfg = p.base;
        inst.channels = draw(p.base, trial_seed(p.seed, k));
        try {
            inst.solution = solve_leader(leader_view(inst.channels, Scheme::Robust), inst.cfg, p.solver);
            inst.ok = true;
        } catch (const std::exception& e) {
            inst.message = e.what();
        }
        if (log && ((k + 1) % 10 == 0 || k + 1 == count))
            note(log, "  solved " + std::to_string(k + 1) + "/" + std::to_string(count) + " robust instances");
        out.push_back(std::move(inst));
    }
    return out;
}

CheckResult check_certificate_soundness(const SuiteProfile& p, const std::vector<SolvedInstance>& inst)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = 2;
    r.name = "robust certificate soundness";
    r.tolerance = fmt("%g", p.soundness_tol) + " relative";
    int checked = 0, bad = 0;
    double worst = 0.0;
    for (const SolvedInstance& s : inst) {
        if (checked == p.soundness_instances) break;
        if (!s.ok) continue;
        ++checked;
        OracleConfig oc = p.oracle;
        oc.seed = static_cast<std::uint64_t>(checked);
        const LeaderSolution& sol = s.solution;
        const WorstCaseSamples w = worst_case_sampler(sol.leader, sol.anticipated.w_J, s.channels, oc);
        const CertificateCheck c =
            check_certificates(w, sol.cert.psi_JD, sol.cert.phi_JD, sol.cert.psi_JR, p.soundness_tol);
        worst = std::max({worst, c.psi_jd_excess, c.phi_jd_excess, c.psi_jr_excess});
        if (!c.ok) {
            ++bad;
            r.details.push_back("instance " + std::to_string(checked - 1) + ": excess psi_JD " +
                                fmt("%.3g", c.psi_jd_excess) + ", phi_JD " + fmt("%.3g", c.phi_jd_excess) +
                                ", psi_JR " + fmt("%.3g", c.psi_jr_excess));
        }
    }
    r.pass = checked == p.soundness_instances && bad == 0;
    r.summary = std::to_string(checked - bad) + "/" + std::to_string(p.soundness_instances) +
                " instances sound, largest sampled excess " + fmt("%.3g", worst);
    r.seconds = seconds_since(t0);
    return r;
}

CheckResult check_zero_radius_collapse(const SuiteProfile& p)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = 3;
    r.name = "zero-radius collapse";
    r.tolerance = "LMI " + fmt("%g", p.collapse_lmi_tol) + " relative, utility " + fmt("%g", p.collapse_utility_tol);
    const SceneConfig& cfg = p.base;
    double lmi_err = 0.0;
    bool lmi_ok = true;
    for (int k = 0; k < p.collapse_draws; ++k) {
        Rng rng(trial_seed(p.seed ^ 0xc011a95eULL, k));
        JammerLinkData d;
        d.H_RD = random_gaussian(cfg.N_D, cfg.N, rng);
        d.Hhat_JD = random_gaussian(cfg.N_D, cfg.N_J, rng);
        d.Hhat_JR = random_gaussian(cfg.N, cfg.N_J, rng);
        const VectorXcd wD = random_unit(cfg.N_D, rng);
        const VectorXcd theta = random_reflection(cfg.N, 1.0, rng);
        const VectorXcd wJ = random_unit(cfg.N_J, rng);
        MatrixXcd H = d.Hhat_JD;
        if (cfg.N > 0) H += d.H_RD * theta.asDiagonal() * d.Hhat_JR;
        const double jd = (wD.adjoint() * H).squaredNorm();
        const double jr = (theta.asDiagonal() * d.Hhat_JR * wJ).squaredNorm();

        struct Item {
            const char* name;
            double nominal;
            std::optional<double> cert;
            double bisected;
        };
        const int steps = 60;
        std::vector<Item> items{
            {"psi_JD", jd, certify_psi_jd(wD, theta, d),
             bisect_threshold([&](double t) { return psi_jd_feasible(wD, theta, d, t); }, 0.0, 2.0 * jd + 1.0,
                              steps)},
            {"phi_JD", jd, certify_phi_jd(wD, theta, d),
             bisect_threshold([&](double t) { return phi_jd_feasible(wD, theta, d, t); }, 0.0, 2.0 * jd + 1.0,
                              steps, true)},
        };
        if (cfg.N > 0) {
            items.push_back({"psi_JR", jr, certify_psi_jr(theta, wJ, d.Hhat_JR, 0.0),
                             bisect_threshold([&](double t) { return psi_jr_feasible(theta, wJ, d.Hhat_JR, t); },
                                              0.0, 2.0 * jr + 1.0, steps)});
        }
        for (const Item& it : items) {
            const double scale = 1.0 + it.nominal;
            const double e_cert = it.cert ? std::abs(*it.cert - it.nominal) / scale : INFINITY;
            const double e_bis = std::abs(it.bisected - it.nominal) / scale;
            lmi_err = std::max({lmi_err, e_cert, e_bis});
            if (!(e_cert <= p.collapse_lmi_tol && e_bis <= p.collapse_lmi_tol)) {
                lmi_ok = false;
                r.details.push_back(std::string(it.name) + " draw " + std::to_string(k) + ": nominal " +
                                    fmt("%.9g", it.nominal) + ", certified " +
                                    (it.cert ? fmt("%.9g", *it.cert) : std::string("none")) + ", bisection " +
                                    fmt("%.9g", it.bisected));
            }
        }
    }

    SceneConfig exact = cfg;
    exact.delta = 0.0;
    double u_err = 0.0;
    bool u_ok = true;
    for (int k = 0; k < p.collapse_draws; ++k) {
        const auto rows = run_trial(exact, {Scheme::Robust, Scheme::Perfect}, trial_seed(p.seed, k), p.solver);
        const double e = std::abs(rows[0].u_L - rows[1].u_L);
        if (rows[0].failed || rows[1].failed || !(e <= p.collapse_utility_tol)) {
            u_ok = false;
            r.details.push_back("draw " + std::to_string(k) + ": u_L robust " + fmt("%.9g", rows[0].u_L) +
                                ", perfect " + fmt("%.9g", rows[1].u_L));
        }
        u_err = std::max(u_err, std::isfinite(e) ? e : INFINITY);
    }
    r.pass = lmi_ok && u_ok;
    r.summary = "max LMI error " + fmt("%.3g", lmi_err) + ", max |u_L robust - perfect| " + fmt("%.3g", u_err) +
                " over " + std::to_string(p.collapse_draws) + " draws";
    r.seconds = seconds_since(t0);
    return r;
}

CheckResult check_convergence(const SuiteProfile& p, const std::vector<SolvedInstance>& inst)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = 4;
    r.name = "BSUM monotone convergence";
    r.tolerance = fmt("%g", p.monotone_tol) + ", <= " + std::to_string(p.solver.max_outer) + " outer iterations";
    int good = 0, longest = 0;
    for (std::size_t k = 0; k < inst.size(); ++k) {
        const SolvedInstance& s = inst[k];
        if (!s.ok) {
            r.details.push_back("scene " + std::to_string(k) + ": " + s.message);
            continue;
        }
        const SolverReport& rep = s.solution.report;
        longest = std::max(longest, rep.outer_iterations);
        const MonotonicityResult mono = monotonicity_check(rep.utility_trace, p.monotone_tol);
        const bool ok = mono.ok && rep.converged && rep.outer_iterations <= p.solver.max_outer;
        if (ok) {
            ++good;
        } else {
            r.details.push_back("scene " + std::to_string(k) + ": " +
                                (mono.ok ? "" : "trace drops at " + std::to_string(mono.first_violation) + "; ") +
                                rep.termination + " after " + std::to_string(rep.outer_iterations));
        }
    }
    r.pass = good >= p.convergence_required;
    r.summary = std::to_string(good) + "/" + std::to_string(inst.size()) + " scenes (need " +
                std::to_string(p.convergence_required) + "), most outer iterations " + std::to_string(longest);
    r.seconds = seconds_since(t0);
    return r;
}

CheckResult check_inner_loops(const SuiteProfile& p, const std::vector<SolvedInstance>& inst)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = 5;
    r.name = "SCA inner monotonicity and fixed point";
    r.tolerance = fmt("%g", p.monotone_tol) + " / " + fmt("%g", p.fixed_point_tol);
    int loops = 0, drops = 0;
    for (std::size_t k = 0; k < inst.size(); ++k) {
        if (!inst[k].ok) continue;
        const SolverReport& rep = inst[k].solution.report;
        for (const auto* traces : {&rep.wd_traces, &rep.theta_traces}) {
            for (const auto& t : *traces) {
                ++loops;
                if (!monotonicity_check(t, p.monotone_tol).ok) {
                    ++drops;
                    r.details.push_back("scene " + std::to_string(k) + ": inner trace drops");
                }
            }
        }
    }

    // The fixed point is taken where each SCA loop has converged; the BSUM
    // output itself stops at the inner tolerance.
    int fixed = 0, moved = 0;
    double worst = 0.0, raw = 0.0;
    BsumOptions one = p.solver;
    one.max_inner = 1;
    BsumOptions polish = p.solver;
    polish.inner_tol = p.fixed_point_polish_tol;
    polish.max_inner = p.fixed_point_polish_iterations;
    for (std::size_t k = 0; k < inst.size() && fixed < p.fixed_point_instances; ++k) {
        if (!inst[k].ok) continue;
        ++fixed;
        const LeaderModel m = LeaderModel::from_view(leader_view(inst[k].channels, Scheme::Robust), inst[k].cfg);
        LeaderState st;
        st.leader = inst[k].solution.leader;
        st.jammer = inst[k].solution.anticipated;
        certify(m, st, p.solver);
        const double start = leader_objective(m, st, p.solver.floor);
        double d = 0.0;
        std::string failure;
        for (int block = 0; block < 2; ++block) {
            const auto sca = block == 0 ? receive_beamforming_sca : reflection_sca;
            LeaderState once = st;
            if (sca(m, once, one).ok) raw = std::max(raw, std::abs(leader_objective(m, once, one.floor) - start));
            LeaderState conv = st;
            const InnerResult a = sca(m, conv, polish);
            const double before = leader_objective(m, conv, one.floor);
            LeaderState again = conv;
            const InnerResult b = sca(m, again, one);
            if (!a.ok || !b.ok) failure += a.message + b.message;
            d = std::max(d, std::abs(leader_objective(m, again, one.floor) - before));
        }
        worst = std::max(worst, d);
        if (!failure.empty() || !(d < p.fixed_point_tol)) {
            ++moved;
            r.details.push_back("scene " + std::to_string(k) + ": re-solve moves the objective by " + fmt("%.3g", d) +
                                (failure.empty() ? "" : " (" + failure + ")"));
        }
    }
    r.pass = drops == 0 && moved == 0 && fixed == p.fixed_point_instances;
    r.summary = std::to_string(loops - drops) + "/" + std::to_string(loops) + " inner loops monotone; re-solve at " +
                std::to_string(fixed) + " converged points moves the objective by at most " + fmt("%.3g", worst) +
                " (" + fmt("%.3g", raw) + " at the BSUM output)";
    r.seconds = seconds_since(t0);
    return r;
}

TrendData run_trend_sweeps(const SuiteProfile& p, std::ostream* log)
{
    TrendData d;
    for (const SweepPlan& plan : p.trend_sweeps) {
        ExperimentSpec spec;
        spec.sweep = plan.sweep;
        spec.values = plan.values;
        spec.schemes = kAllSchemes;
        spec.trials = p.trend_trials;
        spec.base = p.base;
        spec.seed = p.seed;
        spec.solver = p.solver;
        const auto t0 = Clock::now();
        d.results.push_back(run_experiment(spec));
        d.specs.push_back(spec);
        note(log, std::string("  sweep ") + to_string(plan.sweep) + ": " + std::to_string(plan.values.size()) +
                      " points x " + std::to_string(p.trend_trials) + " trials in " + fmt("%.0f", seconds_since(t0)) +
                      " s");
    }
    return d;
}

CheckResult check_trends(const SuiteProfile& p, const TrendData& d)
{
    CheckResult r;
    r.id = 6;
    r.name = "trend reproduction";
    r.tolerance = fmt("%g", p.trend_tol) + " on paired means over " + std::to_string(p.trend_trials) + " trials";
    SubCheck all;
    const double tol = p.trend_tol;
    const auto missing = [&](const char* what) { all.add(false, std::string(what) + ": sweep not run"); };

    if (const ExperimentResult* cj = find_sweep(d, Sweep::Cj)) {
        for (Scheme s : kAllSchemes) {
            const auto m = means(*cj, s);
            all.add(directed(m, &ResultRow::u_L, +1, tol),
                    std::string("(a) u_L up in c_J, ") + to_string(s) + ": " + series(m, &ResultRow::u_L));
            all.add(directed(m, &ResultRow::u_J, -1, tol),
                    std::string("(a) u_J down in c_J, ") + to_string(s) + ": " + series(m, &ResultRow::u_J));
        }
    } else {
        missing("(a)");
    }

    if (const ExperimentResult* cs = find_sweep(d, Sweep::Cs)) {
        for (Scheme s : kAllSchemes) {
            const auto m = means(*cs, s);
            all.add(directed(m, &ResultRow::u_L, -1, tol),
                    std::string("(b) u_L down in c_S, ") + to_string(s) + ": " + series(m, &ResultRow::u_L));
        }
    } else {
        missing("(b)");
    }

    // (c) at every point of every sweep that was run.
    struct Order {
        Scheme hi, lo;
    };
    for (const Order o : {Order{Scheme::Perfect, Scheme::Robust}, Order{Scheme::Robust, Scheme::NonRobust},
                          Order{Scheme::Robust, Scheme::NoRis}}) {
        int points = 0, held = 0;
        std::string where;
        for (std::size_t k = 0; k < d.results.size(); ++k) {
            const auto a = means(d.results[k], o.hi), b = means(d.results[k], o.lo);
            for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
                ++points;
                if (a[i].u_L >= b[i].u_L - tol) {
                    ++held;
                } else {
                    where += std::string(" ") + to_string(d.specs[k].sweep) + "=" + fmt("%g", a[i].value) + " (" +
                             fmt("%.6g", a[i].u_L) + " < " + fmt("%.6g", b[i].u_L) + ")";
                }
            }
        }
        all.add(points > 0 && held == points, std::string("(c) u_L ") + to_string(o.hi) + " >= " + to_string(o.lo) +
                                                  ": " + std::to_string(held) + "/" + std::to_string(points) +
                                                  " points" + where);
    }

    if (const ExperimentResult* n = find_sweep(d, Sweep::N)) {
        for (Scheme s : kSurfaceSchemes) {
            const auto m = means(*n, s);
            all.add(directed(m, &ResultRow::u_L, +1, tol),
                    std::string("(d) u_L up in N, ") + to_string(s) + ": " + series(m, &ResultRow::u_L));
            all.add(directed(m, &ResultRow::u_J, -1, tol),
                    std::string("(d) u_J down in N, ") + to_string(s) + ": " + series(m, &ResultRow::u_J));
        }
        const auto m = means(*n, Scheme::NoRis);
        double lo = INFINITY, hi = -INFINITY;
        for (const ResultRow& row : m) {
            lo = std::min(lo, row.u_L);
            hi = std::max(hi, row.u_L);
        }
        all.add(!m.empty() && hi - lo <= tol * (1.0 + std::abs(hi)),
                "(d) u_L flat in N, noris: " + series(m, &ResultRow::u_L));
    } else {
        missing("(d)");
    }

    if (const ExperimentResult* xj = find_sweep(d, Sweep::Xj)) {
        for (Scheme s : kAllSchemes) {
            const auto m = means(*xj, s);
            all.add(directed(m, &ResultRow::u_L, -1, tol),
                    std::string("(e) u_L down as x_J nears D, ") + to_string(s) + ": " + series(m, &ResultRow::u_L));
        }
    } else {
        missing("(e)");
    }

    int failures = 0;
    for (const auto& res : d.results) failures += res.failures;
    if (failures > 0) r.details.push_back(std::to_string(failures) + " failed trial solves (excluded from means)");
    int bad = 0;
    for (const auto& l : all.lines) bad += l.rfind("FAIL", 0) == 0;
    r.pass = all.pass;
    r.details.insert(r.details.end(), all.lines.begin(), all.lines.end());
    r.summary = std::to_string(all.lines.size() - static_cast<std::size_t>(bad)) + "/" +
                std::to_string(all.lines.size()) + " orderings hold";
    return r;
}

CheckResult check_jammer_paradox(const SuiteProfile& p, const TrendData& d)
{
    CheckResult r;
    r.id = 7;
    r.name = "non-robust paradox";
    r.tolerance = "mean u_J(robust) >= mean u_J(nonrobust)";
    const ExperimentResult* cj = find_sweep(d, Sweep::Cj);
    if (!cj) {
        r.summary = "c_J sweep not run";
        return r;
    }
    const auto a = means(*cj, Scheme::Robust), b = means(*cj, Scheme::NonRobust);
    double ma = 0.0, mb = 0.0;
    for (const auto& row : a) ma += row.u_J / static_cast<double>(a.size());
    for (const auto& row : b) mb += row.u_J / static_cast<double>(b.size());
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        r.details.push_back("c_J=" + fmt("%g", a[i].value) + ": robust " + fmt("%.6g", a[i].u_J) + ", nonrobust " +
                            fmt("%.6g", b[i].u_J));
    }
    r.pass = !a.empty() && ma >= mb;
    r.summary = "mean u_J robust " + fmt("%.6g", ma) + ", nonrobust " + fmt("%.6g", mb) + " over " +
                std::to_string(a.size()) + " c_J points x " + std::to_string(p.trend_trials) + " trials";
    return r;
}

CheckResult check_complexity(const SuiteProfile& p)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = 8;
    r.name = "SCA iteration complexity";
    r.tolerance = "log-log slope in [" + fmt("%g", p.slope_lo) + ", " + fmt("%g", p.slope_hi) + "]";
    BsumOptions o = p.solver;
    o.full_phi_block = true;
    o.psi_lmi_blocks = true;
    std::vector<double> ns, ts;
    bool ok = true;
    for (int N : p.complexity_N) {
        SceneConfig cfg = p.base;
        cfg.N = N;
        const ChannelSet ch = draw(cfg, trial_seed(p.seed, 0));
        const LeaderModel m = LeaderModel::from_view(leader_view(ch, Scheme::Robust), cfg);
        const LeaderState st = initial_state(m, o);
        std::vector<double> times;
        for (int k = 0; k < p.complexity_repeats; ++k) {
            SCAStateWD swd = make_sca_state_wd(m, st, o.floor);
            SCAStateTheta sth = make_sca_state_theta(m, st, o.floor);
            const auto t1 = Clock::now();
            const SurrogateStep a = receive_surrogate_step(m, st, swd, o);
            const SurrogateStep b = reflection_surrogate_step(m, st, sth, o);
            times.push_back(seconds_since(t1));
            ok = ok && a.ok && b.ok;
        }
        std::sort(times.begin(), times.end());
        const double n = cfg.N_J * (N + cfg.N_D) + 1;
        ns.push_back(n);
        ts.push_back(times[times.size() / 2]);
        r.details.push_back("N=" + std::to_string(N) + " n=" + fmt("%g", n) + ": " + fmt("%.3f", ts.back()) + " s");
    }
    const double slope = ns.size() >= 2 ? loglog_slope(ns, ts) : NAN;
    r.pass = ok && slope >= p.slope_lo && slope <= p.slope_hi;
    r.summary = "slope " + fmt("%.2f", slope) + (ok ? "" : ", a surrogate solve failed");
    r.seconds = seconds_since(t0);
    return r;
}

CheckResult check_perfect_consistency(const SuiteProfile& p)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = 9;
    r.name = "perfect-scheme equilibrium consistency";
    r.tolerance = "|dP_J| <= " + fmt("%g", p.consistency_power_tol) + " P_J_max, overlap >= 1 - " +
                  fmt("%g", p.consistency_overlap_tol);
    double worst_p = 0.0, worst_o = 0.0;
    int good = 0;
    for (int k = 0; k < p.consistency_draws; ++k) {
        const ChannelSet ch = draw(p.base, trial_seed(p.seed, k));
        try {
            const LeaderSolution sol = solve_leader(leader_view(ch, Scheme::Perfect), p.base, p.solver);
            const Equilibrium e = assemble_equilibrium(sol, ch, p.base);
            worst_p = std::max(worst_p, std::abs(e.dP_J) / p.base.P_J_max);
            worst_o = std::max(worst_o, 1.0 - e.w_J_overlap);
            if (std::abs(e.dP_J) <= p.consistency_power_tol * p.base.P_J_max &&
                e.w_J_overlap >= 1.0 - p.consistency_overlap_tol) {
                ++good;
            } else {
                r.details.push_back("draw " + std::to_string(k) + ": dP_J " + fmt("%.3g", e.dP_J) + ", overlap " +
                                    fmt("%.12g", e.w_J_overlap));
            }
        } catch (const std::exception& ex) {
            r.details.push_back("draw " + std::to_string(k) + ": " + ex.what());
        }
    }
    r.pass = good == p.consistency_draws;
    r.summary = std::to_string(good) + "/" + std::to_string(p.consistency_draws) + " draws, max |dP_J|/P_J_max " +
                fmt("%.3g", worst_p) + ", max 1 - overlap " + fmt("%.3g", worst_o);
    r.seconds = seconds_since(t0);
    return r;
}

std::vector<CheckResult> run_suite(const SuiteProfile& p, std::ostream* log)
{
    std::map<int, CheckResult> done;
    const auto finish = [&](CheckResult r) {
        note(log, "  criterion " + std::to_string(r.id) + " done in " + fmt("%.1f", r.seconds) + " s");
        done[r.id] = std::move(r);
    };
    if (wanted(p, 1)) finish(check_follower_dominance(p));
    if (wanted(p, 2) || wanted(p, 4) || wanted(p, 5)) {
        int count = 0;
        if (wanted(p, 2)) count = std::max(count, p.soundness_instances);
        if (wanted(p, 4)) count = std::max(count, p.convergence_scenes);
        if (wanted(p, 5)) count = std::max(count, p.fixed_point_instances);
        const auto t0 = Clock::now();
        const auto inst = solve_instances(p, count, log);
        const double solve_s = seconds_since(t0);
        if (wanted(p, 2)) finish(check_certificate_soundness(p, inst));
        if (wanted(p, 4)) {
            CheckResult r = check_convergence(p, inst);
            r.seconds += solve_s;
            finish(std::move(r));
        }
        if (wanted(p, 5)) finish(check_inner_loops(p, inst));
    }
    if (wanted(p, 3)) finish(check_zero_radius_collapse(p));
    if (wanted(p, 6) || wanted(p, 7)) {
        const auto t0 = Clock::now();
        const TrendData d = run_trend_sweeps(p, log);
        const double s = seconds_since(t0);
        if (wanted(p, 6)) {
            CheckResult r = check_trends(p, d);
            r.seconds = s;
            finish(std::move(r));
        }
        if (wanted(p, 7)) finish(check_jammer_paradox(p, d));
    }
    if (wanted(p, 8)) finish(check_complexity(p));
    if (wanted(p, 9)) finish(check_perfect_consistency(p));
    std::vector<CheckResult> out;
    for (auto& [id, r] : done) out.push_back(std::move(r));
    return out;
}

void print_result(std::ostream& os, const CheckResult& r)
{
    os << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << " (tol " << r.tolerance << "): " << r.summary
       << '\n';
    for (const auto& d : r.details) os << "       " << d << '\n';
}

}  // namespace risgame
