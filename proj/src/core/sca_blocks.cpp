#include <algorithm>
#include <chrono>
#include <cmath>

#include "risgame/bsum.hpp"

namespace risgame {

using conic::CAffMat;
using conic::ConicProgram;
using conic::cplx;
using conic::LinExpr;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

LinExpr var(int i) { return LinExpr::var(i); }

// Scalars shared by both surrogates.
struct Aux {
    int psi, rho1, rho2, phi, eta1, eta2, mu, nu, xi, tau, phi_o, s_o, psi_o, pj;
};

Aux add_aux(ConicProgram& p)
{
    const auto v = p.add_variables("aux", 14);
    return Aux{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11], v[12], v[13]};
}

// Constraints common to both blocks: psi/phi certificates are added by the
// caller; this adds nu, mu, xi, the jamming-power bound, the objective
// auxiliaries and the objective itself.
void add_common(ConicProgram& p, const Aux& x, const LeaderModel& m, const LeaderState& st, const CAffMat& a,
                std::complex<double> a0, const LinExpr& xi_cap, double mu0, double xi0, double psi0,
                double phi_o0, double psi_o0, double pj_cap)
{
    p.add_nonneg(var(x.rho1));
    p.add_nonneg(var(x.rho2));
    p.add_nonneg(var(x.eta1));
    p.add_nonneg(var(x.eta2));
    p.add_rotated_soc(var(x.phi), 1.0, {var(x.nu)}, "nu");
    p.add_soc(2.0 * mu0 * var(x.mu) - mu0 * mu0, {a.real_part(), a.imag_part()}, "mu");
    p.add_rotated_soc(xi_cap, 1.0, {var(x.xi)}, "xi");
    p.add_rotated_soc(var(x.tau), var(x.nu), {var(x.mu)}, "tau");

    const double k = std::sqrt(st.leader.P_S) / std::sqrt(m.cfg.c_J);
    LinExpr jam = var(x.pj) - k * var(x.tau);
    jam += (2.0 * xi0 * psi0 / (psi0 * psi0)) * var(x.xi);
    jam -= (xi0 * xi0 / (psi0 * psi0)) * var(x.psi);
    p.add_nonneg(jam, "P_J");
    p.add_nonneg(var(x.pj));
    p.add_nonneg(pj_cap - var(x.pj));

    const LinExpr la = 2.0 * (cplx(std::conj(a0)) * a).real_part() - std::norm(a0);
    p.add_rotated_soc(var(x.s_o), 1.0, {var(x.phi_o)}, "phi_o");
    p.add_rotated_soc(la, 1.0, {var(x.s_o)}, "phi_o^2");
    p.add_nonneg(2.0 * psi_o0 * var(x.psi_o) - psi_o0 * psi_o0 - var(x.psi), "psi_o");

    LinExpr obj = (2.0 * phi_o0 * psi_o0 / (psi_o0 * psi_o0)) * var(x.phi_o);
    obj -= (phi_o0 * phi_o0 / (psi_o0 * psi_o0)) * var(x.psi_o);
    p.maximize(obj);
}

void add_psi_jd(ConicProgram& p, const CAffMat& wD, const CAffMat& theta, const JammerLinkData& d, const Aux& x,
                const BsumOptions& o)
{
    if (o.psi_lmi_blocks) {
        p.add_hermitian_psd(lmi_psi_jd(wD, theta, d, var(x.psi), var(x.rho1), var(x.rho2)), "psi_JD");
    } else {
        add_psi_jd_cones(p, wD, theta, d, var(x.psi), var(x.rho1), var(x.rho2));
    }
}

void add_phi_block(ConicProgram& p, const CAffMat& A, const JammerLinkData& d, const Aux& x, const BsumOptions& o)
{
    if (o.full_phi_block) {
        p.add_hermitian_psd(lmi_phi_jd(A, d, var(x.phi), var(x.eta1), var(x.eta2)), "phi_JD");
    } else {
        add_phi_jd_compact(p, A, d, var(x.phi), var(x.eta1), var(x.eta2));
    }
}

double elapsed_ms(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SCAStateWD make_sca_state_wd(const LeaderModel& m, const LeaderState& st, double floor)
{
    SCAStateWD s;
    s.wD0 = st.leader.w_D;
    const double a = std::abs(signal_gain(m, st.leader));
    s.mu0 = std::sqrt(a);
    s.xi0 = std::sqrt(noise_term(m, st.leader));
    s.psi_JD0 = std::max(st.cert.psi_JD, floor);
    s.psi_D0 = std::sqrt(s.psi_JD0);
    s.phi_D0 = std::sqrt(a);
    s.mu = s.mu0;
    s.nu = std::sqrt(st.cert.phi_JD);
    s.xi = s.xi0;
    s.phi_D = s.phi_D0;
    s.psi_D = s.psi_D0;
    s.W_D = s.wD0 * s.wD0.adjoint();
    return s;
}

SCAStateTheta make_sca_state_theta(const LeaderModel& m, const LeaderState& st, double floor)
{
    SCAStateTheta s;
    const LeaderStrategy& l = st.leader;
    s.theta0 = l.theta;
    s.E = (l.w_D.adjoint() * m.H_RD).transpose();
    s.alpha = s.E.cwiseProduct(m.H_SR * l.w_S);
    s.beta = l.w_D.dot(m.H_SD * l.w_S);
    const double a = std::abs(signal_gain(m, l));
    s.mu0 = std::sqrt(a);
    s.xi0 = std::sqrt(noise_term(m, l));
    s.psi_JD0 = std::max(st.cert.psi_JD, floor);
    s.psi_theta0 = std::sqrt(s.psi_JD0);
    s.phi_theta0 = std::sqrt(a);
    s.mu = s.mu0;
    s.nu = std::sqrt(st.cert.phi_JD);
    s.xi = s.xi0;
    s.phi_theta = s.phi_theta0;
    s.psi_theta = s.psi_theta0;
    return s;
}

SurrogateStep receive_surrogate_step(const LeaderModel& m, const LeaderState& st, SCAStateWD& sca,
                                     const BsumOptions& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const LeaderStrategy& l = st.leader;
    const int nd = static_cast<int>(l.w_D.size());
    const JammerLinkData d = m.link();
    const VectorXcd c = m.Ht_SD(l.theta) * l.w_S;
    MatrixXcd Q = m.sigma_D2 * MatrixXcd::Identity(nd, nd);
    if (m.N() > 0) {
        const MatrixXcd g = m.H_RD * l.theta.asDiagonal();
        Q += m.sigma_R2 * g * g.adjoint();
    }

    ConicProgram p;
    const auto wre = p.add_variables("w_D.re", nd), wim = p.add_variables("w_D.im", nd);
    const auto wdg = p.add_variables("W_D.diag", nd);
    const auto wor = p.add_variables("W_D.re", nd * (nd - 1) / 2), woi = p.add_variables("W_D.im", nd * (nd - 1) / 2);
    const Aux x = add_aux(p);
    const CAffMat w = CAffMat::complex_vector(wre, wim);
    const CAffMat theta{MatrixXcd(l.theta)};

    add_psi_jd(p, w, theta, d, x, o);
    add_phi_block(p, phi_lift(PhiMode::ScaWd, w, theta, sca.wD0, l.theta, m.H_RD), d, x, o);

    const CAffMat W = CAffMat::hermitian(wdg, wor, woi);
    p.add_equality(W.trace().real_part() - 1.0, "tr W_D");
    CAffMat lift(nd + 1, nd + 1);
    lift.set_block(0, 0, W);
    lift.set_block(0, nd, w);
    lift.set_block(nd, 0, w.adjoint());
    lift.set_block(nd, nd, CAffMat(MatrixXcd::Identity(1, 1)));
    p.add_hermitian_psd(lift, "W_D");

    // Noise kept homogeneous in w_D so that normalizing the optimizer keeps
    // every constraint; it equals the true noise on the unit sphere.
    const VectorXcd qw = Q * sca.wD0;
    const LinExpr xi_cap = 2.0 * (MatrixXcd(qw.adjoint()) * w).real_part() - sca.wD0.dot(qw).real();

    double cap = m.cfg.P_J_max;
    if (m.N() > 0 && st.cert.psi_JR > 0.0) {
        LeaderState zero = st;
        zero.jammer.P_J = 0.0;
        cap = std::min(cap, (m.P_R_max - surface_power(m, zero)) / st.cert.psi_JR);
    }
    const CAffMat a = w.adjoint() * MatrixXcd(c);
    add_common(p, x, m, st, a, sca.wD0.dot(c), xi_cap, sca.mu0, sca.xi0, sca.psi_JD0, sca.phi_D0, sca.psi_D0,
               std::max(cap, 0.0));

    SurrogateStep step;
    const conic::SolveResult r = conic::solve(p, o.solver);
    step.status = r.status;
    step.ms = elapsed_ms(t0);
    step.solver_iterations = r.iterations;
    if (!r.ok()) return step;
    step.ok = true;
    step.value = r.objective;
    step.next = st;
    step.next.leader.w_D = r.complex_values(wre, wim);
    step.next.cert.psi_JD = r.value(x.psi);
    step.next.cert.phi_JD = r.value(x.phi);
    step.next.cert.rho1 = r.value(x.rho1);
    step.next.cert.rho2 = r.value(x.rho2);
    step.next.cert.eta1 = r.value(x.eta1);
    step.next.cert.eta2 = r.value(x.eta2);
    step.next.jammer.P_J = r.value(x.pj);
    sca.mu = r.value(x.mu);
    sca.nu = r.value(x.nu);
    sca.xi = r.value(x.xi);
    sca.phi_D = r.value(x.phi_o);
    sca.psi_D = r.value(x.psi_o);
    std::vector<double> xs(r.x.data(), r.x.data() + r.x.size());
    sca.W_D = W.eval(xs);
    return step;
}

SurrogateStep reflection_surrogate_step(const LeaderModel& m, const LeaderState& st, SCAStateTheta& sca,
                                        const BsumOptions& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const LeaderStrategy& l = st.leader;
    const int n = m.N();
    const JammerLinkData d = m.link();

    ConicProgram p;
    const auto tre = p.add_variables("theta.re", n), tim = p.add_variables("theta.im", n);
    const auto jr = p.add_variables("psi_JR", 2);  // psi_JR, rho3
    const Aux x = add_aux(p);
    const CAffMat theta = CAffMat::complex_vector(tre, tim);
    const CAffMat wD{MatrixXcd(l.w_D)};

    for (int k = 0; k < n; ++k) p.add_soc(m.cfg.lambda_max, {var(tre[k]), var(tim[k])}, "|theta|");
    add_psi_jd(p, wD, theta, d, x, o);
    add_phi_block(p, phi_lift(PhiMode::ScaTheta, wD, theta, l.w_D, sca.theta0, m.H_RD), d, x, o);
    if (o.psi_lmi_blocks) {
        p.add_hermitian_psd(lmi_psi_jr(theta, st.jammer.w_J, m.Hhat_JR, m.eps_JR, var(jr[0]), var(jr[1])),
                            "psi_JR");
    } else {
        add_psi_jr_cones(p, theta, st.jammer.w_J, m.Hhat_JR, m.eps_JR, var(jr[0]), var(jr[1]));
    }
    p.add_nonneg(var(jr[1]));

    // Surface power: P_S ||diag(H_SR w_S) theta||^2 + sigma_R^2 ||theta||^2 as
    // a norm, and P_J psi_JR through an upper bound tight at the current point.
    const VectorXcd hs = m.H_SR * l.w_S;
    std::vector<LinExpr> terms;
    for (int k = 0; k < n; ++k) {
        const double g = std::sqrt(l.P_S * std::norm(hs(k)) + m.sigma_R2);
        terms.push_back(g * var(tre[k]));
        terms.push_back(g * var(tim[k]));
    }
    const double p0 = st.jammer.P_J, r0 = st.cert.psi_JR;
    LinExpr budget = m.P_R_max;
    if (r0 <= 1e-14) {
        budget -= m.cfg.P_J_max * var(jr[0]);
    } else if (p0 <= 1e-12 * m.cfg.P_J_max) {
        p.add_nonneg(2.0 * r0 - var(jr[0]));
        budget -= 2.0 * r0 * var(x.pj);
    } else {
        const double t = p0 / r0;
        terms.push_back(std::sqrt(t / 2.0) * var(jr[0]));
        terms.push_back(std::sqrt(0.5 / t) * var(x.pj));
    }
    p.add_rotated_soc(budget, 1.0, terms, "P_R");

    const CAffMat a = MatrixXcd(sca.alpha.transpose()) * theta + CAffMat(MatrixXcd::Constant(1, 1, sca.beta));
    const VectorXcd q = m.sigma_R2 * sca.E.cwiseAbs2();
    const VectorXcd qt = q.cwiseProduct(sca.theta0);
    LinExpr xi_cap = 2.0 * (MatrixXcd(qt.adjoint()) * theta).real_part();
    xi_cap += m.sigma_D2 - sca.theta0.dot(qt).real();

    add_common(p, x, m, st, a, signal_gain(m, l), xi_cap, sca.mu0, sca.xi0, sca.psi_JD0, sca.phi_theta0,
               sca.psi_theta0, m.cfg.P_J_max);

    SurrogateStep step;
    const conic::SolveResult r = conic::solve(p, o.solver);
    step.status = r.status;
    step.ms = elapsed_ms(t0);
    step.solver_iterations = r.iterations;
    if (!r.ok()) return step;
    step.ok = true;
    step.value = r.objective;
    step.next = st;
    step.next.leader.theta = r.complex_values(tre, tim);
    step.next.cert.psi_JD = r.value(x.psi);
    step.next.cert.phi_JD = r.value(x.phi);
    step.next.cert.psi_JR = r.value(jr[0]);
    step.next.cert.rho1 = r.value(x.rho1);
    step.next.cert.rho2 = r.value(x.rho2);
    step.next.cert.rho3 = r.value(jr[1]);
    step.next.cert.eta1 = r.value(x.eta1);
    step.next.cert.eta2 = r.value(x.eta2);
    step.next.jammer.P_J = r.value(x.pj);
    sca.mu = r.value(x.mu);
    sca.nu = r.value(x.nu);
    sca.xi = r.value(x.xi);
    sca.phi_theta = r.value(x.phi_o);
    sca.psi_theta = r.value(x.psi_o);
    return step;
}

namespace {

enum class Block { Receive, Reflection };

InnerResult run_sca(Block b, const LeaderModel& m, LeaderState& st, const BsumOptions& o)
{
    InnerResult res;
    double cur = signal_ratio(m, st, o.floor);
    res.trace.push_back(cur);
    for (int it = 0; it < o.max_inner; ++it) {
        SurrogateStep step;
        if (b == Block::Receive) {
            SCAStateWD sca = make_sca_state_wd(m, st, o.floor);
            step = receive_surrogate_step(m, st, sca, o);
        } else {
            SCAStateTheta sca = make_sca_state_theta(m, st, o.floor);
            step = reflection_surrogate_step(m, st, sca, o);
        }
        ++res.iterations;
        res.solve_ms.push_back(step.ms);
        if (!step.ok) {
            res.ok = false;
            res.message = std::string("surrogate solve: ") + conic::to_string(step.status);
            break;
        }
        res.surrogate.push_back(step.value);

        LeaderState cand = st;
        if (b == Block::Receive) {
            const double nrm = step.next.leader.w_D.norm();
            if (nrm < 1e-12) {
                res.message = "receive beamformer collapsed";
                break;
            }
            cand.leader.w_D = step.next.leader.w_D / nrm;
        } else {
            cand.leader.theta = step.next.leader.theta;
            for (Eigen::Index k = 0; k < cand.leader.theta.size(); ++k) {
                const double mag = std::abs(cand.leader.theta(k));
                if (mag > m.cfg.lambda_max) cand.leader.theta(k) *= m.cfg.lambda_max / mag;
            }
        }
        if (!certify(m, cand, o, b == Block::Receive)) {
            res.ok = false;
            res.message = "recertification failed";
            break;
        }
        cand.jammer.P_J = std::clamp(jamming_lower_bound(m, cand, o.floor), 0.0, m.cfg.P_J_max);
        const double viol = leader_violation(m, cand, o.floor);
        const double next = signal_ratio(m, cand, o.floor);
        if (viol > 1e-6 || next < cur) {
            res.message = viol > 1e-6 ? "step rejected: infeasible" : "step rejected: no ascent";
            break;
        }
        st = cand;
        res.trace.push_back(next);
        if (next - cur < o.inner_tol) break;
        cur = next;
    }
    return res;
}

}  // namespace

InnerResult receive_beamforming_sca(const LeaderModel& m, LeaderState& st, const BsumOptions& o)
{
    return run_sca(Block::Receive, m, st, o);
}

InnerResult reflection_sca(const LeaderModel& m, LeaderState& st, const BsumOptions& o)
{
    if (m.N() == 0) {
        InnerResult r;
        r.trace.push_back(signal_ratio(m, st, o.floor));
        return r;
    }
    return run_sca(Block::Reflection, m, st, o);
}

}  // namespace risgame
