#include "risgame/robust_lmi.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

namespace risgame {

using conic::CAffMat;
using conic::ConicProgram;
using conic::cplx;
using conic::LinExpr;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

namespace {

bool is_fixed(const CAffMat& m) { return m.terms().empty(); }

CAffMat scalar_block(const LinExpr& e) { return CAffMat::scaled(e, MatrixXcd::Identity(1, 1)); }

void check_column(const CAffMat& v, Eigen::Index n, const char* what)
{
    if (v.cols() != 1 || v.rows() != n) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

void check_link(const JammerLinkData& d)
{
    if (d.Hhat_JR.cols() != d.N_J() || d.H_RD.rows() != d.N_D() || d.H_RD.cols() != d.N()) {
        throw std::invalid_argument("JammerLinkData: shape mismatch");
    }
    if (d.eps_JD < 0.0 || d.eps_JR < 0.0) throw std::invalid_argument("JammerLinkData: negative radius");
}

// b = [w_D; u^H] with u = w_D^H H_RD diag(theta).
CAffMat stacked_b(const CAffMat& wD, const CAffMat& theta, const MatrixXcd& H_RD)
{
    const Eigen::Index nd = wD.rows(), n = theta.rows();
    CAffMat b(nd + n, 1);
    b.set_block(0, 0, wD);
    if (n > 0) b.set_block(nd, 0, reflected_row(wD, theta, H_RD).adjoint());
    return b;
}

MatrixXcd stacked_hhat(const JammerLinkData& d)
{
    MatrixXcd h(d.N_J(), d.N_D() + d.N());
    h.leftCols(d.N_D()) = d.Hhat_JD.adjoint();
    h.rightCols(d.N()) = d.Hhat_JR.adjoint();
    return h;
}

}  // namespace

VectorXcd vec(const MatrixXcd& m) { return Eigen::Map<const VectorXcd>(m.data(), m.size()); }

StackedJammerChannel stack_jammer_channel(const VectorXcd& wD, const VectorXcd& theta, const MatrixXcd& H_RD,
                                          const MatrixXcd& Hhat_JD, const MatrixXcd& Hhat_JR)
{
    const Eigen::Index nd = wD.size(), n = theta.size(), nj = Hhat_JD.cols();
    StackedJammerChannel s;
    s.b.resize(nd + n);
    s.b.head(nd) = wD;
    if (n > 0) s.b.tail(n) = (wD.adjoint() * H_RD * theta.asDiagonal()).adjoint();
    s.Hhat_J.resize(nj, nd + n);
    s.Hhat_J.leftCols(nd) = Hhat_JD.adjoint();
    if (n > 0) s.Hhat_J.rightCols(n) = Hhat_JR.adjoint();
    const MatrixXcd bbT = (s.b * s.b.adjoint()).transpose();
    s.B = Eigen::kroneckerProduct(bbT, MatrixXcd::Identity(nj, nj));
    const Eigen::Index dim = nj * (nd + n);
    s.Upsilon_JD = MatrixXd::Zero(dim, dim);
    s.Upsilon_JR = MatrixXd::Zero(dim, dim);
    s.Upsilon_JD.topLeftCorner(nj * nd, nj * nd).setIdentity();
    s.Upsilon_JR.bottomRightCorner(nj * n, nj * n).setIdentity();
    return s;
}

CAffMat reflected_row(const CAffMat& wD, const CAffMat& theta, const MatrixXcd& H_RD)
{
    if (!is_fixed(wD) && !is_fixed(theta)) {
        throw std::invalid_argument("reflected_row: w_D and theta cannot both be variables");
    }
    check_column(wD, H_RD.rows(), "reflected_row(wD)");
    check_column(theta, H_RD.cols(), "reflected_row(theta)");
    if (is_fixed(theta)) {
        const MatrixXcd right = H_RD * theta.constant().col(0).asDiagonal();
        return wD.adjoint() * right;
    }
    // w_D^H H_RD diag(theta) = theta^T diag(w_D^H H_RD)
    const VectorXcd g = (wD.constant().col(0).adjoint() * H_RD).transpose();
    return theta.transpose() * MatrixXcd(g.asDiagonal());
}

CAffMat lmi_psi_jd(const CAffMat& wD, const CAffMat& theta, const JammerLinkData& d, const LinExpr& psi,
                   const LinExpr& rho1, const LinExpr& rho2)
{
    check_link(d);
    const int nj = d.N_J(), nd = d.N_D(), n = d.N();
    check_column(wD, nd, "lmi_psi_jd(wD)");
    check_column(theta, n, "lmi_psi_jd(theta)");
    if (!is_fixed(wD) && !is_fixed(theta)) {
        throw std::invalid_argument("lmi_psi_jd: w_D and theta cannot both be variables");
    }

    CAffMat r = wD.adjoint() * d.Hhat_JD;
    CAffMat u(1, n);
    if (n > 0) {
        u = reflected_row(wD, theta, d.H_RD);
        r += u * d.Hhat_JR;
    }
    const double s1 = std::sqrt(d.eps_JD), s2 = std::sqrt(d.eps_JR);
    const int dim = nj + 1 + nd + n;
    CAffMat m(dim, dim);
    m.set_block(0, 0, CAffMat::identity(nj, psi - rho1 - rho2));
    m.set_block(0, nj, r.adjoint());
    m.set_block(nj, 0, r);
    m.set_block(nj, nj, CAffMat(MatrixXcd::Identity(1, 1)));
    m.set_block(nj, nj + 1, cplx(s1) * wD.adjoint());
    m.set_block(nj + 1, nj, cplx(s1) * wD);
    m.set_block(nj + 1, nj + 1, CAffMat::identity(nd, rho1));
    if (n > 0) {
        m.set_block(nj, nj + 1 + nd, cplx(s2) * u);
        m.set_block(nj + 1 + nd, nj, cplx(s2) * u.adjoint());
        m.set_block(nj + 1 + nd, nj + 1 + nd, CAffMat::identity(n, rho2));
    }
    return m;
}

namespace {

// Real and imaginary parts of every entry of a row or column expression.
std::vector<LinExpr> real_entries(const CAffMat& v, double scale)
{
    std::vector<LinExpr> out;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            const CAffMat e = v.block(i, j, 1, 1);
            out.push_back(scale * e.real_part());
            out.push_back(scale * e.imag_part());
        }
    }
    return out;
}

}  // namespace

void add_psi_jd_cones(ConicProgram& p, const CAffMat& wD, const CAffMat& theta, const JammerLinkData& d,
                      const LinExpr& psi, const LinExpr& rho1, const LinExpr& rho2, const std::string& tag)
{
    check_link(d);
    const int nd = d.N_D(), n = d.N();
    check_column(wD, nd, "add_psi_jd_cones(wD)");
    check_column(theta, n, "add_psi_jd_cones(theta)");
    if (!is_fixed(wD) && !is_fixed(theta)) {
        throw std::invalid_argument("add_psi_jd_cones: w_D and theta cannot both be variables");
    }
    CAffMat r = wD.adjoint() * d.Hhat_JD;
    CAffMat u(1, n);
    if (n > 0) {
        u = reflected_row(wD, theta, d.H_RD);
        r += u * d.Hhat_JR;
    }
    const auto t = p.add_variables(tag + ".t", 3);
    p.add_rotated_soc(psi - rho1 - rho2, LinExpr::var(t[0]), real_entries(r, 1.0), tag + ".gain");
    p.add_rotated_soc(rho1, LinExpr::var(t[1]), real_entries(wD, std::sqrt(d.eps_JD)), tag + ".jd");
    p.add_rotated_soc(rho2, LinExpr::var(t[2]), real_entries(u, std::sqrt(d.eps_JR)), tag + ".jr");
    p.add_nonneg(1.0 - LinExpr::var(t[0]) - LinExpr::var(t[1]) - LinExpr::var(t[2]), tag + ".sum");
}

void add_psi_jr_cones(ConicProgram& p, const CAffMat& theta, const VectorXcd& wJ, const MatrixXcd& Hhat_JR,
                      double eps_JR, const LinExpr& psi, const LinExpr& rho3, const std::string& tag)
{
    const Eigen::Index n = Hhat_JR.rows();
    check_column(theta, n, "add_psi_jr_cones(theta)");
    if (wJ.size() != Hhat_JR.cols()) throw std::invalid_argument("add_psi_jr_cones: w_J shape mismatch");
    if (eps_JR < 0.0) throw std::invalid_argument("add_psi_jr_cones: negative radius");
    const VectorXcd hw = Hhat_JR * wJ;
    const CAffMat c = MatrixXcd(hw.asDiagonal()) * theta;
    const double s = std::sqrt(eps_JR);
    const auto a = p.add_variables(tag + ".a", static_cast<int>(n));
    const auto sg = p.add_variables(tag + ".s", static_cast<int>(n));
    LinExpr rest = 1.0 - wJ.squaredNorm() * rho3;
    for (int k = 0; k < n; ++k) {
        const std::string id = tag + "[" + std::to_string(k) + "]";
        p.add_rotated_soc(psi - LinExpr::var(a[k]), rho3, real_entries(theta.block(k, 0, 1, 1), s), id + ".err");
        p.add_rotated_soc(LinExpr::var(a[k]), LinExpr::var(sg[k]), real_entries(c.block(k, 0, 1, 1), 1.0),
                          id + ".gain");
        rest -= LinExpr::var(sg[k]);
    }
    if (n == 0) p.add_nonneg(rho3, tag + ".rho");
    p.add_nonneg(rest, tag + ".sum");
}

CAffMat phi_lift(PhiMode mode, const CAffMat& wD, const CAffMat& theta, const VectorXcd& wD0,
                 const VectorXcd& theta0, const MatrixXcd& H_RD)
{
    switch (mode) {
    case PhiMode::ExactFixed: {
        if (!is_fixed(wD) || !is_fixed(theta)) {
            throw std::invalid_argument("phi_lift: exact mode needs fixed w_D and theta");
        }
        const MatrixXcd b = stacked_b(wD, theta, H_RD).constant();
        return CAffMat(MatrixXcd(b * b.adjoint()));
    }
    case PhiMode::ScaWd:
        if (!is_fixed(theta)) throw std::invalid_argument("phi_lift: sca-wd mode needs fixed theta");
        if (wD0.size() != wD.rows()) throw std::invalid_argument("phi_lift: expansion point shape");
        break;
    case PhiMode::ScaTheta:
        if (!is_fixed(wD)) throw std::invalid_argument("phi_lift: sca-theta mode needs fixed w_D");
        if (theta0.size() != theta.rows()) throw std::invalid_argument("phi_lift: expansion point shape");
        break;
    }
    const CAffMat b = stacked_b(wD, theta, H_RD);
    const MatrixXcd b0 = mode == PhiMode::ScaWd ? stacked_b(CAffMat{MatrixXcd(wD0)}, theta, H_RD).constant()
                                                : stacked_b(wD, CAffMat{MatrixXcd(theta0)}, H_RD).constant();
    const MatrixXcd b0h = b0.adjoint();
    return b * b0h + b0 * b.adjoint() - CAffMat(MatrixXcd(b0 * b0h));
}

CAffMat lmi_phi_jd(const CAffMat& A, const JammerLinkData& d, const LinExpr& phi, const LinExpr& eta1,
                   const LinExpr& eta2)
{
    check_link(d);
    const int nj = d.N_J(), nd = d.N_D(), n = d.N(), m = nd + n;
    if (A.rows() != m || A.cols() != m) throw std::invalid_argument("lmi_phi_jd: lift shape mismatch");
    const CAffMat B = A.transpose().kron_identity(nj);
    const MatrixXcd h = vec(stacked_hhat(d));
    const int dim = nj * m;

    CAffMat top = B;
    MatrixXcd up_jd = MatrixXcd::Zero(dim, dim), up_jr = MatrixXcd::Zero(dim, dim);
    up_jd.topLeftCorner(nj * nd, nj * nd).setIdentity();
    up_jr.bottomRightCorner(nj * n, nj * n).setIdentity();
    top += CAffMat::scaled(eta1, up_jd);
    top += CAffMat::scaled(eta2, up_jr);

    const CAffMat Bh = B * h;
    CAffMat corner = MatrixXcd(h.adjoint()) * Bh;
    corner -= scalar_block(phi + d.eps_JD * eta1 + d.eps_JR * eta2);

    CAffMat out(dim + 1, dim + 1);
    out.set_block(0, 0, top);
    out.set_block(0, dim, Bh);
    out.set_block(dim, 0, Bh.adjoint());
    out.set_block(dim, dim, corner);
    return out;
}

void add_phi_jd_compact(ConicProgram& p, const CAffMat& A, const JammerLinkData& d, const LinExpr& phi,
                        const LinExpr& eta1, const LinExpr& eta2, const std::string& tag)
{
    check_link(d);
    const int nj = d.N_J(), nd = d.N_D(), n = d.N(), m = nd + n;
    if (A.rows() != m || A.cols() != m) throw std::invalid_argument("add_phi_jd_compact: lift shape mismatch");

    // ||H_J b||^2 = sum_r g_r^H (b b^H) g_r with g_r = (row r of H_J)^H, so the
    // S-procedure splits over rows.  Only error blocks with a positive radius
    // enter the quadratic form.
    std::vector<int> active;
    std::vector<LinExpr> mult;
    if (d.eps_JD > 0.0) {
        for (int i = 0; i < nd; ++i) active.push_back(i), mult.push_back(eta1);
    }
    if (d.eps_JR > 0.0) {
        for (int i = nd; i < m; ++i) active.push_back(i), mult.push_back(eta2);
    }
    const int k = static_cast<int>(active.size());
    MatrixXcd select = MatrixXcd::Zero(k, m);
    for (int i = 0; i < k; ++i) select(i, active[i]) = 1.0;

    CAffMat Y = select * A * MatrixXcd(select.transpose());
    for (int i = 0; i < k; ++i) {
        MatrixXcd e = MatrixXcd::Zero(k, k);
        e(i, i) = 1.0;
        Y += CAffMat::scaled(mult[i], e);
    }

    const MatrixXcd hj = stacked_hhat(d);
    const auto z = p.add_variables(tag + ".z", nj);
    LinExpr budget = -(phi + d.eps_JD * eta1 + d.eps_JR * eta2);
    for (int r = 0; r < nj; ++r) {
        const MatrixXcd g = hj.row(r).adjoint();
        const CAffMat Ag = A * g;
        const CAffMat corner = MatrixXcd(g.adjoint()) * Ag - CAffMat::scalar(z[r]);
        budget += LinExpr::var(z[r]);
        if (k == 0) {
            p.add_nonneg(corner.real_part(), tag + ".row" + std::to_string(r));
            continue;
        }
        const CAffMat border = select * Ag;
        CAffMat blk(k + 1, k + 1);
        blk.set_block(0, 0, Y);
        blk.set_block(0, k, border);
        blk.set_block(k, 0, border.adjoint());
        blk.set_block(k, k, corner);
        p.add_hermitian_psd(blk, tag + ".row" + std::to_string(r));
    }
    p.add_nonneg(budget, tag + ".sum");
}

CAffMat lmi_psi_jr(const CAffMat& theta, const VectorXcd& wJ, const MatrixXcd& Hhat_JR, double eps_JR,
                   const LinExpr& psi, const LinExpr& rho3)
{
    const Eigen::Index n = Hhat_JR.rows();
    check_column(theta, n, "lmi_psi_jr(theta)");
    if (wJ.size() != Hhat_JR.cols()) throw std::invalid_argument("lmi_psi_jr: w_J shape mismatch");
    if (eps_JR < 0.0) throw std::invalid_argument("lmi_psi_jr: negative radius");

    const CAffMat Theta = theta.as_diagonal();
    const VectorXcd hw = Hhat_JR * wJ;
    const CAffMat c = MatrixXcd(hw.asDiagonal()) * theta;
    const double s = std::sqrt(eps_JR);
    const Eigen::Index dim = 2 * n + 1;
    CAffMat m(dim, dim);
    m.set_block(0, 0, CAffMat::identity(n, psi));
    m.set_block(0, n, c);
    m.set_block(n, 0, c.adjoint());
    m.set_block(n, n, scalar_block(1.0 - wJ.squaredNorm() * rho3));
    m.set_block(0, n + 1, cplx(s) * Theta);
    m.set_block(n + 1, 0, cplx(s) * Theta.adjoint());
    m.set_block(n + 1, n + 1, CAffMat::identity(n, rho3));
    return m;
}

namespace {

std::optional<double> solve_for(const ConicProgram& p, int index, double sign)
{
    const conic::SolveResult r = conic::solve(p);
    if (!r.ok()) return std::nullopt;
    return sign * r.value(index);
}

}  // namespace

std::optional<double> certify_psi_jd(const VectorXcd& wD, const VectorXcd& theta, const JammerLinkData& d)
{
    ConicProgram p;
    const auto v = p.add_variables("psi_rho", 3);
    p.maximize(-LinExpr::var(v[0]));
    p.add_nonneg(LinExpr::var(v[1]));
    p.add_nonneg(LinExpr::var(v[2]));
    p.add_hermitian_psd(lmi_psi_jd(CAffMat(MatrixXcd(wD)), CAffMat(MatrixXcd(theta)), d, LinExpr::var(v[0]),
                                   LinExpr::var(v[1]), LinExpr::var(v[2])),
                        "psi_JD");
    return solve_for(p, v[0], 1.0);
}

std::optional<double> certify_phi_jd(const VectorXcd& wD, const VectorXcd& theta, const JammerLinkData& d,
                                     bool compact)
{
    ConicProgram p;
    const auto v = p.add_variables("phi_eta", 3);
    p.maximize(LinExpr::var(v[0]));
    p.add_nonneg(LinExpr::var(v[1]));
    p.add_nonneg(LinExpr::var(v[2]));
    const CAffMat A = phi_lift(PhiMode::ExactFixed, CAffMat(MatrixXcd(wD)), CAffMat(MatrixXcd(theta)), wD, theta,
                               d.H_RD);
    if (compact) {
        add_phi_jd_compact(p, A, d, LinExpr::var(v[0]), LinExpr::var(v[1]), LinExpr::var(v[2]));
    } else {
        p.add_hermitian_psd(lmi_phi_jd(A, d, LinExpr::var(v[0]), LinExpr::var(v[1]), LinExpr::var(v[2])),
                            "phi_JD");
    }
    return solve_for(p, v[0], 1.0);
}

std::optional<double> certify_psi_jr(const VectorXcd& theta, const VectorXcd& wJ, const MatrixXcd& Hhat_JR,
                                     double eps_JR)
{
    ConicProgram p;
    const auto v = p.add_variables("psi_rho", 2);
    p.maximize(-LinExpr::var(v[0]));
    p.add_nonneg(LinExpr::var(v[1]));
    p.add_hermitian_psd(
        lmi_psi_jr(CAffMat(MatrixXcd(theta)), wJ, Hhat_JR, eps_JR, LinExpr::var(v[0]), LinExpr::var(v[1])),
        "psi_JR");
    return solve_for(p, v[0], 1.0);
}

WorstCaseJD worst_case_jd(const VectorXcd& wD, const VectorXcd& theta, const JammerLinkData& d)
{
    check_link(d);
    if (wD.size() != d.N_D() || theta.size() != d.N()) throw std::invalid_argument("worst_case_jd: shape mismatch");
    Eigen::RowVectorXcd r = wD.adjoint() * d.Hhat_JD;
    double spread = std::sqrt(d.eps_JD) * wD.norm();
    if (d.N() > 0) {
        const Eigen::RowVectorXcd u = wD.adjoint() * d.H_RD * theta.asDiagonal();
        r += u * d.Hhat_JR;
        spread += std::sqrt(d.eps_JR) * u.norm();
    }
    const double rn = r.norm();
    WorstCaseJD w;
    w.max = (rn + spread) * (rn + spread);
    const double lo = std::max(0.0, rn - spread);
    w.min = lo * lo;
    return w;
}

double worst_case_jr(const VectorXcd& theta, const VectorXcd& wJ, const MatrixXcd& Hhat_JR, double eps_JR)
{
    if (theta.size() != Hhat_JR.rows() || wJ.size() != Hhat_JR.cols()) {
        throw std::invalid_argument("worst_case_jr: shape mismatch");
    }
    if (eps_JR < 0.0) throw std::invalid_argument("worst_case_jr: negative radius");
    // E w_J sweeps every y with ||y|| <= rho.  Per entry the best y_n is
    // phase-aligned, leaving max sum t_n^2 (a_n + s_n)^2 s.t. ||s|| <= rho.
    const Eigen::VectorXd a = (Hhat_JR * wJ).cwiseAbs();
    const Eigen::VectorXd t = theta.cwiseAbs();
    const double rho = std::sqrt(eps_JR) * wJ.norm();
    const Eigen::Index n = t.size();
    if (n == 0) return 0.0;
    const double tmax2 = t.cwiseAbs2().maxCoeff();
    if (rho == 0.0 || tmax2 == 0.0) return a.cwiseProduct(t).squaredNorm();

    const auto s_of = [&](double lam) {
        Eigen::VectorXd s(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double den = lam - t(k) * t(k);
            s(k) = den > 0.0 ? t(k) * t(k) * a(k) / den : 0.0;
        }
        return s;
    };
    const auto value = [&](const Eigen::VectorXd& s) { return (a + s).cwiseProduct(t).squaredNorm(); };

    double lo = tmax2, hi = tmax2 * (1.0 + a.norm() / rho) + 1e-300;
    while (s_of(hi).norm() > rho) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (s_of(mid).norm() > rho) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Hard case: the multiplier sits at max t^2 and the leftover radius goes
    // to an entry attaining it.
    Eigen::VectorXd s = s_of(hi);
    Eigen::Index k = 0;
    t.maxCoeff(&k);
    const double rest = s.squaredNorm() - s(k) * s(k);
    s(k) = std::max(s(k), std::sqrt(std::max(0.0, rho * rho - rest)));
    return value(s);
}

}  // namespace risgame
