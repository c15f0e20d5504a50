#include "ipm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace risgame::conic::detail {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);

}  // namespace

int hsvec_size(int d) { return d * d; }

VectorXd hsvec(const MatrixXcd& m)
{
    const int d = static_cast<int>(m.rows());
    VectorXd v(hsvec_size(d));
    int k = 0;
    for (int j = 0; j < d; ++j) {
        v(k++) = m(j, j).real();
        for (int i = j + 1; i < d; ++i) {
            const cplx a = 0.5 * (m(i, j) + std::conj(m(j, i)));
            v(k++) = kSqrt2 * a.real();
            v(k++) = kSqrt2 * a.imag();
        }
    }
    return v;
}

MatrixXcd hsmat(const Eigen::Ref<const VectorXd>& v, int d)
{
    MatrixXcd m(d, d);
    int k = 0;
    for (int j = 0; j < d; ++j) {
        m(j, j) = v(k++);
        for (int i = j + 1; i < d; ++i) {
            m(i, j) = cplx(v(k), v(k + 1)) / kSqrt2;
            m(j, i) = std::conj(m(i, j));
            k += 2;
        }
    }
    return m;
}

namespace {

enum class Op { W, Wt, Winv, Wit, WtW };

struct Scaling {
    VectorXd d;         // LP
    double beta = 1.0;  // SOC
    VectorXd w;         // SOC, hyperbolic unit vector
    MatrixXcd R, Rinv;  // PSD
    MatrixXcd P;        // PSD, R R^H
    VectorXd lam_diag;  // PSD eigenvalues of the scaled point
};

struct Direction {
    VectorXd x, y, z, s;
    double tau = 0.0;
    double kappa = 0.0;
    VectorXd s_t, z_t;  // scaled: W^-T ds, W dz
};

class Solver {
public:
    Solver(const StandardForm& sf, const SolverOptions& opts) : sf_(sf), opts_(opts)
    {
        n_ = sf.n;
        p_ = static_cast<int>(sf.A.rows());
        int off = 0;
        for (const auto& b : sf.blocks) {
            offsets_.push_back(off);
            off += b.rows();
            degree_ += b.kind == BlockKind::Soc ? 1 : b.order;
        }
        m_ = off;
        scal_.resize(sf.blocks.size());
        Gt_.resize(sf.blocks.size());
        psd_nz_.resize(sf.blocks.size());
        for (std::size_t k = 0; k < sf.blocks.size(); ++k) {
            const auto& b = sf.blocks[k];
            if (b.kind != BlockKind::Psd) continue;
            auto& cols = psd_nz_[k];
            cols.resize(b.G.cols());
            for (Eigen::Index j = 0; j < b.G.cols(); ++j) {
                const MatrixXcd U = hsmat(b.G.col(j), b.order);
                for (int c = 0; c < b.order; ++c) {
                    for (int r = c; r < b.order; ++r) {
                        if (U(r, c) != 0.0) cols[j].push_back({r, c, U(r, c)});
                    }
                }
            }
        }
    }

    IpmResult run();

private:
    // ---- data products
    VectorXd G_mul(const VectorXd& x) const
    {
        VectorXd out(m_);
        for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
            const auto& b = sf_.blocks[k];
            VectorXd xs(b.cols.size());
            for (std::size_t j = 0; j < b.cols.size(); ++j) xs(j) = x(b.cols[j]);
            out.segment(offsets_[k], b.rows()) = b.G * xs;
        }
        return out;
    }

    VectorXd Gt_mul(const VectorXd& z) const
    {
        VectorXd out = VectorXd::Zero(n_);
        for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
            const auto& b = sf_.blocks[k];
            VectorXd t = b.G.transpose() * z.segment(offsets_[k], b.rows());
            for (std::size_t j = 0; j < b.cols.size(); ++j) out(b.cols[j]) += t(j);
        }
        return out;
    }

    /// (W^-T G)^T t for the scaled G stored in Gt_.
    VectorXd Gtilde_t_mul(const VectorXd& t) const
    {
        VectorXd out = VectorXd::Zero(n_);
        for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
            const auto& b = sf_.blocks[k];
            VectorXd r = Gt_[k].transpose() * t.segment(offsets_[k], b.rows());
            for (std::size_t j = 0; j < b.cols.size(); ++j) out(b.cols[j]) += r(j);
        }
        return out;
    }

    VectorXd Gtilde_mul(const VectorXd& x) const
    {
        VectorXd out(m_);
        for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
            const auto& b = sf_.blocks[k];
            VectorXd xs(b.cols.size());
            for (std::size_t j = 0; j < b.cols.size(); ++j) xs(j) = x(b.cols[j]);
            out.segment(offsets_[k], b.rows()) = Gt_[k] * xs;
        }
        return out;
    }

    /// W^-T applied to the columns of a PSD block's G, using their sparsity.
    MatrixXd psd_wit_columns(std::size_t k) const;

    // ---- cone algebra
    MatrixXd apply_block(std::size_t k, Op op, const MatrixXd& u) const;
    VectorXd apply(Op op, const VectorXd& u) const
    {
        VectorXd out(m_);
        for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
            const int r = sf_.blocks[k].rows();
            out.segment(offsets_[k], r) = apply_block(k, op, u.segment(offsets_[k], r));
        }
        return out;
    }

    VectorXd identity() const;
    VectorXd jprod(const VectorXd& u, const VectorXd& v) const;
    /// Solves lambda o x = v for the current scaled point.
    VectorXd jdiv_lambda(const VectorXd& v) const;
    double max_step_scaled(const VectorXd& d) const;
    /// inf { a : u + a e in K }.
    double boundary_offset(const VectorXd& u) const;

    bool compute_scaling(const VectorXd& s, const VectorXd& z);
    void set_identity_scaling();
    bool factor();
    /// Solves the reduced KKT system for right-hand side (r1, r2, r3).
    void kkt_solve_reduced(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& dx,
                           VectorXd& dy, VectorXd& dz) const;
    void kkt_solve(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& dx,
                   VectorXd& dy, VectorXd& dz) const;

    const StandardForm& sf_;
    const SolverOptions& opts_;
    int n_ = 0, p_ = 0, m_ = 0, degree_ = 0;
    std::vector<int> offsets_;
    std::vector<Scaling> scal_;
    std::vector<MatrixXd> Gt_;
    struct Entry {
        int r, c;
        cplx v;
    };
    // Lower-triangle nonzeros of hsmat(G column) per PSD block.
    std::vector<std::vector<std::vector<Entry>>> psd_nz_;
    VectorXd lambda_;
    MatrixXd H_;
    Eigen::PartialPivLU<MatrixXd> lu_;
    double reg_ = 0.0;
};

MatrixXd Solver::apply_block(std::size_t k, Op op, const MatrixXd& u) const
{
    const auto& b = sf_.blocks[k];
    const auto& sc = scal_[k];
    switch (b.kind) {
    case BlockKind::Lp:
        if (op == Op::WtW) return sc.d.cwiseAbs2().asDiagonal() * u;
        if (op == Op::W || op == Op::Wt) return sc.d.asDiagonal() * u;
        return sc.d.cwiseInverse().asDiagonal() * u;
    case BlockKind::Soc: {
        if (op == Op::WtW) return apply_block(k, Op::Wt, apply_block(k, Op::W, u));
        const double w0 = sc.w(0);
        const auto w1 = sc.w.tail(sc.w.size() - 1);
        const auto u0 = u.row(0);
        const auto u1 = u.bottomRows(u.rows() - 1);
        MatrixXd out(u.rows(), u.cols());
        if (op == Op::W || op == Op::Wt) {
            Eigen::RowVectorXd t = w1.transpose() * u1;
            out.row(0) = w0 * u0 + t;
            out.bottomRows(u.rows() - 1) = u1 + w1 * (u0 + t / (1.0 + w0));
            return sc.beta * out;
        }
        Eigen::RowVectorXd t = w1.transpose() * u1;
        out.row(0) = w0 * u0 - t;
        out.bottomRows(u.rows() - 1) = u1 - w1 * (u0 - t / (1.0 + w0));
        return out / sc.beta;
    }
    case BlockKind::Psd: {
        MatrixXd out(u.rows(), u.cols());
        for (Eigen::Index j = 0; j < u.cols(); ++j) {
            const MatrixXcd U = hsmat(u.col(j), b.order);
            MatrixXcd V;
            switch (op) {
            case Op::W: V = sc.R.adjoint() * U * sc.R; break;
            case Op::Wt: V = sc.R * U * sc.R.adjoint(); break;
            case Op::Winv: V = sc.Rinv.adjoint() * U * sc.Rinv; break;
            case Op::Wit: V = sc.Rinv * U * sc.Rinv.adjoint(); break;
            case Op::WtW: V = sc.P * U * sc.P; break;
            }
            out.col(j) = hsvec(V);
        }
        return out;
    }
    }
    return u;
}

VectorXd Solver::identity() const
{
    VectorXd e = VectorXd::Zero(m_);
    for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
        const auto& b = sf_.blocks[k];
        const int off = offsets_[k];
        switch (b.kind) {
        case BlockKind::Lp: e.segment(off, b.rows()).setOnes(); break;
        case BlockKind::Soc: e(off) = 1.0; break;
        case BlockKind::Psd: e.segment(off, b.rows()) = hsvec(MatrixXcd::Identity(b.order, b.order)); break;
        }
    }
    return e;
}

VectorXd Solver::jprod(const VectorXd& u, const VectorXd& v) const
{
    VectorXd out(m_);
    for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
        const auto& b = sf_.blocks[k];
        const int off = offsets_[k];
        const int r = b.rows();
        auto uk = u.segment(off, r);
        auto vk = v.segment(off, r);
        switch (b.kind) {
        case BlockKind::Lp: out.segment(off, r) = uk.cwiseProduct(vk); break;
        case BlockKind::Soc:
            out(off) = uk.dot(vk);
            out.segment(off + 1, r - 1) = uk(0) * vk.tail(r - 1) + vk(0) * uk.tail(r - 1);
            break;
        case BlockKind::Psd: {
            const MatrixXcd U = hsmat(uk, b.order), V = hsmat(vk, b.order);
            const MatrixXcd UV = U * V;
            out.segment(off, r) = hsvec(0.5 * (UV + UV.adjoint()));
            break;
        }
        }
    }
    return out;
}

VectorXd Solver::jdiv_lambda(const VectorXd& v) const
{
    VectorXd out(m_);
    for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
        const auto& b = sf_.blocks[k];
        const int off = offsets_[k];
        const int r = b.rows();
        auto lk = lambda_.segment(off, r);
        auto vk = v.segment(off, r);
        switch (b.kind) {
        case BlockKind::Lp: out.segment(off, r) = vk.cwiseQuotient(lk); break;
        case BlockKind::Soc: {
            const double l0 = lk(0);
            const auto l1 = lk.tail(r - 1);
            const double x0 = (l0 * vk(0) - l1.dot(vk.tail(r - 1))) / (l0 * l0 - l1.squaredNorm());
            out(off) = x0;
            out.segment(off + 1, r - 1) = (vk.tail(r - 1) - x0 * l1) / l0;
            break;
        }
        case BlockKind::Psd: {
            const auto& ld = scal_[k].lam_diag;
            MatrixXcd V = hsmat(vk, b.order);
            for (int i = 0; i < b.order; ++i) {
                for (int j = 0; j < b.order; ++j) V(i, j) *= 2.0 / (ld(i) + ld(j));
            }
            out.segment(off, r) = hsvec(V);
            break;
        }
        }
    }
    return out;
}

double Solver::max_step_scaled(const VectorXd& d) const
{
    double alpha = kInf;
    for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
        const auto& b = sf_.blocks[k];
        const int off = offsets_[k];
        const int r = b.rows();
        auto lk = lambda_.segment(off, r);
        auto dk = d.segment(off, r);
        switch (b.kind) {
        case BlockKind::Lp:
            for (int i = 0; i < r; ++i) {
                if (dk(i) < 0.0) alpha = std::min(alpha, -lk(i) / dk(i));
            }
            break;
        case BlockKind::Soc: {
            // (l0 + a d0)^2 - ||l1 + a d1||^2 = qa a^2 + qb a + qc
            const double qa = dk(0) * dk(0) - dk.tail(r - 1).squaredNorm();
            const double qb = 2.0 * (lk(0) * dk(0) - lk.tail(r - 1).dot(dk.tail(r - 1)));
            const double qc = lk(0) * lk(0) - lk.tail(r - 1).squaredNorm();
            double root = kInf;
            if (std::abs(qa) < 1e-14 * std::max(1.0, std::abs(qb))) {
                if (qb < 0.0) root = -qc / qb;
            } else {
                const double disc = qb * qb - 4.0 * qa * qc;
                if (disc >= 0.0) {
                    const double sq = std::sqrt(disc);
                    const double q = -0.5 * (qb + std::copysign(sq, qb));
                    for (double rt : {q / qa, q != 0.0 ? qc / q : kInf}) {
                        if (rt > 0.0) root = std::min(root, rt);
                    }
                }
            }
            if (dk(0) < 0.0) root = std::min(root, -lk(0) / dk(0));
            alpha = std::min(alpha, root);
            break;
        }
        case BlockKind::Psd: {
            const auto& ld = scal_[k].lam_diag;
            VectorXd isq = ld.cwiseSqrt().cwiseInverse();
            const MatrixXcd D = isq.asDiagonal() * hsmat(dk, b.order) * isq.asDiagonal();
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(D, Eigen::EigenvaluesOnly);
            const double mn = es.eigenvalues()(0);
            if (mn < 0.0) alpha = std::min(alpha, -1.0 / mn);
            break;
        }
        }
    }
    return alpha;
}

double Solver::boundary_offset(const VectorXd& u) const
{
    double t = -kInf;
    for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
        const auto& b = sf_.blocks[k];
        const int off = offsets_[k];
        const int r = b.rows();
        auto uk = u.segment(off, r);
        switch (b.kind) {
        case BlockKind::Lp: t = std::max(t, -uk.minCoeff()); break;
        case BlockKind::Soc: t = std::max(t, uk.tail(r - 1).norm() - uk(0)); break;
        case BlockKind::Psd: {
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hsmat(uk, b.order), Eigen::EigenvaluesOnly);
            t = std::max(t, -es.eigenvalues()(0));
            break;
        }
        }
    }
    return t;
}

void Solver::set_identity_scaling()
{
    for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
        const auto& b = sf_.blocks[k];
        auto& sc = scal_[k];
        switch (b.kind) {
        case BlockKind::Lp: sc.d = VectorXd::Ones(b.rows()); break;
        case BlockKind::Soc:
            sc.beta = 1.0;
            sc.w = VectorXd::Zero(b.rows());
            sc.w(0) = 1.0;
            break;
        case BlockKind::Psd:
            sc.R = MatrixXcd::Identity(b.order, b.order);
            sc.Rinv = sc.R;
            sc.P = sc.R;
            sc.lam_diag = VectorXd::Ones(b.order);
            break;
        }
    }
}

bool Solver::compute_scaling(const VectorXd& s, const VectorXd& z)
{
    lambda_.resize(m_);
    for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
        const auto& b = sf_.blocks[k];
        auto& sc = scal_[k];
        const int off = offsets_[k];
        const int r = b.rows();
        VectorXd sk = s.segment(off, r);
        VectorXd zk = z.segment(off, r);
        switch (b.kind) {
        case BlockKind::Lp:
            if (sk.minCoeff() <= 0.0 || zk.minCoeff() <= 0.0) return false;
            sc.d = sk.cwiseQuotient(zk).cwiseSqrt();
            lambda_.segment(off, r) = sk.cwiseProduct(zk).cwiseSqrt();
            break;
        case BlockKind::Soc: {
            const double sn2 = (sk(0) - sk.tail(r - 1).norm()) * (sk(0) + sk.tail(r - 1).norm());
            const double zn2 = (zk(0) - zk.tail(r - 1).norm()) * (zk(0) + zk.tail(r - 1).norm());
            if (!(sn2 > 0.0) || !(zn2 > 0.0) || sk(0) <= 0.0 || zk(0) <= 0.0) return false;
            const double sn = std::sqrt(sn2), zn = std::sqrt(zn2);
            VectorXd sb = sk / sn, zb = zk / zn;
            const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
            VectorXd w = sb;
            w(0) += zb(0);
            w.tail(r - 1) -= zb.tail(r - 1);
            w /= 2.0 * gamma;
            // Guard the hyperbolic normalization w0^2 - ||w1||^2 = 1.
            w(0) = std::sqrt(1.0 + w.tail(r - 1).squaredNorm());
            sc.w = w;
            sc.beta = std::sqrt(sn / zn);
            lambda_.segment(off, r) = apply_block(k, Op::W, zk);
            break;
        }
        case BlockKind::Psd: {
            const MatrixXcd S = hsmat(sk, b.order), Z = hsmat(zk, b.order);
            Eigen::LLT<MatrixXcd> ls(S), lz(Z);
            if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
            const MatrixXcd Ls = ls.matrixL();
            // Ls^H Z Ls = V diag(lam)^2 V^H; near the central path lam is close
            // to sqrt(mu) I, so the Hermitian eigensolver loses nothing.
            const MatrixXcd LtZ = Ls.adjoint() * Z;
            MatrixXcd M = LtZ * Ls;
            M = 0.5 * (M + M.adjoint()).eval();
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(M);
            if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) return false;
            const VectorXd lam = es.eigenvalues().cwiseSqrt();
            const MatrixXcd& V = es.eigenvectors();
            sc.R = Ls * V * lam.cwiseSqrt().cwiseInverse().asDiagonal();
            sc.Rinv = lam.array().pow(-1.5).matrix().asDiagonal() * V.adjoint() * LtZ;
            sc.P = sc.R * sc.R.adjoint();
            sc.lam_diag = lam;
            lambda_.segment(off, r) = hsvec(MatrixXcd(lam.cast<cplx>().asDiagonal()));
            break;
        }
        }
    }
    return true;
}

MatrixXd Solver::psd_wit_columns(std::size_t k) const
{
    const auto& b = sf_.blocks[k];
    const MatrixXcd& Ri = scal_[k].Rinv;
    const int d = b.order;
    MatrixXd out(b.rows(), b.G.cols());
    MatrixXcd V(d, d);
    for (Eigen::Index j = 0; j < b.G.cols(); ++j) {
        const auto& nz = psd_nz_[k][j];
        if (static_cast<int>(nz.size()) > d) {
            out.col(j) = hsvec(Ri * hsmat(b.G.col(j), d) * Ri.adjoint());
            continue;
        }
        // hsvec keeps the Hermitian part, so each off-diagonal pair enters once.
        V.setZero();
        for (const Entry& e : nz) {
            const cplx f = e.r == e.c ? cplx(e.v.real()) : 2.0 * e.v;
            V.noalias() += f * (Ri.col(e.r) * Ri.col(e.c).adjoint());
        }
        out.col(j) = hsvec(V);
    }
    return out;
}

bool Solver::factor()
{
    H_ = MatrixXd::Zero(n_, n_);
    for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
        const auto& b = sf_.blocks[k];
        Gt_[k] = b.kind == BlockKind::Psd ? psd_wit_columns(k) : apply_block(k, Op::Wit, b.G);
        MatrixXd hk = Gt_[k].transpose() * Gt_[k];
        for (std::size_t i = 0; i < b.cols.size(); ++i) {
            for (std::size_t j = 0; j < b.cols.size(); ++j) H_(b.cols[i], b.cols[j]) += hk(i, j);
        }
    }
    const double hmax = std::max(1.0, H_.diagonal().cwiseAbs().maxCoeff());
    reg_ = 1e-13 * hmax;
    MatrixXd K = MatrixXd::Zero(n_ + p_, n_ + p_);
    K.topLeftCorner(n_, n_) = H_;
    K.topLeftCorner(n_, n_).diagonal().array() += reg_;
    if (p_ > 0) {
        K.topRightCorner(n_, p_) = sf_.A.transpose();
        K.bottomLeftCorner(p_, n_) = sf_.A;
        K.bottomRightCorner(p_, p_).diagonal().array() -= reg_;
    }
    lu_.compute(K);
    return std::isfinite(lu_.matrixLU().diagonal().cwiseAbs().minCoeff());
}

void Solver::kkt_solve_reduced(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& dx,
                               VectorXd& dy, VectorXd& dz) const
{
    const VectorXd t = apply(Op::Wit, r3);
    VectorXd rhs(n_ + p_);
    rhs.head(n_) = r1 + Gtilde_t_mul(t);
    if (p_ > 0) rhs.tail(p_) = r2;
    VectorXd sol = lu_.solve(rhs);
    for (int it = 0; it < 3; ++it) {
        VectorXd res(n_ + p_);
        res.head(n_) = rhs.head(n_) - H_ * sol.head(n_);
        if (p_ > 0) {
            res.head(n_) -= sf_.A.transpose() * sol.tail(p_);
            res.tail(p_) = rhs.tail(p_) - sf_.A * sol.head(n_);
        }
        if (res.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())) break;
        sol += lu_.solve(res);
    }
    dx = sol.head(n_);
    dy = p_ > 0 ? VectorXd(sol.tail(p_)) : VectorXd();
    dz = apply(Op::Winv, VectorXd(Gtilde_mul(dx) - t));
}

// Refinement against the unreduced system
//   A^T dy + G^T dz = r1,  A dx = r2,  G dx - W^T W dz = r3.
void Solver::kkt_solve(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& dx,
                       VectorXd& dy, VectorXd& dz) const
{
    kkt_solve_reduced(r1, r2, r3, dx, dy, dz);
    const double scale = std::max({1.0, r1.lpNorm<Eigen::Infinity>(), r3.lpNorm<Eigen::Infinity>(),
                                   p_ > 0 ? r2.lpNorm<Eigen::Infinity>() : 0.0});
    for (int it = 0; it < 1; ++it) {
        VectorXd e1 = r1 - Gt_mul(dz);
        VectorXd e2;
        if (p_ > 0) {
            e1 -= sf_.A.transpose() * dy;
            e2 = r2 - sf_.A * dx;
        }
        const VectorXd e3 = r3 - G_mul(dx) + apply(Op::WtW, dz);
        double err = std::max(e1.lpNorm<Eigen::Infinity>(), e3.lpNorm<Eigen::Infinity>());
        if (p_ > 0) err = std::max(err, e2.lpNorm<Eigen::Infinity>());
        if (err <= 1e-13 * scale) break;
        VectorXd cx, cy, cz;
        kkt_solve_reduced(e1, e2, e3, cx, cy, cz);
        dx += cx;
        if (p_ > 0) dy += cy;
        dz += cz;
    }
}

IpmResult Solver::run()
{
    IpmResult res;
    const VectorXd& c = sf_.c;
    const VectorXd& bv = sf_.b;
    VectorXd h(m_);
    for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
        h.segment(offsets_[k], sf_.blocks[k].rows()) = sf_.blocks[k].h;
    }
    const double resx0 = std::max(1.0, c.norm());
    const double resz0 = std::max(1.0, std::sqrt(bv.squaredNorm() + h.squaredNorm()));
    const VectorXd e = identity();

    // Starting point from two least-squares solves with identity scaling.
    set_identity_scaling();
    if (!factor()) {
        res.message = "initial factorization failed";
        return res;
    }
    VectorXd x, y, z, s, tmpx, tmpy, tmpz;
    kkt_solve(VectorXd::Zero(n_), bv, h, x, y, tmpz);
    s = h - G_mul(x);
    kkt_solve(-c, VectorXd::Zero(p_), VectorXd::Zero(m_), tmpx, y, tmpz);
    z = G_mul(tmpx);
    {
        const double ts = boundary_offset(s);
        if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
        const double tz = boundary_offset(z);
        if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
    }
    double tau = 1.0, kappa = 1.0;

    double best_merit = kInf;
    VectorXd best_x;

    for (int iter = 0; iter <= opts_.max_iterations; ++iter) {
        res.iterations = iter;
        const VectorXd Gx = G_mul(x);
        const VectorXd Gtz = Gt_mul(z);
        VectorXd Aty = p_ > 0 ? VectorXd(sf_.A.transpose() * y) : VectorXd::Zero(n_);
        VectorXd Ax = p_ > 0 ? VectorXd(sf_.A * x) : VectorXd();

        const VectorXd rx = Aty + Gtz + tau * c;
        const VectorXd ry = p_ > 0 ? VectorXd(tau * bv - Ax) : VectorXd();
        const VectorXd rz = s + Gx - tau * h;
        const double cx = c.dot(x);
        const double by = p_ > 0 ? bv.dot(y) : 0.0;
        const double hz = h.dot(z);
        const double rt = kappa + cx + by + hz;
        const double gap = s.dot(z);
        const double mu = (gap + tau * kappa) / (degree_ + 1);

        const double pcost = cx / tau;
        const double dcost = -(by + hz) / tau;
        const double pres =
            std::max(p_ > 0 ? ry.norm() : 0.0, rz.norm()) / tau / resz0;
        const double dres = rx.norm() / tau / resx0;
        const double agap = gap / (tau * tau);
        double relgap = kInf;
        if (pcost < 0.0) relgap = agap / -pcost;
        else if (dcost > 0.0) relgap = agap / dcost;

        const double pinf = (hz + by < 0.0) ? (Aty + Gtz).norm() / resx0 / -(hz + by) : kInf;
        const double dinf = (cx < 0.0)
            ? std::max(p_ > 0 ? Ax.norm() : 0.0, (Gx + s).norm()) / resz0 / -cx
            : kInf;

        res.pres = pres;
        res.dres = dres;
        res.gap = agap;
        const double merit = std::max({pres, dres, std::min(agap, relgap)});
        if (merit < best_merit) {
            best_merit = merit;
            best_x = x / tau;
        }

        if (pres <= opts_.feastol && dres <= opts_.feastol &&
            (agap <= opts_.abstol || relgap <= opts_.reltol)) {
            res.status = IpmStatus::Optimal;
            res.x = x / tau;
            return res;
        }
        if (pinf <= opts_.feastol) {
            res.status = IpmStatus::PrimalInfeasible;
            res.message = "primal infeasibility certificate";
            return res;
        }
        if (dinf <= opts_.feastol) {
            res.status = IpmStatus::DualInfeasible;
            res.message = "dual infeasibility certificate";
            return res;
        }
        if (iter == opts_.max_iterations) break;

        if (!compute_scaling(s, z) || !factor()) {
            res.message = "lost cone interiority";
            break;
        }

        VectorXd x1, y1, z1;
        kkt_solve(-c, bv, h, x1, y1, z1);
        const double denom = c.dot(x1) + (p_ > 0 ? bv.dot(y1) : 0.0) + h.dot(z1) - kappa / tau;

        const VectorXd lam_sq = jprod(lambda_, lambda_);
        Direction aff;
        double sigma = 0.0;
        double step = 0.0;
        bool failed = false;
        for (int pass = 0; pass < 2; ++pass) {
            const double eta = pass == 0 ? 0.0 : sigma;
            VectorXd ds = -lam_sq;
            double dk = -tau * kappa;
            if (pass == 1) {
                ds += sigma * mu * e - jprod(aff.s_t, aff.z_t);
                dk += sigma * mu - aff.tau * aff.kappa;
            }
            const double f = 1.0 - eta;
            const VectorXd q = jdiv_lambda(ds);
            VectorXd x0, y0, z0;
            kkt_solve(-f * rx, p_ > 0 ? VectorXd(f * ry) : VectorXd(), VectorXd(-f * rz - apply(Op::Wt, q)),
                      x0, y0, z0);
            const double num = -f * rt - dk / tau - c.dot(x0) - (p_ > 0 ? bv.dot(y0) : 0.0) - h.dot(z0);
            Direction d;
            d.tau = num / denom;
            d.x = x0 + d.tau * x1;
            d.y = p_ > 0 ? VectorXd(y0 + d.tau * y1) : VectorXd();
            d.z = z0 + d.tau * z1;
            d.z_t = apply(Op::W, d.z);
            d.s_t = q - d.z_t;
            if (pass == 1) d.s = apply(Op::Wt, d.s_t);
            d.kappa = (dk - kappa * d.tau) / tau;
            if (!d.x.allFinite() || !std::isfinite(d.tau)) {
                failed = true;
                break;
            }

            double amax = std::min(max_step_scaled(d.s_t), max_step_scaled(d.z_t));
            if (d.tau < 0.0) amax = std::min(amax, -tau / d.tau);
            if (d.kappa < 0.0) amax = std::min(amax, -kappa / d.kappa);

            if (pass == 0) {
                const double a = std::min(1.0, amax);
                sigma = std::pow(1.0 - a, 3);
                aff = std::move(d);
            } else {
                step = std::min(1.0, 0.99 * amax);
                x += step * d.x;
                if (p_ > 0) y += step * d.y;
                z += step * d.z;
                s += step * d.s;
                tau += step * d.tau;
                kappa += step * d.kappa;
            }
        }
        if (failed) {
            res.message = "non-finite search direction";
            break;
        }
        if (step < 1e-12) {
            res.message = "step size collapsed";
            break;
        }
    }

    if (best_x.size() == n_ && best_merit <= 1e-6) {
        res.status = IpmStatus::Inaccurate;
        res.x = best_x;
        if (res.message.empty()) res.message = "iteration limit reached";
        return res;
    }
    res.status = IpmStatus::Failure;
    if (res.message.empty()) res.message = "iteration limit reached";
    return res;
}

}  // namespace

IpmResult ipm_solve(const StandardForm& sf, const SolverOptions& opts)
{
    Solver solver(sf, opts);
    return solver.run();
}

}  // namespace risgame::conic::detail
