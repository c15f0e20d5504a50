#include "risgame/conic/program.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ipm.hpp"

namespace risgame::conic {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

VarRange ConicProgram::add_variables(const std::string& name, int count)
{
    if (count < 0) throw std::invalid_argument("add_variables: negative count");
    VarRange r{num_vars_, count};
    num_vars_ += count;
    blocks_.push_back({name, r});
    return r;
}

void ConicProgram::check_refs(const LinExpr& e) const
{
    for (const auto& [i, c] : e.terms()) {
        if (i < 0 || i >= num_vars_) throw std::out_of_range("constraint references unknown variable");
        if (!std::isfinite(c)) throw std::invalid_argument("non-finite coefficient");
    }
    if (!std::isfinite(e.constant())) throw std::invalid_argument("non-finite constant");
}

void ConicProgram::add_equality(LinExpr e, std::string tag)
{
    check_refs(e);
    constraints_.push_back({ConeKind::Equality, {std::move(e)}, {}, std::move(tag), {}});
}

void ConicProgram::add_nonneg(LinExpr e, std::string tag)
{
    check_refs(e);
    constraints_.push_back({ConeKind::NonNegative, {std::move(e)}, {}, std::move(tag), {}});
}

void ConicProgram::add_soc(LinExpr t, std::vector<LinExpr> u, std::string tag)
{
    check_refs(t);
    for (const auto& e : u) check_refs(e);
    std::vector<LinExpr> rows;
    rows.reserve(u.size() + 1);
    rows.push_back(std::move(t));
    for (auto& e : u) rows.push_back(std::move(e));
    constraints_.push_back({ConeKind::SecondOrder, std::move(rows), {}, std::move(tag), {}});
}

void ConicProgram::add_rotated_soc(LinExpr x, LinExpr y, std::vector<LinExpr> u, std::string tag)
{
    check_refs(x);
    check_refs(y);
    for (const auto& e : u) check_refs(e);
    std::vector<LinExpr> rows;
    rows.reserve(u.size() + 2);
    rows.push_back(std::move(x));
    rows.push_back(std::move(y));
    for (auto& e : u) rows.push_back(std::move(e));
    constraints_.push_back({ConeKind::RotatedSecondOrder, std::move(rows), {}, std::move(tag), {}});
}

void ConicProgram::add_psd(SymAffMat m, std::string tag)
{
    const auto d = m.dim();
    if (m.constant.cols() != d) throw std::invalid_argument("add_psd: matrix is not square");
    auto sym = [](const MatrixXd& a) {
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        return (a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale;
    };
    if (!sym(m.constant)) throw std::invalid_argument("add_psd: constant term is not symmetric");
    for (auto& [i, t] : m.terms) {
        if (i < 0 || i >= num_vars_) throw std::out_of_range("add_psd: unknown variable");
        if (t.rows() != d || t.cols() != d || !sym(t)) {
            throw std::invalid_argument("add_psd: coefficient matrix is not symmetric");
        }
        t = 0.5 * (t + t.transpose()).eval();
    }
    m.constant = 0.5 * (m.constant + m.constant.transpose()).eval();
    constraints_.push_back({ConeKind::Psd, {}, std::move(m), std::move(tag), {}});
}

void ConicProgram::add_hermitian_psd(const CAffMat& m, std::string tag)
{
    if (m.rows() != m.cols()) throw std::invalid_argument("add_hermitian_psd: matrix is not square");
    if (!m.is_hermitian()) throw std::invalid_argument("add_hermitian_psd: matrix is not Hermitian");
    for (const auto& [i, t] : m.terms()) {
        if (i < 0 || i >= num_vars_) throw std::out_of_range("add_hermitian_psd: unknown variable");
    }
    constraints_.push_back({ConeKind::HermitianPsd, {}, {}, std::move(tag), m});
}

std::string ConicProgram::dump() const
{
    std::ostringstream os;
    os.precision(17);
    os << "variables " << num_vars_ << '\n';
    for (const auto& b : blocks_) os << "block " << b.name << ' ' << b.range.start << ' ' << b.range.size << '\n';
    os << "objective max " << objective_.constant() << '\n';
    for (const auto& [i, c] : objective_.terms()) os << "c " << i << ' ' << c << '\n';
    static const char* names[] = {"eq", "nonneg", "soc", "rsoc", "psd", "psd"};
    for (std::size_t k = 0; k < constraints_.size(); ++k) {
        Constraint con = constraints_[k];
        // Hermitian blocks are written through the real embedding.
        if (con.kind == ConeKind::HermitianPsd) {
            con.kind = ConeKind::Psd;
            con.matrix = herm_embed(con.hmatrix);
        }
        os << "constraint " << k << ' ' << names[static_cast<int>(con.kind)];
        if (con.kind == ConeKind::Psd) {
            os << ' ' << con.matrix.dim();
        } else {
            os << ' ' << con.rows.size();
        }
        if (!con.tag.empty()) os << ' ' << con.tag;
        os << '\n';
        if (con.kind == ConeKind::Psd) {
            auto emit = [&](const char* label, int var, const MatrixXd& m) {
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    for (Eigen::Index i = j; i < m.rows(); ++i) {
                        if (m(i, j) != 0.0) os << label << ' ' << var << ' ' << i << ' ' << j << ' ' << m(i, j) << '\n';
                    }
                }
            };
            emit("m0", -1, con.matrix.constant);
            for (const auto& [i, t] : con.matrix.terms) emit("m", i, t);
        } else {
            for (std::size_t r = 0; r < con.rows.size(); ++r) {
                os << "r " << r << " const " << con.rows[r].constant() << '\n';
                for (const auto& [i, c] : con.rows[r].terms()) os << "r " << r << ' ' << i << ' ' << c << '\n';
            }
        }
    }
    return os.str();
}

SymAffMat herm_embed(const CAffMat& m)
{
    if (!m.is_hermitian()) throw std::invalid_argument("herm_embed: matrix is not Hermitian");
    auto embed = [](const Eigen::MatrixXcd& a) {
        const Eigen::Index n = a.rows();
        MatrixXd out(2 * n, 2 * n);
        MatrixXd re = 0.5 * (a.real() + a.real().transpose());
        MatrixXd im = 0.5 * (a.imag() - a.imag().transpose());
        out.topLeftCorner(n, n) = re;
        out.topRightCorner(n, n) = -im;
        out.bottomLeftCorner(n, n) = im;
        out.bottomRightCorner(n, n) = re;
        return out;
    };
    SymAffMat s;
    s.constant = embed(m.constant());
    for (const auto& [i, t] : m.terms()) s.terms[i] = embed(t);
    return s;
}

const char* to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

Eigen::VectorXcd SolveResult::complex_values(VarRange re, VarRange im) const
{
    Eigen::VectorXcd v(re.size);
    for (int k = 0; k < re.size; ++k) v(k) = cplx(x(re[k]), x(im[k]));
    return v;
}

namespace {

double row_scale(const LinExpr& e, std::span<const double> x)
{
    double s = 1.0 + std::abs(e.constant());
    for (const auto& [i, c] : e.terms()) s += std::abs(c * x[static_cast<std::size_t>(i)]);
    return s;
}

std::vector<LinExpr> rotated_as_soc(const std::vector<LinExpr>& rows)
{
    std::vector<LinExpr> out;
    out.reserve(rows.size());
    out.push_back(rows[0] + rows[1]);
    out.push_back(rows[0] - rows[1]);
    for (std::size_t k = 2; k < rows.size(); ++k) out.push_back(2.0 * rows[k]);
    return out;
}

/// Appends rows (s = e(x)) to a block as G = -coef, h = constant.
void fill_block(detail::ConeBlock& blk, const std::vector<LinExpr>& rows, double scale)
{
    std::set<int> cols;
    for (const auto& e : rows) {
        for (const auto& [i, c] : e.terms()) {
            if (c != 0.0) cols.insert(i);
        }
    }
    blk.cols.assign(cols.begin(), cols.end());
    std::map<int, int> pos;
    for (std::size_t j = 0; j < blk.cols.size(); ++j) pos[blk.cols[j]] = static_cast<int>(j);
    const auto m = static_cast<Eigen::Index>(rows.size());
    blk.G = MatrixXd::Zero(m, static_cast<Eigen::Index>(blk.cols.size()));
    blk.h.resize(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const auto& e = rows[static_cast<std::size_t>(r)];
        blk.h(r) = scale * e.constant();
        for (const auto& [i, c] : e.terms()) {
            if (c != 0.0) blk.G(r, pos[i]) = -scale * c;
        }
    }
}

double rows_norm(const std::vector<LinExpr>& rows)
{
    double mx = 0.0;
    for (const auto& e : rows) {
        double s = 0.0;
        for (const auto& [i, c] : e.terms()) s += c * c;
        mx = std::max(mx, std::sqrt(s));
    }
    return mx;
}

detail::StandardForm to_standard_form(const ConicProgram& p)
{
    detail::StandardForm sf;
    sf.n = p.num_variables();
    sf.c = VectorXd::Zero(sf.n);
    for (const auto& [i, c] : p.objective().terms()) sf.c(i) = -c;

    std::vector<LinExpr> eqs, lps;
    for (const auto& con : p.constraints()) {
        if (con.kind == ConeKind::Equality) eqs.push_back(con.rows[0]);
        if (con.kind == ConeKind::NonNegative) lps.push_back(con.rows[0]);
    }
    sf.A = MatrixXd::Zero(static_cast<Eigen::Index>(eqs.size()), sf.n);
    sf.b = VectorXd::Zero(static_cast<Eigen::Index>(eqs.size()));
    for (std::size_t r = 0; r < eqs.size(); ++r) {
        const double nrm = rows_norm({eqs[r]});
        const double f = nrm > 0.0 ? 1.0 / nrm : 1.0;
        for (const auto& [i, c] : eqs[r].terms()) sf.A(static_cast<Eigen::Index>(r), i) = f * c;
        sf.b(static_cast<Eigen::Index>(r)) = -f * eqs[r].constant();
    }
    if (!lps.empty()) {
        // Each LP row is its own cone, so rows scale independently.
        for (auto& e : lps) {
            const double nrm = rows_norm({e});
            if (nrm > 0.0) e *= 1.0 / nrm;
        }
        detail::ConeBlock blk;
        blk.kind = detail::BlockKind::Lp;
        blk.order = static_cast<int>(lps.size());
        fill_block(blk, lps, 1.0);
        sf.blocks.push_back(std::move(blk));
    }
    for (const auto& con : p.constraints()) {
        if (con.kind == ConeKind::SecondOrder || con.kind == ConeKind::RotatedSecondOrder) {
            const auto rows = con.kind == ConeKind::SecondOrder ? con.rows : rotated_as_soc(con.rows);
            if (rows.size() == 1) {
                detail::ConeBlock blk;
                blk.kind = detail::BlockKind::Lp;
                blk.order = 1;
                const double nrm = rows_norm(rows);
                fill_block(blk, rows, nrm > 0.0 ? 1.0 / nrm : 1.0);
                sf.blocks.push_back(std::move(blk));
                continue;
            }
            detail::ConeBlock blk;
            blk.kind = detail::BlockKind::Soc;
            blk.order = static_cast<int>(rows.size());
            const double nrm = rows_norm(rows);
            fill_block(blk, rows, nrm > 0.0 ? 1.0 / nrm : 1.0);
            sf.blocks.push_back(std::move(blk));
        } else if (con.kind == ConeKind::Psd || con.kind == ConeKind::HermitianPsd) {
            MatrixXcd constant;
            std::map<int, MatrixXcd> terms;
            if (con.kind == ConeKind::Psd) {
                constant = con.matrix.constant.cast<cplx>();
                for (const auto& [i, t] : con.matrix.terms) terms[i] = t.cast<cplx>();
            } else {
                constant = con.hmatrix.constant();
                terms = con.hmatrix.terms();
            }
            const int d = static_cast<int>(constant.rows());
            detail::ConeBlock blk;
            blk.kind = detail::BlockKind::Psd;
            blk.order = d;
            double nrm = 0.0;
            for (const auto& [i, t] : terms) {
                if (t.size() == 0 || t.cwiseAbs().maxCoeff() == 0.0) continue;
                blk.cols.push_back(i);
                nrm = std::max(nrm, t.norm());
            }
            const double f = nrm > 0.0 ? 1.0 / nrm : 1.0;
            blk.h = f * detail::hsvec(constant);
            blk.G.resize(detail::hsvec_size(d), static_cast<Eigen::Index>(blk.cols.size()));
            for (std::size_t j = 0; j < blk.cols.size(); ++j) {
                blk.G.col(static_cast<Eigen::Index>(j)) = -f * detail::hsvec(terms.at(blk.cols[j]));
            }
            sf.blocks.push_back(std::move(blk));
        }
    }
    return sf;
}

}  // namespace

std::vector<double> constraint_violations(const ConicProgram& p, std::span<const double> x)
{
    std::vector<double> out;
    out.reserve(p.constraints().size());
    for (const auto& con : p.constraints()) {
        double v = 0.0;
        switch (con.kind) {
        case ConeKind::Equality:
            v = std::abs(con.rows[0].eval(x)) / row_scale(con.rows[0], x);
            break;
        case ConeKind::NonNegative:
            v = std::max(0.0, -con.rows[0].eval(x)) / row_scale(con.rows[0], x);
            break;
        case ConeKind::SecondOrder:
        case ConeKind::RotatedSecondOrder: {
            const auto rows = con.kind == ConeKind::SecondOrder ? con.rows : rotated_as_soc(con.rows);
            double scale = 0.0, tail = 0.0;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                scale = std::max(scale, row_scale(rows[r], x));
                if (r > 0) tail += std::pow(rows[r].eval(x), 2);
            }
            v = std::max(0.0, std::sqrt(tail) - rows[0].eval(x)) / scale;
            break;
        }
        case ConeKind::Psd: {
            const MatrixXd m = con.matrix.eval(x);
            double scale = 1.0 + con.matrix.constant.norm();
            for (const auto& [i, t] : con.matrix.terms) scale += std::abs(x[static_cast<std::size_t>(i)]) * t.norm();
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
            v = std::max(0.0, -es.eigenvalues()(0)) / scale;
            break;
        }
        case ConeKind::HermitianPsd: {
            MatrixXcd m = con.hmatrix.eval(x);
            m = 0.5 * (m + m.adjoint()).eval();
            double scale = 1.0 + con.hmatrix.constant().norm();
            for (const auto& [i, t] : con.hmatrix.terms()) scale += std::abs(x[static_cast<std::size_t>(i)]) * t.norm();
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
            v = std::max(0.0, -es.eigenvalues()(0)) / scale;
            break;
        }
        }
        out.push_back(v);
    }
    return out;
}

SolveResult solve(const ConicProgram& p, const SolverOptions& opts)
{
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res;
    const detail::StandardForm sf = to_standard_form(p);
    const detail::IpmResult ipm = detail::ipm_solve(sf, opts);
    res.iterations = ipm.iterations;
    res.message = ipm.message;
    switch (ipm.status) {
    case detail::IpmStatus::Optimal:
    case detail::IpmStatus::Inaccurate: {
        res.x = ipm.x;
        std::span<const double> xs(res.x.data(), static_cast<std::size_t>(res.x.size()));
        res.objective = p.objective().eval(xs);
        const auto viol = constraint_violations(p, xs);
        res.max_violation = viol.empty() ? 0.0 : *std::max_element(viol.begin(), viol.end());
        if (res.max_violation <= opts.check_tol) {
            res.status = SolveStatus::Optimal;
        } else {
            res.status = SolveStatus::NumericalFailure;
            std::ostringstream os;
            os << "residual check failed (max violation " << res.max_violation << ")";
            if (!res.message.empty()) os << "; " << res.message;
            res.message = os.str();
        }
        break;
    }
    case detail::IpmStatus::PrimalInfeasible: res.status = SolveStatus::Infeasible; break;
    case detail::IpmStatus::DualInfeasible: res.status = SolveStatus::Unbounded; break;
    case detail::IpmStatus::Failure: res.status = SolveStatus::NumericalFailure; break;
    }
    res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace risgame::conic
