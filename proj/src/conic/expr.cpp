#include "risgame/conic/expr.hpp"

#include <stdexcept>

namespace risgame::conic {

// ---------------------------------------------------------------- LinExpr

LinExpr LinExpr::var(int index, double coef)
{
    LinExpr e;
    if (coef != 0.0) e.terms_[index] = coef;
    return e;
}

double LinExpr::coef(int index) const
{
    auto it = terms_.find(index);
    return it == terms_.end() ? 0.0 : it->second;
}

LinExpr& LinExpr::operator+=(const LinExpr& other)
{
    constant_ += other.constant_;
    for (const auto& [i, v] : other.terms_) terms_[i] += v;
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other)
{
    constant_ -= other.constant_;
    for (const auto& [i, v] : other.terms_) terms_[i] -= v;
    return *this;
}

LinExpr& LinExpr::operator*=(double k)
{
    constant_ *= k;
    for (auto& [i, v] : terms_) v *= k;
    return *this;
}

double LinExpr::eval(std::span<const double> x) const
{
    double v = constant_;
    for (const auto& [i, c] : terms_) v += c * x[static_cast<std::size_t>(i)];
    return v;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }
LinExpr operator*(double k, LinExpr a) { return a *= k; }
LinExpr operator*(LinExpr a, double k) { return a *= k; }

// ---------------------------------------------------------------- CAffMat

CAffMat::CAffMat(Eigen::Index rows, Eigen::Index cols)
    : constant_(Eigen::MatrixXcd::Zero(rows, cols))
{
}

CAffMat::CAffMat(Eigen::MatrixXcd constant) : constant_(std::move(constant)) {}

CAffMat CAffMat::scalar(int index, cplx coef)
{
    CAffMat m(1, 1);
    m.terms_[index] = Eigen::MatrixXcd::Constant(1, 1, coef);
    return m;
}

CAffMat CAffMat::complex_vector(VarRange re, VarRange im)
{
    if (re.size != im.size) throw std::invalid_argument("complex_vector: size mismatch");
    CAffMat m(re.size, 1);
    for (int k = 0; k < re.size; ++k) {
        Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(re.size, 1);
        e(k, 0) = 1.0;
        m.terms_[re[k]] = e;
        e(k, 0) = cplx(0.0, 1.0);
        m.terms_[im[k]] = e;
    }
    return m;
}

CAffMat CAffMat::hermitian(VarRange diag, VarRange offdiag_re, VarRange offdiag_im)
{
    const int n = diag.size;
    const int n_off = n * (n - 1) / 2;
    if (offdiag_re.size != n_off || offdiag_im.size != n_off) {
        throw std::invalid_argument("hermitian: off-diagonal range has wrong size");
    }
    CAffMat m(n, n);
    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
        e(i, i) = 1.0;
        m.terms_[diag[i]] = e;
    }
    int k = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++k) {
            Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
            e(i, j) = 1.0;
            e(j, i) = 1.0;
            m.terms_[offdiag_re[k]] = e;
            e(i, j) = cplx(0.0, 1.0);
            e(j, i) = cplx(0.0, -1.0);
            m.terms_[offdiag_im[k]] = e;
        }
    }
    return m;
}

CAffMat CAffMat::identity(Eigen::Index n, const LinExpr& scale)
{
    return scaled(scale, Eigen::MatrixXcd::Identity(n, n));
}

CAffMat CAffMat::adjoint() const
{
    CAffMat r(constant_.adjoint());
    for (const auto& [i, m] : terms_) r.terms_[i] = m.adjoint();
    return r;
}

CAffMat CAffMat::conjugate() const
{
    CAffMat r(constant_.conjugate());
    for (const auto& [i, m] : terms_) r.terms_[i] = m.conjugate();
    return r;
}

CAffMat CAffMat::transpose() const
{
    CAffMat r(constant_.transpose());
    for (const auto& [i, m] : terms_) r.terms_[i] = m.transpose();
    return r;
}

namespace {

Eigen::MatrixXcd kron_eye(const Eigen::MatrixXcd& x, Eigen::Index n)
{
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(x.rows() * n, x.cols() * n);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (x(i, j) == cplx(0.0)) continue;
            for (Eigen::Index k = 0; k < n; ++k) out(i * n + k, j * n + k) = x(i, j);
        }
    }
    return out;
}

}  // namespace

CAffMat CAffMat::kron_identity(Eigen::Index n) const
{
    CAffMat r(kron_eye(constant_, n));
    for (const auto& [i, m] : terms_) r.terms_[i] = kron_eye(m, n);
    return r;
}

CAffMat CAffMat::as_diagonal() const
{
    if (cols() != 1) throw std::invalid_argument("as_diagonal: expected a column");
    CAffMat r(Eigen::MatrixXcd(constant_.col(0).asDiagonal()));
    for (const auto& [i, m] : terms_) r.terms_[i] = Eigen::MatrixXcd(m.col(0).asDiagonal());
    return r;
}

CAffMat CAffMat::trace() const
{
    CAffMat r(1, 1);
    r.constant_(0, 0) = constant_.trace();
    for (const auto& [i, m] : terms_) r.terms_[i] = Eigen::MatrixXcd::Constant(1, 1, m.trace());
    r.prune();
    return r;
}

CAffMat CAffMat::block(Eigen::Index r0, Eigen::Index c0, Eigen::Index nr, Eigen::Index nc) const
{
    CAffMat r(Eigen::MatrixXcd(constant_.block(r0, c0, nr, nc)));
    for (const auto& [i, m] : terms_) r.terms_[i] = m.block(r0, c0, nr, nc);
    r.prune();
    return r;
}

void CAffMat::set_block(Eigen::Index r, Eigen::Index c, const CAffMat& value)
{
    if (r + value.rows() > rows() || c + value.cols() > cols()) {
        throw std::out_of_range("set_block: block exceeds matrix");
    }
    constant_.block(r, c, value.rows(), value.cols()) = value.constant_;
    for (auto& [i, m] : terms_) m.block(r, c, value.rows(), value.cols()).setZero();
    for (const auto& [i, m] : value.terms_) {
        auto it = terms_.find(i);
        if (it == terms_.end()) {
            it = terms_.emplace(i, Eigen::MatrixXcd::Zero(rows(), cols())).first;
        }
        it->second.block(r, c, value.rows(), value.cols()) = m;
    }
}

LinExpr CAffMat::real_part() const
{
    if (rows() != 1 || cols() != 1) throw std::invalid_argument("real_part: expected 1x1");
    LinExpr e(constant_(0, 0).real());
    for (const auto& [i, m] : terms_) e += LinExpr::var(i, m(0, 0).real());
    return e;
}

LinExpr CAffMat::imag_part() const
{
    if (rows() != 1 || cols() != 1) throw std::invalid_argument("imag_part: expected 1x1");
    LinExpr e(constant_(0, 0).imag());
    for (const auto& [i, m] : terms_) e += LinExpr::var(i, m(0, 0).imag());
    return e;
}

Eigen::MatrixXcd CAffMat::eval(std::span<const double> x) const
{
    Eigen::MatrixXcd v = constant_;
    for (const auto& [i, m] : terms_) v += cplx(x[static_cast<std::size_t>(i)]) * m;
    return v;
}

bool CAffMat::is_hermitian(double tol) const
{
    if (rows() != cols()) return false;
    auto herm = [tol](const Eigen::MatrixXcd& m) {
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
    };
    if (!herm(constant_)) return false;
    for (const auto& [i, m] : terms_) {
        if (!herm(m)) return false;
    }
    return true;
}

CAffMat& CAffMat::operator+=(const CAffMat& other)
{
    if (other.rows() != rows() || other.cols() != cols()) {
        throw std::invalid_argument("CAffMat: shape mismatch in addition");
    }
    constant_ += other.constant_;
    for (const auto& [i, m] : other.terms_) {
        auto it = terms_.find(i);
        if (it == terms_.end()) terms_.emplace(i, m);
        else it->second += m;
    }
    return *this;
}

CAffMat& CAffMat::operator-=(const CAffMat& other)
{
    CAffMat neg = other;
    neg *= -1.0;
    return *this += neg;
}

CAffMat& CAffMat::operator*=(cplx k)
{
    constant_ *= k;
    for (auto& [i, m] : terms_) m *= k;
    return *this;
}

void CAffMat::prune()
{
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second.size() == 0 || it->second.cwiseAbs().maxCoeff() == 0.0) it = terms_.erase(it);
        else ++it;
    }
}

CAffMat operator*(const Eigen::MatrixXcd& left, const CAffMat& m)
{
    if (left.cols() != m.rows()) throw std::invalid_argument("CAffMat: shape mismatch in product");
    CAffMat r(Eigen::MatrixXcd(left * m.constant_));
    for (const auto& [i, t] : m.terms_) r.terms_[i] = left * t;
    r.prune();
    return r;
}

CAffMat operator*(const CAffMat& m, const Eigen::MatrixXcd& right)
{
    if (m.cols() != right.rows()) throw std::invalid_argument("CAffMat: shape mismatch in product");
    CAffMat r(Eigen::MatrixXcd(m.constant_ * right));
    for (const auto& [i, t] : m.terms_) r.terms_[i] = t * right;
    r.prune();
    return r;
}

CAffMat operator+(CAffMat a, const CAffMat& b) { return a += b; }
CAffMat operator-(CAffMat a, const CAffMat& b) { return a -= b; }
CAffMat operator*(cplx k, CAffMat a) { return a *= k; }

CAffMat CAffMat::scaled(const LinExpr& scalar, const Eigen::MatrixXcd& m)
{
    CAffMat r(Eigen::MatrixXcd(cplx(scalar.constant()) * m));
    for (const auto& [i, c] : scalar.terms()) {
        if (c != 0.0) r.terms_[i] = cplx(c) * m;
    }
    return r;
}

Eigen::MatrixXd SymAffMat::eval(std::span<const double> x) const
{
    Eigen::MatrixXd v = constant;
    for (const auto& [i, m] : terms) v += x[static_cast<std::size_t>(i)] * m;
    return v;
}

}  // namespace risgame::conic
