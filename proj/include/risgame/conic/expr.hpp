#pragma once

#include <complex>
#include <map>
#include <span>

#include <Eigen/Dense>

namespace risgame::conic {

using cplx = std::complex<double>;

/// Contiguous run of real scalar decision variables.
struct VarRange {
    int start = 0;
    int size = 0;

    int operator[](int k) const { return start + k; }
};

/// Real affine scalar: constant + sum_i coef_i * x_i.
class LinExpr {
public:
    LinExpr() = default;
    LinExpr(double constant) : constant_(constant) {}  // NOLINT(google-explicit-constructor)

    static LinExpr var(int index, double coef = 1.0);

    double constant() const { return constant_; }
    const std::map<int, double>& terms() const { return terms_; }
    double coef(int index) const;

    LinExpr& operator+=(const LinExpr& other);
    LinExpr& operator-=(const LinExpr& other);
    LinExpr& operator*=(double k);

    double eval(std::span<const double> x) const;

private:
    double constant_ = 0.0;
    std::map<int, double> terms_;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a);
LinExpr operator*(double k, LinExpr a);
LinExpr operator*(LinExpr a, double k);

/// Complex matrix that is affine in the real decision variables:
/// M(x) = M0 + sum_i x_i M_i.  Complex decision vectors are carried as
/// separate real and imaginary variable ranges.
class CAffMat {
public:
    CAffMat() = default;
    CAffMat(Eigen::Index rows, Eigen::Index cols);
    explicit CAffMat(Eigen::MatrixXcd constant);

    /// 1x1 expression equal to a single real variable.
    static CAffMat scalar(int index, cplx coef = 1.0);
    /// n x 1 expression re + j*im.
    static CAffMat complex_vector(VarRange re, VarRange im);
    /// n x n Hermitian matrix variable; diagonal from `diag`, strict upper
    /// triangle from `offdiag_re` / `offdiag_im` (row-major order).
    static CAffMat hermitian(VarRange diag, VarRange offdiag_re, VarRange offdiag_im);
    static CAffMat identity(Eigen::Index n, const LinExpr& scale);
    /// scalar(x) * m for a real affine scalar and constant matrix.
    static CAffMat scaled(const LinExpr& scalar, const Eigen::MatrixXcd& m);

    Eigen::Index rows() const { return constant_.rows(); }
    Eigen::Index cols() const { return constant_.cols(); }
    const Eigen::MatrixXcd& constant() const { return constant_; }
    const std::map<int, Eigen::MatrixXcd>& terms() const { return terms_; }

    CAffMat adjoint() const;
    CAffMat conjugate() const;
    CAffMat transpose() const;
    /// X (x) I_n, Kronecker product with an identity on the right.
    CAffMat kron_identity(Eigen::Index n) const;
    /// Square diagonal matrix from an n x 1 expression.
    CAffMat as_diagonal() const;
    CAffMat trace() const;
    CAffMat block(Eigen::Index r, Eigen::Index c, Eigen::Index nr, Eigen::Index nc) const;

    void set_block(Eigen::Index r, Eigen::Index c, const CAffMat& value);

    /// Real / imaginary part of a 1x1 expression.
    LinExpr real_part() const;
    LinExpr imag_part() const;

    Eigen::MatrixXcd eval(std::span<const double> x) const;

    /// True when the constant and every coefficient matrix equal their adjoint.
    bool is_hermitian(double tol = 1e-10) const;

    CAffMat& operator+=(const CAffMat& other);
    CAffMat& operator-=(const CAffMat& other);
    CAffMat& operator*=(cplx k);

    friend CAffMat operator*(const Eigen::MatrixXcd& left, const CAffMat& m);
    friend CAffMat operator*(const CAffMat& m, const Eigen::MatrixXcd& right);

private:
    void prune();

    Eigen::MatrixXcd constant_;
    std::map<int, Eigen::MatrixXcd> terms_;
};

CAffMat operator+(CAffMat a, const CAffMat& b);
CAffMat operator-(CAffMat a, const CAffMat& b);
CAffMat operator*(cplx k, CAffMat a);

/// Real symmetric matrix affine in the decision variables.
struct SymAffMat {
    Eigen::MatrixXd constant;
    std::map<int, Eigen::MatrixXd> terms;

    Eigen::Index dim() const { return constant.rows(); }
    Eigen::MatrixXd eval(std::span<const double> x) const;
};

}  // namespace risgame::conic
