#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "risgame/conic/expr.hpp"
#include "risgame/conic/program.hpp"

namespace risgame {

/// Certificates and S-procedure multipliers of the robust reformulation.
struct RobustAuxiliaries {
    double psi_JD = 0.0;  // upper bound on ||w_D^H H~_JD||^2 over the balls
    double phi_JD = 0.0;  // lower bound on the same quantity
    double psi_JR = 0.0;  // upper bound on ||Theta H_JR w_J||^2
    double rho1 = 0.0;
    double rho2 = 0.0;
    double rho3 = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
};

/// Column-major vectorization.
Eigen::VectorXcd vec(const Eigen::MatrixXcd& m);

/// b = [w_D; (w_D^H H_RD diag(theta))^H], H_J = [Hhat_JD; Hhat_JR]^H,
/// B = (b b^H)^T kron I_{N_J}.  ||H_J b||^2 = vec(H_J)^H B vec(H_J).
struct StackedJammerChannel {
    Eigen::VectorXcd b;
    Eigen::MatrixXcd Hhat_J;
    Eigen::MatrixXcd B;
    Eigen::MatrixXd Upsilon_JD;
    Eigen::MatrixXd Upsilon_JR;
};

StackedJammerChannel stack_jammer_channel(const Eigen::VectorXcd& wD, const Eigen::VectorXcd& theta,
                                          const Eigen::MatrixXcd& H_RD, const Eigen::MatrixXcd& Hhat_JD,
                                          const Eigen::MatrixXcd& Hhat_JR);

/// Channel estimates and squared Frobenius radii seen by the leader.
struct JammerLinkData {
    Eigen::MatrixXcd H_RD;     // N_D x N
    Eigen::MatrixXcd Hhat_JD;  // N_D x N_J
    Eigen::MatrixXcd Hhat_JR;  // N x N_J
    double eps_JD = 0.0;
    double eps_JR = 0.0;

    int N_D() const { return static_cast<int>(Hhat_JD.rows()); }
    int N_J() const { return static_cast<int>(Hhat_JD.cols()); }
    int N() const { return static_cast<int>(Hhat_JR.rows()); }
};

/// w_D^H H_RD diag(theta) as a 1 x N expression.  At most one of wD and
/// theta may depend on program variables; throws std::invalid_argument
/// otherwise.
conic::CAffMat reflected_row(const conic::CAffMat& wD, const conic::CAffMat& theta,
                             const Eigen::MatrixXcd& H_RD);

/// Hermitian block certifying psi >= ||w_D^H (H_JD + H_RD Theta H_JR)||^2
/// for every error in the two balls.  Rows are ordered [N_J, 1, N_D, N].
conic::CAffMat lmi_psi_jd(const conic::CAffMat& wD, const conic::CAffMat& theta, const JammerLinkData& d,
                          const conic::LinExpr& psi, const conic::LinExpr& rho1, const conic::LinExpr& rho2);

enum class PhiMode { ExactFixed, ScaWd, ScaTheta };

/// Hermitian (N_D+N) x (N_D+N) matrix standing in for b b^H:
///   ExactFixed  b b^H with every argument fixed;
///   ScaWd       b b0^H + b0 b^H - b0 b0^H with wD symbolic, b0 built from wD0;
///   ScaTheta    the same with theta symbolic, b0 built from theta0.
/// The surrogate never exceeds b b^H and matches it at the expansion point.
conic::CAffMat phi_lift(PhiMode mode, const conic::CAffMat& wD, const conic::CAffMat& theta,
                        const Eigen::VectorXcd& wD0, const Eigen::VectorXcd& theta0,
                        const Eigen::MatrixXcd& H_RD);

/// Full S-procedure block of size N_J (N_D+N) + 1 built from the lift A:
///   [[B + eta1 U_JD + eta2 U_JR, B h], [h^H B, h^H B h - phi - eta1 eps_JD - eta2 eps_JR]]
/// with B = A^T kron I_{N_J} and h = vec(Hhat_J).
conic::CAffMat lmi_phi_jd(const conic::CAffMat& A, const JammerLinkData& d, const conic::LinExpr& phi,
                          const conic::LinExpr& eta1, const conic::LinExpr& eta2);

/// Row-wise split of the same S-procedure: N_J blocks of size at most
/// N_D+N+1 plus one linear inequality, adding N_J auxiliary variables.
/// Error blocks with zero radius are left out, where the full block would
/// need an unbounded multiplier.
void add_phi_jd_compact(conic::ConicProgram& p, const conic::CAffMat& A, const JammerLinkData& d,
                        const conic::LinExpr& phi, const conic::LinExpr& eta1, const conic::LinExpr& eta2,
                        const std::string& tag = "phi_JD");

/// Block of size 2N+1 certifying psi >= ||diag(theta) H_JR w_J||^2 over the
/// H_JR ball.  theta may be symbolic.
conic::CAffMat lmi_psi_jr(const conic::CAffMat& theta, const Eigen::VectorXcd& wJ,
                          const Eigen::MatrixXcd& Hhat_JR, double eps_JR, const conic::LinExpr& psi,
                          const conic::LinExpr& rho3);

/// Cone form of lmi_psi_jd.  The block is an arrow around its unit entry,
/// so by a Schur complement it holds iff
///   (psi - rho1 - rho2) t1 >= ||r||^2, rho1 t2 >= eps_JD ||w_D||^2,
///   rho2 t3 >= eps_JR ||u||^2, t1 + t2 + t3 <= 1
/// for some t.  Adds three variables.
void add_psi_jd_cones(conic::ConicProgram& p, const conic::CAffMat& wD, const conic::CAffMat& theta,
                      const JammerLinkData& d, const conic::LinExpr& psi, const conic::LinExpr& rho1,
                      const conic::LinExpr& rho2, const std::string& tag = "psi_JD");

/// Cone form of lmi_psi_jr.  The sparsity graph of the block is a tree, so
/// it splits into 2x2 blocks per element:
///   (psi - a_n) rho3 >= eps |theta_n|^2, a_n s_n >= |c_n|^2,
///   sum s_n + rho3 ||w_J||^2 <= 1,  c = diag(Hhat_JR w_J) theta.
/// Adds 2N variables.
void add_psi_jr_cones(conic::ConicProgram& p, const conic::CAffMat& theta, const Eigen::VectorXcd& wJ,
                      const Eigen::MatrixXcd& Hhat_JR, double eps_JR, const conic::LinExpr& psi,
                      const conic::LinExpr& rho3, const std::string& tag = "psi_JR");

/// Tightest certificates for a fixed strategy, each from its own small
/// program.  nullopt when the solver does not return an optimal point.
std::optional<double> certify_psi_jd(const Eigen::VectorXcd& wD, const Eigen::VectorXcd& theta,
                                     const JammerLinkData& d);
std::optional<double> certify_phi_jd(const Eigen::VectorXcd& wD, const Eigen::VectorXcd& theta,
                                     const JammerLinkData& d, bool compact = true);
std::optional<double> certify_psi_jr(const Eigen::VectorXcd& theta, const Eigen::VectorXcd& wJ,
                                     const Eigen::MatrixXcd& Hhat_JR, double eps_JR);

/// Exact worst-case values over the error balls, equal to the optimal
/// certificates above.  Each error enters through a single ball, so the
/// extremes align the perturbation with the nominal term.
struct WorstCaseJD {
    double max = 0.0;  // (||r|| + sqrt(eps_JD) ||w_D|| + sqrt(eps_JR) ||u||)^2
    double min = 0.0;  // max(0, ||r|| - sqrt(eps_JD) ||w_D|| - sqrt(eps_JR) ||u||)^2
};
WorstCaseJD worst_case_jd(const Eigen::VectorXcd& wD, const Eigen::VectorXcd& theta, const JammerLinkData& d);
/// max ||Theta (Hhat_JR + E) w_J||^2 over ||E||_F^2 <= eps_JR, a trust-region
/// maximization solved through its secular equation.
double worst_case_jr(const Eigen::VectorXcd& theta, const Eigen::VectorXcd& wJ, const Eigen::MatrixXcd& Hhat_JR,
                     double eps_JR);

}  // namespace risgame
