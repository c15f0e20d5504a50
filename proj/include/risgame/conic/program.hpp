#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "risgame/conic/expr.hpp"

namespace risgame::conic {

enum class ConeKind { Equality, NonNegative, SecondOrder, RotatedSecondOrder, Psd, HermitianPsd };

/// One constraint of a conic program.  Scalar kinds keep their rows in
/// `rows`; a PSD constraint keeps its matrix in `matrix`, a Hermitian one in
/// `hmatrix`.
///   Equality           rows[0] == 0
///   NonNegative        rows[0] >= 0
///   SecondOrder        rows[0] >= ||rows[1..]||
///   RotatedSecondOrder rows[0] * rows[1] >= ||rows[2..]||^2, rows[0], rows[1] >= 0
///   Psd                matrix is positive semidefinite
///   HermitianPsd       hmatrix is positive semidefinite
struct Constraint {
    ConeKind kind = ConeKind::NonNegative;
    std::vector<LinExpr> rows;
    SymAffMat matrix;
    std::string tag;
    CAffMat hmatrix;
};

struct VariableBlock {
    std::string name;
    VarRange range;
};

/// Convex program over real scalar variables: maximize an affine objective
/// subject to affine, second-order, rotated second-order and PSD cones.
class ConicProgram {
public:
    VarRange add_variables(const std::string& name, int count = 1);
    int num_variables() const { return num_vars_; }
    const std::vector<VariableBlock>& variable_blocks() const { return blocks_; }

    void maximize(LinExpr objective) { objective_ = std::move(objective); }
    const LinExpr& objective() const { return objective_; }

    void add_equality(LinExpr e, std::string tag = {});
    void add_nonneg(LinExpr e, std::string tag = {});
    void add_soc(LinExpr t, std::vector<LinExpr> u, std::string tag = {});
    void add_rotated_soc(LinExpr x, LinExpr y, std::vector<LinExpr> u, std::string tag = {});
    void add_psd(SymAffMat m, std::string tag = {});
    /// Complex Hermitian LMI, solved as a Hermitian cone.
    void add_hermitian_psd(const CAffMat& m, std::string tag = {});

    const std::vector<Constraint>& constraints() const { return constraints_; }

    /// Sparse triplet text serialization for external cross-checks.
    std::string dump() const;

private:
    void check_refs(const LinExpr& e) const;

    int num_vars_ = 0;
    std::vector<VariableBlock> blocks_;
    LinExpr objective_;
    std::vector<Constraint> constraints_;
};

/// [[Re M, -Im M], [Im M, Re M]].  Throws std::invalid_argument when M is
/// not Hermitian for every variable assignment.
SymAffMat herm_embed(const CAffMat& m);

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(SolveStatus s);

struct SolverOptions {
    int max_iterations = 100;
    double feastol = 1e-8;
    double abstol = 1e-8;
    double reltol = 1e-8;
    /// Tolerance used by the independent residual check on the result.
    double check_tol = 1e-7;
};

struct SolveResult {
    SolveStatus status = SolveStatus::NumericalFailure;
    double objective = 0.0;
    Eigen::VectorXd x;
    int iterations = 0;
    double wall_ms = 0.0;
    /// Largest scaled violation over all constraints at x.
    double max_violation = 0.0;
    std::string message;

    bool ok() const { return status == SolveStatus::Optimal; }
    double value(int index) const { return x(index); }
    Eigen::VectorXd values(VarRange r) const { return x.segment(r.start, r.size); }
    Eigen::VectorXcd complex_values(VarRange re, VarRange im) const;
};

SolveResult solve(const ConicProgram& p, const SolverOptions& opts = {});

/// Scaled violation of every constraint at x (0 when satisfied).
std::vector<double> constraint_violations(const ConicProgram& p, std::span<const double> x);

}  // namespace risgame::conic
