#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "risgame/conic/program.hpp"

namespace risgame::conic::detail {

enum class BlockKind { Lp, Soc, Psd };

/// One cone of the standard form  G x + s = h, s in K.  Only the columns of
/// G that touch the block are stored.
struct ConeBlock {
    BlockKind kind = BlockKind::Lp;
    int order = 0;  // Hermitian PSD matrix size, otherwise number of rows
    std::vector<int> cols;
    Eigen::MatrixXd G;
    Eigen::VectorXd h;

    int rows() const { return static_cast<int>(h.size()); }
};

/// minimize c'x  s.t.  A x = b,  G x + s = h,  s in K.
struct StandardForm {
    int n = 0;
    Eigen::VectorXd c;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<ConeBlock> blocks;
};

enum class IpmStatus { Optimal, Inaccurate, PrimalInfeasible, DualInfeasible, Failure };

struct IpmResult {
    IpmStatus status = IpmStatus::Failure;
    Eigen::VectorXd x;
    int iterations = 0;
    double pres = 0.0;
    double dres = 0.0;
    double gap = 0.0;
    std::string message;
};

IpmResult ipm_solve(const StandardForm& sf, const SolverOptions& opts);

// hsvec: lower triangle of a Hermitian matrix, column by column; the real
// diagonal, then sqrt(2) Re and sqrt(2) Im of each entry below it.
int hsvec_size(int d);
Eigen::VectorXd hsvec(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd hsmat(const Eigen::Ref<const Eigen::VectorXd>& v, int d);

}  // namespace risgame::conic::detail
