#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "risgame/conic/program.hpp"
#include "risgame/game.hpp"
#include "risgame/robust_lmi.hpp"
#include "risgame/scene.hpp"

namespace risgame {

enum class Scheme { Robust, Perfect, NonRobust, NoRis };

const char* to_string(Scheme s);
std::optional<Scheme> parse_scheme(const std::string& name);

/// Channel view handed to the leader under a scheme: estimates and radii
/// (robust), truth with zero radii (perfect), estimates with zero radii
/// (nonrobust), robust without the surface (noris).
ChannelSet leader_view(const ChannelSet& ch, Scheme s);

struct BsumOptions {
    double outer_tol = 1e-4;
    double inner_tol = 1e-5;
    int max_outer = 50;
    int max_inner = 30;
    double floor = 1e-12;
    /// Use the full N_J(N+N_D)+1 phi_JD block instead of the row split.
    bool full_phi_block = false;
    /// Use the psi_JD / psi_JR LMIs instead of their equivalent cone forms.
    bool psi_lmi_blocks = false;
    /// Recertify with the certificate SDPs instead of the closed-form worst
    /// cases (same values, much slower).
    bool sdp_certificates = false;
    conic::SolverOptions solver{};
};

/// Leader's channel view in solver units.  Destination-side channels are
/// multiplied by kappa = 1/sigma_D and surface-side channels are balanced
/// by s: H_SR, H_JR times s, H_RD over s.  SINR, utilities and strategies
/// are unchanged; psi_JD, phi_JD scale by kappa^2, psi_JR and the surface
/// power budget by s^2.
struct LeaderModel {
    Eigen::MatrixXcd H_SD, H_SR, H_RD, Hhat_JD, Hhat_JR;
    double eps_JD = 0.0;
    double eps_JR = 0.0;
    double sigma_R2 = 0.0;
    double sigma_D2 = 1.0;
    double P_R_max = 0.0;
    double kappa = 1.0;
    double s = 1.0;
    SceneConfig cfg;

    static LeaderModel from_view(const ChannelSet& view, const SceneConfig& cfg);

    int N() const { return static_cast<int>(H_SR.rows()); }
    JammerLinkData link() const;
    /// H_SD + H_RD diag(theta) H_SR.
    Eigen::MatrixXcd Ht_SD(const Eigen::VectorXcd& theta) const;
    Eigen::MatrixXcd Ht_JD(const Eigen::VectorXcd& theta) const;
};

/// Current iterate: strategies plus certificates in model units.
struct LeaderState {
    LeaderStrategy leader;
    JammerStrategy jammer;  // anticipated
    RobustAuxiliaries cert;
};

/// w_D^H H~_SD w_S.
std::complex<double> signal_gain(const LeaderModel& m, const LeaderStrategy& l);
/// sigma_R^2 ||w_D^H H_RD Theta||^2 + sigma_D^2.
double noise_term(const LeaderModel& m, const LeaderStrategy& l);
/// |w_D^H H~_SD w_S| / sqrt(psi_JD).
double signal_ratio(const LeaderModel& m, const LeaderState& st, double floor = 1e-12);
/// sqrt(c_J P_S) |a| / sqrt(psi_JD) - c_S P_S.
double leader_objective(const LeaderModel& m, const LeaderState& st, double floor = 1e-12);
/// Smallest anticipated jamming power allowed by the certificates.
double jamming_lower_bound(const LeaderModel& m, const LeaderState& st, double floor = 1e-12);
/// P_S ||diag(H_SR w_S) theta||^2 + P_J psi_JR + sigma_R^2 ||theta||^2.
double surface_power(const LeaderModel& m, const LeaderState& st);
/// Largest relative violation of the leader's constraints (0 when feasible).
double leader_violation(const LeaderModel& m, const LeaderState& st, double floor = 1e-12);

/// Anticipated jammer direction on the leader's estimates.
Eigen::VectorXcd anticipated_direction(const LeaderModel& m, const LeaderStrategy& l);
/// Recomputes psi_JD, phi_JD and, unless `keep_psi_jr`, psi_JR at the
/// current strategies.
bool certify(const LeaderModel& m, LeaderState& st, const BsumOptions& o, bool keep_psi_jr = false);

struct PowerResult {
    double P_S = 0.0;
    double P_J = 0.0;
    double gamma = 0.0;
    bool surface_binding = false;
    bool feasible = true;
};

/// Exact maximizer over (gamma, P_J) of the power subproblem at fixed
/// beamformers, reflection and certificates.
PowerResult power_allocation(const LeaderModel& m, const LeaderState& st, double floor = 1e-12);

struct TransmitResult {
    Eigen::VectorXcd w_S;
    bool degenerate = false;
};

/// Maximum ratio transmission w_S = Ht_SD^H w_D / ||Ht_SD^H w_D||.
TransmitResult transmit_beamforming(const Eigen::VectorXcd& wD, const Eigen::MatrixXcd& Ht_SD);

/// Expansion point of the receive-beamforming surrogate.
struct SCAStateWD {
    Eigen::VectorXcd wD0;
    double mu0 = 0.0, xi0 = 0.0, psi_JD0 = 0.0, psi_D0 = 0.0, phi_D0 = 0.0;
    double mu = 0.0, nu = 0.0, xi = 0.0, phi_D = 0.0, psi_D = 0.0;
    Eigen::MatrixXcd W_D;
};

/// Expansion point of the reflection surrogate.
struct SCAStateTheta {
    Eigen::VectorXcd theta0;
    double mu0 = 0.0, xi0 = 0.0, psi_JD0 = 0.0, psi_theta0 = 0.0, phi_theta0 = 0.0;
    double mu = 0.0, nu = 0.0, xi = 0.0, phi_theta = 0.0, psi_theta = 0.0;
    Eigen::VectorXcd alpha;  // a(theta) = alpha^T theta + beta
    std::complex<double> beta;
    Eigen::VectorXcd E;  // w_D^H H_RD diag(theta) = theta^T diag(E)
};

SCAStateWD make_sca_state_wd(const LeaderModel& m, const LeaderState& st, double floor = 1e-12);
SCAStateTheta make_sca_state_theta(const LeaderModel& m, const LeaderState& st, double floor = 1e-12);

/// One convex surrogate solve.  On success `next` holds the raw optimizer
/// (w_D not yet normalized, certificates from the surrogate program).
struct SurrogateStep {
    bool ok = false;
    double value = 0.0;
    LeaderState next;
    conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
    double ms = 0.0;
    int solver_iterations = 0;
};

SurrogateStep receive_surrogate_step(const LeaderModel& m, const LeaderState& st, SCAStateWD& sca,
                                     const BsumOptions& o);
SurrogateStep reflection_surrogate_step(const LeaderModel& m, const LeaderState& st, SCAStateTheta& sca,
                                        const BsumOptions& o);

struct InnerResult {
    int iterations = 0;
    std::vector<double> trace;       // true block objective, starting at the input point
    std::vector<double> surrogate;   // surrogate optimum per solve
    std::vector<double> solve_ms;
    bool ok = true;
    std::string message;
};

/// SCA loops.  Each accepted step is normalized, recertified and never
/// lowers the block objective |a| / sqrt(psi_JD).
InnerResult receive_beamforming_sca(const LeaderModel& m, LeaderState& st, const BsumOptions& o);
InnerResult reflection_sca(const LeaderModel& m, LeaderState& st, const BsumOptions& o);

struct SolverReport {
    int outer_iterations = 0;
    std::vector<int> inner_wd;
    std::vector<int> inner_theta;
    std::vector<double> utility_trace;
    std::vector<std::vector<double>> wd_traces;
    std::vector<std::vector<double>> theta_traces;
    double ms_power = 0.0;
    double ms_transmit = 0.0;
    double ms_receive = 0.0;
    double ms_jammer = 0.0;
    double ms_reflection = 0.0;
    double ms_total = 0.0;
    std::string termination;
    bool converged = false;
    std::vector<std::string> warnings;
    /// Relative gap P_J - lower bound at termination.
    double pj_slack = 0.0;
};

struct LeaderSolution {
    LeaderStrategy leader;
    JammerStrategy anticipated;
    /// Certificates in physical units.
    RobustAuxiliaries cert;
    /// Leader objective sqrt(c_J P_S)|a|/sqrt(psi_JD) - c_S P_S.
    double objective = 0.0;
    SolverReport report;
};

/// Deterministic initial point that satisfies the leader's constraints.
LeaderState initial_state(const LeaderModel& m, const BsumOptions& o);

LeaderSolution solve_leader(const ChannelSet& view, const SceneConfig& cfg, const BsumOptions& o = {});

struct Equilibrium {
    LeaderStrategy leader;
    JammerStrategy anticipated;
    JammerStrategy realized;
    double u_L = 0.0;
    double u_J = 0.0;
    double u_L_worst = 0.0;
    double sinr = 0.0;
    double dP_J = 0.0;
    double w_J_overlap = 0.0;
};

/// Follower's true reply on the true channels and realized utilities.
Equilibrium assemble_equilibrium(const LeaderSolution& sol, const ChannelSet& truth, const SceneConfig& cfg);

}  // namespace risgame
