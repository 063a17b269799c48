#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wadc/errors.hpp"

namespace wadc {

/// Candidate switched-Lyapunov certificate: one P per switching state
/// (all equal for a common quadratic Lyapunov function).
struct LmiCertificate {
    std::vector<Eigen::MatrixXd> P_list;
    /// margins(i, j) = min eig of P_i - A_i^T P_j A_i (Schur reduction of
    /// the block inequality).
    Eigen::MatrixXd margins;
    double min_P_eig = 0.0;
};

enum class LmiOutcome {
    Feasible,       ///< certificate passed the exact verifier
    Undetermined,   ///< solver made no further progress; feasibility NOT refuted
    NecessaryFail,  ///< some single state is not Schur stable
};

struct LmiVerdict {
    LmiOutcome outcome = LmiOutcome::Undetermined;
    std::optional<LmiCertificate> certificate;
    int iterations = 0;     ///< Newton steps spent
    double residual = 0.0;  ///< remaining margin deficit at exit (0 when feasible)
    int witness = -1;       ///< offending state index for NecessaryFail
    std::string detail;
};

struct LmiOptions {
    double epsilon = 0.0;  ///< required margin; 0 selects 1e-6 x spectral-norm scale
    double tol = 1e-9;     ///< stall threshold on margin-shift progress
    int max_iter = 20000;  ///< Newton step budget
    /// Direct multi-P solves are attempted only below this variable count;
    /// larger problems fall back to the common-P restriction.
    int max_multi_p_vars = 2000;
    bool trace = false;  ///< log the interior-point descent to stderr
};

/// Default margin requirement, 1e-6 times the largest spectral norm among
/// the states (floored at 1).
double default_epsilon(const std::vector<Eigen::MatrixXd>& states);

/// Exact certificate check by smallest-eigenvalue computation:
/// P_i >= eps I for all i, and P_i - A_i^T P_j A_i >= eps I for all (i, j).
/// Rejects certificates with material asymmetry (beyond 1e-10 relative).
bool lmi_verify(const std::vector<Eigen::MatrixXd>& states,
                const LmiCertificate& cert, double epsilon);

/// Big block form of the switched-Lyapunov inequality for one (i, j) pair,
/// [[P_i, A^T P_j], [P_j A, P_j]]. Positive definiteness of this block is
/// equivalent to the Schur-reduced test used by lmi_verify.
Eigen::MatrixXd lmi_block_form(const Eigen::MatrixXd& P_i,
                               const Eigen::MatrixXd& P_j,
                               const Eigen::MatrixXd& A_i);

/// Switched-Lyapunov feasibility with per-state P_1..P_N. Screens the
/// necessary condition (every state Schur stable), then searches for a
/// strictly feasible certificate; Feasible is returned only when the exact
/// verifier passes. Projection-style methods cannot certify infeasibility,
/// so the fallback verdict is Undetermined.
LmiVerdict lmi_solve(const std::vector<Eigen::MatrixXd>& states,
                     const LmiOptions& options = {});

/// Same restricted to P_1 = ... = P_N (common quadratic Lyapunov function).
/// Feasible here implies feasibility of the multi-P problem.
LmiVerdict common_p_solve(const std::vector<Eigen::MatrixXd>& states,
                          const LmiOptions& options = {});

} // namespace wadc
