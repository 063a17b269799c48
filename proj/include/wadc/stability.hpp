#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wadc/delaychain.hpp"
#include "wadc/ssmodel.hpp"

namespace wadc {

/// Result of following the swing mode into one closed-loop matrix.
struct TrackedMode {
    Complex value;                ///< DT eigenvalue, Im > 0
    Eigen::VectorXcd vector;      ///< unit norm, canonical phase
    double alignment = 0.0;       ///< |<padded reference, v>| of the winner
    double runner_up = 0.0;       ///< second-best alignment score
    bool ambiguous = false;       ///< winner and runner-up within 1e-3
};

/// Per-delay swing-mode trace (root locus data).
struct ModeTrack {
    struct Entry {
        int n = 0;
        Complex mu;       ///< DT swing eigenvalue
        Complex lambda;   ///< CT equivalent via the inverse trapezoidal map
        double zeta = 0.0;
        Eigen::VectorXcd vector;
    };
    std::vector<Entry> entries;
    double h = 0.0;
};

/// Damping extremes over a switched family.
struct DampingBounds {
    double zeta_min = 0.0;
    double zeta_max = 0.0;
    double mu_abs_min = 0.0;
    double mu_abs_max = 0.0;
    int argmin_delay = 0;  ///< delay attaining zeta_min
    int argmax_delay = 0;  ///< delay attaining zeta_max
};

/// Empirical check of the constant-eigenvector premise, plus the two
/// measurable applicability assumptions (h much smaller than the mode
/// period; small open-loop damping).
struct ConstancyReport {
    double max_misalignment = 0.0;          ///< radians
    std::vector<double> per_state_angles;   ///< aligned with family delays
    double h_vs_period = 0.0;               ///< h * |Im lambda| / (2 pi)
    double open_loop_damping = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

enum class VerdictKind { Stable, Unstable, Undetermined };

struct StabilityVerdict {
    VerdictKind kind = VerdictKind::Undetermined;
    std::optional<DampingBounds> bounds;   ///< present when Stable
    std::optional<int> witness_delay;      ///< present when Unstable
    std::string reason;
    ConstancyReport constancy;
};

/// Selects, among eigenpairs of A_C with positive imaginary part, the one
/// whose eigenvector best aligns with the reference (padded with zeros over
/// the chain states). Throws NoComplexMode when A_C has no complex modes;
/// near-ties are reported via TrackedMode::ambiguous, not thrown.
TrackedMode track_swing_mode(const Eigen::MatrixXd& A_C,
                             const ComplexEig& reference);

/// Principal angle between each state's swing eigenvector (plant sub-block)
/// and the reference eigenvector.
ConstancyReport check_eigenvector_constancy(const SwitchedSystem& system,
                                            double tolerance_rad);

/// mu_T = prod(mu_i) and the effective damping d_e = |mu_T|^(1/n).
std::pair<Complex, double> mu_product(const std::vector<Complex>& mus);

/// Simplified stability assessment: Stable iff every switching state is
/// Schur stable (all eigenvalues, not just the swing mode) and the
/// eigenvector-constancy premise holds. A failed premise yields
/// Undetermined, never Unstable.
StabilityVerdict simplified_verdict(const SwitchedSystem& system,
                                    double constancy_tolerance_rad = 0.05);

DampingBounds damping_bounds(const SwitchedSystem& system);

/// CT-equivalent swing eigenvalue per fixed delay in [n_min, n_max].
ModeTrack root_locus(const CtStateSpace& plant, const Eigen::MatrixXd& gain,
                     double h, int n_min, int n_max);

/// Largest n <= n_cap such that every fixed delay in [n_start, n] yields a
/// Schur-stable closed loop (scan stops at the first unstable delay).
/// Throws NoStableDelay when n_start itself is unstable.
int delay_margin(const CtStateSpace& plant, const Eigen::MatrixXd& gain,
                 double h, int n_start, int n_cap);

/// Scalar feedback gain, found by bisection, whose delay margin equals
/// target_margin on the 2-state modal surrogate for lambda. The margin-
/// matching plateau is located within the bracket and the midpoint of the
/// plateau-bracket intersection returned, so the result is deterministic and
/// well inside the plateau. Throws CalibrationFailed when the bracket shows
/// no crossing. The margin(gain) curve is generally not monotone and can
/// carry several target plateaus; the default bracket selects the
/// larger-gain stabilizing region, where the flagship surrogate family is
/// best conditioned for the switched-Lyapunov analysis.
double calibrate_surrogate_gain(Complex lambda, double h, int target_margin,
                                double bracket_inner = -1.0,
                                double bracket_outer = -1.55,
                                int n_start = 2);

} // namespace wadc
