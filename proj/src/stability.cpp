#include "wadc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wadc {

namespace {

constexpr double kSchurSlack = 1e-9;  // stable means rho <= 1 - kSchurSlack

bool schur_stable(const Eigen::MatrixXd& M) {
    return spectral_radius(M) <= 1.0 - kSchurSlack;
}

double principal_angle(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
    return std::acos(std::clamp(c, 0.0, 1.0));
}

} // namespace

TrackedMode track_swing_mode(const Eigen::MatrixXd& A_C,
                             const ComplexEig& reference) {
    const Eigen::Index dim = A_C.rows();
    if (reference.right_vector.size() > dim)
        throw DimensionMismatch("reference vector larger than A_C");

    Eigen::VectorXcd ref = Eigen::VectorXcd::Zero(dim);
    ref.head(reference.right_vector.size()) = reference.right_vector;
    ref.normalize();

    const auto eigs = eig_pairs(A_C, EigDomain::DT);
    TrackedMode out;
    double best = -1.0, second = -1.0;
    for (const auto& e : eigs) {
        if (e.value.imag() <= 1e-12)
            continue;
        const double score = std::abs(ref.dot(e.right_vector));
        if (score > best) {
            second = best;
            best = score;
            out.value = e.value;
            out.vector = e.right_vector;
        } else if (score > second) {
            second = score;
        }
    }
    if (best < 0.0)
        throw NoComplexMode("A_C has no complex eigenvalues to track");
    out.alignment = best;
    out.runner_up = std::max(second, 0.0);
    out.ambiguous = (second >= 0.0) && (best - second < 1e-3);
    return out;
}

ConstancyReport check_eigenvector_constancy(const SwitchedSystem& system,
                                            double tolerance_rad) {
    ConstancyReport rep;
    rep.tolerance = tolerance_rad;
    if (system.states.empty())
        throw InvalidRange("empty switched system");

    // the premise is constancy ACROSS switching states, so anchor at the
    // first family member rather than the open-loop vector
    const int np = system.plant_order;
    const Eigen::VectorXcd ref =
        system.states.front().swing_mode.right_vector.head(np);
    for (const auto& st : system.states) {
        Eigen::VectorXcd vp = st.swing_mode.right_vector.head(np);
        rep.per_state_angles.push_back(principal_angle(vp, ref));
    }
    rep.max_misalignment =
        rep.per_state_angles.empty()
            ? 0.0
            : *std::max_element(rep.per_state_angles.begin(),
                                rep.per_state_angles.end());

    const Complex lam_ref = dt_to_ct_eig(system.reference_swing.value, system.h);
    rep.h_vs_period =
        system.h * std::abs(lam_ref.imag()) / (2.0 * std::numbers::pi);
    rep.open_loop_damping = damping_ratio(lam_ref);
    rep.pass = rep.max_misalignment <= tolerance_rad;
    return rep;
}

std::pair<Complex, double> mu_product(const std::vector<Complex>& mus) {
    if (mus.empty())
        throw InvalidRange("mu_product needs at least one factor");
    Complex mu_t{1.0, 0.0};
    double log_sum = 0.0;
    for (const Complex& mu : mus) {
        mu_t *= mu;
        log_sum += std::log(std::abs(mu));
    }
    const double d_e = std::exp(log_sum / static_cast<double>(mus.size()));
    return {mu_t, d_e};
}

DampingBounds damping_bounds(const SwitchedSystem& system) {
    if (system.states.empty())
        throw InvalidRange("empty switched system");
    DampingBounds b;
    b.zeta_min = b.zeta_max = system.states.front().damping_ct;
    b.mu_abs_min = b.mu_abs_max = std::abs(system.states.front().swing_mode.value);
    b.argmin_delay = b.argmax_delay = system.states.front().n;
    for (const auto& st : system.states) {
        const double z = st.damping_ct;
        const double m = std::abs(st.swing_mode.value);
        if (z < b.zeta_min) { b.zeta_min = z; b.argmin_delay = st.n; }
        if (z > b.zeta_max) { b.zeta_max = z; b.argmax_delay = st.n; }
        b.mu_abs_min = std::min(b.mu_abs_min, m);
        b.mu_abs_max = std::max(b.mu_abs_max, m);
    }
    return b;
}

StabilityVerdict simplified_verdict(const SwitchedSystem& system,
                                    double constancy_tolerance_rad) {
    StabilityVerdict v;
    v.constancy = check_eigenvector_constancy(system, constancy_tolerance_rad);

    for (const auto& st : system.states) {
        if (!schur_stable(st.A_C)) {
            v.kind = VerdictKind::Unstable;
            v.witness_delay = st.n;
            v.reason = "switching state n = " + std::to_string(st.n) +
                       " has an eigenvalue on or outside the unit circle";
            return v;
        }
    }
    if (!v.constancy.pass) {
        v.kind = VerdictKind::Undetermined;
        v.reason = "eigenvector constancy fails (max misalignment " +
                   std::to_string(v.constancy.max_misalignment) +
                   " rad); the simplified analysis premise is void";
        return v;
    }
    v.kind = VerdictKind::Stable;
    v.bounds = damping_bounds(system);
    v.reason = "all switching states Schur stable with a constant swing "
               "eigenvector";
    return v;
}

ModeTrack root_locus(const CtStateSpace& plant, const Eigen::MatrixXd& gain,
                     double h, int n_min, int n_max) {
    const DtStateSpace dt = discretize_trapezoidal(plant, h);
    const SwitchedSystem sys = enumerate_switching_states(dt, gain, n_min, n_max);
    ModeTrack track;
    track.h = h;
    for (const auto& st : sys.states) {
        ModeTrack::Entry e;
        e.n = st.n;
        e.mu = st.swing_mode.value;
        e.lambda = dt_to_ct_eig(e.mu, h);
        e.zeta = st.damping_ct;
        e.vector = st.swing_mode.right_vector;
        track.entries.push_back(std::move(e));
    }
    return track;
}

int delay_margin(const CtStateSpace& plant, const Eigen::MatrixXd& gain,
                 double h, int n_start, int n_cap) {
    if (n_start < 2)
        throw DelayTooSmall("delay margin scan needs n_start >= 2");
    if (n_start > n_cap)
        throw InvalidRange("n_start must not exceed n_cap");

    const DtStateSpace dt = discretize_trapezoidal(plant, h);
    int margin = n_start - 1;
    for (int n = n_start; n <= n_cap; ++n) {
        // chain length n suffices; longer chains only append zero eigenvalues
        const SwitchingState st = assemble_closed_loop(dt, gain, n, n);
        if (!schur_stable(st.A_C))
            break;
        margin = n;
    }
    if (margin < n_start)
        throw NoStableDelay("closed loop already unstable at the smallest delay");
    return margin;
}

namespace {

/// delay_margin extended below n_start: an everywhere-unstable gain maps to
/// n_start - 1 so it compares below any achievable target.
int margin_ext(const CtStateSpace& plant, double gain, double h, int n_start,
               int n_cap) {
    Eigen::MatrixXd G(1, 1);
    G(0, 0) = gain;
    try {
        return delay_margin(plant, G, h, n_start, n_cap);
    } catch (const NoStableDelay&) {
        return n_start - 1;
    }
}

} // namespace

double calibrate_surrogate_gain(Complex lambda, double h, int target_margin,
                                double bracket_inner, double bracket_outer,
                                int n_start) {
    if (lambda.imag() <= 0.0)
        throw CalibrationFailed("surrogate mode must have Im(lambda) > 0");
    if (target_margin < n_start)
        throw CalibrationFailed("target margin below the scan start");

    const CtStateSpace plant = build_modal_surrogate(lambda, 1.0, 1.0);
    const int n_cap = target_margin + 1;  // enough to tell above from at/below
    const auto margin_of = [&](double g) {
        return margin_ext(plant, g, h, n_start, n_cap);
    };

    const double lo = bracket_inner, hi = bracket_outer;
    const int m_lo = margin_of(lo), m_hi = margin_of(hi);
    if ((m_lo - target_margin) * (m_hi - target_margin) > 0)
        throw CalibrationFailed(
            "delay margin does not cross the target over the search bracket");

    // find one gain on the target plateau
    double g_hit = std::numeric_limits<double>::quiet_NaN();
    if (m_lo == target_margin) g_hit = lo;
    if (m_hi == target_margin) g_hit = hi;
    double a = lo, b = hi;
    int m_a = m_lo;
    for (int it = 0; it < 200 && std::isnan(g_hit); ++it) {
        const double mid = 0.5 * (a + b);
        const int m = margin_of(mid);
        if (m == target_margin) {
            g_hit = mid;
            break;
        }
        if ((m_a - target_margin) * (m - target_margin) > 0) {
            a = mid;
            m_a = m;
        } else {
            b = mid;
        }
    }
    if (std::isnan(g_hit))
        throw CalibrationFailed("margin steps over the target without a plateau");

    // locate both plateau edges, return the midpoint
    const auto edge = [&](double inside, double outside) {
        double gi = inside, go = outside;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (gi + go);
            if (margin_of(mid) == target_margin)
                gi = mid;
            else
                go = mid;
        }
        return gi;
    };
    const double e_lo = edge(g_hit, lo);
    const double e_hi = edge(g_hit, hi);
    const double g_star = 0.5 * (e_lo + e_hi);
    if (margin_of(g_star) != target_margin)
        return g_hit;  // degenerate plateau; keep the verified point
    return g_star;
}

} // namespace wadc
