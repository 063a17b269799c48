#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wadc/stability.hpp"
#include "wadc/timesim.hpp"

using namespace wadc;

namespace {

Eigen::MatrixXd scalar_gain(double g) {
    Eigen::MatrixXd G(1, 1);
    G(0, 0) = g;
    return G;
}

const SwitchedSystem& smib_family() {
    static const SwitchedSystem sys = enumerate_switching_states(
        discretize_trapezoidal(build_smib(), 0.02), scalar_gain(0.06), 2, 6);
    return sys;
}

const SwitchedSystem& smib_open_family() {
    static const SwitchedSystem sys = enumerate_switching_states(
        discretize_trapezoidal(build_smib(), 0.02), scalar_gain(0.0), 2, 6);
    return sys;
}

} // namespace

TEST_CASE("random delay sequences") {
    const DelaySequence constant = random_delay_sequence(1, 5, 5, 20);
    for (int n : constant.entries)
        CHECK(n == 5);

    const DelaySequence a = random_delay_sequence(99, 4, 18, 1000);
    const DelaySequence b = random_delay_sequence(99, 4, 18, 1000);
    CHECK(a.entries == b.entries);

    CHECK_THROWS_AS(random_delay_sequence(1, 1, 5, 10), InvalidRange);
    CHECK_THROWS_AS(random_delay_sequence(1, 6, 5, 10), InvalidRange);
    CHECK_THROWS_AS(random_delay_sequence(1, 4, 18, 0), InvalidRange);
}

TEST_CASE("uniform generator frequencies stay in band") {
    const DelaySequence seq = random_delay_sequence(2024, 4, 18, 10000);
    std::vector<int> counts(19, 0);
    for (int n : seq.entries)
        ++counts[static_cast<std::size_t>(n)];
    double chi2 = 0.0;
    const double expect = 10000.0 / 15.0;
    for (int n = 4; n <= 18; ++n) {
        const double freq = counts[static_cast<std::size_t>(n)] / 10000.0;
        CHECK(std::abs(freq - 1.0 / 15.0) < 0.02);
        chi2 += (counts[static_cast<std::size_t>(n)] - expect) *
                (counts[static_cast<std::size_t>(n)] - expect) / expect;
    }
    CHECK(chi2 < 50.0);  // 14 degrees of freedom
}

TEST_CASE("switched simulation basics") {
    const SwitchedSystem& fam = smib_family();
    const DelaySequence delays = random_delay_sequence(7, 2, 6, 100);

    const Trajectory zero = simulate_switched(
        fam, delays, Eigen::VectorXd::Zero(fam.dim()));
    CHECK(zero.states.cwiseAbs().maxCoeff() == 0.0);
    CHECK(zero.outputs.cwiseAbs().maxCoeff() == 0.0);

    // constant delay: the trajectory is the matrix power applied to x0
    const DelaySequence const3 = random_delay_sequence(1, 3, 3, 50);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(fam.dim());
    x0[0] = 0.5;
    x0[1] = -0.25;
    const Trajectory traj = simulate_switched(fam, const3, x0);
    Eigen::VectorXd ref = x0;
    for (int K = 0; K <= 50; ++K) {
        CHECK((traj.states.row(K).transpose() - ref).cwiseAbs().maxCoeff() <
              1e-12);
        ref = fam.state_for(3).A_C * ref;
    }

    DelaySequence bad = const3;
    bad.entries[10] = 9;
    CHECK_THROWS_AS(simulate_switched(fam, bad, x0), DelayOutOfFamily);
}

TEST_CASE("switched simulation agrees with the history-buffer oracle") {
    const DtStateSpace dt = discretize_trapezoidal(build_smib(), 0.02);
    const SwitchedSystem& fam = smib_family();
    for (int n = 2; n <= 6; ++n) {
        Eigen::VectorXd x0 = Eigen::VectorXd::Zero(fam.dim());
        x0[0] = 1.0;
        x0[1] = 0.3;
        const DelaySequence constant = random_delay_sequence(1, n, n, 500);
        const Trajectory traj = simulate_switched(fam, constant, x0);
        const auto oracle =
            oracles::history_buffer_sim(dt, scalar_gain(0.06), n, x0.head(2), 500);
        double max_diff = 0.0;
        for (int K = 0; K <= 500; ++K)
            max_diff = std::max(max_diff,
                                (traj.states.row(K).head(2).transpose() -
                                 oracle[static_cast<std::size_t>(K)])
                                    .cwiseAbs()
                                    .maxCoeff());
        CHECK(max_diff < 1e-9);
    }
}

TEST_CASE("disturbances inject at their steps") {
    const SwitchedSystem& fam = smib_family();
    const DelaySequence delays = random_delay_sequence(3, 2, 6, 30);
    Eigen::VectorXd imp = Eigen::VectorXd::Zero(fam.dim());
    imp[1] = 2.0;

    const Trajectory traj = simulate_switched(
        fam, delays, Eigen::VectorXd::Zero(fam.dim()), {{10, imp}});
    for (int K = 0; K < 10; ++K)
        CHECK(traj.states.row(K).norm() == 0.0);
    CHECK(traj.states(10, 1) == 2.0);
    CHECK(traj.states.row(11).norm() > 0.0);

    Eigen::VectorXd wrong = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(
        simulate_switched(fam, delays, Eigen::VectorXd::Zero(fam.dim()),
                          {{5, wrong}}),
        DimensionMismatch);
}

TEST_CASE("fault impulse excites the swing mode") {
    const SwitchedSystem& fam = smib_family();
    CHECK(fault_disturbance(fam, 0.0).norm() == 0.0);

    const Eigen::VectorXd imp = fault_disturbance(fam, 0.5);
    CHECK(imp.norm() == doctest::Approx(0.5));
    CHECK(imp.tail(fam.dim() - 2).norm() == 0.0);  // aligned with plant states
}

TEST_CASE("reproducibility is bit exact") {
    const SwitchedSystem& fam = smib_family();
    const DelaySequence delays = random_delay_sequence(11, 2, 6, 200);
    const Eigen::VectorXd imp = fault_disturbance(fam, 1.0);
    const Trajectory t1 = simulate_switched(
        fam, delays, Eigen::VectorXd::Zero(fam.dim()), {{5, imp}});
    const Trajectory t2 = simulate_switched(
        fam, delays, Eigen::VectorXd::Zero(fam.dim()), {{5, imp}});
    CHECK((t1.states - t2.states).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eig-product damping is exact for constant delays") {
    const SwitchedSystem& fam = smib_family();
    for (int n = 2; n <= 6; ++n) {
        const DelaySequence constant = random_delay_sequence(1, n, n, 40);
        const DampingEstimate est = estimate_damping_eig_product(fam, constant);
        CHECK(est.zeta ==
              doctest::Approx(fam.state_for(n).damping_ct).epsilon(1e-12));
    }
}

TEST_CASE("eig-product damping stays within the family bounds") {
    const SwitchedSystem& fam = smib_family();
    const DampingBounds b = damping_bounds(fam);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const DelaySequence delays = random_delay_sequence(seed, 2, 6, 300);
        const DampingEstimate est = estimate_damping_eig_product(fam, delays);
        CHECK(est.zeta >= b.zeta_min - 1e-9);
        CHECK(est.zeta <= b.zeta_max + 1e-9);
    }
}

TEST_CASE("peak fit recovers a constructed ringdown") {
    // e^{-0.1 t} cos(10 t) sampled at h = 0.01
    Trajectory traj;
    traj.h = 0.01;
    const int T = 2000;
    traj.states = Eigen::MatrixXd::Zero(T, 1);
    traj.outputs.resize(T, 1);
    for (int k = 0; k < T; ++k) {
        const double t = k * 0.01;
        traj.outputs(k, 0) = std::exp(-0.1 * t) * std::cos(10.0 * t);
    }
    const DampingEstimate est = estimate_damping_peak_fit(traj, 0, 0, T);
    const double expected = 0.1 / std::sqrt(0.01 + 100.0);
    CHECK(est.zeta == doctest::Approx(expected).epsilon(0.02));

    // pure cosine: no decay
    for (int k = 0; k < T; ++k)
        traj.outputs(k, 0) = std::cos(10.0 * k * 0.01);
    const DampingEstimate flat = estimate_damping_peak_fit(traj, 0, 0, T);
    CHECK(std::abs(flat.zeta) < 1e-3);

    CHECK_THROWS_AS(estimate_damping_peak_fit(traj, 0, 0, 20), TooFewPeaks);
    CHECK_THROWS_AS(estimate_damping_peak_fit(traj, 0, 0, T + 5), InvalidRange);
    CHECK_THROWS_AS(estimate_damping_peak_fit(traj, 2, 0, T), DimensionMismatch);
}

TEST_CASE("peak fit matches the eigenvalue on a constant-delay run") {
    const SwitchedSystem& fam = smib_family();
    const DelaySequence const2 = random_delay_sequence(1, 2, 2, 600);
    const Eigen::VectorXd imp = fault_disturbance(fam, 1.0);
    const Trajectory traj = simulate_switched(
        fam, const2, Eigen::VectorXd::Zero(fam.dim()), {{0, imp}});
    const DampingEstimate fit = estimate_damping_peak_fit(traj, 0, 0, 600);
    CHECK(fit.zeta ==
          doctest::Approx(fam.state_for(2).damping_ct).epsilon(0.05));
}

TEST_CASE("estimators agree on variable-delay runs") {
    const SwitchedSystem& fam = smib_family();
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const DelaySequence delays = random_delay_sequence(seed, 2, 6, 600);
        const Eigen::VectorXd imp = fault_disturbance(fam, 1.0);
        const Trajectory traj = simulate_switched(
            fam, delays, Eigen::VectorXd::Zero(fam.dim()), {{0, imp}});
        const DampingEstimate fit = estimate_damping_peak_fit(traj, 0, 0, 600);
        const DampingEstimate prod = estimate_damping_eig_product(fam, delays);
        CHECK(fit.zeta == doctest::Approx(prod.zeta).epsilon(0.15));
    }
}

TEST_CASE("zero gain leaves the open-loop damping in place") {
    const SwitchedSystem& open = smib_open_family();
    const double zeta_ol = damping_ratio(
        dt_to_ct_eig(open.reference_swing.value, open.h));
    for (std::uint64_t seed : {4ULL, 5ULL}) {
        const DelaySequence delays = random_delay_sequence(seed, 2, 6, 600);
        const Eigen::VectorXd imp = fault_disturbance(open, 1.0);
        const Trajectory traj = simulate_switched(
            open, delays, Eigen::VectorXd::Zero(open.dim()), {{0, imp}});
        const DampingEstimate fit = estimate_damping_peak_fit(traj, 0, 0, 600);
        CHECK(fit.zeta == doctest::Approx(zeta_ol).epsilon(0.05));
    }
}

TEST_CASE("controller enable schedule switches the family mid-run") {
    const SwitchedSystem& on = smib_family();
    const SwitchedSystem& off = smib_open_family();
    const DelaySequence delays = random_delay_sequence(21, 2, 6, 800);
    const Eigen::VectorXd imp = fault_disturbance(on, 1.0);

    // enable at 0 is the plain closed-loop run
    const Trajectory always_on = simulate_with_schedule(
        on, off, 0, delays, Eigen::VectorXd::Zero(on.dim()), {{0, imp}});
    const Trajectory plain = simulate_switched(
        on, delays, Eigen::VectorXd::Zero(on.dim()), {{0, imp}});
    CHECK((always_on.states - plain.states).cwiseAbs().maxCoeff() == 0.0);

    // decay is visibly faster after the controller comes on
    const Trajectory split = simulate_with_schedule(
        on, off, 400, delays, Eigen::VectorXd::Zero(on.dim()), {{0, imp}});
    const DampingEstimate before = estimate_damping_peak_fit(split, 0, 0, 400);
    const DampingEstimate after = estimate_damping_peak_fit(split, 0, 400, 800);
    CHECK(after.zeta > before.zeta);
}

TEST_CASE("open-loop surrogate grows without the controller") {
    const CtStateSpace sur = build_modal_surrogate({0.007, 4.2}, 1.0, 1.0);
    const DtStateSpace dt = discretize_trapezoidal(sur, 1.0 / 60.0);
    const SwitchedSystem open =
        enumerate_switching_states(dt, scalar_gain(0.0), 4, 18);
    const DelaySequence delays = random_delay_sequence(9, 4, 18, 2000);
    const Eigen::VectorXd imp = fault_disturbance(open, 1e-3);
    const Trajectory traj = simulate_switched(
        open, delays, Eigen::VectorXd::Zero(open.dim()), {{0, imp}});

    const double early = traj.outputs.topRows(200).cwiseAbs().maxCoeff();
    const double late =
        traj.outputs.bottomRows(200).cwiseAbs().maxCoeff();
    CHECK(late > early);

    const DampingEstimate fit = estimate_damping_peak_fit(traj, 0, 0, 2000);
    CHECK(fit.zeta < 0.0);
}

TEST_CASE("trajectory CSV carries the documented columns") {
    const SwitchedSystem& fam = smib_family();
    const DelaySequence delays = random_delay_sequence(2, 2, 6, 10);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(fam.dim());
    x0[0] = 1.0;
    const Trajectory traj = simulate_switched(fam, delays, x0);
    const std::string csv = trajectory_csv(traj, {0, 1});
    CHECK(csv.rfind("step,time,delay_n,y0,x0,x1", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
}
