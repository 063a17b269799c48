#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wadc/delaychain.hpp"
#include "wadc/ssmodel.hpp"

using namespace wadc;

namespace {

DtStateSpace smib_dt() { return discretize_trapezoidal(build_smib(), 0.02); }

Eigen::MatrixXd scalar_gain(double g) {
    Eigen::MatrixXd G(1, 1);
    G(0, 0) = g;
    return G;
}

} // namespace

TEST_CASE("delay chain matches the canonical 3-register realization") {
    const DelayChain chain = build_delay_chain(3, 1);
    Eigen::MatrixXd expected(3, 3);
    expected << 0, 1, 0,
                0, 0, 1,
                0, 0, 0;
    CHECK((chain.A_d - expected).norm() == 0.0);
    CHECK(chain.B_d(0, 0) == 0.0);
    CHECK(chain.B_d(1, 0) == 0.0);
    CHECK(chain.B_d(2, 0) == 1.0);
}

TEST_CASE("single register chain and nilpotency") {
    const DelayChain one = build_delay_chain(1, 1);
    CHECK(one.A_d(0, 0) == 0.0);
    CHECK(one.B_d(0, 0) == 1.0);

    const DelayChain four = build_delay_chain(4, 1);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(4, 4);
    for (int i = 0; i < 4; ++i)
        power = power * four.A_d;
    CHECK(power.norm() == 0.0);

    CHECK_THROWS_AS(build_delay_chain(0, 1), InvalidDimension);
    CHECK_THROWS_AS(build_delay_chain(3, 0), InvalidDimension);
}

TEST_CASE("selector picks the register holding y[K-n]") {
    const DelaySelector s1 = build_selector(1, 3);
    CHECK(s1.C_d(0) == 0.0);
    CHECK(s1.C_d(1) == 0.0);
    CHECK(s1.C_d(2) == 1.0);

    const DelaySelector s3 = build_selector(3, 3);
    CHECK(s3.C_d(0) == 1.0);
    CHECK(s3.C_d(1) == 0.0);
    CHECK(s3.C_d(2) == 0.0);

    const DelaySelector s2 = build_selector(2, 2);
    CHECK(s2.C_d(0) == 1.0);
    CHECK(s2.C_d(1) == 0.0);

    CHECK_THROWS_AS(build_selector(0, 3), DelayOutOfRange);
    CHECK_THROWS_AS(build_selector(4, 3), DelayOutOfRange);
}

TEST_CASE("chain state machine reproduces u[K-n] exactly") {
    Rng rng(19);
    for (int n_max : {1, 2, 5, 8}) {
        const DelayChain chain = build_delay_chain(n_max, 1);
        for (int n = 1; n <= n_max; ++n) {
            const DelaySelector sel = build_selector(n, n_max);
            Eigen::VectorXd x = Eigen::VectorXd::Zero(n_max);
            std::vector<double> u;
            for (int K = 0; K < 50; ++K) {
                u.push_back(2.0 * rng.uniform01() - 1.0);
                const double y = (sel.C_d * x)(0);
                if (K >= n)
                    CHECK(y == u[static_cast<std::size_t>(K - n)]);
                x = chain.A_d * x + chain.B_d * u.back();
            }
        }
    }
}

TEST_CASE("SMIB closed loop at n = 2 reproduces the golden A_C2 entries") {
    const SwitchingState st = assemble_closed_loop(smib_dt(), scalar_gain(0.06), 2, 3);
    const Eigen::MatrixXd& A = st.A_C;
    REQUIRE(A.rows() == 5);

    const DtStateSpace dt = smib_dt();
    CHECK((A.topLeftCorner(2, 2) - dt.A_p).norm() == 0.0);

    CHECK(A(0, 3) == doctest::Approx(-3.71e-4).epsilon(0.01));
    CHECK(A(0, 4) == doctest::Approx(-3.71e-4).epsilon(0.01));
    CHECK(A(1, 3) == doctest::Approx(-3.71e-2).epsilon(0.01));
    CHECK(A(1, 4) == doctest::Approx(-3.71e-2).epsilon(0.01));
    CHECK(A(2, 3) == 1.0);
    CHECK(A(3, 4) == 1.0);
    CHECK(A(4, 1) == 1.0);

    // every other entry is zero
    Eigen::MatrixXd mask = A;
    mask.topLeftCorner(2, 2).setZero();
    mask(0, 3) = mask(0, 4) = mask(1, 3) = mask(1, 4) = 0.0;
    mask(2, 3) = mask(3, 4) = mask(4, 1) = 0.0;
    CHECK(mask.norm() == 0.0);

    CHECK(std::abs(st.swing_mode.value - Complex(0.93, 0.22)) < 0.01);
}

TEST_CASE("zero gain leaves the plant spectrum untouched") {
    const SwitchingState st = assemble_closed_loop(smib_dt(), scalar_gain(0.0), 2, 3);
    CHECK(st.A_C.topRightCorner(2, 3).norm() == 0.0);

    auto spec = oracles::sorted_spectrum(st.A_C);
    auto plant_spec = oracles::sorted_spectrum(smib_dt().A_p);
    // spectrum = plant modes plus n_max zeros from the nilpotent chain; the
    // defective zeros perturb like eps^(1/3) numerically
    int zeros = 0;
    for (auto mu : spec)
        if (std::abs(mu) < 1e-3)
            ++zeros;
    CHECK(zeros == 3);
    CHECK(std::abs(spec.back() - plant_spec.back()) < 1e-12);
}

TEST_CASE("closed loop equals the explicit history-buffer oracle") {
    const DtStateSpace dt = smib_dt();
    const Eigen::MatrixXd G = scalar_gain(0.06);
    Rng rng(23);
    for (int n = 2; n <= 6; ++n) {
        const int n_max = 6;
        const SwitchingState st = assemble_closed_loop(dt, G, n, n_max);
        Eigen::VectorXd x0(2);
        x0 << 2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0;

        const auto oracle = oracles::history_buffer_sim(dt, G, n, x0, 500);

        Eigen::VectorXd z = Eigen::VectorXd::Zero(2 + n_max);
        z.head(2) = x0;
        double max_diff = 0.0;
        for (int K = 0; K <= 500; ++K) {
            max_diff = std::max(
                max_diff,
                (z.head(2) - oracle[static_cast<std::size_t>(K)]).cwiseAbs().maxCoeff());
            z = st.A_C * z;
        }
        CHECK(max_diff < 1e-9);
    }
}

TEST_CASE("multi-channel plants replicate the chain per channel") {
    // two measured channels, one input
    DtStateSpace plant;
    plant.A_p.resize(2, 2);
    plant.A_p << 0.9, 0.1,
                 -0.2, 0.85;
    plant.B_p.resize(2, 1);
    plant.B_p << 0.05, 0.1;
    plant.C = Eigen::MatrixXd::Identity(2, 2);
    plant.D = Eigen::MatrixXd::Zero(2, 1);
    plant.h = 0.02;

    Eigen::MatrixXd G(1, 2);
    G << 0.3, -0.4;

    const int n = 2, n_max = 4;
    const SwitchingState st = assemble_closed_loop(plant, G, n, n_max);
    REQUIRE(st.A_C.rows() == 2 + 2 * n_max);

    Eigen::VectorXd x0(2);
    x0 << 1.0, -0.5;
    const auto oracle = oracles::history_buffer_sim(plant, G, n, x0, 300);

    Eigen::VectorXd z = Eigen::VectorXd::Zero(st.A_C.rows());
    z.head(2) = x0;
    double max_diff = 0.0;
    for (int K = 0; K <= 300; ++K) {
        max_diff = std::max(
            max_diff,
            (z.head(2) - oracle[static_cast<std::size_t>(K)]).cwiseAbs().maxCoeff());
        z = st.A_C * z;
    }
    CHECK(max_diff < 1e-9);
}

TEST_CASE("assembly rejects unusable configurations") {
    CHECK_THROWS_AS(assemble_closed_loop(smib_dt(), scalar_gain(0.06), 1, 3),
                    DelayTooSmall);
    CHECK_THROWS_AS(assemble_closed_loop(smib_dt(), scalar_gain(0.06), 4, 3),
                    DelayOutOfRange);

    DtStateSpace feedthrough = smib_dt();
    feedthrough.D(0, 0) = 0.5;
    CHECK_THROWS_AS(assemble_closed_loop(feedthrough, scalar_gain(0.06), 2, 3),
                    FeedthroughUnsupported);
}

TEST_CASE("enumeration counts and shares one state space") {
    const SwitchedSystem pair =
        enumerate_switching_states(smib_dt(), scalar_gain(0.06), 2, 3);
    CHECK(pair.states.size() == 2);
    for (const auto& st : pair.states) {
        CHECK(st.A_C.rows() == 5);
        CHECK(std::abs(st.swing_mode.value) < 1.0);
    }

    const SwitchedSystem single =
        enumerate_switching_states(smib_dt(), scalar_gain(0.06), 2, 2);
    CHECK(single.states.size() == 1);

    const SwitchedSystem fifteen =
        enumerate_switching_states(smib_dt(), scalar_gain(0.01), 4, 18);
    CHECK(fifteen.states.size() == 15);
    for (const auto& st : fifteen.states)
        CHECK(st.A_C.rows() == 2 + 18);

    CHECK_THROWS_AS(enumerate_switching_states(smib_dt(), scalar_gain(0.06), 1, 3),
                    DelayTooSmall);
    CHECK_THROWS_AS(
        enumerate_switching_states(smib_dt(), scalar_gain(0.06), 4, 3),
        DelayOutOfRange);

    // swing-mode residual: the tracked value is an eigenvalue of A_C
    for (const auto& st : pair.states) {
        const Eigen::VectorXcd r =
            st.A_C.cast<Complex>() * st.swing_mode.right_vector -
            st.swing_mode.value * st.swing_mode.right_vector;
        CHECK(r.norm() < 1e-8);
    }
}
