#include "wadc/delaychain.hpp"

#include <string>

#include "wadc/stability.hpp"

namespace wadc {

const SwitchingState& SwitchedSystem::state_for(int n) const {
    if (n < n_min || n > n_max)
        throw DelayOutOfFamily("delay " + std::to_string(n) +
                               " outside family range [" +
                               std::to_string(n_min) + ", " +
                               std::to_string(n_max) + "]");
    return states[static_cast<std::size_t>(n - n_min)];
}

DelayChain build_delay_chain(int n_max, int channels) {
    if (n_max < 1)
        throw InvalidDimension("delay chain needs n_max >= 1");
    if (channels < 1)
        throw InvalidDimension("delay chain needs at least one channel");
    DelayChain chain;
    chain.n_max = n_max;
    chain.A_d = Eigen::MatrixXd::Zero(n_max, n_max);
    for (int k = 0; k + 1 < n_max; ++k)
        chain.A_d(k, k + 1) = 1.0;
    chain.B_d = Eigen::MatrixXd::Zero(n_max, 1);
    chain.B_d(n_max - 1, 0) = 1.0;
    return chain;
}

DelaySelector build_selector(int n, int n_max) {
    if (n < 1 || n > n_max)
        throw DelayOutOfRange("selector delay " + std::to_string(n) +
                              " outside [1, " + std::to_string(n_max) + "]");
    DelaySelector sel;
    sel.n = n;
    sel.C_d = Eigen::RowVectorXd::Zero(n_max);
    // chain ordering [d_nmax; ...; d_1]: register d_n sits at index n_max - n
    sel.C_d(n_max - n) = 1.0;
    return sel;
}

SwitchingState assemble_closed_loop(const DtStateSpace& plant,
                                    const Eigen::MatrixXd& gain, int n,
                                    int n_max) {
    plant.validate();
    if (n < 2)
        throw DelayTooSmall(
            "closed loop needs n >= 2 so both u[K] and u[K+1] are resident "
            "in the chain");
    if (n > n_max)
        throw DelayOutOfRange("delay exceeds chain length");
    if (plant.D.cwiseAbs().maxCoeff() > 0.0)
        throw FeedthroughUnsupported("delay model requires D = 0");

    const int np = plant.order();
    const int p = plant.outputs();
    const int m = plant.inputs();
    if (gain.rows() != m || gain.cols() != p)
        throw DimensionMismatch("gain must be inputs x outputs");

    const int dim = np + n_max * p;
    Eigen::MatrixXd A_C = Eigen::MatrixXd::Zero(dim, dim);
    A_C.topLeftCorner(np, np) = plant.A_p;

    // Per-channel chain block: shift d_k <- d_{k-1}, feed y_j into d_1.
    for (int j = 0; j < p; ++j) {
        const int base = np + j * n_max;
        for (int k = 0; k + 1 < n_max; ++k)
            A_C(base + k, base + k + 1) = 1.0;
        A_C.block(base + n_max - 1, 0, 1, np) = plant.C.row(j);
    }

    // Plant input B_p G (y[K-n] + y[K-n+1]) taken from registers d_n, d_{n-1}.
    const Eigen::MatrixXd BG = plant.B_p * gain;  // np x p
    for (int j = 0; j < p; ++j) {
        const int base = np + j * n_max;
        A_C.col(base + n_max - n).head(np) += BG.col(j);
        A_C.col(base + n_max - (n - 1)).head(np) += BG.col(j);
    }

    SwitchingState st;
    st.n = n;
    st.A_C = std::move(A_C);

    const ComplexEig reference = open_loop_swing_mode(plant);
    TrackedMode tracked = track_swing_mode(st.A_C, reference);
    st.swing_mode.value = tracked.value;
    st.swing_mode.right_vector = tracked.vector;
    st.swing_mode.domain = EigDomain::DT;
    st.damping_ct = damping_ratio(dt_to_ct_eig(tracked.value, plant.h));
    st.tracking_alignment = tracked.alignment;
    st.tracking_ambiguous = tracked.ambiguous;
    return st;
}

SwitchedSystem enumerate_switching_states(const DtStateSpace& plant,
                                          const Eigen::MatrixXd& gain,
                                          int n_min, int n_max) {
    if (n_min < 2)
        throw DelayTooSmall("switched family needs n_min >= 2");
    if (n_min > n_max)
        throw DelayOutOfRange("n_min must not exceed n_max");

    SwitchedSystem sys;
    sys.h = plant.h;
    sys.gain = gain;
    sys.plant_C = plant.C;
    sys.reference_swing = open_loop_swing_mode(plant);
    sys.plant_order = plant.order();
    sys.n_min = n_min;
    sys.n_max = n_max;
    sys.states.reserve(static_cast<std::size_t>(n_max - n_min + 1));
    for (int n = n_min; n <= n_max; ++n)
        sys.states.push_back(assemble_closed_loop(plant, gain, n, n_max));
    return sys;
}

} // namespace wadc
