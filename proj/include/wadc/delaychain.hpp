#pragma once

#include <vector>

#include <Eigen/Dense>

#include "wadc/ssmodel.hpp"

namespace wadc {

/// Shift-register realization of an n-step measurement delay.
/// Per channel, chain state d_k[K] holds y[K-k]; stacked ordering is
/// [d_{n_max}; ...; d_2; d_1], so the shift is d_k <- d_{k-1} and the
/// newest sample enters at the last register.
struct DelayChain {
    int n_max = 0;
    Eigen::MatrixXd A_d;  ///< ones on the first superdiagonal
    Eigen::MatrixXd B_d;  ///< last standard basis vector (column)
};

/// Output selector picking the register that holds y[K-n].
struct DelaySelector {
    int n = 0;
    Eigen::RowVectorXd C_d;
};

/// Closed-loop DT transition matrix for one fixed delay, with its
/// tracked swing mode.
struct SwitchingState {
    int n = 0;
    Eigen::MatrixXd A_C;
    ComplexEig swing_mode;      ///< DT eigenpair of A_C followed from the open loop
    double damping_ct = 0.0;    ///< zeta of the CT-equivalent swing eigenvalue
    double tracking_alignment = 0.0;
    bool tracking_ambiguous = false;
};

/// The switched family {A_C,n_min .. A_C,n_max} sharing one state space.
struct SwitchedSystem {
    std::vector<SwitchingState> states;  ///< consecutive delays n_min..n_max
    double h = 0.0;
    Eigen::MatrixXd gain;                ///< feedback gain, inputs x outputs
    Eigen::MatrixXd plant_C;             ///< measurement rows of the plant
    ComplexEig reference_swing;          ///< open-loop DT plant mode
    int plant_order = 0;
    int n_min = 0;
    int n_max = 0;

    const SwitchingState& state_for(int n) const;
    int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().A_C.rows()); }
};

DelayChain build_delay_chain(int n_max, int channels);

DelaySelector build_selector(int n, int n_max);

/// Stacks [x_plant; x_chain] and closes the loop
///   u[K] = G y[K-n],  u[K+1] = G y[K-n+1],
/// both resident in the chain for n >= 2. Throws DelayTooSmall for n < 2
/// and FeedthroughUnsupported when the plant has D != 0.
SwitchingState assemble_closed_loop(const DtStateSpace& plant,
                                    const Eigen::MatrixXd& gain, int n,
                                    int n_max);

/// One SwitchingState per n in [n_min, n_max].
SwitchedSystem enumerate_switching_states(const DtStateSpace& plant,
                                          const Eigen::MatrixXd& gain,
                                          int n_min, int n_max);

} // namespace wadc
