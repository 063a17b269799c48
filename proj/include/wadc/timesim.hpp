#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "wadc/delay_sequence.hpp"
#include "wadc/delaychain.hpp"

namespace wadc {

/// State impulse injected at one step.
struct Disturbance {
    int step = 0;
    Eigen::VectorXd state_impulse;
};

/// Switched closed-loop run. Row K of `states` is the full stacked state at
/// step K (after any disturbance at K); `outputs` holds the plant
/// measurements y[K] = C x_plant[K].
struct Trajectory {
    double h = 0.0;
    Eigen::MatrixXd states;
    Eigen::MatrixXd outputs;
    std::vector<int> delays;
    std::vector<Disturbance> events;

    int steps() const { return static_cast<int>(states.rows()); }
};

enum class DampingMethod { EigProduct, PeakFit };

struct DampingEstimate {
    double zeta = 0.0;
    DampingMethod method = DampingMethod::EigProduct;
    int window_begin = 0;
    int window_end = 0;
};

/// Uniform i.i.d. delays over [n_min, n_max], reproducible from the seed.
DelaySequence random_delay_sequence(std::uint64_t seed, int n_min, int n_max,
                                    int length);

/// Propagates x[K+1] = A_C(delays[K]) x[K] with disturbance impulses added
/// to the state at their event steps. The plant's C rows must be recoverable
/// from the family; outputs are the measured plant channels.
Trajectory simulate_switched(const SwitchedSystem& system,
                             const DelaySequence& delays,
                             const Eigen::VectorXd& x0,
                             const std::vector<Disturbance>& events = {});

/// Same, but steps before enable_step use the `disabled` family (typically
/// the gain-zero closed loop) and later steps the active one.
Trajectory simulate_with_schedule(const SwitchedSystem& active,
                                  const SwitchedSystem& disabled,
                                  int enable_step, const DelaySequence& delays,
                                  const Eigen::VectorXd& x0,
                                  const std::vector<Disturbance>& events = {});

/// State impulse along the real part of the swing-mode eigenvector, scaled
/// by magnitude: excites the tracked mode the way the study's fault does.
Eigen::VectorXd fault_disturbance(const SwitchedSystem& system,
                                  double magnitude);

/// Effective damping from the eigenvalue product: d_e = |prod mu|^(1/len)
/// with the sequence-mean mode angle, converted through the inverse
/// trapezoidal map. Exact for constant-delay sequences.
DampingEstimate estimate_damping_eig_product(const SwitchedSystem& system,
                                             const DelaySequence& delays);

/// Ringdown fit: successive |peak| magnitudes of one output channel are fit
/// as log|peak| vs time (decay), peak spacing gives the frequency. Throws
/// TooFewPeaks when the window holds fewer than four usable peaks.
DampingEstimate estimate_damping_peak_fit(const Trajectory& traj, int channel,
                                          int window_begin, int window_end);

/// Trajectory CSV: step, time, delay_n, outputs..., then selected states.
std::string trajectory_csv(const Trajectory& traj,
                           const std::vector<int>& state_columns = {});

} // namespace wadc
