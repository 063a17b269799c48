#include "wadc/timesim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <sstream>

#include "wadc/rng.hpp"
#include "wadc/stability.hpp"

namespace wadc {

DelaySequence random_delay_sequence(std::uint64_t seed, int n_min, int n_max,
                                    int length) {
    if (n_min < 2 || n_min > n_max)
        throw InvalidRange("need 2 <= n_min <= n_max");
    if (length < 1)
        throw InvalidRange("sequence length must be positive");
    Rng rng(seed);
    DelaySequence seq;
    seq.n_min = n_min;
    seq.n_max = n_max;
    seq.seed = seed;
    seq.entries.reserve(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i)
        seq.entries.push_back(rng.uniform_int(n_min, n_max));
    return seq;
}

namespace {

std::map<int, Eigen::VectorXd> collect_events(
    const std::vector<Disturbance>& events, int dim) {
    std::map<int, Eigen::VectorXd> by_step;
    for (const auto& ev : events) {
        if (ev.step < 0)
            throw InvalidRange("disturbance step must be non-negative");
        if (ev.state_impulse.size() != dim)
            throw DimensionMismatch("disturbance dimension mismatch");
        auto [it, inserted] = by_step.try_emplace(ev.step, ev.state_impulse);
        if (!inserted)
            it->second += ev.state_impulse;
    }
    return by_step;
}

Trajectory run(const SwitchedSystem& active, const SwitchedSystem* disabled,
               int enable_step, const DelaySequence& delays,
               const Eigen::VectorXd& x0,
               const std::vector<Disturbance>& events) {
    const int dim = active.dim();
    if (x0.size() != dim)
        throw DimensionMismatch("x0 dimension does not match the family");
    if (disabled && disabled->dim() != dim)
        throw DimensionMismatch("controller-off family dimension mismatch");

    const int T = static_cast<int>(delays.entries.size());
    const int np = active.plant_order;
    const auto by_step = collect_events(events, dim);

    Trajectory traj;
    traj.h = active.h;
    traj.delays = delays.entries;
    traj.events = events;
    traj.states.resize(T + 1, dim);
    traj.outputs.resize(T + 1, active.plant_C.rows());

    Eigen::VectorXd x = x0;
    for (int K = 0; K <= T; ++K) {
        if (auto it = by_step.find(K); it != by_step.end())
            x += it->second;
        traj.states.row(K) = x.transpose();
        traj.outputs.row(K) = (active.plant_C * x.head(np)).transpose();
        if (K < T) {
            const int n = delays.entries[static_cast<std::size_t>(K)];
            const SwitchedSystem& fam =
                (disabled && K < enable_step) ? *disabled : active;
            x = fam.state_for(n).A_C * x;
        }
    }
    return traj;
}

} // namespace

Trajectory simulate_switched(const SwitchedSystem& system,
                             const DelaySequence& delays,
                             const Eigen::VectorXd& x0,
                             const std::vector<Disturbance>& events) {
    return run(system, nullptr, 0, delays, x0, events);
}

Trajectory simulate_with_schedule(const SwitchedSystem& active,
                                  const SwitchedSystem& disabled,
                                  int enable_step, const DelaySequence& delays,
                                  const Eigen::VectorXd& x0,
                                  const std::vector<Disturbance>& events) {
    return run(active, &disabled, enable_step, delays, x0, events);
}

Eigen::VectorXd fault_disturbance(const SwitchedSystem& system,
                                  double magnitude) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(system.dim());
    dir.head(system.reference_swing.right_vector.size()) =
        system.reference_swing.right_vector.real();
    const double norm = dir.norm();
    if (norm == 0.0 || magnitude == 0.0)
        return Eigen::VectorXd::Zero(system.dim());
    return (magnitude / norm) * dir;
}

DampingEstimate estimate_damping_eig_product(const SwitchedSystem& system,
                                             const DelaySequence& delays) {
    if (delays.entries.empty())
        throw InvalidRange("empty delay sequence");
    double log_sum = 0.0;
    double ang_sum = 0.0;
    for (int n : delays.entries) {
        const Complex mu = system.state_for(n).swing_mode.value;
        log_sum += std::log(std::abs(mu));
        ang_sum += std::arg(mu);
    }
    const double len = static_cast<double>(delays.entries.size());
    const Complex mu_eff = std::polar(std::exp(log_sum / len), ang_sum / len);

    DampingEstimate est;
    est.method = DampingMethod::EigProduct;
    est.window_begin = 0;
    est.window_end = static_cast<int>(delays.entries.size());
    est.zeta = damping_ratio(dt_to_ct_eig(mu_eff, system.h));
    return est;
}

DampingEstimate estimate_damping_peak_fit(const Trajectory& traj, int channel,
                                          int window_begin, int window_end) {
    if (channel < 0 || channel >= traj.outputs.cols())
        throw DimensionMismatch("output channel out of range");
    if (window_begin < 0 || window_end > traj.steps() ||
        window_end - window_begin < 8)
        throw InvalidRange("fit window out of range or too short");

    const auto y = [&](int k) { return traj.outputs(k, channel); };
    const double h = traj.h;

    // frequency guess from sign changes, to size the peak-separation guard
    int crossings = 0;
    int prev_sign = 0;
    for (int k = window_begin; k < window_end; ++k) {
        const int s = (y(k) > 0.0) ? 1 : (y(k) < 0.0 ? -1 : 0);
        if (s != 0) {
            if (prev_sign != 0 && s != prev_sign)
                ++crossings;
            prev_sign = s;
        }
    }
    if (crossings < 2)
        throw TooFewPeaks("window holds no oscillation to fit");
    const double omega_hat =
        std::numbers::pi * crossings /
        (static_cast<double>(window_end - 1 - window_begin) * h);
    const int guard = std::max(
        1, static_cast<int>(std::lround(std::numbers::pi / (2.0 * omega_hat * h))));

    double amax = 0.0;
    for (int k = window_begin; k < window_end; ++k)
        amax = std::max(amax, std::abs(y(k)));
    if (amax <= 0.0)
        throw TooFewPeaks("window is identically zero");

    std::vector<int> peaks;
    for (int k = window_begin + 1; k + 1 < window_end; ++k) {
        const double a = std::abs(y(k));
        if (a <= 1e-12 * amax)
            continue;
        if (a > std::abs(y(k - 1)) && a >= std::abs(y(k + 1))) {
            if (!peaks.empty() && k - peaks.back() < guard) {
                if (a > std::abs(y(peaks.back())))
                    peaks.back() = k;  // same half-cycle: keep the larger
            } else {
                peaks.push_back(k);
            }
        }
    }
    if (peaks.size() < 4)
        throw TooFewPeaks("need at least four oscillation peaks in the window");

    // least squares on log|peak| vs time
    const double n = static_cast<double>(peaks.size());
    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    for (int k : peaks) {
        const double t = static_cast<double>(k) * h;
        const double l = std::log(std::abs(y(k)));
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
    }
    const double slope = (n * stl - st * sl) / (n * stt - st * st);
    const double sigma = -slope;  // positive for decay

    double spacing = 0.0;
    for (std::size_t i = 1; i < peaks.size(); ++i)
        spacing += static_cast<double>(peaks[i] - peaks[i - 1]) * h;
    spacing /= static_cast<double>(peaks.size() - 1);
    const double omega = std::numbers::pi / spacing;  // |peaks| repeat twice per period

    DampingEstimate est;
    est.method = DampingMethod::PeakFit;
    est.window_begin = window_begin;
    est.window_end = window_end;
    est.zeta = sigma / std::sqrt(sigma * sigma + omega * omega);
    return est;
}

std::string trajectory_csv(const Trajectory& traj,
                           const std::vector<int>& state_columns) {
    std::ostringstream out;
    out << "step,time,delay_n";
    for (Eigen::Index j = 0; j < traj.outputs.cols(); ++j)
        out << ",y" << j;
    for (int c : state_columns)
        out << ",x" << c;
    out << "\n";
    for (int k = 0; k < traj.steps(); ++k) {
        out << k << "," << static_cast<double>(k) * traj.h << ",";
        if (k < static_cast<int>(traj.delays.size()))
            out << traj.delays[static_cast<std::size_t>(k)];
        for (Eigen::Index j = 0; j < traj.outputs.cols(); ++j)
            out << "," << traj.outputs(k, j);
        for (int c : state_columns)
            out << "," << traj.states(k, c);
        out << "\n";
    }
    return out.str();
}

} // namespace wadc
