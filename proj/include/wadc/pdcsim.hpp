#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wadc/delay_sequence.hpp"
#include "wadc/errors.hpp"

namespace wadc {

/// One time-stamped PMU measurement and the moment it reaches the PDC.
struct PmuPacket {
    std::string channel;
    int stamp_index = 0;      ///< sample taken at t[stamp_index]
    double value = 0.0;
    double arrival_time = 0.0;  ///< seconds, continuous
};

/// Synchronized output of the PDC at one sampling instant. On a hold the
/// previous values are re-emitted and source_stamp keeps its old value;
/// before any complete set has arrived, source_stamp is -1.
struct CompositeSample {
    int emitted_at = 0;
    int source_stamp = -1;
    Eigen::VectorXd values;
    bool held = true;
};

/// Per-channel time-aligned buffer. Disordered packets (stamp at or below
/// the channel high-water mark) are discarded on arrival, so only the latest
/// sample of each channel survives.
class PdcBuffer {
public:
    PdcBuffer(std::vector<std::string> channels, double h);

    /// Stores the packet iff its stamp exceeds the channel high-water mark.
    /// Returns false (and counts the discard) otherwise.
    bool ingest(const PmuPacket& packet);

    /// Largest stamp for which every channel holds a value that arrived
    /// strictly before t[step]; -1 when there is none.
    int latest_complete_stamp(int step) const;

    Eigen::VectorXd values_at(int stamp) const;

    const std::vector<std::string>& channels() const { return channels_; }
    double step_seconds() const { return h_; }
    int discarded() const { return discarded_; }

private:
    struct Entry {
        double value = 0.0;
        double arrival = 0.0;
    };
    std::vector<std::string> channels_;
    double h_;
    std::map<std::string, std::map<int, Entry>> store_;
    std::map<std::string, int> high_water_;
    int discarded_ = 0;
};

/// Free-function form of PdcBuffer::ingest.
bool pdc_ingest(PdcBuffer& buffer, const PmuPacket& packet);

/// ZOH emission at sampling instant `step`: a new composite sample when a
/// complete synchronous set newer than `previous` is available, otherwise the
/// previous sample held. With nothing ever received, emits the zero-valued
/// cold-start sample (source_stamp -1).
CompositeSample pdc_emit(const PdcBuffer& buffer, int step,
                         const CompositeSample& previous);

struct EmissionLog {
    std::vector<CompositeSample> samples;
    int discarded_packets = 0;

    /// Index of the first non-cold sample (size() when none).
    std::size_t first_valid_index() const;
};

/// Runs the PDC over steps [first_step, last_step]: packets are ingested in
/// arrival order as simulated time passes, one composite sample is emitted
/// per step.
EmissionLog run_pdc(std::vector<PmuPacket> packets,
                    const std::vector<std::string>& channels, double h,
                    int first_step, int last_step);

/// Effective delay per emission: emitted_at - source_stamp. Holds therefore
/// show up as monotonically growing delay. Throws ColdStartGap when the log
/// contains cold-start samples.
DelaySequence effective_delay_trace(const EmissionLog& log);

/// Clamps a delay trace into [n_min, n_max] for use against a switched
/// family of that range; returns the number of clipped entries.
int clip_delay_sequence(DelaySequence& seq, int n_min, int n_max);

/// Stochastic latency decomposition: PMU processing (normal, truncated at
/// zero), network (fixed plus exponential tail), WADC operational (constant).
struct LatencyModel {
    double pmu_mean = 0.0;
    double pmu_std = 0.0;
    double net_fixed = 0.0;
    double net_exp_mean = 0.0;
    double processing = 0.0;

    /// Extra latency added to a disordered packet, seconds.
    double disorder_extra = 0.0;
};

/// Synthetic per-channel packet streams: arrival = stamp*h + draws from the
/// latency model; a disordered packet is delayed by disorder_extra so a
/// successor overtakes it; a dropped packet never arrives. Deterministic for
/// a fixed seed.
std::vector<PmuPacket> synth_packet_stream(
    const std::vector<std::string>& channels, int steps, double h,
    const LatencyModel& latency, double disorder_probability,
    double dropout_probability, std::uint64_t seed);

/// Packet trace file: JSON list of {channel, stamp_index, value, arrival_time}.
std::vector<PmuPacket> load_packet_trace(const std::string& path);
std::string packet_trace_to_json(const std::vector<PmuPacket>& packets);

/// Emission log CSV: step, source_stamp, held, effective_delay, values...
std::string emission_log_csv(const EmissionLog& log,
                             const std::vector<std::string>& channels);

} // namespace wadc
