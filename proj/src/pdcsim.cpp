#include "wadc/pdcsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "wadc/rng.hpp"

namespace wadc {

PdcBuffer::PdcBuffer(std::vector<std::string> channels, double h)
    : channels_(std::move(channels)), h_(h) {
    if (channels_.empty())
        throw InvalidDimension("PDC needs at least one channel");
    if (h_ <= 0.0)
        throw InvalidRange("PDC step must be positive");
    for (const auto& c : channels_) {
        store_[c];
        high_water_[c] = -1;
    }
}

bool PdcBuffer::ingest(const PmuPacket& packet) {
    auto hw = high_water_.find(packet.channel);
    if (hw == high_water_.end())
        throw InvalidDimension("packet on unknown channel '" + packet.channel +
                               "'");
    if (packet.stamp_index <= hw->second) {
        ++discarded_;  // disorder or duplicate: only the latest sample is kept
        return false;
    }
    store_[packet.channel][packet.stamp_index] = {packet.value,
                                                  packet.arrival_time};
    hw->second = packet.stamp_index;
    return true;
}

int PdcBuffer::latest_complete_stamp(int step) const {
    const double cutoff = static_cast<double>(step) * h_;
    int ceiling = std::numeric_limits<int>::max();
    for (const auto& c : channels_)
        ceiling = std::min(ceiling, high_water_.at(c));
    for (int s = ceiling; s >= 0; --s) {
        bool complete = true;
        for (const auto& c : channels_) {
            const auto& m = store_.at(c);
            const auto it = m.find(s);
            if (it == m.end() || it->second.arrival >= cutoff) {
                complete = false;
                break;
            }
        }
        if (complete)
            return s;
    }
    return -1;
}

Eigen::VectorXd PdcBuffer::values_at(int stamp) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(channels_.size()));
    for (std::size_t i = 0; i < channels_.size(); ++i)
        v[static_cast<Eigen::Index>(i)] =
            store_.at(channels_[i]).at(stamp).value;
    return v;
}

bool pdc_ingest(PdcBuffer& buffer, const PmuPacket& packet) {
    return buffer.ingest(packet);
}

CompositeSample pdc_emit(const PdcBuffer& buffer, int step,
                         const CompositeSample& previous) {
    if (previous.values.size() != 0 && step <= previous.emitted_at)
        throw InvalidRange("emission steps must increase");

    const int s = buffer.latest_complete_stamp(step);
    CompositeSample out;
    out.emitted_at = step;
    if (s >= 0 && s > previous.source_stamp) {
        out.source_stamp = s;
        out.values = buffer.values_at(s);
        out.held = false;
        return out;
    }
    out.source_stamp = previous.source_stamp;
    out.held = true;
    if (previous.source_stamp >= 0) {
        out.values = previous.values;
    } else {
        // cold start: no complete set has ever arrived
        out.values = Eigen::VectorXd::Zero(
            static_cast<Eigen::Index>(buffer.channels().size()));
    }
    return out;
}

std::size_t EmissionLog::first_valid_index() const {
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].source_stamp >= 0)
            return i;
    return samples.size();
}

EmissionLog run_pdc(std::vector<PmuPacket> packets,
                    const std::vector<std::string>& channels, double h,
                    int first_step, int last_step) {
    if (first_step > last_step)
        throw InvalidRange("empty PDC step range");
    std::stable_sort(packets.begin(), packets.end(),
                     [](const PmuPacket& a, const PmuPacket& b) {
                         return a.arrival_time < b.arrival_time;
                     });

    PdcBuffer buffer(channels, h);
    EmissionLog log;
    CompositeSample previous;  // cold sentinel
    previous.emitted_at = first_step - 1;

    std::size_t next_packet = 0;
    for (int step = first_step; step <= last_step; ++step) {
        const double now = static_cast<double>(step) * h;
        while (next_packet < packets.size() &&
               packets[next_packet].arrival_time < now) {
            buffer.ingest(packets[next_packet]);
            ++next_packet;
        }
        previous = pdc_emit(buffer, step, previous);
        log.samples.push_back(previous);
    }
    log.discarded_packets = buffer.discarded();
    return log;
}

DelaySequence effective_delay_trace(const EmissionLog& log) {
    if (log.samples.empty())
        throw ColdStartGap("empty emission log");
    DelaySequence seq;
    seq.entries.reserve(log.samples.size());
    for (const auto& s : log.samples) {
        if (s.source_stamp < 0)
            throw ColdStartGap("emission log contains cold-start samples; "
                               "trim to first_valid_index() first");
        seq.entries.push_back(s.emitted_at - s.source_stamp);
    }
    seq.n_min = *std::min_element(seq.entries.begin(), seq.entries.end());
    seq.n_max = *std::max_element(seq.entries.begin(), seq.entries.end());
    return seq;
}

int clip_delay_sequence(DelaySequence& seq, int n_min, int n_max) {
    if (n_min > n_max)
        throw InvalidRange("clip range is empty");
    int clipped = 0;
    for (int& n : seq.entries) {
        if (n < n_min) {
            n = n_min;
            ++clipped;
        } else if (n > n_max) {
            n = n_max;
            ++clipped;
        }
    }
    seq.n_min = n_min;
    seq.n_max = n_max;
    return clipped;
}

std::vector<PmuPacket> synth_packet_stream(
    const std::vector<std::string>& channels, int steps, double h,
    const LatencyModel& latency, double disorder_probability,
    double dropout_probability, std::uint64_t seed) {
    if (disorder_probability < 0.0 || disorder_probability > 1.0 ||
        dropout_probability < 0.0 || dropout_probability > 1.0)
        throw InvalidProbability("probabilities must lie in [0, 1]");
    if (steps < 1)
        throw InvalidRange("need at least one sampling step");
    if (latency.pmu_std < 0.0 || latency.net_exp_mean < 0.0)
        throw InvalidRange("latency spreads must be non-negative");

    Rng rng(seed);
    std::vector<PmuPacket> packets;
    packets.reserve(channels.size() * static_cast<std::size_t>(steps));
    for (std::size_t ci = 0; ci < channels.size(); ++ci) {
        for (int stamp = 1; stamp <= steps; ++stamp) {
            // draw in fixed order so the stream is reproducible even for
            // dropped packets
            const double tau_p =
                std::max(0.0, rng.normal(latency.pmu_mean, latency.pmu_std));
            const double tau_c =
                latency.net_fixed + (latency.net_exp_mean > 0.0
                                         ? rng.exponential(latency.net_exp_mean)
                                         : 0.0);
            const double u_drop = rng.uniform01();
            const double u_disorder = rng.uniform01();
            if (u_drop < dropout_probability)
                continue;

            PmuPacket p;
            p.channel = channels[ci];
            p.stamp_index = stamp;
            p.value = std::sin(static_cast<double>(stamp) * h +
                               static_cast<double>(ci));
            p.arrival_time = static_cast<double>(stamp) * h + tau_p + tau_c +
                             latency.processing;
            if (u_disorder < disorder_probability)
                p.arrival_time += latency.disorder_extra > 0.0
                                      ? latency.disorder_extra
                                      : 2.0 * h;
            packets.push_back(std::move(p));
        }
    }
    return packets;
}

std::vector<PmuPacket> load_packet_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open packet trace: " + path);
    nlohmann::json doc =
        nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_array())
        throw ParseError("packet trace must be a JSON array");
    std::vector<PmuPacket> packets;
    for (const auto& e : doc) {
        PmuPacket p;
        if (!e.contains("channel") || !e.contains("stamp_index") ||
            !e.contains("value") || !e.contains("arrival_time"))
            throw ParseError("each packet needs channel, stamp_index, value, "
                             "arrival_time");
        p.channel = e["channel"].get<std::string>();
        p.stamp_index = e["stamp_index"].get<int>();
        p.value = e["value"].get<double>();
        p.arrival_time = e["arrival_time"].get<double>();
        if (p.arrival_time < 0.0)
            throw ParseError("arrival_time must be non-negative");
        packets.push_back(std::move(p));
    }
    return packets;
}

std::string packet_trace_to_json(const std::vector<PmuPacket>& packets) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : packets) {
        arr.push_back({{"channel", p.channel},
                       {"stamp_index", p.stamp_index},
                       {"value", p.value},
                       {"arrival_time", p.arrival_time}});
    }
    return arr.dump(2);
}

std::string emission_log_csv(const EmissionLog& log,
                             const std::vector<std::string>& channels) {
    std::ostringstream out;
    out << "step,source_stamp,held,effective_delay";
    for (const auto& c : channels)
        out << "," << c;
    out << "\n";
    for (const auto& s : log.samples) {
        const int delay = s.source_stamp >= 0 ? s.emitted_at - s.source_stamp : -1;
        out << s.emitted_at << "," << s.source_stamp << ","
            << (s.held ? 1 : 0) << "," << delay;
        for (Eigen::Index i = 0; i < s.values.size(); ++i)
            out << "," << s.values[i];
        out << "\n";
    }
    return out.str();
}

} // namespace wadc
