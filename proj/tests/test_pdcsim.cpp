#include <doctest.h>

#include <cmath>
#include <set>

#include "wadc/pdcsim.hpp"

using namespace wadc;

namespace {

const std::vector<std::string> kAB{"A", "B"};

std::vector<PmuPacket> golden_pdc_trace() {
    return load_packet_trace(std::string(WADC_DATA_DIR) + "/golden_pdc_trace.json");
}

} // namespace

TEST_CASE("disordered and duplicate packets are discarded") {
    PdcBuffer buf(kAB, 1.0);

    CHECK(buf.ingest({"B", 3, 0.23, 4.7}));   // first packet on the channel
    CHECK_FALSE(buf.ingest({"B", 2, 0.22, 4.9}));  // late B2 after B3
    CHECK_FALSE(buf.ingest({"B", 3, 0.99, 5.0}));  // duplicate stamp
    CHECK(buf.discarded() == 2);

    CHECK_THROWS_AS(buf.ingest({"C", 1, 0.0, 1.0}), InvalidDimension);
}

TEST_CASE("emission follows the two-PMU scenario exactly") {
    const EmissionLog log = run_pdc(golden_pdc_trace(), kAB, 1.0, 1, 8);
    REQUIRE(log.samples.size() == 8);

    // cold start until the first complete set
    for (int k = 0; k < 3; ++k) {
        CHECK(log.samples[k].held);
        CHECK(log.samples[k].source_stamp == -1);
        CHECK(log.samples[k].values.norm() == 0.0);
    }

    // normal flow: stamp-1 set emitted at t[4]
    CHECK(log.samples[3].source_stamp == 1);
    CHECK_FALSE(log.samples[3].held);
    CHECK(log.samples[3].values[0] == 0.11);
    CHECK(log.samples[3].values[1] == 0.21);

    // disorder: B2 was discarded, so t[5] holds the old output
    CHECK(log.samples[4].held);
    CHECK(log.samples[4].source_stamp == 1);
    CHECK(log.samples[4].values[0] == 0.11);

    // the stamp-3 set completes once A3 arrives, emitted at t[6]
    CHECK(log.samples[5].source_stamp == 3);
    CHECK_FALSE(log.samples[5].held);
    CHECK(log.samples[5].values[1] == 0.23);

    // dropout: B4 never arrives, output held at the stamp-3 composite
    CHECK(log.samples[6].held);
    CHECK(log.samples[6].source_stamp == 3);

    // recovery at t[8] with the stamp-5 set
    CHECK(log.samples[7].source_stamp == 5);
    CHECK_FALSE(log.samples[7].held);

    CHECK(log.discarded_packets == 1);
    CHECK(log.first_valid_index() == 3);
}

TEST_CASE("effective delay trace grows on holds") {
    EmissionLog log = run_pdc(golden_pdc_trace(), kAB, 1.0, 1, 8);
    log.samples.erase(log.samples.begin(),
                      log.samples.begin() +
                          static_cast<std::ptrdiff_t>(log.first_valid_index()));
    const DelaySequence seq = effective_delay_trace(log);
    const std::vector<int> expected{3, 4, 3, 4, 3};
    CHECK(seq.entries == expected);
    CHECK(seq.n_min == 3);
    CHECK(seq.n_max == 4);

    const EmissionLog cold = run_pdc(golden_pdc_trace(), kAB, 1.0, 1, 8);
    CHECK_THROWS_AS(effective_delay_trace(cold), ColdStartGap);
}

TEST_CASE("packets arriving exactly at a sampling instant wait one step") {
    std::vector<PmuPacket> packets{{"A", 1, 1.0, 3.0}, {"B", 1, 2.0, 3.0}};
    const EmissionLog log = run_pdc(packets, kAB, 1.0, 1, 5);
    CHECK(log.samples[2].source_stamp == -1);  // not usable at t[3]
    CHECK(log.samples[3].source_stamp == 1);   // usable at t[4]
}

TEST_CASE("constant latency yields a constant delay trace") {
    LatencyModel fixed;
    fixed.processing = 0.0;

    for (double latency_steps : {2.5, 2.0}) {
        std::vector<PmuPacket> packets;
        const double h = 0.02;
        for (int stamp = 1; stamp <= 40; ++stamp)
            for (const auto& c : kAB)
                packets.push_back(
                    {c, stamp, 1.0, (stamp + latency_steps) * h});
        EmissionLog log = run_pdc(packets, kAB, h, 1, 40);
        log.samples.erase(log.samples.begin(),
                          log.samples.begin() +
                              static_cast<std::ptrdiff_t>(log.first_valid_index()));
        const DelaySequence seq = effective_delay_trace(log);
        // 2.5h rounds up to 3; an exact multiple also waits the extra step
        // because arrival at t[K] is usable only at t[K+1]
        CHECK(seq.n_min == 3);
        for (std::size_t i = 0; i + 1 < seq.entries.size(); ++i)
            CHECK(seq.entries[i] == 3);
    }
}

TEST_CASE("synthetic streams are deterministic and honor dropout") {
    LatencyModel lat;
    lat.pmu_mean = 0.03;
    lat.pmu_std = 0.01;
    lat.net_fixed = 0.01;
    lat.net_exp_mean = 0.004;
    lat.processing = 0.005;

    const auto a = synth_packet_stream(kAB, 50, 0.02, lat, 0.1, 0.05, 77);
    const auto b = synth_packet_stream(kAB, 50, 0.02, lat, 0.1, 0.05, 77);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].arrival_time == b[i].arrival_time);
        CHECK(a[i].stamp_index == b[i].stamp_index);
    }

    const auto none = synth_packet_stream(kAB, 50, 0.02, lat, 0.0, 1.0, 77);
    CHECK(none.empty());

    CHECK_THROWS_AS(synth_packet_stream(kAB, 50, 0.02, lat, -0.1, 0.0, 1),
                    InvalidProbability);
    CHECK_THROWS_AS(synth_packet_stream(kAB, 50, 0.02, lat, 0.0, 1.5, 1),
                    InvalidProbability);

    // arrivals never precede generation
    for (const auto& p : a)
        CHECK(p.arrival_time >= p.stamp_index * 0.02);
}

TEST_CASE("source stamps never decrease and values stay synchronous") {
    LatencyModel lat;
    lat.pmu_mean = 0.04;
    lat.pmu_std = 0.02;
    lat.net_fixed = 0.01;
    lat.net_exp_mean = 0.01;
    const auto packets = synth_packet_stream(kAB, 200, 0.02, lat, 0.05, 0.02, 5);
    const EmissionLog log = run_pdc(packets, kAB, 0.02, 1, 210);

    int prev = -1;
    for (const auto& s : log.samples) {
        CHECK(s.source_stamp >= prev);
        prev = s.source_stamp;
    }
}

TEST_CASE("delay clipping saturates into the family range") {
    DelaySequence seq;
    seq.entries = {2, 5, 9, 14, 25};
    seq.n_min = 2;
    seq.n_max = 25;
    const int clipped = clip_delay_sequence(seq, 4, 18);
    CHECK(clipped == 2);
    CHECK(seq.entries.front() == 4);
    CHECK(seq.entries.back() == 18);
    CHECK_THROWS_AS(clip_delay_sequence(seq, 8, 5), InvalidRange);
}

TEST_CASE("packet trace roundtrip and emission CSV") {
    const auto packets = golden_pdc_trace();
    const std::string json = packet_trace_to_json(packets);
    const auto reloaded = load_packet_trace([&] {
        const std::string tmp = "/tmp/wadc_trace_roundtrip.json";
        std::FILE* f = std::fopen(tmp.c_str(), "w");
        std::fwrite(json.data(), 1, json.size(), f);
        std::fclose(f);
        return tmp;
    }());
    REQUIRE(reloaded.size() == packets.size());
    for (std::size_t i = 0; i < packets.size(); ++i) {
        CHECK(reloaded[i].channel == packets[i].channel);
        CHECK(reloaded[i].arrival_time == packets[i].arrival_time);
    }

    const EmissionLog log = run_pdc(packets, kAB, 1.0, 1, 8);
    const std::string csv = emission_log_csv(log, kAB);
    CHECK(csv.rfind("step,source_stamp,held,effective_delay,A,B", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}
