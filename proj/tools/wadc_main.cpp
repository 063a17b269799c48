// wadc: switched-system delay analysis for wide-area damping control loops.
//
// verbs: discretize | rootlocus | assess | simulate | pdc
// Every verb reads one JSON experiment config; flags only override scalar
// fields so runs stay reproducible from the config alone. The config is
// echoed into every artifact.

#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wadc/delaychain.hpp"
#include "wadc/lmi.hpp"
#include "wadc/model_io.hpp"
#include "wadc/pdcsim.hpp"
#include "wadc/ssmodel.hpp"
#include "wadc/stability.hpp"
#include "wadc/timesim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnstable = 2;
constexpr int kExitUndetermined = 3;
constexpr int kExitConfig = 64;

struct RunConfig {
    json raw;  // echoed into artifacts
    fs::path config_dir;  // trace/model paths resolve relative to the config

    // model
    std::string model_kind;  // smib | surrogate | file
    std::string model_file;
    wadc::Complex surrogate_mode{0.007, 4.2};
    double surrogate_input_gain = 1.0;
    double surrogate_output_gain = 1.0;
    std::optional<int> target_margin;

    double h = 0.02;
    std::optional<double> gain;
    int n_min = 2;
    int n_max = 3;
    std::vector<std::uint64_t> seeds;
    int sim_length = 1200;
    double disturbance_magnitude = 1.0;
    int disturbance_step = 0;
    int controller_enable_step = 0;
    std::string format = "csv";  // csv | doc

    // tolerances
    double epsilon = 0.0;      // 0 -> library default
    double constancy = 0.05;   // radians
    double solver_tol = 1e-9;
    int max_iter = 20000;

    // pdc
    std::vector<std::string> channels{"A", "B"};
    std::string trace_file;
    int pdc_first_step = 1;
    int pdc_last_step = 0;
    bool feed_simulation = false;
    bool synthetic = false;
    wadc::LatencyModel latency;
    double disorder_probability = 0.0;
    double dropout_probability = 0.0;
    int synth_steps = 0;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename T>
T field_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + key + "' has the wrong type");
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded())
        throw ConfigError("config is not valid JSON: " + path);

    RunConfig cfg;
    cfg.raw = doc;
    cfg.config_dir = fs::path(path).parent_path();

    if (!doc.contains("model") || !doc["model"].is_object())
        throw ConfigError("config needs a 'model' object");
    const json& m = doc["model"];
    if (m.contains("builtin")) {
        cfg.model_kind = m["builtin"].get<std::string>();
        if (cfg.model_kind != "smib" && cfg.model_kind != "surrogate")
            throw ConfigError("unknown builtin model '" + cfg.model_kind + "'");
        if (cfg.model_kind == "surrogate") {
            cfg.surrogate_mode = {field_or(m, "mode_re", 0.007),
                                  field_or(m, "mode_im", 4.2)};
            cfg.surrogate_input_gain = field_or(m, "input_gain", 1.0);
            cfg.surrogate_output_gain = field_or(m, "output_gain", 1.0);
            if (m.contains("target_margin"))
                cfg.target_margin = m["target_margin"].get<int>();
        }
    } else if (m.contains("file")) {
        cfg.model_kind = "file";
        cfg.model_file = m["file"].get<std::string>();
    } else {
        throw ConfigError("'model' must carry 'builtin' or 'file'");
    }

    cfg.h = field_or(doc, "h", cfg.h);
    if (cfg.h <= 0.0)
        throw ConfigError("'h' must be positive");
    if (doc.contains("gain"))
        cfg.gain = doc["gain"].get<double>();
    cfg.n_min = field_or(doc, "n_min", cfg.n_min);
    cfg.n_max = field_or(doc, "n_max", cfg.n_max);
    if (cfg.n_min < 2 || cfg.n_min > cfg.n_max)
        throw ConfigError("need 2 <= n_min <= n_max");
    cfg.seeds = field_or(doc, "seeds", std::vector<std::uint64_t>{});
    cfg.sim_length = field_or(doc, "sim_length", cfg.sim_length);
    cfg.disturbance_magnitude =
        field_or(doc, "disturbance_magnitude", cfg.disturbance_magnitude);
    cfg.disturbance_step = field_or(doc, "disturbance_step", 0);
    cfg.controller_enable_step = field_or(doc, "controller_enable_step", 0);
    cfg.format = field_or<std::string>(doc, "format", cfg.format);
    if (cfg.format != "csv" && cfg.format != "doc")
        throw ConfigError("'format' must be csv or doc");

    if (doc.contains("tolerances")) {
        const json& t = doc["tolerances"];
        cfg.epsilon = field_or(t, "epsilon", 0.0);
        cfg.constancy = field_or(t, "constancy", 0.05);
        cfg.solver_tol = field_or(t, "solver_tol", 1e-9);
        cfg.max_iter = field_or(t, "max_iter", 20000);
    }

    if (doc.contains("pdc")) {
        const json& p = doc["pdc"];
        cfg.channels =
            field_or(p, "channels", std::vector<std::string>{"A", "B"});
        cfg.trace_file = field_or<std::string>(p, "trace_file", "");
        cfg.pdc_first_step = field_or(p, "first_step", 1);
        cfg.pdc_last_step = field_or(p, "last_step", 0);
        cfg.feed_simulation = field_or(p, "feed_simulation", false);
        if (p.contains("synthetic")) {
            const json& s = p["synthetic"];
            cfg.synthetic = true;
            cfg.synth_steps = field_or(s, "steps", 200);
            cfg.latency.pmu_mean = field_or(s, "pmu_mean", 0.03);
            cfg.latency.pmu_std = field_or(s, "pmu_std", 0.01);
            cfg.latency.net_fixed = field_or(s, "net_fixed", 0.01);
            cfg.latency.net_exp_mean = field_or(s, "net_exp_mean", 0.005);
            cfg.latency.processing = field_or(s, "processing", 0.005);
            cfg.latency.disorder_extra = field_or(s, "disorder_extra", 0.0);
            cfg.disorder_probability = field_or(s, "disorder_probability", 0.0);
            cfg.dropout_probability = field_or(s, "dropout_probability", 0.0);
        }
    }
    return cfg;
}

// --------------------------------------------------------------------------

fs::path resolve_path(const RunConfig& cfg, const std::string& p) {
    const fs::path path(p);
    if (path.is_absolute() || fs::exists(path))
        return path;
    return cfg.config_dir / path;
}

wadc::CtStateSpace resolve_model(const RunConfig& cfg) {
    if (cfg.model_kind == "smib")
        return wadc::build_smib();
    if (cfg.model_kind == "surrogate")
        return wadc::build_modal_surrogate(cfg.surrogate_mode,
                                           cfg.surrogate_input_gain,
                                           cfg.surrogate_output_gain);
    return wadc::load_model_file(resolve_path(cfg, cfg.model_file).string());
}

double resolve_gain(const RunConfig& cfg, const wadc::CtStateSpace&) {
    if (cfg.model_kind == "surrogate" && cfg.target_margin) {
        return wadc::calibrate_surrogate_gain(cfg.surrogate_mode, cfg.h,
                                              *cfg.target_margin);
    }
    if (!cfg.gain)
        throw ConfigError("config needs 'gain' (or a surrogate target_margin)");
    return *cfg.gain;
}

Eigen::MatrixXd gain_matrix(const wadc::CtStateSpace& model, double g) {
    // scalar loop gain applied uniformly; multi-channel models broadcast it
    return Eigen::MatrixXd::Constant(model.inputs(), model.outputs(), g);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string config_comment(const RunConfig& cfg) {
    return "# config: " + cfg.raw.dump() + "\n";
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

const char* verdict_name(wadc::VerdictKind k) {
    switch (k) {
    case wadc::VerdictKind::Stable: return "stable";
    case wadc::VerdictKind::Unstable: return "unstable";
    default: return "undetermined";
    }
}

const char* lmi_name(wadc::LmiOutcome o) {
    switch (o) {
    case wadc::LmiOutcome::Feasible: return "feasible";
    case wadc::LmiOutcome::NecessaryFail: return "necessary-fail";
    default: return "undetermined";
    }
}

// --------------------------------------------------------------------------

int cmd_discretize(const RunConfig& cfg, const fs::path& out_dir) {
    const wadc::CtStateSpace model = resolve_model(cfg);
    const wadc::DtStateSpace dt = wadc::discretize_trapezoidal(model, cfg.h);
    const auto eigs = wadc::eig_pairs(dt.A_p, wadc::EigDomain::DT);

    json rep;
    rep["config"] = cfg.raw;
    rep["h"] = cfg.h;
    const auto flat = [](const Eigen::MatrixXd& M) {
        json arr = json::array();
        for (Eigen::Index r = 0; r < M.rows(); ++r)
            for (Eigen::Index c = 0; c < M.cols(); ++c)
                arr.push_back(M(r, c));
        return arr;
    };
    rep["A_p"] = flat(dt.A_p);
    rep["B_p"] = flat(dt.B_p);
    json evs = json::array();
    for (const auto& e : eigs)
        evs.push_back({{"re", e.value.real()}, {"im", e.value.imag()}});
    rep["dt_eigenvalues"] = evs;

    if (cfg.format == "doc") {
        write_file(out_dir / "discretize.json", rep.dump(2));
    } else {
        std::ostringstream csv;
        csv << config_comment(cfg) << "matrix,row,col,value\n";
        for (Eigen::Index r = 0; r < dt.A_p.rows(); ++r)
            for (Eigen::Index c = 0; c < dt.A_p.cols(); ++c)
                csv << "A_p," << r << "," << c << "," << dt.A_p(r, c) << "\n";
        for (Eigen::Index r = 0; r < dt.B_p.rows(); ++r)
            for (Eigen::Index c = 0; c < dt.B_p.cols(); ++c)
                csv << "B_p," << r << "," << c << "," << dt.B_p(r, c) << "\n";
        write_file(out_dir / "discretize.csv", csv.str());
        write_file(out_dir / "discretize.json", rep.dump(2));
    }

    std::cout << "A_p =\n" << dt.A_p << "\nB_p =\n" << dt.B_p
              << "\nDT eigenvalues:";
    for (const auto& e : eigs)
        std::cout << " (" << e.value.real() << (e.value.imag() >= 0 ? "+" : "")
                  << e.value.imag() << "j)";
    std::cout << "\n";
    return kExitOk;
}

int cmd_rootlocus(const RunConfig& cfg, const fs::path& out_dir) {
    const wadc::CtStateSpace model = resolve_model(cfg);
    const double g = resolve_gain(cfg, model);
    const wadc::ModeTrack track = wadc::root_locus(
        model, gain_matrix(model, g), cfg.h, cfg.n_min, cfg.n_max);

    std::ostringstream csv;
    csv << config_comment(cfg) << "n,re_lambda,im_lambda,zeta,abs_mu\n";
    for (const auto& e : track.entries)
        csv << e.n << "," << e.lambda.real() << "," << e.lambda.imag() << ","
            << e.zeta << "," << std::abs(e.mu) << "\n";
    write_file(out_dir / "rootlocus.csv", csv.str());

    if (cfg.format == "doc") {
        json rep;
        rep["config"] = cfg.raw;
        rep["gain"] = g;
        json rows = json::array();
        for (const auto& e : track.entries)
            rows.push_back({{"n", e.n},
                            {"re_lambda", e.lambda.real()},
                            {"im_lambda", e.lambda.imag()},
                            {"zeta", e.zeta},
                            {"abs_mu", std::abs(e.mu)}});
        rep["entries"] = rows;
        write_file(out_dir / "rootlocus.json", rep.dump(2));
    }
    std::cout << "root locus over n = " << cfg.n_min << ".." << cfg.n_max
              << " written (" << track.entries.size() << " rows), gain " << g
              << "\n";
    return kExitOk;
}

int cmd_assess(const RunConfig& cfg, const fs::path& out_dir) {
    const wadc::CtStateSpace model = resolve_model(cfg);
    const double g = resolve_gain(cfg, model);
    const wadc::DtStateSpace dt = wadc::discretize_trapezoidal(model, cfg.h);
    const wadc::SwitchedSystem family = wadc::enumerate_switching_states(
        dt, gain_matrix(model, g), cfg.n_min, cfg.n_max);

    const wadc::StabilityVerdict verdict =
        wadc::simplified_verdict(family, cfg.constancy);

    std::vector<Eigen::MatrixXd> states;
    for (const auto& st : family.states)
        states.push_back(st.A_C);
    wadc::LmiOptions lmi_opts;
    lmi_opts.epsilon = cfg.epsilon;
    lmi_opts.tol = cfg.solver_tol;
    lmi_opts.max_iter = cfg.max_iter;
    const wadc::LmiVerdict common = wadc::common_p_solve(states, lmi_opts);
    const wadc::LmiVerdict multi = wadc::lmi_solve(states, lmi_opts);

    json rep;
    rep["config"] = cfg.raw;
    rep["gain"] = g;
    rep["simplified"] = {
        {"verdict", verdict_name(verdict.kind)},
        {"reason", verdict.reason},
        {"constancy_max_misalignment_rad", verdict.constancy.max_misalignment},
        {"constancy_pass", verdict.constancy.pass},
        {"h_vs_period", verdict.constancy.h_vs_period},
        {"open_loop_damping", verdict.constancy.open_loop_damping},
    };
    if (verdict.bounds) {
        rep["simplified"]["zeta_min"] = verdict.bounds->zeta_min;
        rep["simplified"]["zeta_max"] = verdict.bounds->zeta_max;
        rep["simplified"]["argmin_delay"] = verdict.bounds->argmin_delay;
        rep["simplified"]["argmax_delay"] = verdict.bounds->argmax_delay;
        rep["simplified"]["mu_abs_min"] = verdict.bounds->mu_abs_min;
        rep["simplified"]["mu_abs_max"] = verdict.bounds->mu_abs_max;
    }
    if (verdict.witness_delay)
        rep["simplified"]["witness_delay"] = *verdict.witness_delay;

    const auto lmi_json = [&](const wadc::LmiVerdict& v) {
        json o;
        o["verdict"] = lmi_name(v.outcome);
        o["iterations"] = v.iterations;
        if (v.outcome == wadc::LmiOutcome::Undetermined)
            o["residual"] = v.residual;
        if (v.witness >= 0)
            o["witness_delay"] = family.n_min + v.witness;
        if (v.certificate) {
            o["min_P_eig"] = v.certificate->min_P_eig;
            o["min_margin"] = v.certificate->margins.minCoeff();
        }
        return o;
    };
    rep["lmi_common_p"] = lmi_json(common);
    rep["lmi_multi_p"] = lmi_json(multi);
    if (multi.certificate)
        write_file(out_dir / "certificate.json",
                   wadc::save_certificate(*multi.certificate));

    write_file(out_dir / "assess.json", rep.dump(2));

    std::cout << "simplified analysis: " << verdict_name(verdict.kind);
    if (verdict.bounds)
        std::cout << "  (zeta in [" << verdict.bounds->zeta_min << ", "
                  << verdict.bounds->zeta_max << "], argmin n="
                  << verdict.bounds->argmin_delay << ")";
    if (verdict.witness_delay)
        std::cout << "  (witness n=" << *verdict.witness_delay << ")";
    std::cout << "\nswitched LMI:        common-P " << lmi_name(common.outcome)
              << ", multi-P " << lmi_name(multi.outcome) << "\n";

    const bool any_unstable =
        verdict.kind == wadc::VerdictKind::Unstable ||
        common.outcome == wadc::LmiOutcome::NecessaryFail ||
        multi.outcome == wadc::LmiOutcome::NecessaryFail;
    if (any_unstable)
        return kExitUnstable;
    const bool any_positive =
        verdict.kind == wadc::VerdictKind::Stable ||
        multi.outcome == wadc::LmiOutcome::Feasible ||
        common.outcome == wadc::LmiOutcome::Feasible;
    return any_positive ? kExitOk : kExitUndetermined;
}

struct SimArtifacts {
    json summary;
    int exit_code = kExitOk;
};

SimArtifacts run_simulation(const RunConfig& cfg, const fs::path& out_dir,
                            const std::optional<wadc::DelaySequence>& forced) {
    const wadc::CtStateSpace model = resolve_model(cfg);
    const double g = resolve_gain(cfg, model);
    const wadc::DtStateSpace dt = wadc::discretize_trapezoidal(model, cfg.h);
    const wadc::SwitchedSystem family = wadc::enumerate_switching_states(
        dt, gain_matrix(model, g), cfg.n_min, cfg.n_max);
    const wadc::SwitchedSystem open_family = wadc::enumerate_switching_states(
        dt, Eigen::MatrixXd::Zero(model.inputs(), model.outputs()), cfg.n_min,
        cfg.n_max);
    const wadc::DampingBounds bounds = wadc::damping_bounds(family);

    std::vector<std::uint64_t> seeds = cfg.seeds;
    if (forced)
        seeds = {forced->seed};
    if (seeds.empty())
        throw ConfigError("Monte-Carlo simulation needs non-empty 'seeds'");

    json runs = json::array();
    int contained = 0;
    for (std::uint64_t seed : seeds) {
        wadc::DelaySequence delays =
            forced ? *forced
                   : wadc::random_delay_sequence(seed, cfg.n_min, cfg.n_max,
                                                 cfg.sim_length);
        const Eigen::VectorXd impulse =
            wadc::fault_disturbance(family, cfg.disturbance_magnitude);
        std::vector<wadc::Disturbance> events{
            {cfg.disturbance_step, impulse}};

        const wadc::Trajectory traj =
            cfg.controller_enable_step > 0
                ? wadc::simulate_with_schedule(family, open_family,
                                               cfg.controller_enable_step,
                                               delays,
                                               Eigen::VectorXd::Zero(family.dim()),
                                               events)
                : wadc::simulate_switched(family, delays,
                                          Eigen::VectorXd::Zero(family.dim()),
                                          events);

        const std::string name = "traj_seed" + std::to_string(seed) + ".csv";
        write_file(out_dir / name, config_comment(cfg) +
                                       wadc::trajectory_csv(traj, {0, 1}));

        json run;
        run["seed"] = seed;
        run["trajectory"] = name;
        const int fit_begin = cfg.controller_enable_step;
        try {
            const wadc::DampingEstimate fit = wadc::estimate_damping_peak_fit(
                traj, 0, fit_begin, traj.steps());
            run["zeta_peak_fit"] = fit.zeta;
            const bool inside = fit.zeta >= bounds.zeta_min - 0.005 &&
                                fit.zeta <= bounds.zeta_max + 0.005;
            run["within_bounds"] = inside;
            contained += inside ? 1 : 0;
        } catch (const wadc::TooFewPeaks& e) {
            run["zeta_peak_fit"] = nullptr;
            run["note"] = e.what();
        }
        const wadc::DampingEstimate prod =
            wadc::estimate_damping_eig_product(family, delays);
        run["zeta_eig_product"] = prod.zeta;
        runs.push_back(std::move(run));
    }

    SimArtifacts art;
    art.summary["config"] = cfg.raw;
    art.summary["gain"] = g;
    art.summary["bounds"] = {{"zeta_min", bounds.zeta_min},
                             {"zeta_max", bounds.zeta_max},
                             {"argmin_delay", bounds.argmin_delay},
                             {"argmax_delay", bounds.argmax_delay}};
    art.summary["runs"] = runs;
    art.summary["contained_runs"] = contained;
    return art;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir) {
    SimArtifacts art = run_simulation(cfg, out_dir, std::nullopt);
    write_file(out_dir / "summary.json", art.summary.dump(2));
    std::cout << "simulated " << art.summary["runs"].size()
              << " delay realizations; " << art.summary["contained_runs"].dump()
              << " peak-fit estimates within the family bounds\n";
    return art.exit_code;
}

int cmd_pdc(const RunConfig& cfg, const fs::path& out_dir,
            std::optional<std::uint64_t> seed_override) {
    std::vector<wadc::PmuPacket> packets;
    std::uint64_t seed = seed_override.value_or(
        cfg.seeds.empty() ? 1 : cfg.seeds.front());
    if (!cfg.trace_file.empty()) {
        packets = wadc::load_packet_trace(resolve_path(cfg, cfg.trace_file).string());
    } else if (cfg.synthetic) {
        packets = wadc::synth_packet_stream(
            cfg.channels, cfg.synth_steps, cfg.h, cfg.latency,
            cfg.disorder_probability, cfg.dropout_probability, seed);
    } else {
        throw ConfigError("pdc needs 'trace_file' or a 'synthetic' section");
    }

    int last_step = cfg.pdc_last_step;
    if (last_step <= 0) {
        double latest = 0.0;
        for (const auto& p : packets)
            latest = std::max(latest, p.arrival_time);
        last_step = static_cast<int>(latest / cfg.h) + 2;
    }

    const wadc::EmissionLog log = wadc::run_pdc(
        packets, cfg.channels, cfg.h, cfg.pdc_first_step, last_step);
    write_file(out_dir / "emission_log.csv",
               config_comment(cfg) + wadc::emission_log_csv(log, cfg.channels));

    wadc::EmissionLog trimmed = log;
    trimmed.samples.erase(
        trimmed.samples.begin(),
        trimmed.samples.begin() +
            static_cast<std::ptrdiff_t>(log.first_valid_index()));

    json rep;
    rep["config"] = cfg.raw;
    rep["packets"] = packets.size();
    rep["discarded_packets"] = log.discarded_packets;
    rep["cold_start_steps"] = log.first_valid_index();

    int clipped = 0;
    std::optional<wadc::DelaySequence> trace;
    if (!trimmed.samples.empty()) {
        wadc::DelaySequence seq = wadc::effective_delay_trace(trimmed);
        rep["delay_min"] = seq.n_min;
        rep["delay_max"] = seq.n_max;
        json entries = json::array();
        for (int n : seq.entries)
            entries.push_back(n);
        rep["effective_delays"] = entries;
        if (cfg.feed_simulation) {
            clipped = wadc::clip_delay_sequence(seq, cfg.n_min, cfg.n_max);
            seq.seed = seed;
            trace = seq;
        }
        rep["clipped_entries"] = clipped;
    }
    write_file(out_dir / "pdc.json", rep.dump(2));

    std::cout << "pdc: " << packets.size() << " packets, "
              << log.discarded_packets << " discarded, emissions "
              << log.samples.size() << " (cold start "
              << log.first_valid_index() << " steps)\n";

    if (trace) {
        SimArtifacts art = run_simulation(cfg, out_dir, trace);
        art.summary["pdc_clipped_entries"] = clipped;
        write_file(out_dir / "summary.json", art.summary.dump(2));
        std::cout << "fed the derived delay trace into the switched simulation ("
                  << clipped << " entries clipped into [" << cfg.n_min << ", "
                  << cfg.n_max << "])\n";
        return art.exit_code;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"switched-system delay analysis for wide-area damping "
                 "control loops"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> format_override;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_override, "override the config seeds");
        sub->add_option("--format", format_override, "csv | doc");
    };

    CLI::App* discretize =
        app.add_subcommand("discretize", "discrete plant and its eigenvalues");
    CLI::App* rootlocus = app.add_subcommand(
        "rootlocus", "swing mode trace over the fixed-delay family");
    CLI::App* assess = app.add_subcommand(
        "assess", "simplified eigenvalue analysis and switched-Lyapunov LMI");
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte-Carlo switched simulation with damping estimates");
    CLI::App* pdc = app.add_subcommand(
        "pdc", "packet-level PDC pipeline and the induced delay trace");
    for (CLI::App* sub : {discretize, rootlocus, assess, simulate, pdc})
        add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (seed_override)
            cfg.seeds = {*seed_override};
        if (format_override) {
            if (*format_override != "csv" && *format_override != "doc")
                throw ConfigError("--format must be csv or doc");
            cfg.format = *format_override;
        }
        const fs::path dir = prepare_out_dir(out_dir);
        write_file(dir / "config.echo.json", cfg.raw.dump(2));

        if (discretize->parsed())
            return cmd_discretize(cfg, dir);
        if (rootlocus->parsed())
            return cmd_rootlocus(cfg, dir);
        if (assess->parsed())
            return cmd_assess(cfg, dir);
        if (simulate->parsed())
            return cmd_simulate(cfg, dir);
        if (pdc->parsed())
            return cmd_pdc(cfg, dir, seed_override);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const wadc::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 70;
    }
}
