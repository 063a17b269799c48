#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wadc/delaychain.hpp"
#include "wadc/lmi.hpp"
#include "wadc/model_io.hpp"
#include "wadc/pdcsim.hpp"
#include "wadc/ssmodel.hpp"
#include "wadc/stability.hpp"
#include "wadc/timesim.hpp"

namespace py = pybind11;
using namespace wadc;

PYBIND11_MODULE(_core, m) {
    m.doc() = "switched-system delay analysis for wide-area damping control";

    py::register_exception<Error>(m, "WadcError");

    // ---- state-space models ------------------------------------------------
    py::class_<CtStateSpace>(m, "CtStateSpace")
        .def(py::init<>())
        .def_readwrite("A", &CtStateSpace::A)
        .def_readwrite("B", &CtStateSpace::B)
        .def_readwrite("C", &CtStateSpace::C)
        .def_readwrite("D", &CtStateSpace::D)
        .def_readwrite("labels", &CtStateSpace::labels)
        .def("order", &CtStateSpace::order)
        .def("inputs", &CtStateSpace::inputs)
        .def("outputs", &CtStateSpace::outputs)
        .def("validate", &CtStateSpace::validate);

    py::class_<DtStateSpace>(m, "DtStateSpace")
        .def(py::init<>())
        .def_readwrite("A_p", &DtStateSpace::A_p)
        .def_readwrite("B_p", &DtStateSpace::B_p)
        .def_readwrite("C", &DtStateSpace::C)
        .def_readwrite("D", &DtStateSpace::D)
        .def_readwrite("h", &DtStateSpace::h)
        .def("order", &DtStateSpace::order);

    py::enum_<EigDomain>(m, "EigDomain")
        .value("CT", EigDomain::CT)
        .value("DT", EigDomain::DT);

    py::class_<ComplexEig>(m, "ComplexEig")
        .def_readonly("value", &ComplexEig::value)
        .def_readonly("right_vector", &ComplexEig::right_vector)
        .def_readonly("domain", &ComplexEig::domain);

    m.def("discretize_trapezoidal", &discretize_trapezoidal, py::arg("ct"),
          py::arg("h"));
    m.def("ct_to_dt_eig", &ct_to_dt_eig, py::arg("lam"), py::arg("h"));
    m.def("dt_to_ct_eig", &dt_to_ct_eig, py::arg("mu"), py::arg("h"));
    m.def("damping_ratio", &damping_ratio, py::arg("lam"));
    m.def("build_smib", &build_smib);
    m.def("build_modal_surrogate", &build_modal_surrogate, py::arg("lam"),
          py::arg("input_gain") = 1.0, py::arg("output_gain") = 1.0);
    m.def("open_loop_swing_mode", &open_loop_swing_mode, py::arg("plant"));
    m.def("spectral_radius", &spectral_radius, py::arg("M"));
    m.def("load_model", &load_model, py::arg("document"));
    m.def("load_model_file", &load_model_file, py::arg("path"));
    m.def("save_model", &save_model, py::arg("model"), py::arg("h") = 0.0);

    // ---- delay chain and switched family ------------------------------------
    py::class_<DelayChain>(m, "DelayChain")
        .def_readonly("n_max", &DelayChain::n_max)
        .def_readonly("A_d", &DelayChain::A_d)
        .def_readonly("B_d", &DelayChain::B_d);

    py::class_<DelaySelector>(m, "DelaySelector")
        .def_readonly("n", &DelaySelector::n)
        .def_readonly("C_d", &DelaySelector::C_d);

    py::class_<SwitchingState>(m, "SwitchingState")
        .def_readonly("n", &SwitchingState::n)
        .def_readonly("A_C", &SwitchingState::A_C)
        .def_readonly("swing_mode", &SwitchingState::swing_mode)
        .def_readonly("damping_ct", &SwitchingState::damping_ct)
        .def_readonly("tracking_ambiguous", &SwitchingState::tracking_ambiguous);

    py::class_<SwitchedSystem>(m, "SwitchedSystem")
        .def_readonly("states", &SwitchedSystem::states)
        .def_readonly("h", &SwitchedSystem::h)
        .def_readonly("gain", &SwitchedSystem::gain)
        .def_readonly("reference_swing", &SwitchedSystem::reference_swing)
        .def_readonly("n_min", &SwitchedSystem::n_min)
        .def_readonly("n_max", &SwitchedSystem::n_max)
        .def("dim", &SwitchedSystem::dim)
        .def("state_for", &SwitchedSystem::state_for, py::arg("n"),
             py::return_value_policy::reference_internal);

    m.def("build_delay_chain", &build_delay_chain, py::arg("n_max"),
          py::arg("channels") = 1);
    m.def("build_selector", &build_selector, py::arg("n"), py::arg("n_max"));
    m.def("assemble_closed_loop", &assemble_closed_loop, py::arg("plant"),
          py::arg("gain"), py::arg("n"), py::arg("n_max"));
    m.def("enumerate_switching_states", &enumerate_switching_states,
          py::arg("plant"), py::arg("gain"), py::arg("n_min"), py::arg("n_max"));

    // ---- simplified stability analysis --------------------------------------
    py::class_<TrackedMode>(m, "TrackedMode")
        .def_readonly("value", &TrackedMode::value)
        .def_readonly("vector", &TrackedMode::vector)
        .def_readonly("alignment", &TrackedMode::alignment)
        .def_readonly("ambiguous", &TrackedMode::ambiguous);

    py::class_<ModeTrack::Entry>(m, "ModeTrackEntry")
        .def_readonly("n", &ModeTrack::Entry::n)
        .def_readonly("mu", &ModeTrack::Entry::mu)
        .def_readonly("lam", &ModeTrack::Entry::lambda)
        .def_readonly("zeta", &ModeTrack::Entry::zeta);

    py::class_<ModeTrack>(m, "ModeTrack")
        .def_readonly("entries", &ModeTrack::entries)
        .def_readonly("h", &ModeTrack::h);

    py::class_<DampingBounds>(m, "DampingBounds")
        .def_readonly("zeta_min", &DampingBounds::zeta_min)
        .def_readonly("zeta_max", &DampingBounds::zeta_max)
        .def_readonly("mu_abs_min", &DampingBounds::mu_abs_min)
        .def_readonly("mu_abs_max", &DampingBounds::mu_abs_max)
        .def_readonly("argmin_delay", &DampingBounds::argmin_delay)
        .def_readonly("argmax_delay", &DampingBounds::argmax_delay);

    py::class_<ConstancyReport>(m, "ConstancyReport")
        .def_readonly("max_misalignment", &ConstancyReport::max_misalignment)
        .def_readonly("per_state_angles", &ConstancyReport::per_state_angles)
        .def_readonly("h_vs_period", &ConstancyReport::h_vs_period)
        .def_readonly("open_loop_damping", &ConstancyReport::open_loop_damping)
        .def_readonly("tolerance", &ConstancyReport::tolerance)
        .def_readonly("pass_", &ConstancyReport::pass);

    py::enum_<VerdictKind>(m, "VerdictKind")
        .value("Stable", VerdictKind::Stable)
        .value("Unstable", VerdictKind::Unstable)
        .value("Undetermined", VerdictKind::Undetermined);

    py::class_<StabilityVerdict>(m, "StabilityVerdict")
        .def_readonly("kind", &StabilityVerdict::kind)
        .def_readonly("bounds", &StabilityVerdict::bounds)
        .def_readonly("witness_delay", &StabilityVerdict::witness_delay)
        .def_readonly("reason", &StabilityVerdict::reason)
        .def_readonly("constancy", &StabilityVerdict::constancy);

    m.def("track_swing_mode", &track_swing_mode, py::arg("A_C"),
          py::arg("reference"));
    m.def("check_eigenvector_constancy", &check_eigenvector_constancy,
          py::arg("system"), py::arg("tolerance_rad") = 0.05);
    m.def("mu_product", &mu_product, py::arg("mus"));
    m.def("simplified_verdict", &simplified_verdict, py::arg("system"),
          py::arg("constancy_tolerance_rad") = 0.05);
    m.def("damping_bounds", &damping_bounds, py::arg("system"));
    m.def("root_locus", &root_locus, py::arg("plant"), py::arg("gain"),
          py::arg("h"), py::arg("n_min"), py::arg("n_max"));
    m.def("delay_margin", &delay_margin, py::arg("plant"), py::arg("gain"),
          py::arg("h"), py::arg("n_start"), py::arg("n_cap"));
    m.def("calibrate_surrogate_gain", &calibrate_surrogate_gain,
          py::arg("lam"), py::arg("h"), py::arg("target_margin"),
          py::arg("bracket_inner") = -1.0, py::arg("bracket_outer") = -1.55,
          py::arg("n_start") = 2);

    // ---- switched-Lyapunov LMI ----------------------------------------------
    py::class_<LmiCertificate>(m, "LmiCertificate")
        .def_readonly("P_list", &LmiCertificate::P_list)
        .def_readonly("margins", &LmiCertificate::margins)
        .def_readonly("min_P_eig", &LmiCertificate::min_P_eig);

    py::enum_<LmiOutcome>(m, "LmiOutcome")
        .value("Feasible", LmiOutcome::Feasible)
        .value("Undetermined", LmiOutcome::Undetermined)
        .value("NecessaryFail", LmiOutcome::NecessaryFail);

    py::class_<LmiVerdict>(m, "LmiVerdict")
        .def_readonly("outcome", &LmiVerdict::outcome)
        .def_readonly("certificate", &LmiVerdict::certificate)
        .def_readonly("iterations", &LmiVerdict::iterations)
        .def_readonly("residual", &LmiVerdict::residual)
        .def_readonly("witness", &LmiVerdict::witness)
        .def_readonly("detail", &LmiVerdict::detail);

    py::class_<LmiOptions>(m, "LmiOptions")
        .def(py::init<>())
        .def_readwrite("epsilon", &LmiOptions::epsilon)
        .def_readwrite("tol", &LmiOptions::tol)
        .def_readwrite("max_iter", &LmiOptions::max_iter)
        .def_readwrite("max_multi_p_vars", &LmiOptions::max_multi_p_vars)
        .def_readwrite("trace", &LmiOptions::trace);

    m.def("default_epsilon", &default_epsilon, py::arg("states"));
    m.def("lmi_verify", &lmi_verify, py::arg("states"), py::arg("cert"),
          py::arg("epsilon"));
    m.def("lmi_block_form", &lmi_block_form, py::arg("P_i"), py::arg("P_j"),
          py::arg("A_i"));
    m.def("lmi_solve", &lmi_solve, py::arg("states"),
          py::arg("options") = LmiOptions{});
    m.def("common_p_solve", &common_p_solve, py::arg("states"),
          py::arg("options") = LmiOptions{});
    m.def("save_certificate", &save_certificate, py::arg("cert"));
    m.def("load_certificate", &load_certificate, py::arg("document"));

    // ---- PDC pipeline --------------------------------------------------------
    py::class_<PmuPacket>(m, "PmuPacket")
        .def(py::init<>())
        .def(py::init([](std::string channel, int stamp, double value,
                         double arrival) {
            return PmuPacket{std::move(channel), stamp, value, arrival};
        }), py::arg("channel"), py::arg("stamp_index"), py::arg("value"),
            py::arg("arrival_time"))
        .def_readwrite("channel", &PmuPacket::channel)
        .def_readwrite("stamp_index", &PmuPacket::stamp_index)
        .def_readwrite("value", &PmuPacket::value)
        .def_readwrite("arrival_time", &PmuPacket::arrival_time);

    py::class_<CompositeSample>(m, "CompositeSample")
        .def_readonly("emitted_at", &CompositeSample::emitted_at)
        .def_readonly("source_stamp", &CompositeSample::source_stamp)
        .def_readonly("values", &CompositeSample::values)
        .def_readonly("held", &CompositeSample::held);

    py::class_<EmissionLog>(m, "EmissionLog")
        .def_readonly("samples", &EmissionLog::samples)
        .def_readonly("discarded_packets", &EmissionLog::discarded_packets)
        .def("first_valid_index", &EmissionLog::first_valid_index)
        .def("trimmed", [](const EmissionLog& log) {
            EmissionLog out = log;
            out.samples.erase(out.samples.begin(),
                              out.samples.begin() +
                                  static_cast<std::ptrdiff_t>(
                                      log.first_valid_index()));
            return out;
        });

    py::class_<LatencyModel>(m, "LatencyModel")
        .def(py::init<>())
        .def_readwrite("pmu_mean", &LatencyModel::pmu_mean)
        .def_readwrite("pmu_std", &LatencyModel::pmu_std)
        .def_readwrite("net_fixed", &LatencyModel::net_fixed)
        .def_readwrite("net_exp_mean", &LatencyModel::net_exp_mean)
        .def_readwrite("processing", &LatencyModel::processing)
        .def_readwrite("disorder_extra", &LatencyModel::disorder_extra);

    py::class_<DelaySequence>(m, "DelaySequence")
        .def(py::init<>())
        .def_readwrite("entries", &DelaySequence::entries)
        .def_readwrite("n_min", &DelaySequence::n_min)
        .def_readwrite("n_max", &DelaySequence::n_max)
        .def_readwrite("seed", &DelaySequence::seed);

    m.def("run_pdc", &run_pdc, py::arg("packets"), py::arg("channels"),
          py::arg("h"), py::arg("first_step"), py::arg("last_step"));
    m.def("effective_delay_trace", &effective_delay_trace, py::arg("log"));
    m.def("clip_delay_sequence", &clip_delay_sequence, py::arg("seq"),
          py::arg("n_min"), py::arg("n_max"));
    m.def("synth_packet_stream", &synth_packet_stream, py::arg("channels"),
          py::arg("steps"), py::arg("h"), py::arg("latency"),
          py::arg("disorder_probability"), py::arg("dropout_probability"),
          py::arg("seed"));
    m.def("load_packet_trace", &load_packet_trace, py::arg("path"));
    m.def("packet_trace_to_json", &packet_trace_to_json, py::arg("packets"));
    m.def("emission_log_csv", &emission_log_csv, py::arg("log"),
          py::arg("channels"));

    // ---- time-domain simulation ----------------------------------------------
    py::class_<Disturbance>(m, "Disturbance")
        .def(py::init([](int step, Eigen::VectorXd impulse) {
            return Disturbance{step, std::move(impulse)};
        }), py::arg("step"), py::arg("state_impulse"))
        .def_readwrite("step", &Disturbance::step)
        .def_readwrite("state_impulse", &Disturbance::state_impulse);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("h", &Trajectory::h)
        .def_readonly("states", &Trajectory::states)
        .def_readonly("outputs", &Trajectory::outputs)
        .def_readonly("delays", &Trajectory::delays)
        .def("steps", &Trajectory::steps);

    py::enum_<DampingMethod>(m, "DampingMethod")
        .value("EigProduct", DampingMethod::EigProduct)
        .value("PeakFit", DampingMethod::PeakFit);

    py::class_<DampingEstimate>(m, "DampingEstimate")
        .def_readonly("zeta", &DampingEstimate::zeta)
        .def_readonly("method", &DampingEstimate::method)
        .def_readonly("window_begin", &DampingEstimate::window_begin)
        .def_readonly("window_end", &DampingEstimate::window_end);

    m.def("random_delay_sequence", &random_delay_sequence, py::arg("seed"),
          py::arg("n_min"), py::arg("n_max"), py::arg("length"));
    m.def("simulate_switched", &simulate_switched, py::arg("system"),
          py::arg("delays"), py::arg("x0"),
          py::arg("events") = std::vector<Disturbance>{});
    m.def("simulate_with_schedule", &simulate_with_schedule, py::arg("active"),
          py::arg("disabled"), py::arg("enable_step"), py::arg("delays"),
          py::arg("x0"), py::arg("events") = std::vector<Disturbance>{});
    m.def("fault_disturbance", &fault_disturbance, py::arg("system"),
          py::arg("magnitude"));
    m.def("estimate_damping_eig_product", &estimate_damping_eig_product,
          py::arg("system"), py::arg("delays"));
    m.def("estimate_damping_peak_fit", &estimate_damping_peak_fit,
          py::arg("traj"), py::arg("channel"), py::arg("window_begin"),
          py::arg("window_end"));
    m.def("trajectory_csv", &trajectory_csv, py::arg("traj"),
          py::arg("state_columns") = std::vector<int>{});
}
