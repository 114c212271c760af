// scenario.hpp — declarative run description: JSON schema, parsing with
// distinct parse/validation errors, and the physics lint

#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "vibronic/model.hpp"
#include "vibronic/observables.hpp"
#include "vibronic/semiclassical.hpp"

namespace vibronic::cli {

using nlohmann::json;

struct ConfigParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int scenario_schema_version = 1;

struct SweepSpec {
    std::string axis;  // delta0_locked | delta_v_only | g_s | g_as | omega_thz_rabi | omega_zpl_rabi
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
};

struct TrajectorySpec {
    int n_traj = 1;
    double t_final = 1.0;
    double dt_max = 1e-3;
    std::uint64_t seed = 0;
    int record_stride = 1;
    std::vector<std::string> observables;  // names resolved by the runner
    double transient = -1.0;               // <0 = use the default 5/(2pi gamma_v)
    int histogram_bins = 0;                // 0 = no histograms
    double t_sample = -1.0;                // <0 = final time
    std::string initial_state = "vacuum";
};

struct WignerSpec {
    double q_min = -4.0, q_max = 4.0;
    int nq = 101;
    double p_min = -4.0, p_max = 4.0;
    int np = 101;
};

struct SpectrumSpec {
    std::vector<observables::VibrationalMode> modes;
    double f_min = 0.0, f_max = 0.0;
    int points = 0;
};

struct DesignSpec {
    std::string kind;  // drive | dipole | capacitive_gain | transducer_estimate | susceptibility_map
    json params;
};

struct Scenario {
    std::string task;  // steady | sweep | traj | wigner | spectrum | design
    model::ModelParams model;
    model::DriveSelection drives;
    double p_click = 0.05;
    std::optional<SweepSpec> sweep;
    std::optional<TrajectorySpec> trajectory;
    std::optional<WignerSpec> wigner;
    std::optional<SpectrumSpec> spectrum;
    std::optional<DesignSpec> design;
    std::string preset_name;  // informational
};

inline const std::vector<std::string>& known_tasks() {
    static const std::vector<std::string> tasks{"steady", "sweep", "traj",
                                                "wigner", "spectrum", "design"};
    return tasks;
}

inline const std::vector<std::string>& known_sweep_axes() {
    static const std::vector<std::string> axes{"delta0_locked",  "delta_v_only",   "g_s",
                                               "g_as",           "omega_thz_rabi", "omega_zpl_rabi"};
    return axes;
}

inline const std::vector<std::string>& known_observables() {
    static const std::vector<std::string> names{"n_zpl", "n_stokes", "n_as",  "parity",
                                                "sigma_x", "n_vib",  "n_elec"};
    return names;
}

namespace detail {

inline double require_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigValidationError(where + ": missing field '" + key + "'");
    if (j[key].is_null()) {
        throw ConfigValidationError(where + ": field '" + key +
                                    "' is required by this preset and must be supplied");
    }
    if (!j[key].is_number()) throw ConfigValidationError(where + ": field '" + key + "' must be a number");
    return j[key].get<double>();
}

inline double number_or(const json& j, const std::string& key, double fallback,
                        const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (j[key].is_null()) {
        throw ConfigValidationError(where + ": field '" + key +
                                    "' is required by this preset and must be supplied");
    }
    if (!j[key].is_number()) throw ConfigValidationError(where + ": field '" + key + "' must be a number");
    return j[key].get<double>();
}

inline bool bool_or(const json& j, const std::string& key, bool fallback, const std::string& where) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    if (!j[key].is_boolean()) throw ConfigValidationError(where + ": field '" + key + "' must be a bool");
    return j[key].get<bool>();
}

}  // namespace detail

inline json parse_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigParseError("invalid JSON document");
    return j;
}

// Accepts either a bare scenario document or a run manifest wrapping one
// under "scenario" (so manifests can be replayed directly).
inline Scenario parse_scenario(const json& doc_in) {
    json doc = doc_in;
    if (doc.contains("scenario") && doc["scenario"].is_object()) doc = doc["scenario"];
    if (!doc.is_object()) throw ConfigParseError("scenario must be a JSON object");

    if (doc.contains("schema") && doc["schema"].is_number_integer() &&
        doc["schema"].get<int>() != scenario_schema_version) {
        throw ConfigValidationError("unsupported scenario schema version");
    }

    Scenario s;
    if (!doc.contains("task") || !doc["task"].is_string()) {
        throw ConfigValidationError("scenario: missing task");
    }
    s.task = doc["task"].get<std::string>();
    bool task_known = false;
    for (const auto& t : known_tasks()) task_known |= (t == s.task);
    if (!task_known) throw ConfigValidationError("scenario: unknown task '" + s.task + "'");

    const json m = doc.value("model", json::object());
    s.model.delta0 = detail::number_or(m, "delta0", 0.0, "model");
    s.model.delta_v = detail::number_or(m, "delta_v", 0.0, "model");
    s.model.eta = detail::number_or(m, "eta", 0.0, "model");
    s.model.omega_zpl_rabi = detail::number_or(m, "omega_zpl_rabi", 0.0, "model");
    s.model.g_s = detail::number_or(m, "g_s", 0.0, "model");
    s.model.g_as = detail::number_or(m, "g_as", 0.0, "model");
    s.model.g_as2 = detail::number_or(m, "g_as2", 0.0, "model");
    s.model.omega_thz_rabi = detail::number_or(m, "omega_thz_rabi", 0.0, "model");
    s.model.gamma0 = detail::number_or(m, "gamma0", 0.0, "model");
    s.model.gamma_v = detail::number_or(m, "gamma_v", 0.0, "model");
    s.model.gamma_phi_opt = detail::number_or(m, "gamma_phi_opt", 0.0, "model");
    s.model.gamma_phi_v = detail::number_or(m, "gamma_phi_v", 0.0, "model");
    s.model.n_cutoff = static_cast<int>(detail::number_or(m, "n_cutoff", 2, "model"));

    const json d = doc.value("drives", json::object());
    s.drives.zpl = detail::bool_or(d, "zpl", false, "drives");
    s.drives.stokes = detail::bool_or(d, "stokes", false, "drives");
    s.drives.anti_stokes = detail::bool_or(d, "anti_stokes", false, "drives");
    s.drives.anti_stokes2 = detail::bool_or(d, "anti_stokes2", false, "drives");
    s.drives.thz = detail::bool_or(d, "thz", false, "drives");

    s.p_click = detail::number_or(doc, "p_click", 0.05, "scenario");
    if (s.p_click < 0 || s.p_click > 1) throw ConfigValidationError("p_click must be in [0,1]");

    try {
        s.model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigValidationError(e.what());
    }

    if (doc.contains("sweep") && !doc["sweep"].is_null()) {
        const json& j = doc["sweep"];
        SweepSpec sw;
        if (!j.contains("axis") || !j["axis"].is_string()) {
            throw ConfigValidationError("sweep: missing axis");
        }
        sw.axis = j["axis"].get<std::string>();
        bool axis_known = false;
        for (const auto& a : known_sweep_axes()) axis_known |= (a == sw.axis);
        if (!axis_known) throw ConfigValidationError("sweep: unknown axis '" + sw.axis + "'");
        sw.start = detail::require_number(j, "start", "sweep");
        sw.stop = detail::require_number(j, "stop", "sweep");
        sw.points = static_cast<int>(detail::require_number(j, "points", "sweep"));
        if (sw.points < 2) throw ConfigValidationError("sweep: needs at least 2 points");
        if (!std::isfinite(sw.start) || !std::isfinite(sw.stop) || sw.start >= sw.stop) {
            throw ConfigValidationError("sweep: range must be finite with start < stop");
        }
        s.sweep = sw;
    }

    if (doc.contains("trajectory") && !doc["trajectory"].is_null()) {
        const json& j = doc["trajectory"];
        TrajectorySpec tr;
        tr.n_traj = static_cast<int>(detail::number_or(j, "n_traj", 1, "trajectory"));
        tr.t_final = detail::require_number(j, "t_final", "trajectory");
        tr.dt_max = detail::number_or(j, "dt_max", 1e-3, "trajectory");
        tr.seed = static_cast<std::uint64_t>(detail::number_or(j, "seed", 0, "trajectory"));
        tr.record_stride = static_cast<int>(detail::number_or(j, "record_stride", 1, "trajectory"));
        tr.transient = detail::number_or(j, "transient", -1.0, "trajectory");
        tr.histogram_bins = static_cast<int>(detail::number_or(j, "histogram_bins", 0, "trajectory"));
        tr.t_sample = detail::number_or(j, "t_sample", -1.0, "trajectory");
        tr.initial_state = j.value("initial_state", "vacuum");
        if (tr.n_traj < 1 || tr.t_final <= 0 || tr.dt_max <= 0 || tr.record_stride < 1) {
            throw ConfigValidationError("trajectory: n_traj/t_final/dt_max/record_stride out of range");
        }
        if (!j.contains("observables") || !j["observables"].is_array() || j["observables"].empty()) {
            throw ConfigValidationError("trajectory: needs a non-empty observables list");
        }
        for (const auto& o : j["observables"]) {
            if (!o.is_string()) throw ConfigValidationError("trajectory: observable names must be strings");
            const std::string name = o.get<std::string>();
            bool known = false;
            for (const auto& k : known_observables()) known |= (k == name);
            if (!known) throw ConfigValidationError("trajectory: unknown observable '" + name + "'");
            tr.observables.push_back(name);
        }
        s.trajectory = tr;
    }

    if (doc.contains("wigner") && !doc["wigner"].is_null()) {
        const json& j = doc["wigner"];
        WignerSpec w;
        w.q_min = detail::number_or(j, "q_min", -4.0, "wigner");
        w.q_max = detail::number_or(j, "q_max", 4.0, "wigner");
        w.nq = static_cast<int>(detail::number_or(j, "nq", 101, "wigner"));
        w.p_min = detail::number_or(j, "p_min", -4.0, "wigner");
        w.p_max = detail::number_or(j, "p_max", 4.0, "wigner");
        w.np = static_cast<int>(detail::number_or(j, "np", 101, "wigner"));
        if (w.nq < 2 || w.np < 2 || w.q_min >= w.q_max || w.p_min >= w.p_max) {
            throw ConfigValidationError("wigner: bad grid");
        }
        s.wigner = w;
    }

    if (doc.contains("spectrum") && !doc["spectrum"].is_null()) {
        const json& j = doc["spectrum"];
        SpectrumSpec sp;
        sp.f_min = detail::require_number(j, "f_min", "spectrum");
        sp.f_max = detail::require_number(j, "f_max", "spectrum");
        sp.points = static_cast<int>(detail::number_or(j, "points", 2001, "spectrum"));
        if (sp.points < 2 || sp.f_min >= sp.f_max) throw ConfigValidationError("spectrum: bad grid");
        if (!j.contains("modes") || !j["modes"].is_array() || j["modes"].empty()) {
            throw ConfigValidationError("spectrum: needs a non-empty mode list");
        }
        for (const auto& mj : j["modes"]) {
            observables::VibrationalMode mode;
            mode.eta = detail::require_number(mj, "eta", "spectrum.mode");
            mode.omega = detail::require_number(mj, "omega", "spectrum.mode");
            mode.gamma = detail::require_number(mj, "gamma", "spectrum.mode");
            mode.n_occ = detail::number_or(mj, "n_occ", 0.0, "spectrum.mode");
            sp.modes.push_back(mode);
        }
        s.spectrum = sp;
    }

    if (doc.contains("design") && !doc["design"].is_null()) {
        const json& j = doc["design"];
        DesignSpec ds;
        if (!j.contains("kind") || !j["kind"].is_string()) {
            throw ConfigValidationError("design: missing kind");
        }
        ds.kind = j["kind"].get<std::string>();
        ds.params = j;
        s.design = ds;
    }

    // task-specific block presence
    if (s.task == "sweep" && !s.sweep) throw ConfigValidationError("task sweep: missing sweep block");
    if (s.task == "traj" && !s.trajectory) {
        throw ConfigValidationError("task traj: missing trajectory block");
    }
    if (s.task == "wigner" && !s.wigner) throw ConfigValidationError("task wigner: missing wigner block");
    if (s.task == "spectrum" && !s.spectrum) {
        throw ConfigValidationError("task spectrum: missing spectrum block");
    }
    if (s.task == "design" && !s.design) throw ConfigValidationError("task design: missing design block");

    if (s.task == "steady" || s.task == "sweep" || s.task == "traj" || s.task == "wigner") {
        if (s.model.gamma0 <= 0 || s.model.gamma_v <= 0) {
            throw ConfigValidationError("model: gamma0 and gamma_v must be > 0 for dynamics tasks");
        }
        if (s.model.n_cutoff < 2) throw ConfigValidationError("model: n_cutoff must be >= 2");
    }
    return s;
}

// ------------------------------ physics lint --------------------------------

struct ValidationReport {
    std::vector<std::string> warnings;
    bool ok() const { return warnings.empty(); }
};

inline ValidationReport validate_scenario(const Scenario& s) {
    ValidationReport rep;
    const auto& m = s.model;

    if (s.drives.stokes && m.g_s > 0 && m.gamma_v > 0 && m.g_s < m.gamma_v) {
        rep.warnings.push_back(
            "coherence: stokes coupling g_s < gamma_v; vibronic hybridization will not resolve "
            "against the vibrational linewidth");
    }

    // cutoff headroom against the expected coherent amplitude beta ~ g/gamma_v
    double beta = 0.0;
    if (s.drives.stokes) beta = std::max(beta, m.g_s / m.gamma_v);
    if (s.drives.anti_stokes) beta = std::max(beta, m.g_as / m.gamma_v);
    if (s.drives.thz && m.gamma_v > 0) beta = std::max(beta, m.omega_thz_rabi / m.gamma_v);
    const double n_mean = beta * beta;
    if (beta > 0 && n_mean + 4.0 * std::sqrt(n_mean + 1.0) >= m.n_cutoff) {
        rep.warnings.push_back(
            "cutoff: expected vibrational occupation " + io_free_format(n_mean) +
            " plus spread approaches n_cutoff; raise n_cutoff or reduce couplings");
    }

    // linear-transducer regime check
    if (s.drives.thz && s.drives.stokes && m.g_s > 0 && m.gamma0 > 0) {
        const auto figs = semiclassical::stokes_figures(m.g_s, m.delta0, m.gamma0, m.gamma_v);
        const double c = figs.cooperativity;
        const double b_ss =
            2.0 * figs.saturation_number * (c / (1.0 + c)) * m.omega_thz_rabi / m.gamma0;
        if (b_ss * b_ss > 0.1 * figs.saturation_number) {
            rep.warnings.push_back(
                "transducer: predicted |b_ss|^2 exceeds 0.1 n_S; response leaves the linear regime");
        }
    }
    return rep;
}

}  // namespace vibronic::cli
