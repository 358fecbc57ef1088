// config.hpp — Scenario configuration schema, presets and resolution to a ModelSpec.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rcjc/models.hpp"

namespace rcjc {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Integrator { spectral, rk4, both };

inline const char* to_string(Integrator i) {
    switch (i) {
        case Integrator::spectral: return "spectral";
        case Integrator::rk4: return "rk4";
        case Integrator::both: return "both";
    }
    return "?";
}

struct SweepAxis {
    std::string path;  // dotted path into the resolved config, e.g. "model.rcs.0.Gamma_over_nu"
    std::vector<json> values;
};

struct ScenarioConfig {
    std::string preset;
    json resolved;  // self-contained config (preset expanded); re-parses to the same scenario
    ModelSpec model;
    ModelDiagnostics diagnostics;
    double t_final = 2.0;
    bool t_in_tau = true;
    int record_points = 0;  // 0: 100 samples per τ_n
    std::optional<double> dt;
    Integrator integrator = Integrator::spectral;
    SpinState initial_spin = SpinState::minus;
    std::vector<SpinState> pair;
    std::vector<SweepAxis> sweep;
    std::string output;
    std::uint64_t seed = 1;
    Tolerances tol;
    std::vector<std::string> notes;
};

// ---- Presets ----

namespace detail {

inline json base_2jcm() {
    return json{{"model",
                 {{"n_photon", 2},
                  {"sideband", "red"},
                  {"epsilon0", 0.02},
                  {"delta0", "auto"},
                  {"nu_tilde", 1e-3},
                  {"omega_tilde", "resonant"},
                  {"rcs", json::array({{{"pi_alpha", 0.02}, {"Gamma", 0.0}, {"omega0", 1.0}}})},
                  {"n_th", 1e-3},
                  {"fock", json::array({15})}}},
                {"t_final", 2.0},
                {"t_unit", "tau"},
                {"initial_spin", "minus"}};
}

inline json base_3jcm(double eps) {
    return json{{"model",
                 {{"n_photon", 3},
                  {"sideband", "red"},
                  {"epsilon0", eps},
                  {"delta0", "auto"},
                  {"g_over_nu", 0.1},
                  {"omega_tilde", "resonant"},
                  {"rcs", json::array({{{"pi_alpha", 0.02}, {"Gamma", 0.0}, {"omega0", 1.0}}})},
                  {"beta_omega", 100.0},
                  {"fock", json::array({15})}}},
                {"t_final", 2.0},
                {"t_unit", "tau"},
                {"initial_spin", "minus"}};
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
    return {"fig2a", "fig2b", "fig2c", "fig2d", "fig3", "fig4", "fig4-sweep",
            "fig2a-scaled", "fig2c-scaled", "fig2d-scaled", "fig4-scaled"};
}

inline json preset(const std::string& name) {
    if (name == "fig2a") return detail::base_2jcm();
    if (name == "fig2b") {
        json j = detail::base_2jcm();
        j["sweep"] = json::array({{{"path", "model.n_th"}, {"values", {1e-3, 1e-2, 1e-1}}}});
        return j;
    }
    if (name == "fig2c") return detail::base_3jcm(2e-3);
    if (name == "fig2d") return detail::base_3jcm(1e-2);
    if (name == "fig3") {
        json j = detail::base_2jcm();
        auto& m = j["model"];
        m["epsilon0"] = 1e-2;
        m.erase("nu_tilde");
        m["g_over_nu"] = 0.2;
        m.erase("n_th");
        m["beta"] = "inf";
        m["rcs"] = json::array({{{"pi_alpha_ratio", 0.02}, {"Gamma", 0.0}, {"omega0", 1.0}},
                                {{"pi_alpha_ratio", 0.02}, {"Gamma", 0.0}, {"omega0", "nu_tilde"}}});
        m["fock"] = json::array({10, 6});
        j["pair"] = json::array({"e", "g"});
        return j;
    }
    if (name == "fig4") {
        json j = detail::base_2jcm();
        j["model"]["rcs"][0].erase("Gamma");
        j["model"]["rcs"][0]["Gamma_over_nu"] = 0.2;
        return j;
    }
    if (name == "fig4-sweep") {
        json j = preset("fig4");
        j["sweep"] = json::array({{{"path", "model.rcs.0.Gamma_over_nu"}, {"values", {0.0, 0.02, 0.1, 0.2}}}});
        return j;
    }
    // ×10 on (ν̃, ω̃, ε₀, Γ): same g̃_n/ν̃ and Γ/ν̃, shorter τ_n.
    if (name == "fig2a-scaled") {
        json j = detail::base_2jcm();
        j["model"]["epsilon0"] = 0.2;
        j["model"]["nu_tilde"] = 1e-2;
        return j;
    }
    if (name == "fig2c-scaled") return detail::base_3jcm(2e-2);
    if (name == "fig2d-scaled") return detail::base_3jcm(1e-1);
    if (name == "fig4-scaled") {
        json j = preset("fig4");
        j["model"]["epsilon0"] = 0.2;
        j["model"]["nu_tilde"] = 1e-2;
        return j;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

// ---- Parsing ----

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

inline double get_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError("'" + key + "' in " + where + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("'" + key + "' in " + where + " must be finite");
    return x;
}

inline double number_or_inf(const json& v, const std::string& what) {
    if (v.is_string() && v.get<std::string>() == "inf") return kInf;
    if (v.is_number()) return v.get<double>();
    throw ConfigError(what + " must be a number or \"inf\"");
}

inline SpinState parse_spin(const json& v) {
    if (!v.is_string()) throw ConfigError("spin state must be a string");
    const auto s = v.get<std::string>();
    if (s == "e") return SpinState::e;
    if (s == "g") return SpinState::g;
    if (s == "plus") return SpinState::plus;
    if (s == "minus") return SpinState::minus;
    throw ConfigError("unknown spin state '" + s + "' (expected e, g, plus or minus)");
}

inline Sideband parse_sideband(const json& v) {
    const auto s = v.get<std::string>();
    if (s == "red") return Sideband::red;
    if (s == "blue") return Sideband::blue;
    throw ConfigError("sideband must be \"red\" or \"blue\"");
}

inline int count_keys(const json& j, std::initializer_list<const char*> keys) {
    int n = 0;
    for (const char* k : keys)
        if (j.contains(k) && !j.at(k).is_null()) ++n;
    return n;
}

struct RcDraft {
    bool omega_is_nu = false;
    double omega0 = 1.0;
    std::optional<double> pi_alpha, pi_alpha_ratio, gamma_abs, gamma_over_nu;
    double lambda_cut = kInf;
};

inline RcDraft parse_rc(const json& j, std::size_t i) {
    const std::string where = "model.rcs[" + std::to_string(i) + "]";
    reject_unknown(j, {"pi_alpha", "pi_alpha_ratio", "Gamma", "Gamma_over_nu", "omega0", "Lambda"}, where);
    RcDraft d;
    if (j.contains("omega0")) {
        const auto& w = j.at("omega0");
        if (w.is_string() && w.get<std::string>() == "nu_tilde")
            d.omega_is_nu = true;
        else if (w.is_number())
            d.omega0 = w.get<double>();
        else
            throw ConfigError(where + ".omega0 must be a number or \"nu_tilde\"");
    }
    if (count_keys(j, {"pi_alpha", "pi_alpha_ratio"}) != 1)
        throw ConfigError(where + " needs exactly one of pi_alpha, pi_alpha_ratio");
    if (j.contains("pi_alpha") && !j["pi_alpha"].is_null()) d.pi_alpha = get_number(j, "pi_alpha", where);
    if (j.contains("pi_alpha_ratio") && !j["pi_alpha_ratio"].is_null())
        d.pi_alpha_ratio = get_number(j, "pi_alpha_ratio", where);
    if (count_keys(j, {"Gamma", "Gamma_over_nu"}) > 1) throw ConfigError(where + " sets both Gamma and Gamma_over_nu");
    if (j.contains("Gamma") && !j["Gamma"].is_null()) d.gamma_abs = get_number(j, "Gamma", where);
    if (j.contains("Gamma_over_nu") && !j["Gamma_over_nu"].is_null())
        d.gamma_over_nu = get_number(j, "Gamma_over_nu", where);
    if (j.contains("Lambda")) d.lambda_cut = number_or_inf(j.at("Lambda"), where + ".Lambda");
    return d;
}

inline RcParams finish_rc(const RcDraft& d, double nu, const std::string& where) {
    const double w0 = d.omega_is_nu ? nu : d.omega0;
    if (!(w0 > 0)) throw ConfigError(where + ": omega0 must be > 0");
    const double pa = d.pi_alpha ? *d.pi_alpha : *d.pi_alpha_ratio * w0;
    const double gam = d.gamma_abs ? *d.gamma_abs : (d.gamma_over_nu ? *d.gamma_over_nu * nu : 0.0);
    try {
        return map_to_rc({pa / std::numbers::pi, gam, w0}, d.lambda_cut);
    } catch (const InvalidArgument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

inline ModelSpec parse_model(const json& m, std::vector<std::string>& notes) {
    reject_unknown(m,
                   {"n_photon", "sideband", "epsilon0", "delta0", "nu_tilde", "g_over_nu", "omega_tilde", "rcs",
                    "n_th", "beta_omega", "beta", "fock", "drivings"},
                   "model");
    ModelSpec s;
    if (m.contains("n_photon")) {
        if (!m["n_photon"].is_number_integer()) throw ConfigError("model.n_photon must be an integer");
        s.n_photon = m["n_photon"].get<int>();
    }
    if (s.n_photon < 1) throw ConfigError("model.n_photon must be >= 1");
    if (m.contains("sideband")) s.sideband = parse_sideband(m["sideband"]);
    s.epsilon0 = get_number(m, "epsilon0", "model");

    if (!m.contains("rcs") || !m["rcs"].is_array() || m["rcs"].empty() || m["rcs"].size() > 2)
        throw ConfigError("model.rcs must list one or two reaction coordinates");
    std::vector<RcDraft> drafts;
    for (std::size_t i = 0; i < m["rcs"].size(); ++i) drafts.push_back(parse_rc(m["rcs"][i], i));
    if (drafts[0].omega_is_nu) throw ConfigError("model.rcs[0].omega0 cannot refer to nu_tilde");

    // ν̃ given directly or inferred from g̃_n/ν̃.
    if (count_keys(m, {"nu_tilde", "g_over_nu"}) != 1)
        throw ConfigError("model needs exactly one of nu_tilde, g_over_nu");
    RcParams rc0 = finish_rc(drafts[0], 0.0, "model.rcs[0]");
    if (m.contains("nu_tilde") && !m["nu_tilde"].is_null()) {
        s.nu_tilde = get_number(m, "nu_tilde", "model");
    } else {
        const double ratio = get_number(m, "g_over_nu", "model");
        if (!(ratio > 0)) throw ConfigError("model.g_over_nu must be > 0");
        const double g = s.epsilon0 / (2.0 * factorial(s.n_photon)) * std::pow(2.0 * rc0.lambda / rc0.Omega, s.n_photon);
        s.nu_tilde = g / ratio;
        std::ostringstream os;
        os.precision(17);
        os << "nu_tilde inferred from g_over_nu = " << ratio << ": nu_tilde = " << s.nu_tilde;
        notes.push_back(os.str());
    }
    for (std::size_t i = 0; i < drafts.size(); ++i)
        s.rcs.push_back(finish_rc(drafts[i], s.nu_tilde, "model.rcs[" + std::to_string(i) + "]"));

    const double sign = s.sideband == Sideband::red ? 1.0 : -1.0;
    if (!m.contains("omega_tilde") || (m["omega_tilde"].is_string() && m["omega_tilde"] == "resonant"))
        s.omega_tilde = sign * s.n_photon * s.nu_tilde;
    else
        s.omega_tilde = get_number(m, "omega_tilde", "model");

    if (m.contains("delta0") && !(m["delta0"].is_string() && m["delta0"] == "auto"))
        s.delta0 = get_number(m, "delta0", "model");

    const int nthermal = count_keys(m, {"n_th", "beta_omega", "beta"});
    if (nthermal != 1) throw ConfigError("model needs exactly one of n_th, beta_omega, beta");
    const double om1 = s.rcs[0].Omega;
    if (m.contains("n_th") && !m["n_th"].is_null()) {
        const double n = get_number(m, "n_th", "model");
        if (n < 0) throw ConfigError("model.n_th must be >= 0");
        s.beta = beta_omega_from_occupation(n) / om1;
    } else if (m.contains("beta_omega") && !m["beta_omega"].is_null()) {
        s.beta = number_or_inf(m["beta_omega"], "model.beta_omega") / om1;
    } else {
        s.beta = number_or_inf(m["beta"], "model.beta");
    }
    if (!(s.beta > 0)) throw ConfigError("inverse temperature must be > 0");

    if (!m.contains("fock") || !m["fock"].is_array() || m["fock"].size() != s.rcs.size())
        throw ConfigError("model.fock must list one truncation per reaction coordinate");
    std::vector<int> fock;
    for (const auto& v : m["fock"]) {
        if (!v.is_number_integer()) throw ConfigError("model.fock entries must be integers");
        fock.push_back(v.get<int>());
    }
    try {
        s.layout = SpaceLayout(fock);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("model.fock: ") + e.what());
    }

    if (m.contains("drivings")) {
        if (!m["drivings"].is_array()) throw ConfigError("model.drivings must be an array");
        for (std::size_t i = 0; i < m["drivings"].size(); ++i) {
            const auto& d = m["drivings"][i];
            const std::string where = "model.drivings[" + std::to_string(i) + "]";
            reject_unknown(d, {"epsilon", "delta", "n_photon", "sideband"}, where);
            Driving dr;
            dr.epsilon = get_number(d, "epsilon", where);
            if (d.contains("n_photon")) dr.n_photon = d["n_photon"].get<int>();
            if (d.contains("sideband")) dr.sideband = parse_sideband(d["sideband"]);
            if (!d.contains("delta") || (d["delta"].is_string() && d["delta"] == "auto"))
                dr.delta = resonant_delta(s, dr.n_photon, dr.sideband);
            else
                dr.delta = get_number(d, "delta", where);
            s.drivings.push_back(dr);
        }
    }
    return s;
}

inline json pointer_for(const std::string& dotted) {
    std::string p;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ConfigError("malformed sweep path '" + dotted + "'");
        p += "/" + part;
    }
    return p;
}

}  // namespace detail

inline json::json_pointer sweep_pointer(const std::string& dotted) {
    return json::json_pointer(detail::pointer_for(dotted).get<std::string>());
}

// Expands the preset, merges overrides and validates; throws ConfigError on any problem.
inline ScenarioConfig parse_config(const json& in) {
    detail::reject_unknown(in,
                           {"schema", "preset", "model", "t_final", "t_unit", "record_points", "dt", "integrator",
                            "initial_spin", "pair", "sweep", "output", "seed", "tolerances"},
                           "config");
    if (!in.contains("schema")) throw ConfigError("config is missing \"schema\"");
    if (!in["schema"].is_number_integer() || in["schema"].get<int>() != kSchemaVersion)
        throw ConfigError("unsupported config schema (expected " + std::to_string(kSchemaVersion) + ")");

    ScenarioConfig c;
    json merged;
    if (in.contains("preset")) {
        if (!in["preset"].is_string()) throw ConfigError("preset must be a string");
        c.preset = in["preset"].get<std::string>();
        merged = preset(c.preset);
    } else {
        merged = json::object();
    }
    json patch = in;
    patch.erase("preset");
    merged.merge_patch(patch);
    merged["schema"] = kSchemaVersion;
    c.resolved = merged;

    try {
        if (!merged.contains("model")) throw ConfigError("config needs a preset or a model");
        c.model = detail::parse_model(merged["model"], c.notes);
        try {
            c.diagnostics = validate(c.model);
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("invalid model: ") + e.what());
        }

        if (merged.contains("t_final")) c.t_final = detail::get_number(merged, "t_final", "config");
        if (!(c.t_final > 0)) throw ConfigError("t_final must be > 0");
        if (merged.contains("t_unit")) {
            const auto u = merged["t_unit"].get<std::string>();
            if (u == "tau")
                c.t_in_tau = true;
            else if (u == "absolute")
                c.t_in_tau = false;
            else
                throw ConfigError("t_unit must be \"tau\" or \"absolute\"");
        }
        if (merged.contains("record_points") && !merged["record_points"].is_null()) {
            if (!merged["record_points"].is_number_integer()) throw ConfigError("record_points must be an integer");
            c.record_points = merged["record_points"].get<int>();
            if (c.record_points < 5) throw ConfigError("record_points must be >= 5");
        }
        if (merged.contains("dt") && !merged["dt"].is_null()) {
            c.dt = detail::get_number(merged, "dt", "config");
            if (!(*c.dt > 0)) throw ConfigError("dt must be > 0");
        }
        if (merged.contains("integrator")) {
            const auto s = merged["integrator"].get<std::string>();
            if (s == "spectral")
                c.integrator = Integrator::spectral;
            else if (s == "rk4")
                c.integrator = Integrator::rk4;
            else if (s == "both")
                c.integrator = Integrator::both;
            else
                throw ConfigError("integrator must be rk4, spectral or both");
        }
        if (merged.contains("initial_spin")) c.initial_spin = detail::parse_spin(merged["initial_spin"]);
        if (merged.contains("pair") && !merged["pair"].is_null()) {
            if (!merged["pair"].is_array() || merged["pair"].size() != 2)
                throw ConfigError("pair must list exactly two spin states");
            for (const auto& v : merged["pair"]) c.pair.push_back(detail::parse_spin(v));
        }
        if (merged.contains("output")) c.output = merged["output"].get<std::string>();
        if (merged.contains("seed")) c.seed = merged["seed"].get<std::uint64_t>();
        if (merged.contains("tolerances")) {
            const auto& t = merged["tolerances"];
            detail::reject_unknown(t,
                                   {"hermitian", "trace", "min_eigenvalue", "unitary", "negativity_clip",
                                    "fock_tail", "trace_drift", "max_condition"},
                                   "tolerances");
            const auto set = [&](const char* k, double& dst) {
                if (t.contains(k)) dst = detail::get_number(t, k, "tolerances");
            };
            set("hermitian", c.tol.hermitian);
            set("trace", c.tol.trace);
            set("min_eigenvalue", c.tol.min_eigenvalue);
            set("unitary", c.tol.unitary);
            set("negativity_clip", c.tol.negativity_clip);
            set("fock_tail", c.tol.fock_tail);
            set("trace_drift", c.tol.trace_drift);
            set("max_condition", c.tol.max_condition);
        }
        if (merged.contains("sweep") && !merged["sweep"].is_null()) {
            if (!merged["sweep"].is_array()) throw ConfigError("sweep must be an array of axes");
            for (const auto& ax : merged["sweep"]) {
                detail::reject_unknown(ax, {"path", "values"}, "sweep axis");
                SweepAxis a;
                a.path = ax.at("path").get<std::string>();
                if (!ax.at("values").is_array() || ax["values"].empty())
                    throw ConfigError("sweep axis '" + a.path + "' needs a non-empty value list");
                for (const auto& v : ax["values"]) a.values.push_back(v);
                json probe = merged;
                probe.erase("sweep");
                if (!probe.contains(sweep_pointer(a.path)))
                    throw ConfigError("sweep axis '" + a.path + "' does not reference an existing field");
                c.sweep.push_back(std::move(a));
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return c;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

// Run duration and sampling derived from the model.
struct RunTiming {
    double tau = 0.0;
    double t_final = 0.0;
    int points = 0;
    double step = 0.0;
};

inline RunTiming run_timing(const ScenarioConfig& c) {
    RunTiming r;
    r.tau = transfer_time(c.model, c.model.n_photon);
    r.t_final = c.t_in_tau ? c.t_final * r.tau : c.t_final;
    if (c.record_points > 0)
        r.points = c.record_points;
    else
        r.points = c.t_in_tau ? static_cast<int>(std::lround(c.t_final * 100.0)) + 1 : 201;
    r.points = std::max(r.points, 5);
    r.step = r.t_final / (r.points - 1);
    return r;
}

}  // namespace rcjc
