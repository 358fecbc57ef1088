// comparison.hpp — Lab vs multiphoton-frame propagation, Φ mapping and per-sample records.
#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <thread>

#include "rcjc/config.hpp"
#include "rcjc/evolve.hpp"
#include "rcjc/transforms.hpp"

namespace rcjc {

// Worker cap: RCJC_THREADS if set, else the hardware concurrency.
inline unsigned thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RCJC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<unsigned>(v);
    }
    return hw;
}

struct RunOptions {
    bool flip_theta = false;  // fault injection: reverses Θ in the conjugated target rates
    unsigned threads = 0;     // 0: thread_cap()
};

struct RunArtifact {
    json config;
    TimeSeries lab, mapped, target;
    json summary;
};

namespace detail {

class Trajectory {
public:
    virtual ~Trajectory() = default;
    virtual Matrix at(double t) = 0;
};

class SpectralTrajectory final : public Trajectory {
public:
    SpectralTrajectory(std::shared_ptr<const SpectralPropagator> p, const Matrix& rho0)
        : p_(std::move(p)), tr_(p_->start(rho0)) {}
    Matrix at(double t) override { return p_->state_at(tr_, t); }

private:
    std::shared_ptr<const SpectralPropagator> p_;
    SpectralPropagator::Trajectory tr_;
};

class Rk4Trajectory final : public Trajectory {
public:
    Rk4Trajectory(std::shared_ptr<const Generator> g, const Matrix& rho0, double dt)
        : g_(std::move(g)), st_(*g_, rho0, dt) {}
    Matrix at(double t) override { return st_.advance_to(t); }

private:
    std::shared_ptr<const Generator> g_;
    Rk4Stepper st_;
};

// σ(t) propagated in the co-moving frame, returned as Φ σ Φ†.
class ComovingTrajectory final : public Trajectory {
public:
    ComovingTrajectory(std::unique_ptr<Trajectory> inner, std::shared_ptr<const FrameMap> fm)
        : inner_(std::move(inner)), fm_(std::move(fm)) {}
    Matrix at(double t) override { return fm_->to_frame(inner_->at(t), t); }

private:
    std::unique_ptr<Trajectory> inner_;
    std::shared_ptr<const FrameMap> fm_;
};

// A propagation route for one frame, instantiated per initial lab state.
struct Route {
    std::string method;
    double condition = 1.0;
    std::vector<std::string> warnings;
    std::function<std::unique_ptr<Trajectory>(const Matrix& lab0)> make;
};

inline Route spectral_route(Generator g, const Tolerances& tol, double fallback_dt,
                            std::function<Matrix(const Matrix&)> initial, std::shared_ptr<const FrameMap> wrap) {
    auto p = std::make_shared<const SpectralPropagator>(std::move(g), tol, fallback_dt);
    Route r;
    r.method = p->method_name();
    r.condition = p->condition();
    r.warnings = p->warnings();
    r.make = [p, initial = std::move(initial), wrap](const Matrix& lab0) -> std::unique_ptr<Trajectory> {
        auto tr = std::make_unique<SpectralTrajectory>(p, initial(lab0));
        if (wrap) return std::make_unique<ComovingTrajectory>(std::move(tr), wrap);
        return tr;
    };
    return r;
}

inline Route rk4_route(Generator g, double dt, std::function<Matrix(const Matrix&)> initial, std::string method) {
    auto gp = std::make_shared<const Generator>(std::move(g));
    Route r;
    r.method = std::move(method);
    r.make = [gp, dt, initial = std::move(initial)](const Matrix& lab0) -> std::unique_ptr<Trajectory> {
        return std::make_unique<Rk4Trajectory>(gp, initial(lab0), dt);
    };
    return r;
}

struct Setup {
    ModelSpec spec;
    std::shared_ptr<const FrameMap> frame;
    std::vector<RateOperators> lab_rates;
    bool dissipative = false;
    Operator h_target;
};

inline std::vector<RateOperators> lab_rates(const ModelSpec& s, const Tolerances& tol) {
    std::vector<RateOperators> out;
    bool any = false;
    for (const auto& rc : s.rcs) any = any || rc.residual.gamma > 0;
    if (!any) return out;
    const Operator h = h_lab(s, 0.0);
    for (std::size_t k = 0; k < s.rcs.size(); ++k)
        out.push_back(build_rate_operators(h, static_cast<int>(k), s.rcs[k], s.beta, s.layout, tol));
    return out;
}

inline Route lab_route(const Setup& su, bool spectral, double dt, const Tolerances& tol) {
    const auto& s = su.spec;
    const auto ident = [](const Matrix& m) { return m; };
    if (!s.drivings.empty()) {
        Route r = rk4_route(Generator::time_dependent(s.layout.dims(), h_lab_factory(s), su.lab_rates), dt, ident, "rk4");
        if (spectral) r.warnings.push_back("time-dependent lab Hamiltonian: spectral propagation replaced by RK4");
        return r;
    }
    Generator g = Generator::constant(h_lab(s, 0.0), su.lab_rates);
    if (spectral) return spectral_route(std::move(g), tol, dt, ident, nullptr);
    return rk4_route(std::move(g), dt, ident, "rk4");
}

// Conjugated rate operators Φ(t) A Φ(t)† for the target frame.
inline RatesFactory conjugated_rates(const Setup& su, bool flip_theta) {
    struct Prep {
        FrameMap::Prepared x, chi, theta;
    };
    auto preps = std::make_shared<std::vector<Prep>>();
    for (const auto& r : su.lab_rates)
        preps->push_back({su.frame->prepare(r.x.matrix()), su.frame->prepare(r.chi.matrix()),
                          su.frame->prepare(r.theta.matrix())});
    const double sign = flip_theta ? -1.0 : 1.0;
    auto fm = su.frame;
    return [preps, fm, sign](double t, std::vector<DissipatorTerms>& out) {
        out.resize(preps->size());
        for (std::size_t k = 0; k < preps->size(); ++k) {
            out[k].x = fm->conjugated((*preps)[k].x, t);
            out[k].chi = fm->conjugated((*preps)[k].chi, t);
            out[k].theta = sign * fm->conjugated((*preps)[k].theta, t);
        }
    };
}

inline Route target_route(const Setup& su, bool spectral, double dt, const Tolerances& tol, bool flip_theta,
                          double comoving_tol = 1e-9) {
    auto fm = su.frame;
    const auto to_n0 = [fm](const Matrix& lab0) { return fm->to_frame(lab0, 0.0); };
    if (!su.dissipative) {
        Generator g = Generator::constant(su.h_target);
        if (spectral) return spectral_route(std::move(g), tol, dt, to_n0, nullptr);
        return rk4_route(std::move(g), dt, to_n0, "rk4");
    }
    std::vector<std::string> warns;
    if (spectral && !flip_theta && su.spec.drivings.empty()) {
        const double var = comoving_variation(su.spec);
        if (var <= comoving_tol) {
            Generator g = Generator::constant(comoving_hamiltonian(su.spec, 0.0), su.lab_rates);
            Route r = spectral_route(std::move(g), tol, dt, [](const Matrix& m) { return m; }, fm);
            r.method = "comoving-" + r.method;
            return r;
        }
        std::ostringstream os;
        os << "co-moving generator varies by " << var << "; target frame integrated with RK4";
        warns.push_back(os.str());
    }
    Route r = rk4_route(
        Generator::with_rates_factory(su.h_target, conjugated_rates(su, flip_theta), static_cast<int>(su.lab_rates.size())),
        dt, to_n0, "rk4");
    r.warnings = std::move(warns);
    return r;
}

inline Matrix initial_lab_state(const ModelSpec& s, SpinState spin, const Tolerances& tol) {
    Matrix rho = spin_state(spin).matrix();
    for (std::size_t k = 0; k < s.rcs.size(); ++k) {
        const double bw = std::isinf(s.beta) ? kInf : s.beta * s.rcs[k].Omega;
        const auto th = thermal_state(bw, s.layout.boson_dims()[k], tol);
        rho = detail::kron(rho, th.rho.matrix());
    }
    return rho;
}

struct FrameStats {
    double max_trace_drift = 0.0;
    double max_hermiticity = 0.0;
    double max_purity = 0.0;
    double min_eig = kInf;
    double max_tail = 0.0;
    double max_imag = 0.0;
    double spectrum_drift = 0.0;
    std::optional<RealVector> spectrum0;

    void add(const ObservableRecord& r, const RealVector& spectrum, bool track_spectrum) {
        max_trace_drift = std::max(max_trace_drift, std::abs(r.trace - 1.0));
        max_hermiticity = std::max(max_hermiticity, r.hermiticity);
        max_purity = std::max(max_purity, r.purity_total);
        min_eig = std::min(min_eig, r.min_eig);
        max_tail = std::max(max_tail, r.tail);
        max_imag = std::max(max_imag, r.imag_residue);
        if (track_spectrum) {
            if (!spectrum0) spectrum0 = spectrum;
            spectrum_drift = std::max(spectrum_drift, (spectrum - *spectrum0).cwiseAbs().maxCoeff());
        }
    }
    json to_json(bool track_spectrum) const {
        json j{{"max_trace_drift", max_trace_drift}, {"max_hermiticity", max_hermiticity},
               {"max_purity", max_purity},           {"min_eigenvalue", min_eig},
               {"max_tail", max_tail},               {"max_imag_residue", max_imag}};
        if (track_spectrum) j["spectrum_drift"] = spectrum_drift;
        return j;
    }
};

inline void guard_tail(const ObservableRecord& r, double t, const char* frame, const Tolerances& tol) {
    if (r.tail > tol.fock_tail) {
        std::ostringstream os;
        os << "Fock-tail population " << r.tail << " in the " << frame << " frame at t = " << t
           << " exceeds " << tol.fock_tail << "; raise N";
        throw NumericalGuardError(os.str());
    }
}

inline json intervals_json(const SigmaAnalysis& a) {
    json arr = json::array();
    for (const auto& iv : a.positive) arr.push_back({{"t_begin", iv.t_begin}, {"t_end", iv.t_end}});
    return arr;
}

[[noreturn]] inline void rethrow_with_config(const json& cfg) {
    const std::string suffix = "\nconfig: " + cfg.dump();
    try {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(e.what() + suffix);
    } catch (const NumericalGuardError& e) {
        throw NumericalGuardError(e.what() + suffix);
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(e.what() + suffix);
    }
}

}  // namespace detail

inline RunArtifact run_comparison(const ScenarioConfig& cfg, const RunOptions& opt = {}) {
    const auto wall0 = std::chrono::steady_clock::now();
    try {
        const Tolerances& tol = cfg.tol;
        const RunTiming timing = run_timing(cfg);
        const unsigned threads = opt.threads ? opt.threads : thread_cap();

        detail::Setup su;
        su.spec = cfg.model;
        su.frame = std::make_shared<const FrameMap>(cfg.model);
        su.lab_rates = detail::lab_rates(cfg.model, tol);
        su.dissipative = !su.lab_rates.empty();
        su.h_target = h_multiphoton(cfg.model);

        const SpaceLayout& layout = cfg.model.layout;
        const bool spectral = cfg.integrator != Integrator::rk4;
        const bool both = cfg.integrator == Integrator::both;

        // RK4 step: an integer number of steps per recording interval.
        const double dt_heur = cfg.dt ? *cfg.dt : default_dt(Generator::constant(h_lab(cfg.model, 0.0)), timing.tau);
        const double dt = timing.step / std::ceil(timing.step / dt_heur - 1e-9);

        // Frame setups run as independent tasks.
        const auto build_lab = [&](bool sp) { return detail::lab_route(su, sp, dt, tol); };
        const auto build_target = [&](bool sp) { return detail::target_route(su, sp, dt, tol, opt.flip_theta); };
        detail::Route lab, target;
        if (threads > 1) {
            auto fl = std::async(std::launch::async, build_lab, spectral);
            target = build_target(spectral);
            lab = fl.get();
        } else {
            lab = build_lab(spectral);
            target = build_target(spectral);
        }
        std::optional<detail::Route> lab_rk4, target_rk4;
        if (both) {
            lab_rk4 = build_lab(false);
            target_rk4 = build_target(false);
        }

        std::vector<SpinState> states{cfg.initial_spin};
        for (SpinState s : cfg.pair) states.push_back(s);
        std::vector<Matrix> lab0;
        std::vector<std::unique_ptr<detail::Trajectory>> lab_tr, tgt_tr;
        for (SpinState s : states) {
            lab0.push_back(detail::initial_lab_state(cfg.model, s, tol));
            lab_tr.push_back(lab.make(lab0.back()));
            tgt_tr.push_back(target.make(lab0.back()));
        }
        std::unique_ptr<detail::Trajectory> lab_chk, tgt_chk;
        if (both) {
            lab_chk = lab_rk4->make(lab0[0]);
            tgt_chk = target_rk4->make(lab0[0]);
        }

        RunArtifact art;
        art.config = cfg.resolved;
        const bool has_pair = !cfg.pair.empty();
        const bool unitary = !su.dissipative;
        std::vector<double> max_inf(states.size(), 0.0);
        std::vector<double> td_lab, td_map, td_tgt;
        double both_lab = 0.0, both_tgt = 0.0;
        std::vector<detail::FrameStats> stats(3);
        const char* frame_names[3] = {"lab", "mapped", "target"};
        const std::vector<int> keep{0, 1};

        for (int k = 0; k < timing.points; ++k) {
            const double t = k == timing.points - 1 ? timing.t_final : k * timing.step;
            const Matrix phi = su.frame->phi(t);
            std::vector<Matrix> rl(states.size()), rm(states.size()), rt(states.size());
            for (std::size_t i = 0; i < states.size(); ++i) {
                rl[i] = lab_tr[i]->at(t);
                rt[i] = tgt_tr[i]->at(t);
                rm[i] = phi * rl[i] * phi.adjoint();
                guard_state(rl[i], t, tol);
                guard_state(rt[i], t, tol);
            }
            const Matrix* frames[3] = {&rl[0], &rm[0], &rt[0]};
            TimeSeries* series[3] = {&art.lab, &art.mapped, &art.target};
            for (int f = 0; f < 3; ++f) {
                const auto rec = record_observables(*frames[f], layout, tol);
                detail::guard_tail(rec, t, frame_names[f], tol);
                append_observables(*series[f], t, rec);
                stats[f].add(rec, rec.spectrum, unitary);
            }
            for (std::size_t i = 1; i < states.size(); ++i)
                for (int f = 0; f < 3; ++f) {
                    const Matrix& m = f == 0 ? rl[i] : (f == 1 ? rm[i] : rt[i]);
                    const auto rec = record_observables(m, layout, tol);
                    detail::guard_tail(rec, t, frame_names[f], tol);
                    stats[f].add(rec, rec.spectrum, false);
                }
            double fid0 = 0.0;
            for (std::size_t i = 0; i < states.size(); ++i) {
                const double fid = fidelity(rt[i], rm[i], tol);
                if (i == 0) fid0 = fid;
                max_inf[i] = std::max(max_inf[i], 1.0 - fid);
            }
            art.mapped.channel("fid").push_back(fid0);
            art.target.channel("fid").push_back(fid0);
            if (has_pair) {
                const auto reduced = [&](const Matrix& m) {
                    return partial_trace(Operator(layout.dims(), m), keep).matrix();
                };
                td_lab.push_back(trace_distance(reduced(rl[1]), reduced(rl[2]), tol));
                td_map.push_back(trace_distance(reduced(rm[1]), reduced(rm[2]), tol));
                td_tgt.push_back(trace_distance(reduced(rt[1]), reduced(rt[2]), tol));
            }
            if (both) {
                both_lab = std::max(both_lab, trace_distance(lab_chk->at(t), rl[0], tol));
                both_tgt = std::max(both_tgt, trace_distance(tgt_chk->at(t), rt[0], tol));
            }
        }

        json sigma_json = json::object();
        if (has_pair) {
            const std::vector<double>* tds[3] = {&td_lab, &td_map, &td_tgt};
            for (int f = 0; f < 3; ++f) {
                const auto a = analyze_sigma(art.lab.t, *tds[f]);
                TimeSeries& ts = f == 0 ? art.lab : (f == 1 ? art.mapped : art.target);
                ts.channel("tdist") = *tds[f];
                ts.channel("sigma") = a.sigma;
                sigma_json[frame_names[f]] = {{"intervals", detail::intervals_json(a)},
                                              {"positive_measure", a.positive_measure}};
            }
        }

        json& s = art.summary;
        s["preset"] = cfg.preset;
        s["samples"] = timing.points;
        s["tau"] = timing.tau;
        s["t_final"] = timing.t_final;
        s["record_step"] = timing.step;
        s["rk4_dt"] = dt;
        s["max_infidelity"] = max_inf[0];
        json by_state = json::object();
        for (std::size_t i = 0; i < states.size(); ++i) by_state[to_string(states[i])] = max_inf[i];
        s["max_infidelity_by_state"] = by_state;
        s["sigma"] = sigma_json;
        s["final"] = {{"purity_total", art.target.channel("purity_total").back()},
                      {"purity_spin", art.target.channel("purity_spin").back()},
                      {"entropy_spin", art.target.channel("entropy_spin").back()},
                      {"lab_purity_total", art.lab.channel("purity_total").back()}};
        s["truncation"] = {{"fock", layout.boson_dims()},
                           {"max_tail_lab", stats[0].max_tail},
                           {"max_tail_mapped", stats[1].max_tail},
                           {"max_tail_target", stats[2].max_tail}};
        s["conservation"] = {{"lab", stats[0].to_json(unitary)},
                             {"mapped", stats[1].to_json(unitary)},
                             {"target", stats[2].to_json(unitary)}};
        const auto& d = cfg.diagnostics;
        s["diagnostics"] = {{"lamb_dicke", d.lamb_dicke},
                            {"rwa", d.rwa},
                            {"delta0", d.delta0},
                            {"coupling", coupling_strength(cfg.model, cfg.model.n_photon)},
                            {"validity_k", validity_duration(cfg.model, cfg.model.n_photon)},
                            {"nu_tilde", cfg.model.nu_tilde},
                            {"omega_tilde", cfg.model.omega_tilde},
                            {"beta", std::isinf(cfg.model.beta) ? json("inf") : json(cfg.model.beta)}};
        json warnings = json::array();
        for (const auto& w : d.warnings) warnings.push_back(w);
        for (const auto& w : lab.warnings) warnings.push_back(w);
        for (const auto& w : target.warnings) warnings.push_back(w);
        for (const auto& n : cfg.notes) warnings.push_back(n);
        s["warnings"] = warnings;
        s["methods"] = {{"lab", lab.method},
                        {"target", target.method},
                        {"lab_condition", lab.condition},
                        {"target_condition", target.condition}};
        if (both) s["rk4_vs_spectral"] = {{"lab", both_lab}, {"target", both_tgt}};
        s["integrator"] = to_string(cfg.integrator);
        s["runtime_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        return art;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what() + "\nconfig: " + cfg.resolved.dump());
    } catch (const std::exception&) {
        detail::rethrow_with_config(cfg.resolved);
    }
}

// ---- Artifact output ----

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv(const TimeSeries& ts, std::ostream& os) {
    os << "t";
    for (const auto& n : ts.names) os << "," << n;
    os << "\n";
    for (std::size_t i = 0; i < ts.t.size(); ++i) {
        os << format_double(ts.t[i]);
        for (const auto& c : ts.columns) os << "," << format_double(c.at(i));
        os << "\n";
    }
}

inline TimeSeries read_csv(std::istream& is) {
    TimeSeries ts;
    std::string line;
    if (!std::getline(is, line)) throw InvalidArgument("empty CSV");
    std::stringstream hs(line);
    std::string cell;
    std::getline(hs, cell, ',');
    while (std::getline(hs, cell, ',')) ts.channel(cell);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::getline(ls, cell, ',');
        ts.t.push_back(std::stod(cell));
        for (auto& c : ts.columns) {
            if (!std::getline(ls, cell, ',')) throw InvalidArgument("short CSV row");
            c.push_back(std::stod(cell));
        }
    }
    return ts;
}

inline void write_artifact(const RunArtifact& a, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto put = [&](const char* name, const TimeSeries& ts) {
        std::ofstream f(dir / name);
        if (!f) throw ConfigError("cannot write " + (dir / name).string());
        write_csv(ts, f);
    };
    put("lab.csv", a.lab);
    put("mapped.csv", a.mapped);
    put("target.csv", a.target);
    std::ofstream(dir / "summary.json") << a.summary.dump(2) << "\n";
    std::ofstream(dir / "config.json") << a.config.dump(2) << "\n";
}

}  // namespace rcjc
