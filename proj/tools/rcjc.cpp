// rcjc — command-line front end: simulate, sweep, map-spectral, validate.
#include <iostream>

#include "CLI11.hpp"
#include "rcjc/rcjc.hpp"

namespace {

enum Exit { ok = 0, config_error = 1, numerical_error = 2, validation_failure = 3 };

rcjc::Integrator parse_integrator(const std::string& s) {
    if (s == "rk4") return rcjc::Integrator::rk4;
    if (s == "spectral") return rcjc::Integrator::spectral;
    return rcjc::Integrator::both;
}

std::string default_out(const rcjc::ScenarioConfig& c) {
    if (!c.output.empty()) return c.output;
    return "out/" + (c.preset.empty() ? std::string("run") : c.preset);
}

void print_run(const rcjc::RunArtifact& a, const std::string& dir) {
    const auto& s = a.summary;
    std::cout << "wrote " << dir << "\n"
              << "  samples        " << s["samples"] << "\n"
              << "  tau            " << s["tau"] << "\n"
              << "  max 1-F        " << s["max_infidelity"] << "\n"
              << "  final purity   " << s["final"]["purity_total"] << "\n"
              << "  methods        " << s["methods"]["lab"].get<std::string>() << " / "
              << s["methods"]["target"].get<std::string>() << "\n"
              << "  runtime [s]    " << s["runtime_s"] << "\n";
    for (const auto& w : s["warnings"]) std::cout << "  warning: " << w.get<std::string>() << "\n";
}

int simulate(const std::string& path, const std::string& out, const std::string& integrator) {
    auto cfg = rcjc::load_config(path);
    if (!integrator.empty()) {
        cfg.integrator = parse_integrator(integrator);
        cfg.resolved["integrator"] = integrator;
    }
    if (!cfg.sweep.empty()) std::cerr << "note: sweep axes ignored by simulate; base point only\n";
    const auto art = rcjc::run_comparison(cfg);
    const std::string dir = out.empty() ? default_out(cfg) : out;
    rcjc::write_artifact(art, dir);
    print_run(art, dir);
    return ok;
}

int sweep(const std::string& path, const std::string& out, unsigned jobs) {
    const auto cfg = rcjc::load_config(path);
    if (cfg.sweep.empty()) throw rcjc::ConfigError("config has no sweep axes");
    const auto res = rcjc::run_sweep(cfg, jobs);
    const std::string dir = out.empty() ? default_out(cfg) : out;
    rcjc::write_sweep(res, dir);
    rcjc::write_sweep_csv(res, std::cout);
    std::size_t failed = 0;
    for (const auto& p : res.points) failed += p.status != rcjc::PointStatus::ok;
    std::cout << res.points.size() << " points, " << failed << " failed, " << res.runtime_s << " s\n";
    return failed ? numerical_error : ok;
}

int map_spectral(double pi_alpha, double gamma, double omega0, double lambda_cut) {
    const rcjc::UnderdampedSD sd{pi_alpha / std::numbers::pi, gamma, omega0};
    const auto rc = rcjc::map_to_rc(sd, lambda_cut);
    rcjc::json j{{"lambda", rc.lambda},
                 {"Omega", rc.Omega},
                 {"gamma", rc.residual.gamma},
                 {"Gamma", rc.Gamma()},
                 {"Lambda", std::isinf(rc.residual.Lambda) ? rcjc::json("inf") : rcjc::json(rc.residual.Lambda)},
                 {"two_lambda_over_Omega", 2.0 * rc.lambda / rc.Omega}};
    std::cout << j.dump(2) << "\n";
    return ok;
}

int validate(bool strict, const std::string& fault) {
    rcjc::ValidateOptions opt;
    opt.strict = strict;
    if (fault == "theta-sign") opt.fault = rcjc::Fault::theta_sign;
    const auto rep = rcjc::validate(opt);
    rcjc::print_report(rep, std::cout);
    return rep.all_passed() ? ok : validation_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-boson reaction-coordinate simulator of multiphoton Jaynes-Cummings models"};
    app.require_subcommand(1);

    std::string config, out, integrator, fault;
    unsigned jobs = 0;
    double pi_alpha = 0, gamma = 0, omega0 = 1, lambda_cut = rcjc::kInf;
    bool strict = false;

    auto* sim = app.add_subcommand("simulate", "run one frame comparison and write CSV/JSON artifacts");
    sim->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out, "output directory");
    sim->add_option("--integrator", integrator, "override the integrator")
        ->check(CLI::IsMember({"rk4", "spectral", "both"}));

    auto* sw = app.add_subcommand("sweep", "run every point of the config's sweep axes");
    sw->add_option("--config", config, "scenario JSON with sweep axes")->required()->check(CLI::ExistingFile);
    sw->add_option("--jobs", jobs, "parallel workers (capped by RCJC_THREADS)");
    sw->add_option("--out", out, "output directory");

    auto* ms = app.add_subcommand("map-spectral", "map an underdamped spectral density to RC parameters");
    ms->add_option("--pi-alpha", pi_alpha, "coupling strength πα")->required();
    ms->add_option("--gamma", gamma, "peak width Γ")->required();
    ms->add_option("--omega0", omega0, "peak frequency ω₀")->required();
    ms->add_option("--Lambda", lambda_cut, "residual cutoff (default infinite)");

    auto* va = app.add_subcommand("validate", "run the invariant and oracle suites");
    va->add_flag("--strict", strict, "tighten every bound by 10x and report margins");
    va->add_option("--fault", fault, "inject a fault")->check(CLI::IsMember({"theta-sign"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return simulate(config, out, integrator);
        if (sw->parsed()) return sweep(config, out, jobs);
        if (ms->parsed()) return map_spectral(pi_alpha, gamma, omega0, lambda_cut);
        if (va->parsed()) return validate(strict, fault);
    } catch (const rcjc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const rcjc::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return config_error;
    } catch (const rcjc::NumericalGuardError& e) {
        std::cerr << "numerical guard: " << e.what() << "\n";
        return numerical_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return numerical_error;
    }
    return ok;
}
