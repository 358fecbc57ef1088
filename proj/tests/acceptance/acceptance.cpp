#include <algorithm>
#include <chrono>
#include <cstdio>

#include "oracles.hpp"
#include "rcjc/rcjc.hpp"

using namespace rcjc;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    int id;
    bool pass;
    std::string detail;
};

std::vector<Outcome> outcomes;
std::vector<RunArtifact> all_runs;

void report(int id, bool pass, const std::string& detail) {
    outcomes.push_back({id, pass, detail});
    std::fprintf(stderr, "criterion %d done\n", id);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RunArtifact run(json j) {
    j["schema"] = 1;
    auto art = run_comparison(parse_config(j));
    all_runs.push_back(art);
    return art;
}

double max_inf(const RunArtifact& a) { return a.summary["max_infidelity"].get<double>(); }

std::size_t index_at(const TimeSeries& ts, double t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < ts.t.size(); ++i)
        if (std::abs(ts.t[i] - t) < std::abs(ts.t[best] - t)) best = i;
    return best;
}

void criterion1() {
    const auto t0 = Clock::now();
    const auto a = run({{"preset", "fig2a"}});
    const double secs = seconds_since(t0);
    const double tau = a.summary["tau"].get<double>();
    const std::size_t k = index_at(a.mapped, tau);
    const double n0 = a.mapped.channel("n1").front(), sz0 = a.mapped.channel("sz").front();
    const double n = a.mapped.channel("n1")[k], sz = a.mapped.channel("sz")[k];
    const bool ok = std::abs(n0) <= 0.05 && std::abs(sz0 - 1.0) <= 0.05 && std::abs(n - 2.0) <= 0.05 &&
                    std::abs(sz + 1.0) <= 0.05 && std::abs(tau - 5553.6) <= 0.1 && secs <= 300.0;
    report(1, ok,
           fmt("tau2 = %.2f; mapped <n> %.4f -> %.4f, <sz> %.4f -> %.4f at t = tau2 (target <n> %.4f, <sz> %.4f); "
               "%.1f s",
               tau, n0, n, sz0, sz, a.target.channel("n1")[k], a.target.channel("sz")[k], secs));
}

void criterion2() {
    std::vector<double> inf;
    for (double nth : {1e-3, 1e-2, 1e-1}) inf.push_back(max_inf(run({{"preset", "fig2a"}, {"model", {{"n_th", nth}}}})));
    const bool band = inf[0] <= 5e-2;
    const bool mono = inf[0] < inf[1] && inf[1] < inf[2];
    report(2, band && mono,
           fmt("max 1-F = %.5f (n_th 1e-3), %.5f (1e-2), %.5f (1e-1); band %s, strictly increasing %s", inf[0], inf[1],
               inf[2], band ? "yes" : "no", mono ? "yes" : "no"));
}

void criterion3() {
    const auto t0 = Clock::now();
    const double strong = max_inf(run({{"preset", "fig2d"}}));
    const double weak = max_inf(run({{"preset", "fig2c"}}));
    const double secs = seconds_since(t0);
    report(3, strong >= 0.1 && weak <= 5e-2 && secs <= 600.0,
           fmt("max 1-F = %.4f at eps0 = 1e-2 (need >= 0.1), %.4f at eps0 = 2e-3 (need <= 0.05); %.1f s", strong, weak,
               secs));
}

void criterion4() {
    const auto a = run({{"preset", "fig3"}});
    const double step = a.summary["record_step"].get<double>();
    const auto& target = a.summary["sigma"]["target"]["intervals"];
    const auto& mapped = a.summary["sigma"]["mapped"]["intervals"];
    bool match = !target.empty() && target.size() == mapped.size();
    double worst = 0.0;
    if (match)
        for (std::size_t i = 0; i < target.size(); ++i)
            for (const char* key : {"t_begin", "t_end"})
                worst = std::max(worst, std::abs(target[i][key].get<double>() - mapped[i][key].get<double>()));
    match = match && worst <= step * (1.0 + 1e-9);
    std::string ivs;
    for (const auto& iv : target) ivs += fmt(" [%.1f, %.1f]", iv["t_begin"].get<double>(), iv["t_end"].get<double>());
    report(4, match,
           fmt("%zu target interval(s)%s; %zu mapped; max endpoint offset %.2f vs step %.2f", target.size(), ivs.c_str(),
               mapped.size(), worst, step));
}

void criterion5() {
    json j{{"schema", 1}, {"preset", "fig4-sweep"}};
    const auto res = run_sweep(parse_config(j));
    std::vector<double> s_lab, s_tgt, inf;
    bool ran = true;
    for (const auto& p : res.points) {
        if (!p.artifact) {
            ran = false;
            report(5, false, "sweep point failed: " + p.error);
            return;
        }
        all_runs.push_back(*p.artifact);
        const auto& a = *p.artifact;
        const std::size_t k = index_at(a.lab, a.summary["tau"].get<double>());
        s_lab.push_back(a.lab.channel("entropy_spin")[k]);
        s_tgt.push_back(a.target.channel("entropy_spin")[k]);
        inf.push_back(max_inf(a));
    }
    // values: Gamma/nu = 0, 0.02, 0.1, 0.2
    const bool damped = s_lab[3] > 0.5;
    const bool revival = s_lab[0] <= 0.1;
    const bool band = ran && inf[1] <= 5e-2 && inf[2] <= 5e-2 && inf[3] <= 5e-2;
    report(5, damped && revival && band,
           fmt("spin S_vN(tau2) = %.3f at Gamma/nu = 0.2 (need > 0.5), %.3f at Gamma = 0 (need <= 0.1) "
               "[multiphoton frame: %.3f, %.3f]; max 1-F = %.4f, %.4f, %.4f for Gamma/nu = 0.02, 0.1, 0.2",
               s_lab[3], s_lab[0], s_tgt[3], s_tgt[0], inf[1], inf[2], inf[3]));
}

void criterion6() {
    double worst = 0.0;
    for (double ratio : {1e-3, 1e-2, 1e-1}) {
        const UnderdampedSD sd{0.02 / std::numbers::pi, ratio, 1.0};
        const auto rc = map_to_rc(sd);
        for (int k = 0; k < 100; ++k) {
            const double w = std::pow(10.0, -2.0 + 3.0 * k / 99.0);
            const double ref = eval_underdamped(sd, w);
            worst = std::max(worst, std::abs(reconstruct_sb(rc, w) - ref) / std::abs(ref));
        }
    }
    report(6, worst <= 1e-12, fmt("max relative round-trip error %.3e", worst));
}

void criterion7() {
    const auto r = suites::t_identity_residues(16, -0.1);
    const double worst = *std::max_element(r.begin(), r.end());
    report(7, worst <= 1e-8, fmt("max residue %.3e over %zu identities (N = 16, alpha = -0.1)", worst, r.size()));
}

void criterion8() {
    // (a) dissipative spin-boson point at N = 12, total dimension 24
    const auto cfg = parse_config(json{{"schema", 1}, {"preset", "fig4"}, {"model", {{"fock", {12}}}}});
    const auto& s = cfg.model;
    const Operator h = h_lab(s);
    const auto r = build_rate_operators(h, 0, s.rcs[0], s.beta, s.layout);
    const auto b = oracle::brute_rates(oracle::Mat(h.matrix()), oracle::Mat(r.x.matrix()), s.rcs[0].residual.gamma,
                                       s.rcs[0].residual.Lambda, s.beta);
    const double ea = std::max(max_abs(Matrix(r.chi.matrix() - Matrix(b.chi))), max_abs(Matrix(r.theta.matrix() - Matrix(b.theta))));
    // (b) both integrators on the scaled dissipative preset
    const auto a = run({{"preset", "fig4-scaled"}, {"t_final", 0.2}, {"integrator", "both"}});
    const double eb = std::max(a.summary["rk4_vs_spectral"]["lab"].get<double>(), a.summary["rk4_vs_spectral"]["target"].get<double>());
    // (c) order of RK4 on qubit precession
    const double slope = suites::rk4_order_slope();
    report(8, ea <= 1e-12 && eb <= 1e-7 && slope >= 3.8 && slope <= 4.2,
           fmt("(a) rate operators vs brute force %.3e (dim %ld); (b) RK4 vs spectral trace distance %.3e; (c) slope %.3f",
               ea, static_cast<long>(h.dim()), eb, slope));
}

void criterion9() {
    double trace = 0.0, herm = 0.0, pur = 0.0, tail = 0.0, spec = 0.0;
    std::size_t unitary_runs = 0;
    for (const auto& a : all_runs)
        for (const char* f : {"lab", "mapped", "target"}) {
            const auto& c = a.summary["conservation"][f];
            trace = std::max(trace, c["max_trace_drift"].get<double>());
            herm = std::max(herm, c["max_hermiticity"].get<double>());
            pur = std::max(pur, c["max_purity"].get<double>());
            tail = std::max(tail, c["max_tail"].get<double>());
            if (c.contains("spectrum_drift")) {
                spec = std::max(spec, c["spectrum_drift"].get<double>());
                unitary_runs += f[0] == 'l';
            }
        }
    report(9, trace <= 1e-8 && herm <= 1e-9 && pur <= 1.0 + 1e-9 && tail <= 1e-6 && spec <= 1e-8,
           fmt("%zu runs (%zu unitary): trace drift %.2e, hermiticity %.2e, purity - 1 %.2e, tail %.2e, spectrum drift %.2e",
               all_runs.size(), unitary_runs, trace, herm, pur - 1.0, tail, spec));
}

void criterion10() {
    const auto base_cfg = parse_config(json{{"schema", 1}, {"preset", "fig2a"}});
    const double k = validity_duration(base_cfg.model, 2);
    const double tau = transfer_time(base_cfg.model, 2);
    const double base = max_inf(run({{"preset", "fig2a"}, {"t_unit", "absolute"}, {"t_final", std::min(k, 2.0) * tau}}));
    const double eps = 2.0 * base_cfg.model.epsilon0;
    const double doubled = max_inf(run({{"preset", "fig2a"},
                                        {"model", {{"epsilon0", eps}}},
                                        {"t_unit", "absolute"},
                                        {"t_final", 2.0 * k * tau},
                                        {"record_points", 1001}}));
    const double ratio = doubled / base;
    report(10, std::abs(k - 2.83) <= 0.01 && base <= 5e-2 && ratio >= 3.0,
           fmt("k = %.4f; max 1-F = %.5f over [0, %.2f tau2]; %.5f with eps0 doubled over [0, %.2f tau2]; growth x%.2f", k,
               base, std::min(k, 2.0), doubled, 2.0 * k, ratio));
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    const std::vector<std::pair<int, void (*)()>> criteria{{1, criterion1}, {2, criterion2}, {3, criterion3},
                                                           {4, criterion4}, {5, criterion5}, {6, criterion6},
                                                           {7, criterion7}, {8, criterion8}, {10, criterion10},
                                                           {9, criterion9}};
    for (const auto& [id, fn] : criteria) {
        try {
            fn();
        } catch (const std::exception& e) {
            report(id, false, std::string("error: ") + e.what());
        }
    }
    std::ranges::sort(outcomes, {}, &Outcome::id);
    int failed = 0;
    for (const auto& o : outcomes) {
        std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", o.id, o.detail.c_str());
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed (%.0f s)\n", static_cast<int>(outcomes.size()) - failed, outcomes.size(),
                seconds_since(t0));
    return failed ? 1 : 0;
}
