// sweep.hpp — Cartesian parameter sweeps over a scenario with a bounded worker pool.
#pragma once

#include <atomic>
#include <mutex>

#include "rcjc/comparison.hpp"

namespace rcjc {

enum class PointStatus { ok, config_error, numerical_error, error };

inline const char* to_string(PointStatus s) {
    switch (s) {
        case PointStatus::ok: return "ok";
        case PointStatus::config_error: return "config_error";
        case PointStatus::numerical_error: return "numerical_error";
        case PointStatus::error: return "error";
    }
    return "?";
}

struct SweepPoint {
    std::vector<std::size_t> index;  // per-axis value index
    std::vector<json> values;
    PointStatus status = PointStatus::ok;
    std::string error;
    std::optional<RunArtifact> artifact;
};

struct SweepResult {
    std::vector<SweepAxis> axes;
    std::vector<SweepPoint> points;  // row-major over axes, last axis fastest
    double runtime_s = 0.0;
};

// Resolved config of one grid point (sweep removed, values substituted).
inline json sweep_point_config(const ScenarioConfig& base, const std::vector<std::size_t>& index) {
    json j = base.resolved;
    j.erase("sweep");
    for (std::size_t a = 0; a < base.sweep.size(); ++a) j[sweep_pointer(base.sweep[a].path)] = base.sweep[a].values.at(index[a]);
    return j;
}

inline std::vector<std::vector<std::size_t>> sweep_grid(const std::vector<SweepAxis>& axes) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> idx(axes.size(), 0);
    if (axes.empty()) return {idx};
    for (const auto& a : axes)
        if (a.values.empty()) return out;
    while (true) {
        out.push_back(idx);
        int k = static_cast<int>(axes.size()) - 1;
        while (k >= 0 && ++idx[k] == axes[k].values.size()) idx[k--] = 0;
        if (k < 0) break;
    }
    return out;
}

// Points run on min(jobs, RCJC_THREADS cap) workers; results are stored by grid index.
inline SweepResult run_sweep(const ScenarioConfig& cfg, unsigned jobs = 0, const RunOptions& opt = {}) {
    const auto wall0 = std::chrono::steady_clock::now();
    SweepResult res;
    res.axes = cfg.sweep;
    for (auto& idx : sweep_grid(cfg.sweep)) {
        SweepPoint p;
        for (std::size_t a = 0; a < idx.size(); ++a) p.values.push_back(cfg.sweep[a].values[idx[a]]);
        p.index = std::move(idx);
        res.points.push_back(std::move(p));
    }
    const unsigned cap = thread_cap();
    unsigned workers = jobs == 0 ? cap : std::min(jobs, cap);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(res.points.size())));
    RunOptions inner = opt;
    if (workers > 1) inner.threads = 1;

    std::atomic<std::size_t> next{0};
    const auto work = [&]() {
        for (std::size_t i = next++; i < res.points.size(); i = next++) {
            SweepPoint& p = res.points[i];
            try {
                const ScenarioConfig pc = parse_config(sweep_point_config(cfg, p.index));
                p.artifact = run_comparison(pc, inner);
            } catch (const ConfigError& e) {
                p.status = PointStatus::config_error;
                p.error = e.what();
            } catch (const NumericalGuardError& e) {
                p.status = PointStatus::numerical_error;
                p.error = e.what();
            } catch (const std::exception& e) {
                p.status = PointStatus::error;
                p.error = e.what();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    res.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return res;
}

namespace detail {

inline std::string csv_field(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

inline std::string value_field(const json& v) {
    if (v.is_number()) return format_double(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

}  // namespace detail

// One row per grid point: axis values → max infidelity, final purity, σ>0 measure.
inline void write_sweep_csv(const SweepResult& r, std::ostream& os) {
    os << "point";
    for (const auto& a : r.axes) os << "," << detail::csv_field(a.path);
    os << ",status,max_infidelity,final_purity,sigma_positive_measure,error\n";
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const auto& p = r.points[i];
        os << i;
        for (const auto& v : p.values) os << "," << detail::csv_field(detail::value_field(v));
        os << "," << to_string(p.status);
        if (p.artifact) {
            const auto& s = p.artifact->summary;
            os << "," << format_double(s["max_infidelity"].get<double>()) << ","
               << format_double(s["final"]["purity_total"].get<double>()) << ",";
            if (s["sigma"].contains("target")) os << format_double(s["sigma"]["target"]["positive_measure"].get<double>());
            os << ",";
        } else {
            os << ",,,," << detail::csv_field(p.error);
        }
        os << "\n";
    }
}

inline std::string point_dir_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "point_%03zu", i);
    return buf;
}

inline void write_sweep(const SweepResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < r.points.size(); ++i)
        if (r.points[i].artifact) write_artifact(*r.points[i].artifact, dir / point_dir_name(i));
    std::ofstream f(dir / "sweep.csv");
    if (!f) throw ConfigError("cannot write " + (dir / "sweep.csv").string());
    write_sweep_csv(r, f);
}

}  // namespace rcjc
