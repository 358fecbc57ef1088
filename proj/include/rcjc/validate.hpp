// validate.hpp — Cross-module invariant and oracle suites with measured bounds.
#pragma once

#include <iomanip>
#include <ostream>

#include "rcjc/comparison.hpp"

namespace rcjc {

enum class Fault { none, theta_sign };

struct ValidateOptions {
    bool strict = false;  // bounds tightened by 10×
    Fault fault = Fault::none;
};

struct SuiteResult {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool lower_bound = false;  // measured ≥ bound passes (otherwise ≤)
    bool passed = false;
    std::string detail;

    double margin() const {
        if (lower_bound) return bound > 0 ? measured / bound : kInf;
        return measured > 0 ? bound / measured : kInf;
    }
};

struct ValidationReport {
    std::vector<SuiteResult> suites;
    bool all_passed() const {
        return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
    }
};

namespace suites {

// Max relative error of reconstruct_sb ∘ map_to_rc against eval_underdamped.
inline double spectral_roundtrip_error() {
    double worst = 0.0;
    const double omega0 = 1.0;
    for (double g : {1e-3, 1e-2, 1e-1}) {
        const UnderdampedSD sd{0.02 / std::numbers::pi, g * omega0, omega0};
        const RcParams rc = map_to_rc(sd);
        for (int k = 0; k < 100; ++k) {
            const double w = omega0 * std::pow(10.0, -2.0 + 3.0 * k / 99.0);
            const double ref = eval_underdamped(sd, w);
            worst = std::max(worst, std::abs(reconstruct_sb(rc, w) - ref) / std::abs(ref));
        }
    }
    return worst;
}

// Residues of the T(α) conjugation identities on the Fock block n < N/2, in order:
// a†a, σ_x, σ_y, σ_z, σ_x(a+a†), H_a → H_b.
inline std::vector<double> t_identity_residues(int n_fock = 16, double alpha = -0.1) {
    const SpaceLayout l({n_fock});
    const Operator t = t_alpha(alpha, l);
    const Operator td = t.adjoint();
    const auto conj = [&](const Operator& a) { return td * a * t; };
    const Operator id = identity(l);
    const Operator num = detail::mode_number(0, l);
    const Operator x = detail::mode_position(0, l);
    const Operator a = detail::mode_lowering(0, l);
    const Operator sx = detail::spin_op(Pauli::x, l), sy = detail::spin_op(Pauli::y, l), sz = detail::spin_op(Pauli::z, l);
    const Operator dsp = detail::spin_projector(0, 1, l) * embed_mode(displacement(2.0 * alpha, n_fock), 0, l);
    const cplx ii{0.0, 1.0};

    std::vector<std::pair<Operator, Operator>> pairs;
    pairs.emplace_back(conj(num), num + (alpha * alpha) * id - sz * (alpha * a + alpha * a.adjoint()));
    pairs.emplace_back(conj(sx), -1.0 * sz);
    pairs.emplace_back(conj(sy), (-ii) * dsp + ii * dsp.adjoint());
    pairs.emplace_back(conj(sz), dsp + dsp.adjoint());
    pairs.emplace_back(conj(sx * x), -1.0 * (sz * x) + (2.0 * alpha) * id);

    // H_a at λ = −αΩ, Ω = 1 against H_b − λ²/Ω, sampled at two times.
    ModelSpec s;
    s.n_photon = 2;
    s.epsilon0 = 0.02;
    s.nu_tilde = 1e-3;
    s.omega_tilde = 2e-3;
    s.rcs = {RcParams{-alpha, 1.0, {0.0, kInf}}};
    s.beta = kInf;
    s.layout = l;
    const auto hb = h_b(s);
    for (double tt : {0.0, 1.3}) pairs.emplace_back(conj(h_a(s, tt)), hb(tt) - (alpha * alpha) * id);

    const int m = n_fock / 2;
    std::vector<Eigen::Index> keep;
    for (int sp = 0; sp < 2; ++sp)
        for (int n = 0; n < m; ++n) keep.push_back(sp * n_fock + n);
    std::vector<double> out;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const Matrix diff = pairs[k].first.matrix() - pairs[k].second.matrix();
        double r = 0.0;
        for (auto i : keep)
            for (auto j : keep) r = std::max(r, std::abs(diff(i, j)));
        out.push_back(r);
    }
    // Merge the two H_a samples into one residue.
    out[5] = std::max(out[5], out[6]);
    out.pop_back();
    return out;
}

// Rate operators rebuilt term by term from a column-major eigendecomposition.
inline double rate_operator_oracle_error() {
    ModelSpec s;
    s.n_photon = 2;
    s.epsilon0 = 0.2;
    s.nu_tilde = 1e-2;
    s.omega_tilde = 2e-2;
    s.rcs = {map_to_rc({0.02 / std::numbers::pi, 2e-3, 1.0})};
    s.beta = beta_omega_from_occupation(0.05);
    s.layout = SpaceLayout({12});
    const Operator h = h_lab(s, 0.0);
    const auto rates = build_rate_operators(h, 0, s.rcs[0], s.beta, s.layout);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(h.matrix())};
    const Eigen::MatrixXcd v = es.eigenvectors();
    const Eigen::VectorXd w = es.eigenvalues();
    const Eigen::MatrixXcd x = rates.x.matrix();
    const Eigen::Index d = h.dim();
    Eigen::MatrixXcd chi = Eigen::MatrixXcd::Zero(d, d), theta = Eigen::MatrixXcd::Zero(d, d);
    const OhmicRcSD& sd = s.rcs[0].residual;
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k) {
            const double xi = w(j) - w(k);
            const cplx xjk = v.col(j).dot(x * v.col(k));
            double j_xi, coth_j;
            if (std::abs(xi) < 1e-9 / s.beta) {
                j_xi = 0.0;
                coth_j = 2.0 * sd.gamma / s.beta;
            } else {
                j_xi = eval_ohmic(sd, xi);
                coth_j = j_xi / std::tanh(s.beta * xi / 2.0);
            }
            const Eigen::MatrixXcd proj = v.col(j) * v.col(k).adjoint();
            chi += (std::numbers::pi / 2.0) * coth_j * xjk * proj;
            theta += (std::numbers::pi / 2.0) * j_xi * xjk * proj;
        }
    const double scale = std::max(max_abs(Matrix(chi)), max_abs(Matrix(theta)));
    return std::max(max_abs(Matrix(chi - Eigen::MatrixXcd(rates.chi.matrix()))),
                    max_abs(Matrix(theta - Eigen::MatrixXcd(rates.theta.matrix())))) /
           scale;
}

// RK4 global-error slope on σ_x precession, ⟨σ_z⟩(t) = cos(ωt).
inline double rk4_order_slope() {
    const double omega = 1.0, tf = 10.0;
    const Generator g = Generator::constant((omega / 2.0) * pauli(Pauli::x));
    const auto rho0 = spin_state(SpinState::e);
    std::vector<double> err;
    for (double dt : {0.1, 0.05, 0.025}) {
        const auto r = integrate_rk4(g, rho0, tf, dt, 1000000);
        const double sz = (r.final_state(0, 0) - r.final_state(1, 1)).real();
        err.push_back(std::abs(sz - std::cos(omega * tf)));
    }
    return 0.5 * (std::log2(err[0] / err[1]) + std::log2(err[1] / err[2]));
}

inline ScenarioConfig small_dissipative_config() {
    return parse_config(json{{"schema", 1},
                             {"preset", "fig4-scaled"},
                             {"model", {{"fock", {8}}}},
                             {"t_final", 0.05},
                             {"record_points", 6}});
}

// Max trace distance between the two exact target-frame routes: co-moving spectral vs RK4 with conjugated rates.
inline double frame_covariance_error(bool flip_theta) {
    const ScenarioConfig c = small_dissipative_config();
    const RunTiming tm = run_timing(c);
    detail::Setup su;
    su.spec = c.model;
    su.frame = std::make_shared<const FrameMap>(c.model);
    su.lab_rates = detail::lab_rates(c.model, c.tol);
    su.dissipative = true;
    su.h_target = h_multiphoton(c.model);
    const double dt = tm.step / std::ceil(tm.step / default_dt(Generator::constant(h_lab(c.model, 0.0)), tm.tau));
    auto spec_route = detail::target_route(su, true, dt, c.tol, false);
    auto rk4_route = detail::target_route(su, false, dt, c.tol, flip_theta);
    const Matrix lab0 = detail::initial_lab_state(c.model, c.initial_spin, c.tol);
    auto a = spec_route.make(lab0);
    auto b = rk4_route.make(lab0);
    double worst = 0.0;
    for (int k = 0; k < tm.points; ++k) {
        const double t = k * tm.step;
        worst = std::max(worst, trace_distance(a->at(t), b->at(t)));
    }
    return worst;
}

// Max trace distance between spectral and RK4 lab propagation of a dissipative preset.
inline double rk4_vs_spectral_error() {
    ScenarioConfig c = small_dissipative_config();
    c.integrator = Integrator::both;
    const auto art = run_comparison(c);
    return art.summary["rk4_vs_spectral"]["lab"].get<double>();
}

// Largest relative gap between L·vec(ρ) and the direct right-hand side on random states.
inline double liouvillian_consistency_error() {
    const ScenarioConfig c = small_dissipative_config();
    const auto rates = detail::lab_rates(c.model, c.tol);
    const Operator h = h_lab(c.model, 0.0);
    const Generator g = Generator::constant(h, rates);
    const Matrix l = build_liouvillian(h, rates);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    const Eigen::Index d = h.dim();
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        Matrix a(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(nd(rng), nd(rng));
        Matrix rho = a * a.adjoint();
        rho /= rho.trace();
        const Matrix direct = g.rhs(0.0, rho);
        const Matrix viaL = unvec(l * vec(rho), d);
        worst = std::max(worst, max_abs(Matrix(direct - viaL)) / max_abs(direct));
    }
    return worst;
}

struct ConservationBounds {
    double trace = 0.0, hermiticity = 0.0, purity_excess = 0.0, tail = 0.0, spectrum = 0.0;
};

inline ConservationBounds conservation_of(const RunArtifact& a) {
    ConservationBounds b;
    for (const char* f : {"lab", "mapped", "target"}) {
        const auto& c = a.summary["conservation"][f];
        b.trace = std::max(b.trace, c["max_trace_drift"].get<double>());
        b.hermiticity = std::max(b.hermiticity, c["max_hermiticity"].get<double>());
        b.purity_excess = std::max(b.purity_excess, c["max_purity"].get<double>() - 1.0);
        b.tail = std::max(b.tail, c["max_tail"].get<double>());
        if (c.contains("spectrum_drift")) b.spectrum = std::max(b.spectrum, c["spectrum_drift"].get<double>());
    }
    return b;
}

inline double fidelity_selfcheck_error() {
    Vector psi(3), phi(3);
    psi << cplx(0.6, 0.0), cplx(0.0, 0.8), cplx(0.0, 0.0);
    phi << cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0);
    const auto a = DensityMatrix::pure(psi, Dims{3});
    const auto b = DensityMatrix::pure(phi, Dims{3});
    const double e1 = std::abs(fidelity(a, b) - std::norm(psi.dot(phi)));
    const double e2 = std::abs(fidelity(a, a) - 1.0);
    const double e3 = std::abs(trace_distance(a, b) - std::sqrt(1.0 - std::norm(psi.dot(phi))));
    return std::max({e1, e2, e3});
}

}  // namespace suites

inline ValidationReport validate(const ValidateOptions& opt = {}) {
    ValidationReport rep;
    const double tighten = opt.strict ? 0.1 : 1.0;
    const auto add = [&](std::string name, double measured, double bound, std::string detail = {}) {
        SuiteResult r{std::move(name), measured, bound * tighten, false, false, std::move(detail)};
        r.passed = std::isfinite(measured) && measured <= r.bound;
        rep.suites.push_back(std::move(r));
    };
    const auto guarded = [&](const std::string& name, double bound, const std::function<double()>& f) {
        try {
            add(name, f(), bound);
        } catch (const std::exception& e) {
            rep.suites.push_back({name, kInf, bound * tighten, false, false, e.what()});
        }
    };

    guarded("spectral-roundtrip", 1e-12, suites::spectral_roundtrip_error);
    guarded("t-identities", 1e-8, [] {
        const auto r = suites::t_identity_residues();
        return *std::max_element(r.begin(), r.end());
    });
    guarded("rate-operator-oracle", 1e-12, suites::rate_operator_oracle_error);
    guarded("liouvillian-consistency", 1e-12, suites::liouvillian_consistency_error);
    {
        SuiteResult r{"rk4-order", 0.0, 0.0, true, false, "slope in [3.8, 4.2]"};
        try {
            r.measured = suites::rk4_order_slope();
            const double half = 0.2 * tighten;
            r.bound = 4.0 - half;
            r.passed = std::abs(r.measured - 4.0) <= half;
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        rep.suites.push_back(r);
    }
    guarded("rk4-vs-spectral", 1e-7, suites::rk4_vs_spectral_error);
    guarded("frame-covariance", 1e-7, [&] { return suites::frame_covariance_error(opt.fault == Fault::theta_sign); });
    guarded("fidelity-metrics", 1e-12, suites::fidelity_selfcheck_error);
    try {
        const auto art = run_comparison(parse_config(json{{"schema", 1}, {"preset", "fig2a-scaled"}, {"t_final", 0.5}}));
        const auto b = suites::conservation_of(art);
        add("conservation-trace", b.trace, 1e-8);
        add("conservation-hermiticity", b.hermiticity, 1e-9);
        add("conservation-purity", std::max(0.0, b.purity_excess), 1e-9);
        add("conservation-fock-tail", b.tail, 1e-6);
        add("conservation-spectrum", b.spectrum, 1e-8);
    } catch (const std::exception& e) {
        rep.suites.push_back({"conservation", kInf, 0.0, false, false, e.what()});
    }
    return rep;
}

inline void print_report(const ValidationReport& rep, std::ostream& os) {
    for (const auto& s : rep.suites) {
        os << (s.passed ? "PASS " : "FAIL ") << std::left << std::setw(26) << s.name << " measured "
           << std::setprecision(3) << std::scientific << s.measured << (s.lower_bound ? " >= " : " <= ") << s.bound
           << "  margin " << std::defaultfloat << std::setprecision(3) << s.margin();
        if (!s.detail.empty()) os << "  (" << s.detail << ")";
        os << "\n";
    }
    os << (rep.all_passed() ? "all suites passed" : "validation failed") << "\n";
}

}  // namespace rcjc
