// evolve.hpp — Master-equation generators, RK4 and spectral propagation, observable records.
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rcjc/dissipator.hpp"
#include "rcjc/metrics.hpp"
#include "rcjc/models.hpp"

namespace rcjc {

struct DissipatorTerms {
    Matrix x;
    Matrix chi;
    Matrix theta;
};

using RatesFactory = std::function<void(double, std::vector<DissipatorTerms>&)>;

// dρ/dt = −i[H(t), ρ] + Σ_i (−[x_i,[χ_i,ρ]] + [x_i,{Θ_i,ρ}])
class Generator {
public:
    static Generator constant(Operator h, std::vector<RateOperators> rates = {}) {
        Generator g;
        g.dims_ = h.dims();
        g.h_ = std::move(h);
        g.rates_ = std::move(rates);
        for (const auto& r : g.rates_) detail::require_rate_dims(r, g.dims_);
        g.prepare_constant();
        return g;
    }

    static Generator time_dependent(Dims dims, HamiltonianFactory h, std::vector<RateOperators> rates = {}) {
        Generator g;
        g.dims_ = std::move(dims);
        g.h_of_t_ = std::move(h);
        g.rates_ = std::move(rates);
        for (const auto& r : g.rates_) detail::require_rate_dims(r, g.dims_);
        return g;
    }

    // Constant Hamiltonian with rate operators that depend on time (frame-conjugated rates).
    static Generator with_rates_factory(Operator h, RatesFactory rates, int rate_count) {
        Generator g;
        g.dims_ = h.dims();
        g.h_ = std::move(h);
        g.rates_of_t_ = std::move(rates);
        g.rate_count_ = rate_count;
        return g;
    }

    static Generator zero(Dims dims) { return constant(Operator::zero(std::move(dims))); }

    bool is_constant() const { return h_.has_value() && !rates_of_t_; }
    bool has_dissipation() const {
        if (rates_of_t_) return rate_count_ > 0;
        for (const auto& r : rates_)
            if (!r.is_zero()) return true;
        return false;
    }
    const Dims& dims() const noexcept { return dims_; }
    Eigen::Index dim() const {
        long s = 1;
        for (int d : dims_) s *= d;
        return s;
    }
    const std::vector<RateOperators>& rates() const noexcept { return rates_; }

    Operator hamiltonian(double t = 0.0) const { return h_ ? *h_ : h_of_t_(t); }

    Matrix rhs(double t, const Matrix& rho) const {
        if (is_constant()) {
            // RHS = Y + Y†, Y = Pρ + Σ C_i ρ x_i
            Matrix y = p_ * rho;
            for (std::size_t i = 0; i < c_.size(); ++i) y.noalias() += c_[i] * (rho * xs_[i]);
            return y + y.adjoint();
        }
        const Matrix h = hamiltonian(t).matrix();
        const cplx mi{0.0, -1.0};
        Matrix p = mi * h;
        if (rates_of_t_) {
            rates_of_t_(t, scratch_);
            Matrix y(rho.rows(), rho.cols());
            for (const auto& r : scratch_) p.noalias() += r.x * (r.theta - r.chi);
            y.noalias() = p * rho;
            for (const auto& r : scratch_) y.noalias() += (r.chi - r.theta) * (rho * r.x);
            return y + y.adjoint();
        }
        Matrix y = p * rho;
        for (const auto& r : rates_) {
            if (r.is_zero()) continue;
            y.noalias() += r.x.matrix() * ((r.theta.matrix() - r.chi.matrix()) * rho);
            y.noalias() += (r.chi.matrix() - r.theta.matrix()) * (rho * r.x.matrix());
        }
        return y + y.adjoint();
    }

    // Stochastic setup check: trace-zero and Hermitian right-hand side on random states.
    void check_invariants(std::uint64_t seed = 7, double tol = 1e-11) const {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        const Eigen::Index d = dim();
        for (int trial = 0; trial < 2; ++trial) {
            Matrix g(d, d);
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j) g(i, j) = cplx(nd(rng), nd(rng));
            Matrix rho = g * g.adjoint();
            rho /= rho.trace();
            const Matrix r = rhs(0.0, rho);
            const double scale = std::max(1.0, max_abs(r));
            if (std::abs(r.trace()) > tol * scale * d || hermiticity_residue(r) > tol * scale)
                throw NumericalGuardError("generator right-hand side is not trace-zero and Hermitian");
        }
    }

private:
    void prepare_constant() {
        const cplx mi{0.0, -1.0};
        p_ = mi * h_->matrix();
        for (const auto& r : rates_) {
            if (r.is_zero()) continue;
            p_.noalias() += r.x.matrix() * (r.theta.matrix() - r.chi.matrix());
            c_.push_back(r.chi.matrix() - r.theta.matrix());
            xs_.push_back(r.x.matrix());
        }
    }

    Dims dims_{1};
    std::optional<Operator> h_;
    HamiltonianFactory h_of_t_;
    std::vector<RateOperators> rates_;
    RatesFactory rates_of_t_;
    int rate_count_ = 0;
    Matrix p_;
    std::vector<Matrix> c_, xs_;
    mutable std::vector<DissipatorTerms> scratch_;
};

// dt = min(0.02 / spread(H), τ/2000)
inline double default_dt(const Generator& g, double tau) {
    const RealVector w = detail::eigvalsh(g.hamiltonian(0.0).matrix());
    const double spread = w.maxCoeff() - w.minCoeff();
    double dt = spread > 0 ? 0.02 / spread : kInf;
    if (tau > 0 && std::isfinite(tau)) dt = std::min(dt, tau / 2000.0);
    if (!std::isfinite(dt)) dt = 1e-2;
    return dt;
}

// ---- Time series ----

struct TimeSeries {
    std::vector<double> t;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::vector<double>& channel(const std::string& name) {
        for (std::size_t k = 0; k < names.size(); ++k)
            if (names[k] == name) return columns[k];
        names.push_back(name);
        columns.emplace_back();
        return columns.back();
    }
    const std::vector<double>& channel(const std::string& name) const {
        for (std::size_t k = 0; k < names.size(); ++k)
            if (names[k] == name) return columns[k];
        throw InvalidArgument("unknown channel " + name);
    }
    bool has(const std::string& name) const {
        return std::find(names.begin(), names.end(), name) != names.end();
    }
    std::size_t size() const noexcept { return t.size(); }
};

// ---- Observables ----

struct ObservableRecord {
    std::vector<double> n;  // <a_i†a_i>
    double sz = 0.0;
    double purity_total = 0.0;
    double purity_spin = 0.0;
    double entropy_spin = 0.0;
    double min_eig = 0.0;
    double tail = 0.0;  // max over modes of the top-two-level population
    double trace = 0.0;
    double hermiticity = 0.0;
    double imag_residue = 0.0;  // largest imaginary part of the real-valued observables
    RealVector spectrum;        // eigenvalues of ρ, ascending
};

inline ObservableRecord record_observables(const Matrix& rho, const SpaceLayout& layout, const Tolerances& tol = {}) {
    if (rho.rows() != layout.total_dim()) throw InvalidArgument("record_observables: state does not match layout");
    ObservableRecord r;
    const Operator op(layout.dims(), rho);
    const int modes = layout.mode_count();
    double imag = 0.0;
    for (int k = 0; k < modes; ++k) {
        const Operator red = partial_trace(op, {SpaceLayout::boson_factor(k)});
        const int nk = layout.boson_dims()[k];
        cplx mean = 0.0;
        for (int m = 0; m < nk; ++m) mean += static_cast<double>(m) * red(m, m);
        r.n.push_back(mean.real());
        imag = std::max(imag, std::abs(mean.imag()));
        r.tail = std::max(r.tail, (red(nk - 1, nk - 1) + red(nk - 2, nk - 2)).real());
    }
    const Operator spin = partial_trace(op, {SpaceLayout::spin_factor});
    const cplx sz = spin(0, 0) - spin(1, 1);
    r.sz = sz.real();
    imag = std::max(imag, std::abs(sz.imag()));
    const cplx pt = (rho.array() * rho.transpose().array()).sum();
    r.purity_total = pt.real();
    imag = std::max(imag, std::abs(pt.imag()));
    r.purity_spin = purity(spin.matrix());
    r.hermiticity = hermiticity_residue(rho);
    const Matrix herm = (rho + rho.adjoint()) / 2.0;
    r.spectrum = detail::eigvalsh(herm);
    r.min_eig = r.spectrum.minCoeff();
    r.entropy_spin = vn_entropy(Matrix((spin.matrix() + spin.matrix().adjoint()) / 2.0), tol);
    const cplx tr = rho.trace();
    r.trace = tr.real();
    imag = std::max(imag, std::abs(tr.imag()));
    r.imag_residue = imag;
    return r;
}

inline void append_observables(TimeSeries& ts, double t, const ObservableRecord& r) {
    ts.t.push_back(t);
    for (std::size_t k = 0; k < r.n.size(); ++k) ts.channel("n" + std::to_string(k + 1)).push_back(r.n[k]);
    ts.channel("sz").push_back(r.sz);
    ts.channel("purity_total").push_back(r.purity_total);
    ts.channel("purity_spin").push_back(r.purity_spin);
    ts.channel("entropy_spin").push_back(r.entropy_spin);
    ts.channel("min_eig").push_back(r.min_eig);
    ts.channel("tail").push_back(r.tail);
}

// ---- RK4 ----

class Rk4Stepper {
public:
    Rk4Stepper(const Generator& g, Matrix rho0, double dt, double t0 = 0.0)
        : g_(&g), rho_(std::move(rho0)), dt_(dt), t0_(t0) {
        if (!(dt > 0)) throw InvalidArgument("RK4 step must be > 0");
    }

    void step() {
        const double t = time();
        const double h = dt_;
        const Matrix k1 = g_->rhs(t, rho_);
        const Matrix k2 = g_->rhs(t + h / 2, rho_ + (h / 2) * k1);
        const Matrix k3 = g_->rhs(t + h / 2, rho_ + (h / 2) * k2);
        const Matrix k4 = g_->rhs(t + h, rho_ + h * k3);
        rho_ += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ++steps_;
    }

    // Advances by whole steps to the step nearest t.
    const Matrix& advance_to(double t) {
        const long target = std::lround((t - t0_) / dt_);
        while (steps_ < target) step();
        return rho_;
    }

    const Matrix& state() const noexcept { return rho_; }
    double time() const noexcept { return t0_ + static_cast<double>(steps_) * dt_; }
    long steps() const noexcept { return steps_; }
    double dt() const noexcept { return dt_; }

private:
    const Generator* g_;
    Matrix rho_;
    double dt_;
    double t0_;
    long steps_ = 0;
};

inline void guard_state(const Matrix& rho, double t, const Tolerances& tol) {
    if (!rho.allFinite()) {
        std::ostringstream os;
        os << "non-finite state entries at t = " << t;
        throw NumericalGuardError(os.str());
    }
    const double drift = std::abs(rho.trace() - 1.0);
    if (drift > tol.trace_drift) {
        std::ostringstream os;
        os << "trace drift " << drift << " at t = " << t;
        throw NumericalGuardError(os.str());
    }
}

using StateObserver = std::function<void(double, const Matrix&)>;

struct Rk4Result {
    std::vector<double> t;
    Matrix final_state;
    long steps = 0;
    double max_trace_drift = 0.0;
};

// Records at t = 0 and every record_every steps; steps = round(t_final/dt).
inline Rk4Result integrate_rk4(const Generator& g, const DensityMatrix& rho0, double t_final, double dt,
                               int record_every, const StateObserver& observe = {}, const Tolerances& tol = {}) {
    if (!(dt > 0) || !(t_final >= 0)) throw InvalidArgument("integrate_rk4: need dt > 0 and t_final >= 0");
    if (record_every < 1) throw InvalidArgument("integrate_rk4: record_every must be >= 1");
    if (rho0.dims() != g.dims()) throw InvalidArgument("integrate_rk4: state does not match generator");
    const long steps = std::max(1L, std::lround(t_final / dt));
    const double h = t_final > 0 ? t_final / static_cast<double>(steps) : dt;
    Rk4Stepper st(g, rho0.matrix(), h);
    Rk4Result res;
    const auto record = [&]() {
        const Matrix& r = st.state();
        guard_state(r, st.time(), tol);
        res.max_trace_drift = std::max(res.max_trace_drift, std::abs(r.trace() - 1.0));
        res.t.push_back(st.time());
        if (observe) observe(st.time(), r);
    };
    record();
    while (st.steps() < steps) {
        st.step();
        if (st.steps() % record_every == 0 || st.steps() == steps) record();
    }
    res.final_state = st.state();
    res.steps = st.steps();
    return res;
}

inline TimeSeries integrate_rk4_series(const Generator& g, const DensityMatrix& rho0, const SpaceLayout& layout,
                                       double t_final, double dt, int record_every, Matrix* final_state = nullptr,
                                       const Tolerances& tol = {}) {
    TimeSeries ts;
    auto res = integrate_rk4(
        g, rho0, t_final, dt, record_every,
        [&](double t, const Matrix& r) { append_observables(ts, t, record_observables(r, layout, tol)); }, tol);
    if (final_state) *final_state = std::move(res.final_state);
    return ts;
}

// ---- Spectral propagation of a constant generator ----

// One decomposition of a constant generator, reusable for any number of initial states.
class SpectralPropagator {
public:
    enum class Method { unitary, liouvillian, rk4_fallback };

    // Per-initial-state data; holds the RK4 stepper in fallback mode.
    struct Trajectory {
        Matrix rho0;
        Matrix coeff;          // unitary: V†ρ₀V
        Eigen::VectorXcd vec;  // liouvillian: expansion coefficients of vec(ρ₀)
        mutable std::optional<Rk4Stepper> stepper;
    };

    explicit SpectralPropagator(Generator g, const Tolerances& tol = {}, double fallback_dt = 0.0)
        : gen_(std::move(g)), fallback_dt_(fallback_dt) {
        if (!gen_.is_constant()) throw InvalidArgument("spectral propagation requires a constant generator");
        if (!gen_.has_dissipation()) {
            method_ = Method::unitary;
            auto p = detail::eigh(gen_.hamiltonian().matrix());
            w_ = p.values;
            v_ = std::move(p.vectors);
            return;
        }
        const Matrix l = build_liouvillian(gen_.hamiltonian(), gen_.rates());
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(l), true);
        if (es.info() != Eigen::Success) throw NumericalGuardError("Liouvillian eigensolver did not converge");
        lambda_ = es.eigenvalues();
        r_ = es.eigenvectors();
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(r_);
        const double rc = lu.rcond();
        condition_ = rc > 0 ? 1.0 / rc : kInf;
        if (!(condition_ <= tol.max_condition)) {
            std::ostringstream os;
            os << "Liouvillian eigenbasis condition estimate " << condition_ << " exceeds " << tol.max_condition
               << "; falling back to RK4";
            warnings_.push_back(os.str());
            method_ = Method::rk4_fallback;
            lambda_.resize(0);
            r_.resize(0, 0);
            return;
        }
        method_ = Method::liouvillian;
        qr_ = Eigen::ColPivHouseholderQR<Eigen::MatrixXcd>(r_);
    }

    SpectralPropagator(const SpectralPropagator&) = delete;
    SpectralPropagator& operator=(const SpectralPropagator&) = delete;

    Method method() const noexcept { return method_; }
    const char* method_name() const noexcept {
        switch (method_) {
            case Method::unitary: return "unitary";
            case Method::liouvillian: return "liouvillian";
            case Method::rk4_fallback: return "rk4-fallback";
        }
        return "?";
    }
    double condition() const noexcept { return condition_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    const Generator& generator() const noexcept { return gen_; }

    Trajectory start(const Matrix& rho0) const {
        if (rho0.rows() != gen_.dim()) throw InvalidArgument("spectral propagation: state does not match generator");
        Trajectory tr;
        tr.rho0 = rho0;
        if (method_ == Method::unitary) tr.coeff = v_.adjoint() * rho0 * v_;
        if (method_ == Method::liouvillian) tr.vec = qr_.solve(vec(rho0));
        return tr;
    }

    // ρ(t); the fallback mode requires non-decreasing t between calls on one trajectory.
    Matrix state_at(const Trajectory& tr, double t) const {
        switch (method_) {
            case Method::unitary: {
                const Eigen::Index d = w_.size();
                Matrix m(d, d);
                for (Eigen::Index j = 0; j < d; ++j)
                    for (Eigen::Index k = 0; k < d; ++k)
                        m(j, k) = tr.coeff(j, k) * std::exp(cplx{0.0, -(w_(j) - w_(k)) * t});
                return v_ * m * v_.adjoint();
            }
            case Method::liouvillian: {
                Eigen::VectorXcd e(lambda_.size());
                for (Eigen::Index k = 0; k < e.size(); ++k) e(k) = tr.vec(k) * std::exp(lambda_(k) * t);
                return unvec(r_ * e, tr.rho0.rows());
            }
            case Method::rk4_fallback: {
                if (!tr.stepper || t < tr.stepper->time() - 1e-12 * std::max(1.0, std::abs(t))) {
                    const double dt = fallback_dt_ > 0 ? fallback_dt_ : default_dt(gen_, 0.0);
                    tr.stepper.emplace(gen_, tr.rho0, dt);
                }
                return tr.stepper->advance_to(t);
            }
        }
        return {};
    }

private:
    Generator gen_;
    double fallback_dt_;
    Method method_ = Method::unitary;
    RealVector w_;
    Matrix v_;
    Eigen::VectorXcd lambda_;
    Eigen::MatrixXcd r_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr_;
    double condition_ = 1.0;
    std::vector<std::string> warnings_;
};

struct SpectralResult {
    std::vector<double> t;
    Matrix final_state;
    std::string method;
    double condition = 1.0;
    std::vector<std::string> warnings;
};

inline SpectralResult propagate_spectral(const Generator& g, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                         const StateObserver& observe = {}, const Tolerances& tol = {}) {
    if (rho0.dims() != g.dims()) throw InvalidArgument("propagate_spectral: state does not match generator");
    SpectralPropagator p(g, tol);
    const auto tr = p.start(rho0.matrix());
    SpectralResult res;
    res.method = p.method_name();
    res.condition = p.condition();
    res.warnings = p.warnings();
    for (double t : t_grid) {
        Matrix r = p.state_at(tr, t);
        guard_state(r, t, tol);
        if (observe) observe(t, r);
        res.t.push_back(t);
        res.final_state = std::move(r);
    }
    return res;
}

}  // namespace rcjc
