// hilbert.hpp — Spins, truncated bosonic modes, embeddings and canonical states.
#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "rcjc/densecx.hpp"

namespace rcjc {

// Factor order is spin ⊗ boson_1 ⊗ boson_2 ⊗ ...; |e> = (1,0), |g> = (0,1).
class SpaceLayout {
public:
    static constexpr int spin_dim = 2;
    static constexpr int spin_factor = 0;

    SpaceLayout() : SpaceLayout(std::vector<int>{2}) {}
    explicit SpaceLayout(std::vector<int> boson_dims) : bosons_(std::move(boson_dims)) {
        for (int n : bosons_)
            if (n < 2) throw InvalidArgument("Fock truncation must be >= 2");
    }

    const std::vector<int>& boson_dims() const noexcept { return bosons_; }
    int mode_count() const noexcept { return static_cast<int>(bosons_.size()); }
    static int boson_factor(int mode) noexcept { return mode + 1; }

    Dims dims() const {
        Dims d{spin_dim};
        d.insert(d.end(), bosons_.begin(), bosons_.end());
        return d;
    }
    long total_dim() const {
        long s = spin_dim;
        for (int n : bosons_) s *= n;
        return s;
    }
    bool operator==(const SpaceLayout&) const = default;

private:
    std::vector<int> bosons_;
};

enum class Pauli { x, y, z, plus, minus };

inline Operator pauli(Pauli which) {
    const cplx i1{0.0, 1.0};
    Matrix m = Matrix::Zero(2, 2);
    switch (which) {
        case Pauli::x: m << 0, 1, 1, 0; break;
        case Pauli::y: m << 0, -i1, i1, 0; break;
        case Pauli::z: m << 1, 0, 0, -1; break;
        case Pauli::plus: m << 0, 1, 0, 0; break;
        case Pauli::minus: m << 0, 0, 1, 0; break;
    }
    return Operator(Dims{2}, std::move(m));
}

enum class SpinState { e, g, plus, minus };

inline Vector spin_vector(SpinState s) {
    Vector v(2);
    const double r = 1.0 / std::sqrt(2.0);
    switch (s) {
        case SpinState::e: v << 1, 0; break;
        case SpinState::g: v << 0, 1; break;
        case SpinState::plus: v << r, r; break;
        case SpinState::minus: v << r, -r; break;
    }
    return v;
}

inline const char* to_string(SpinState s) {
    switch (s) {
        case SpinState::e: return "e";
        case SpinState::g: return "g";
        case SpinState::plus: return "plus";
        case SpinState::minus: return "minus";
    }
    return "?";
}

inline DensityMatrix spin_state(SpinState s) { return DensityMatrix::pure(spin_vector(s), Dims{2}); }

// ---- Bosonic modes ----

struct Ladder {
    Operator a;
    Operator a_dag;
};

inline Ladder ladder(int n) {
    if (n < 2) throw InvalidArgument("ladder: truncation must be >= 2");
    Matrix a = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    Operator op(Dims{n}, a);
    return {op, op.adjoint()};
}

inline Operator number_op(int n) {
    Matrix m = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) m(k, k) = k;
    return Operator(Dims{n}, std::move(m));
}

inline Operator position_op(int n) {
    const auto l = ladder(n);
    return l.a + l.a_dag;
}

inline Operator embed(const Operator& op, int factor, const SpaceLayout& layout) {
    const Dims dims = layout.dims();
    if (factor < 0 || factor >= static_cast<int>(dims.size()))
        throw InvalidArgument("embed: factor index out of range");
    if (op.dim() != dims[factor]) {
        std::ostringstream os;
        os << "embed: operator dimension " << op.dim() << " does not match factor size " << dims[factor];
        throw InvalidArgument(os.str());
    }
    long before = 1, after = 1;
    for (int f = 0; f < factor; ++f) before *= dims[f];
    for (std::size_t f = factor + 1; f < dims.size(); ++f) after *= dims[f];
    Matrix m = detail::kron(detail::kron(Matrix::Identity(before, before), op.matrix()),
                            Matrix::Identity(after, after));
    return Operator(dims, std::move(m));
}

inline Operator embed_spin(const Operator& op, const SpaceLayout& layout) {
    return embed(op, SpaceLayout::spin_factor, layout);
}

inline Operator embed_mode(const Operator& op, int mode, const SpaceLayout& layout) {
    return embed(op, SpaceLayout::boson_factor(mode), layout);
}

inline Operator identity(const SpaceLayout& layout) { return Operator::identity(layout.dims()); }

// ---- Canonical states ----

struct ThermalState {
    DensityMatrix rho;
    double n_th;             // (e^{βΩ} - 1)^{-1} of the untruncated mode
    double mean_occupation;  // <a†a> in the truncated state
    double tail_weight;      // population of the top two levels
};

// beta_times_omega = +inf gives the exact ground state.
inline ThermalState thermal_state(double beta_times_omega, int n, const Tolerances& tol = {}) {
    if (!(beta_times_omega > 0)) throw InvalidArgument("thermal_state: beta*Omega must be > 0");
    if (n < 2) throw InvalidArgument("thermal_state: truncation must be >= 2");
    std::vector<double> p(n, 0.0);
    if (std::isinf(beta_times_omega)) {
        p[0] = 1.0;
    } else {
        double z = 0.0;
        for (int k = 0; k < n; ++k) z += p[k] = std::exp(-beta_times_omega * k);
        for (double& v : p) v /= z;
    }
    const double tail = p[n - 1] + p[n - 2];
    if (tail > tol.fock_tail) {
        std::ostringstream os;
        os << "thermal state truncation too small: top-two-level weight " << tail << " at N = " << n
           << " (raise N)";
        throw NumericalGuardError(os.str());
    }
    Matrix m = Matrix::Zero(n, n);
    double mean = 0.0;
    for (int k = 0; k < n; ++k) {
        m(k, k) = p[k];
        mean += k * p[k];
    }
    const double nth = std::isinf(beta_times_omega) ? 0.0 : 1.0 / std::expm1(beta_times_omega);
    return {DensityMatrix::unchecked(Operator(Dims{n}, std::move(m))), nth, mean, tail};
}

inline double beta_omega_from_occupation(double n_th) {
    if (!(n_th > 0)) return kInf;
    return std::log1p(1.0 / n_th);
}

// D(α) = exp(αa† − α*a), built as exp(iK) with K = −i(αa† − α*a) Hermitian.
inline Operator displacement(cplx alpha, int n) {
    if (std::norm(alpha) > n / 4.0) {
        std::ostringstream os;
        os << "displacement |alpha|^2 = " << std::norm(alpha) << " too large for truncation N = " << n;
        throw InvalidArgument(os.str());
    }
    const auto l = ladder(n);
    const cplx mi{0.0, -1.0};
    const Operator k = mi * (alpha * l.a_dag - std::conj(alpha) * l.a);
    return func_of_hermitian(k, [](double w) { return std::exp(cplx{0.0, w}); });
}

}  // namespace rcjc
