// models.hpp — Hamiltonians of the spin-boson and multiphoton models and derived scalars.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rcjc/hilbert.hpp"
#include "rcjc/spectral.hpp"

namespace rcjc {

enum class Sideband { red, blue };

inline const char* to_string(Sideband s) { return s == Sideband::red ? "red" : "blue"; }

struct Driving {
    double epsilon = 0.0;
    double delta = 0.0;
    int n_photon = 1;  // order of the multiphoton term this driving targets
    Sideband sideband = Sideband::red;
};

struct ModelSpec {
    int n_photon = 2;
    Sideband sideband = Sideband::red;
    double epsilon0 = 0.0;
    std::optional<double> delta0;  // empty: resonance rule
    double nu_tilde = 0.0;
    double omega_tilde = 0.0;
    std::vector<RcParams> rcs;
    double beta = kInf;
    SpaceLayout layout;
    std::vector<Driving> drivings;
};

using HamiltonianFactory = std::function<Operator(double)>;

inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// Δ₀ = ±n(ν̃ − Ω₁) − ω̃, + for red, − for blue.
inline double resonant_delta(const ModelSpec& s, int n, Sideband sb) {
    const double sign = sb == Sideband::red ? 1.0 : -1.0;
    return sign * n * (s.nu_tilde - s.rcs.at(0).Omega) - s.omega_tilde;
}

inline double resolved_delta0(const ModelSpec& s) {
    return s.delta0 ? *s.delta0 : resonant_delta(s, s.n_photon, s.sideband);
}

struct ModelDiagnostics {
    double lamb_dicke = 0.0;  // 2λ₁/Ω₁
    double rwa = 0.0;         // max ε_j / (2|Ω₁ − ν̃|)
    double delta0 = 0.0;
    std::vector<std::string> warnings;
};

inline ModelDiagnostics validate(const ModelSpec& s) {
    if (s.n_photon < 1) throw InvalidArgument("n_photon must be >= 1");
    if (s.rcs.empty() || s.rcs.size() > 2) throw InvalidArgument("one or two reaction coordinates are supported");
    if (static_cast<int>(s.rcs.size()) != s.layout.mode_count())
        throw InvalidArgument("layout must hold one Fock truncation per reaction coordinate");
    for (const auto& rc : s.rcs) rc.validate();
    if (!(s.beta > 0)) throw InvalidArgument("beta must be > 0");
    if (!std::isfinite(s.epsilon0) || !std::isfinite(s.nu_tilde) || !std::isfinite(s.omega_tilde))
        throw InvalidArgument("model parameters must be finite");
    if (s.n_photon >= s.layout.boson_dims()[0])
        throw InvalidArgument("photon order must be below the Fock truncation of mode 1");

    ModelDiagnostics d;
    const auto& rc = s.rcs[0];
    d.delta0 = resolved_delta0(s);
    d.lamb_dicke = 2.0 * rc.lambda / rc.Omega;
    double eps_max = std::abs(s.epsilon0);
    for (const auto& dr : s.drivings) eps_max = std::max(eps_max, std::abs(dr.epsilon));
    const double det = std::abs(rc.Omega - s.nu_tilde);
    d.rwa = det > 0 ? eps_max / (2.0 * det) : kInf;
    if (d.lamb_dicke > 0.3) {
        std::ostringstream os;
        os << "Lamb-Dicke indicator 2*lambda/Omega = " << d.lamb_dicke << " exceeds 0.3";
        d.warnings.push_back(os.str());
    }
    if (d.rwa > 0.1) {
        std::ostringstream os;
        os << "RWA indicator epsilon/(2|Omega-nu|) = " << d.rwa << " exceeds 0.1";
        d.warnings.push_back(os.str());
    }
    return d;
}

// ---- Scalar relations ----

// g̃_n = ε/(2 n!) (2λ/Ω)^n
inline double coupling_strength(const ModelSpec& s, int n, std::optional<double> epsilon = {}) {
    const auto& rc = s.rcs.at(0);
    const double eps = epsilon ? *epsilon : s.epsilon0;
    return eps / (2.0 * factorial(n)) * std::pow(2.0 * rc.lambda / rc.Omega, n);
}

// τ_n = π / (2 g̃_n √(n!))
inline double transfer_time(const ModelSpec& s, int n) {
    const double g = coupling_strength(s, n);
    if (!(g > 0)) throw InvalidArgument("transfer_time: coupling must be > 0");
    return std::numbers::pi / (2.0 * g * std::sqrt(factorial(n)));
}

// k with t = k τ_n, k ≈ (2λ/Ω)^n n (Ω − ν̃) / (ε₀ √(n!))
inline double validity_duration(const ModelSpec& s, int n) {
    const auto& rc = s.rcs.at(0);
    if (!(rc.Omega > s.nu_tilde)) throw InvalidArgument("validity_duration requires Omega > nu_tilde");
    if (!(s.epsilon0 > 0)) throw InvalidArgument("validity_duration requires epsilon0 > 0");
    return std::pow(2.0 * rc.lambda / rc.Omega, n) * n * (rc.Omega - s.nu_tilde) /
           (s.epsilon0 * std::sqrt(factorial(n)));
}

// ---- Building blocks ----

namespace detail {

inline Operator spin_op(Pauli p, const SpaceLayout& l) { return embed_spin(pauli(p), l); }

inline Operator mode_number(int mode, const SpaceLayout& l) {
    return embed_mode(number_op(l.boson_dims()[mode]), mode, l);
}

inline Operator mode_position(int mode, const SpaceLayout& l) {
    return embed_mode(position_op(l.boson_dims()[mode]), mode, l);
}

inline Operator mode_lowering(int mode, const SpaceLayout& l) {
    return embed_mode(ladder(l.boson_dims()[mode]).a, mode, l);
}

inline Operator spin_projector(int row, int col, const SpaceLayout& l) {
    Matrix m = Matrix::Zero(2, 2);
    m(row, col) = 1.0;
    return embed_spin(Operator(Dims{2}, m), l);
}

inline Operator power(const Operator& a, int n) {
    Operator out = Operator::identity(a.dims());
    for (int k = 0; k < n; ++k) out = out * a;
    return out;
}

}  // namespace detail

// (Δ₀/2)σ_x + Σ_{j=0}^{n_d} (ε_j/2)[cos((Δ_j−Δ₀)t)σ_z + sin((Δ_j−Δ₀)t)σ_y]
inline Operator h_spin_drivings(const ModelSpec& s, double t) {
    const double d0 = resolved_delta0(s);
    Operator h = (d0 / 2.0) * pauli(Pauli::x) + (s.epsilon0 / 2.0) * pauli(Pauli::z);
    for (const auto& dr : s.drivings) {
        const double ph = (dr.delta - d0) * t;
        h += (dr.epsilon / 2.0) * (std::cos(ph) * pauli(Pauli::z) + std::sin(ph) * pauli(Pauli::y));
    }
    return h;
}

// Σ_k Ω_k a_k†a_k + λ_k σ_x (a_k + a_k†)
inline Operator h_modes(const ModelSpec& s) {
    const auto& l = s.layout;
    Operator h = Operator::zero(l.dims());
    const Operator sx = detail::spin_op(Pauli::x, l);
    for (int k = 0; k < l.mode_count(); ++k) {
        const auto& rc = s.rcs[k];
        h += rc.Omega * detail::mode_number(k, l);
        h += rc.lambda * (sx * detail::mode_position(k, l));
    }
    return h;
}

inline Operator h_s_rc(const ModelSpec& s, double t = 0.0) {
    if (s.rcs.size() != 1) throw InvalidArgument("h_s_rc requires exactly one reaction coordinate");
    return embed_spin(h_spin_drivings(s, t), s.layout) + h_modes(s);
}

inline Operator h_s_prime(const ModelSpec& s, double t = 0.0) {
    if (s.rcs.size() != 2) throw InvalidArgument("h_s_prime requires two reaction coordinates");
    return embed_spin(h_spin_drivings(s, t), s.layout) + h_modes(s);
}

// Spin-boson (lab frame) Hamiltonian for one or two RCs.
inline Operator h_lab(const ModelSpec& s, double t = 0.0) {
    return s.rcs.size() == 1 ? h_s_rc(s, t) : h_s_prime(s, t);
}

inline HamiltonianFactory h_lab_factory(const ModelSpec& s) {
    return [s](double t) { return h_lab(s, t); };
}

// Rotating frame of H_{a,0} = −(Δ₀/2)σ_x:
// Σ_k Ω_k a_k†a_k + λ_k σ_x x_k + Σ_{j=0}^{n_d} (ε_j/2)[cos(Δ_j t)σ_z + sin(Δ_j t)σ_y]
inline Operator h_a(const ModelSpec& s, double t) {
    const auto& l = s.layout;
    const double d0 = resolved_delta0(s);
    Operator spin = (s.epsilon0 / 2.0) * (std::cos(d0 * t) * pauli(Pauli::z) + std::sin(d0 * t) * pauli(Pauli::y));
    for (const auto& dr : s.drivings)
        spin += (dr.epsilon / 2.0) * (std::cos(dr.delta * t) * pauli(Pauli::z) + std::sin(dr.delta * t) * pauli(Pauli::y));
    return embed_spin(spin, l) + h_modes(s);
}

// Closed form of T† H_a T up to the constant −λ₁²/Ω₁:
// Ω₁a₁†a₁ + Σ_j (ε_j/2)[σ⁺ D(2α) e^{−iΔ_j t} + h.c.]  (+ Ω₂a₂†a₂ − λ₂σ_z x₂ with a second RC)
inline HamiltonianFactory h_b(const ModelSpec& s) {
    const auto& l = s.layout;
    const auto& rc = s.rcs.at(0);
    const double alpha = -rc.lambda / rc.Omega;
    const Operator sp_d = detail::spin_projector(0, 1, l) *
                          embed_mode(displacement(2.0 * alpha, l.boson_dims()[0]), 0, l);
    Operator stat = rc.Omega * detail::mode_number(0, l);
    if (s.rcs.size() == 2) {
        stat += s.rcs[1].Omega * detail::mode_number(1, l);
        stat -= s.rcs[1].lambda * (detail::spin_op(Pauli::z, l) * detail::mode_position(1, l));
    }
    std::vector<Driving> terms{{s.epsilon0, resolved_delta0(s), s.n_photon, s.sideband}};
    terms.insert(terms.end(), s.drivings.begin(), s.drivings.end());
    return [sp_d, stat, terms](double t) {
        Operator h = stat;
        for (const auto& d : terms) {
            const Operator x = (d.epsilon / 2.0) * std::exp(cplx{0.0, -d.delta * t}) * sp_d;
            h += x + x.adjoint();
        }
        return h;
    };
}

// (ω̃/2)σ_z + ν̃ a†a + Σ_j g̃_{n_j}[σ⁺a^{n_j} + h.c.] (red) or g̃_{n_j}[σ⁺(−a†)^{n_j} + h.c.] (blue), on mode 1
inline Operator h_n_terms(const ModelSpec& s) {
    const auto& l = s.layout;
    const Operator a = detail::mode_lowering(0, l);
    const Operator sp = detail::spin_op(Pauli::plus, l);
    Operator h = (s.omega_tilde / 2.0) * detail::spin_op(Pauli::z, l) + s.nu_tilde * detail::mode_number(0, l);
    std::vector<Driving> terms{{s.epsilon0, 0.0, s.n_photon, s.sideband}};
    terms.insert(terms.end(), s.drivings.begin(), s.drivings.end());
    for (const auto& d : terms) {
        if (d.n_photon >= l.boson_dims()[0]) throw InvalidArgument("photon order must be below the Fock truncation");
        const double g = coupling_strength(s, d.n_photon, d.epsilon);
        const Operator an = d.sideband == Sideband::red ? detail::power(a, d.n_photon)
                                                        : detail::power(-a.adjoint(), d.n_photon);
        const Operator c = g * (sp * an);
        h += c + c.adjoint();
    }
    return h;
}

inline Operator h_n(const ModelSpec& s) {
    if (s.rcs.size() != 1) throw InvalidArgument("h_n requires exactly one reaction coordinate");
    validate(s);
    return h_n_terms(s);
}

inline Operator h_n2(const ModelSpec& s) {
    if (s.rcs.size() != 2) throw InvalidArgument("h_n2 requires two reaction coordinates");
    validate(s);
    const auto& l = s.layout;
    const auto& rc2 = s.rcs[1];
    return h_n_terms(s) + rc2.Omega * detail::mode_number(1, l) -
           rc2.lambda * (detail::spin_op(Pauli::z, l) * detail::mode_position(1, l));
}

// Target multiphoton Hamiltonian for one or two RCs.
inline Operator h_multiphoton(const ModelSpec& s) { return s.rcs.size() == 1 ? h_n(s) : h_n2(s); }

}  // namespace rcjc
