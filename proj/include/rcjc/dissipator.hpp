// dissipator.hpp — Eigenbasis rate operators χ, Θ, the dissipator and Liouvillian assembly.
#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "rcjc/hilbert.hpp"
#include "rcjc/spectral.hpp"

namespace rcjc {

struct RateOperators {
    Operator chi;
    Operator theta;
    Operator x;
    EigenPairs basis;  // eigendecomposition of the generating Hamiltonian

    bool is_zero() const { return max_abs(chi.matrix()) == 0.0 && max_abs(theta.matrix()) == 0.0; }
};

// χ = (π/2) Σ J(ξ_jk) coth(βξ_jk/2) x_jk |φ_j⟩⟨φ_k|,  Θ = (π/2) Σ J(ξ_jk) x_jk |φ_j⟩⟨φ_k|,  ξ_jk = φ_j − φ_k
inline RateOperators build_rate_operators(const Operator& h, int rc_index, const RcParams& rc, double beta,
                                          const SpaceLayout& layout, const Tolerances& tol = {}) {
    rc.validate();
    if (rc_index < 0 || rc_index >= layout.mode_count()) throw InvalidArgument("rate operators: RC index out of range");
    if (h.dims() != layout.dims()) throw InvalidArgument("rate operators: Hamiltonian does not match layout");
    require_hermitian(h.matrix(), tol.hermitian, "rate-operator Hamiltonian");
    const Operator x = embed_mode(position_op(layout.boson_dims()[rc_index]), rc_index, layout);
    EigenPairs basis = detail::eigh(h.matrix());
    const Eigen::Index d = h.dim();
    if (rc.residual.gamma == 0.0) {
        return {Operator::zero(h.dims()), Operator::zero(h.dims()), x, std::move(basis)};
    }
    const Matrix& v = basis.vectors;
    const Matrix xe = v.adjoint() * x.matrix() * v;
    Matrix ce(d, d), te(d, d);
    const double half_pi = std::numbers::pi / 2.0;
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k) {
            const auto f = rate_factor(rc.residual, basis.values(j) - basis.values(k), beta);
            ce(j, k) = half_pi * f.coth_weighted * xe(j, k);
            te(j, k) = half_pi * f.bare * xe(j, k);
        }
    Matrix chi = v * ce * v.adjoint();
    chi = (chi + chi.adjoint()) / 2.0;
    Matrix theta = v * te * v.adjoint();
    theta = (theta - theta.adjoint()) / 2.0;
    return {Operator(h.dims(), std::move(chi)), Operator(h.dims(), std::move(theta)), x, std::move(basis)};
}

namespace detail {

inline void require_rate_dims(const RateOperators& r, const Dims& dims) {
    if (r.chi.dims() != dims || r.theta.dims() != dims || r.x.dims() != dims)
        throw InvalidArgument("rate operators do not match the state dimensions");
}

// −[x,[χ,ρ]] + [x,{Θ,ρ}] evaluated literally.
inline Matrix dissipator(const Matrix& x, const Matrix& chi, const Matrix& theta, const Matrix& rho) {
    const Matrix c = chi * rho - rho * chi;
    const Matrix a = theta * rho + rho * theta;
    return -(x * c - c * x) + (x * a - a * x);
}

}  // namespace detail

inline Operator apply_dissipator(const RateOperators& r, const Operator& rho) {
    detail::require_rate_dims(r, rho.dims());
    return Operator(rho.dims(), detail::dissipator(r.x.matrix(), r.chi.matrix(), r.theta.matrix(), rho.matrix()));
}

inline Operator apply_dissipator(const RateOperators& r, const DensityMatrix& rho) {
    return apply_dissipator(r, rho.op());
}

// ---- Liouvillian ----

inline constexpr long kMaxLiouvilleSide = 4096;

// Row-major vectorization: vec(AρB) = (A ⊗ Bᵀ) vec(ρ).
inline Matrix build_liouvillian(const Operator& h, const std::vector<RateOperators>& rates) {
    const long d = h.dim();
    if (d * d > kMaxLiouvilleSide) {
        std::ostringstream os;
        os << "Liouvillian side " << d * d << " exceeds the limit " << kMaxLiouvilleSide;
        throw NumericalGuardError(os.str());
    }
    const Matrix id = Matrix::Identity(d, d);
    const auto lr = [&](const Matrix& a, const Matrix& b) { return detail::kron(a, b.transpose()); };
    const cplx mi{0.0, -1.0};
    Matrix l = mi * (lr(h.matrix(), id) - lr(id, h.matrix()));
    for (const auto& r : rates) {
        detail::require_rate_dims(r, h.dims());
        if (r.is_zero()) continue;
        const Matrix& x = r.x.matrix();
        const Matrix& c = r.chi.matrix();
        const Matrix& t = r.theta.matrix();
        // −xχρ + xρχ + χρx − ρχx + xΘρ + xρΘ − Θρx − ρΘx
        l += lr(x * (t - c), id) + lr(x, c + t) + lr(c - t, x) - lr(id, (c + t) * x);
    }
    return l;
}

inline Vector vec(const Matrix& rho) {
    Vector v(rho.size());
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (Eigen::Index j = 0; j < rho.cols(); ++j) v(i * rho.cols() + j) = rho(i, j);
    return v;
}

inline Matrix unvec(const Vector& v, Eigen::Index d) {
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = v(i * d + j);
    return m;
}

// ---- Frame conjugation ----

inline RateOperators conjugate_rates(const RateOperators& r, const Operator& u, const Tolerances& tol = {}) {
    detail::require_rate_dims(r, u.dims());
    const Matrix& um = u.matrix();
    const double res = max_abs(um.adjoint() * um - Matrix::Identity(um.rows(), um.cols()));
    if (!(res <= tol.unitary)) {
        std::ostringstream os;
        os << "conjugate_rates: operator is not unitary (max deviation " << res << ")";
        throw InvalidArgument(os.str());
    }
    const auto cj = [&](const Operator& a) { return Operator(a.dims(), um * a.matrix() * um.adjoint()); };
    RateOperators out{cj(r.chi), cj(r.theta), cj(r.x), {r.basis.values, um * r.basis.vectors}};
    require_hermitian(out.chi.matrix(), tol.hermitian * 10, "conjugated chi");
    require_hermitian(out.x.matrix(), tol.hermitian * 10, "conjugated x");
    return out;
}

}  // namespace rcjc
