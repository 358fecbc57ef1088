// transforms.hpp — T(α), the free-frame propagators, Φ(t) and frame conversion of states.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rcjc/models.hpp"

namespace rcjc {

enum class Frame { lab, a, b, n };

inline const char* to_string(Frame f) {
    switch (f) {
        case Frame::lab: return "lab";
        case Frame::a: return "a";
        case Frame::b: return "b";
        case Frame::n: return "n";
    }
    return "?";
}

struct FrameStamp {
    Frame frame = Frame::lab;
    double t = 0.0;
};

inline void require_unitary(const Matrix& u, double tol, const char* what) {
    const double r = max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
    if (!(r <= tol)) {
        std::ostringstream os;
        os << what << " is not unitary: max |U^dagger U - I| = " << r;
        throw InvalidArgument(os.str());
    }
}

// T(α) = (1/√2)[D†(α)(|e⟩⟨e| − |g⟩⟨e|) + D(α)(|g⟩⟨g| + |e⟩⟨g|)] on spin ⊗ mode 1.
inline Operator t_alpha(cplx alpha, const SpaceLayout& layout) {
    const Operator d = embed_mode(displacement(alpha, layout.boson_dims()[0]), 0, layout);
    const auto proj = [&](int r, int c) { return detail::spin_projector(r, c, layout); };
    const double s = 1.0 / std::sqrt(2.0);
    return s * (d.adjoint() * (proj(0, 0) - proj(1, 0)) + d * (proj(1, 1) + proj(0, 1)));
}

inline double frame_alpha(const ModelSpec& s) { return -s.rcs.at(0).lambda / s.rcs.at(0).Omega; }

// exp(+i(Δ₀/2)σ_x t)
inline Operator u_a0(const ModelSpec& s, double t) {
    const double th = resolved_delta0(s) * t / 2.0;
    Matrix m(2, 2);
    m << std::cos(th), cplx(0, std::sin(th)), cplx(0, std::sin(th)), std::cos(th);
    return embed_spin(Operator(Dims{2}, m), s.layout);
}

// Diagonal of H_{b,0} = (Ω₁ − ν̃)a₁†a₁ − (ω̃/2)σ_z in the product basis.
inline RealVector h_b0_diagonal(const ModelSpec& s) {
    const auto& l = s.layout;
    const long d = l.total_dim();
    const int n1 = l.boson_dims()[0];
    long inner = 1;
    for (int k = 1; k < l.mode_count(); ++k) inner *= l.boson_dims()[k];
    const double w = s.rcs.at(0).Omega - s.nu_tilde;
    RealVector e(d);
    for (long i = 0; i < d; ++i) {
        const long spin = i / (n1 * inner);
        const long m = (i / inner) % n1;
        e(i) = w * m - (spin == 0 ? 0.5 : -0.5) * s.omega_tilde;
    }
    return e;
}

// exp(−i H_{b,0} t)
inline Operator u_b0(const ModelSpec& s, double t) {
    const RealVector e = h_b0_diagonal(s);
    Matrix m = Matrix::Zero(e.size(), e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) m(i, i) = std::exp(cplx{0.0, -e(i) * t});
    return Operator(s.layout.dims(), std::move(m));
}

// Φ(t) = U_{b,0}† T† U_{a,0}
inline Operator phi(const ModelSpec& s, double t) {
    const Operator t_op = t_alpha(frame_alpha(s), s.layout);
    return u_b0(s, t).adjoint() * t_op.adjoint() * u_a0(s, t);
}

// Precomputed Φ(t) for repeated evaluation: Φ A Φ† for fixed A costs O(d²) per t.
class FrameMap {
public:
    explicit FrameMap(const ModelSpec& s)
        : spec_(s),
          t_(t_alpha(frame_alpha(s), s.layout).matrix()),
          sx_(detail::spin_op(Pauli::x, s.layout).matrix()),
          energies_(h_b0_diagonal(s)),
          delta0_(resolved_delta0(s)) {}

    const ModelSpec& spec() const noexcept { return spec_; }
    const Matrix& t_matrix() const noexcept { return t_; }

    Matrix phi(double t) const {
        const auto [c, sn] = cs(t);
        Matrix m = c * t_.adjoint() + cplx{0.0, sn} * (t_.adjoint() * sx_);
        apply_b0_left(m, t);
        return m;
    }

    // Four fixed products per operator; conjugated(A, t) = Φ(t) A Φ(t)†.
    struct Prepared {
        Matrix tat, tsas, tsa, tas;
    };

    Prepared prepare(const Matrix& a) const {
        const Matrix td = t_.adjoint();
        return {td * a * t_, td * sx_ * a * sx_ * t_, td * sx_ * a * t_, td * a * sx_ * t_};
    }

    Matrix conjugated(const Prepared& p, double t) const {
        const auto [c, sn] = cs(t);
        Matrix m = (c * c) * p.tat + (sn * sn) * p.tsas + cplx{0.0, c * sn} * (p.tsa - p.tas);
        apply_b0_both(m, t);
        return m;
    }

    Matrix to_frame(const Matrix& rho, double t) const {
        const Matrix f = phi(t);
        return f * rho * f.adjoint();
    }
    Matrix from_frame(const Matrix& rho, double t) const {
        const Matrix f = phi(t);
        return f.adjoint() * rho * f;
    }

private:
    std::pair<double, double> cs(double t) const {
        const double th = delta0_ * t / 2.0;
        return {std::cos(th), std::sin(th)};
    }
    // Left-multiply by U_{b,0}† (diagonal phases e^{+iE t}).
    void apply_b0_left(Matrix& m, double t) const {
        for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) *= std::exp(cplx{0.0, energies_(i) * t});
    }
    // U_{b,0}† M U_{b,0}
    void apply_b0_both(Matrix& m, double t) const {
        Vector ph(energies_.size());
        for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::exp(cplx{0.0, energies_(i) * t});
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) *= ph(i) * std::conj(ph(j));
    }

    ModelSpec spec_;
    Matrix t_;
    Matrix sx_;
    RealVector energies_;
    double delta0_;
};

inline DensityMatrix to_multiphoton_frame(const DensityMatrix& rho, const ModelSpec& s, double t) {
    const Operator f = phi(s, t);
    return DensityMatrix::unchecked(f * rho.op() * f.adjoint());
}

inline DensityMatrix from_multiphoton_frame(const DensityMatrix& rho, const ModelSpec& s, double t) {
    const Operator f = phi(s, t);
    return DensityMatrix::unchecked(f.adjoint() * rho.op() * f);
}

// ---- Frame chain lab ↔ a ↔ b ↔ n ----

struct FramedState {
    DensityMatrix rho;
    FrameStamp stamp;
};

inline FramedState convert(const FramedState& in, Frame target, const ModelSpec& s) {
    const double t = in.stamp.t;
    const int from = static_cast<int>(in.stamp.frame);
    const int to = static_cast<int>(target);
    Operator r = in.rho.op();
    const Operator ua = u_a0(s, t);
    const Operator tt = t_alpha(frame_alpha(s), s.layout);
    const Operator ub = u_b0(s, t);
    // Step k maps frame k to k+1 by conjugation with the listed unitary.
    const Operator steps[3] = {ua, tt.adjoint(), ub.adjoint()};
    if (to > from)
        for (int k = from; k < to; ++k) r = steps[k] * r * steps[k].adjoint();
    else
        for (int k = from - 1; k >= to; --k) r = steps[k].adjoint() * r * steps[k];
    return {DensityMatrix::unchecked(std::move(r)), {target, t}};
}

// Co-moving generator: σ = Φ†ρ_nΦ evolves under K(t) = U_{a,0}† T [U_{b,0} H_n U_{b,0}† + H_{b,0}] T† U_{a,0} − H_{a,0}
// with the unconjugated lab rates. K is static at exact resonance without drivings.
inline Operator comoving_hamiltonian(const ModelSpec& s, double t) {
    const auto& l = s.layout;
    const Operator hn = h_multiphoton(s);
    const RealVector e = h_b0_diagonal(s);
    Matrix hb0 = Matrix::Zero(e.size(), e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) hb0(i, i) = e(i);
    const Operator ub = u_b0(s, t);
    const Operator tt = t_alpha(frame_alpha(s), l);
    const Operator ua = u_a0(s, t);
    const Operator inner = ub * hn * ub.adjoint() + Operator(l.dims(), hb0);
    const Operator ha0 = (-resolved_delta0(s) / 2.0) * detail::spin_op(Pauli::x, l);
    Operator k = ua.adjoint() * tt * inner * tt.adjoint() * ua - ha0;
    return Operator(l.dims(), (k.matrix() + k.matrix().adjoint()) / 2.0);
}

inline double comoving_variation(const ModelSpec& s) {
    const Operator k0 = comoving_hamiltonian(s, 0.0);
    const double d0 = std::abs(resolved_delta0(s));
    const double base = d0 > 0 ? 1.0 / d0 : 1.0;
    double worst = 0.0;
    for (double f : {0.37, 1.91, 12.3, 457.1}) worst = std::max(worst, max_abs_diff(k0, comoving_hamiltonian(s, f * base)));
    return worst;
}

}  // namespace rcjc
