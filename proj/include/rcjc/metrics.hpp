// metrics.hpp — Fidelity, trace distance, σ(t), purity and von Neumann entropy.
#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "rcjc/densecx.hpp"

namespace rcjc {

// Eigenvalues of a state with [−clip, 0) set to 0; anything more negative is an error.
inline RealVector clipped_spectrum(const Matrix& rho, const Tolerances& tol = {}) {
    RealVector w = detail::eigvalsh(rho);
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        if (w(k) < -tol.negativity_clip) {
            std::ostringstream os;
            os << "eigenvalue " << w(k) << " below the clipping threshold " << -tol.negativity_clip;
            throw NumericalGuardError(os.str());
        }
        if (w(k) < 0) w(k) = 0.0;
    }
    return w;
}

namespace detail {

// Square root of the positive part; negativity of the state itself is tracked by min_eig, not rejected here.
inline Matrix psd_sqrt(const Matrix& rho) {
    const auto p = eigh(rho);
    RealVector s(p.values.size());
    for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = p.values(k) > 0 ? std::sqrt(p.values(k)) : 0.0;
    return p.vectors * s.asDiagonal() * p.vectors.adjoint();
}

}  // namespace detail

// F = (Tr √(√ρ₁ ρ₂ √ρ₁))², inner-product eigenvalues in [−clip, 0) set to 0, below −clip an error.
inline double fidelity(const Matrix& r1, const Matrix& r2, const Tolerances& tol = {}) {
    if (r1.rows() != r2.rows()) throw InvalidArgument("fidelity: dimension mismatch");
    const Matrix s = detail::psd_sqrt(r1);
    Matrix inner = s * r2 * s;
    inner = (inner + inner.adjoint()) / 2.0;
    const RealVector w = clipped_spectrum(inner, tol);
    const double f = w.cwiseSqrt().sum();
    return f * f;
}

inline double fidelity(const DensityMatrix& a, const DensityMatrix& b, const Tolerances& tol = {}) {
    a.op().require_same(b.op());
    return fidelity(a.matrix(), b.matrix(), tol);
}

inline double trace_distance(const Matrix& r1, const Matrix& r2, const Tolerances& tol = {}) {
    if (r1.rows() != r2.rows()) throw InvalidArgument("trace_distance: dimension mismatch");
    return 0.5 * trace_norm(Matrix(r1 - r2), tol.hermitian);
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b, const Tolerances& tol = {}) {
    a.op().require_same(b.op());
    return trace_distance(a.matrix(), b.matrix(), tol);
}

inline double purity(const Matrix& rho) { return (rho * rho).trace().real(); }
inline double purity(const DensityMatrix& rho) { return purity(rho.matrix()); }

// −Tr[ρ log₂ ρ] in bits, 0·log 0 = 0.
inline double vn_entropy(const Matrix& rho, const Tolerances& tol = {}) {
    const RealVector w = clipped_spectrum(rho, tol);
    double s = 0.0;
    for (Eigen::Index k = 0; k < w.size(); ++k)
        if (w(k) > 0) s -= w(k) * std::log2(w(k));
    return s;
}
inline double vn_entropy(const DensityMatrix& rho, const Tolerances& tol = {}) { return vn_entropy(rho.matrix(), tol); }

// ---- σ(t) = d𝒟/dt from uniform samples ----

namespace detail {

inline std::vector<double> finite_difference(const std::vector<double>& d, double h) {
    const std::size_t n = d.size();
    std::vector<double> s(n);
    s[0] = (-3.0 * d[0] + 4.0 * d[1] - d[2]) / (2.0 * h);
    s[n - 1] = (3.0 * d[n - 1] - 4.0 * d[n - 2] + d[n - 3]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) s[i] = (d[i + 1] - d[i - 1]) / (2.0 * h);
    return s;
}

}  // namespace detail

inline std::vector<double> sigma_series(const std::vector<double>& d, double h) {
    if (d.size() < 3) throw InvalidArgument("sigma_series needs at least 3 samples");
    if (!(h > 0)) throw InvalidArgument("sigma_series needs a positive sample spacing");
    return detail::finite_difference(d, h);
}

struct Interval {
    std::size_t first = 0;  // sample indices, inclusive
    std::size_t last = 0;
    double t_begin = 0.0;
    double t_end = 0.0;
};

struct SigmaAnalysis {
    std::vector<double> sigma;
    std::vector<double> noise;  // Richardson error estimate of σ per sample
    std::vector<Interval> positive;
    double positive_measure = 0.0;  // total duration with σ above threshold
};

// σ > 10·(|σ_h − σ_2h|/3 + 1e-12/h) marks a detected positive sample.
inline SigmaAnalysis analyze_sigma(const std::vector<double>& t, const std::vector<double>& d) {
    const std::size_t n = d.size();
    if (t.size() != n || n < 5) throw InvalidArgument("analyze_sigma needs at least 5 matching samples");
    const double h = (t.back() - t.front()) / static_cast<double>(n - 1);
    SigmaAnalysis out;
    out.sigma = sigma_series(d, h);
    out.noise.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double coarse;
        if (i >= 2 && i + 2 < n)
            coarse = (d[i + 2] - d[i - 2]) / (4.0 * h);
        else if (i + 4 < n)
            coarse = (-3.0 * d[i] + 4.0 * d[i + 2] - d[i + 4]) / (4.0 * h);
        else
            coarse = (3.0 * d[i] - 4.0 * d[i - 2] + d[i - 4]) / (4.0 * h);
        out.noise[i] = std::abs(out.sigma[i] - coarse) / 3.0;
    }
    bool open = false;
    for (std::size_t i = 0; i < n; ++i) {
        const bool pos = out.sigma[i] > 10.0 * (out.noise[i] + 1e-12 / h);
        if (pos && !open) {
            out.positive.push_back({i, i, t[i], t[i]});
            open = true;
        } else if (pos) {
            out.positive.back().last = i;
            out.positive.back().t_end = t[i];
        } else {
            open = false;
        }
    }
    for (const auto& iv : out.positive) out.positive_measure += iv.t_end - iv.t_begin;
    return out;
}

// Fidelity and trace-distance record of two trajectories on a shared grid.
struct ComparisonSeries {
    std::vector<double> t;
    std::vector<double> fidelity;
    std::vector<double> infidelity;
    std::vector<double> trace_distance;
    std::vector<double> sigma;
};

}  // namespace rcjc
