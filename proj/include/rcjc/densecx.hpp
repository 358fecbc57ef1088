// densecx.hpp — Dense complex operators on tensor-product spaces.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "rcjc/errors.hpp"

namespace rcjc {

using cplx = std::complex<double>;
using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<int>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Default numerical tolerances; every consumer takes an overridable copy.
struct Tolerances {
    double hermitian = 1e-10;        // max |A - A†| entrywise
    double trace = 1e-9;             // |Tr rho - 1|
    double min_eigenvalue = -1e-9;   // smallest admissible eigenvalue of a state
    double unitary = 1e-8;           // max |U†U - I| entrywise
    double negativity_clip = 1e-10;  // eigenvalues in [-clip, 0) are set to 0
    double fock_tail = 1e-6;         // population of the top two Fock levels
    double trace_drift = 1e-8;       // allowed |Tr rho - 1| during propagation
    double max_condition = 1e12;     // Liouvillian eigenbasis condition guard
};

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_residue(const Matrix& m) {
    return max_abs(m - m.adjoint());
}

// ---- Operator ----

class Operator {
public:
    Operator() : dims_{1}, data_(Matrix::Zero(1, 1)) {}

    Operator(Dims dims, Matrix data) : dims_(std::move(dims)), data_(std::move(data)) {
        if (dims_.empty()) throw InvalidArgument("operator dims must be non-empty");
        long side = 1;
        for (int d : dims_) {
            if (d < 1) throw InvalidArgument("operator dims must be >= 1");
            side *= d;
        }
        if (data_.rows() != side || data_.cols() != side) {
            std::ostringstream os;
            os << "operator matrix is " << data_.rows() << "x" << data_.cols()
               << " but dims imply side " << side;
            throw InvalidArgument(os.str());
        }
    }

    // Single-factor operator.
    explicit Operator(const Matrix& data) : Operator(Dims{static_cast<int>(data.rows())}, Matrix(data)) {}

    static Operator identity(Dims dims) {
        long side = 1;
        for (int d : dims) side *= d;
        return Operator(std::move(dims), Matrix::Identity(side, side));
    }
    static Operator zero(Dims dims) {
        long side = 1;
        for (int d : dims) side *= d;
        return Operator(std::move(dims), Matrix::Zero(side, side));
    }

    const Dims& dims() const noexcept { return dims_; }
    Eigen::Index dim() const noexcept { return data_.rows(); }
    const Matrix& matrix() const noexcept { return data_; }
    cplx operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }

    Operator adjoint() const { return Operator(dims_, data_.adjoint()); }
    cplx trace() const { return data_.trace(); }
    double hermiticity_residue() const { return rcjc::hermiticity_residue(data_); }
    bool same_space(const Operator& o) const { return dims_ == o.dims_; }

    Operator& operator+=(const Operator& o) {
        require_same(o);
        data_ += o.data_;
        return *this;
    }
    Operator& operator-=(const Operator& o) {
        require_same(o);
        data_ -= o.data_;
        return *this;
    }
    Operator& operator*=(cplx s) {
        data_ *= s;
        return *this;
    }

    void require_same(const Operator& o) const {
        if (dims_ != o.dims_) throw InvalidArgument("operator dimension mismatch");
    }

private:
    Dims dims_;
    Matrix data_;
};

inline Operator operator+(Operator a, const Operator& b) { return a += b; }
inline Operator operator-(Operator a, const Operator& b) { return a -= b; }
inline Operator operator-(const Operator& a) { return Operator(a.dims(), -a.matrix()); }
inline Operator operator*(cplx s, Operator a) { return a *= s; }
inline Operator operator*(Operator a, cplx s) { return a *= s; }
inline Operator operator*(const Operator& a, const Operator& b) {
    a.require_same(b);
    return Operator(a.dims(), a.matrix() * b.matrix());
}

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }
inline Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

inline double max_abs_diff(const Operator& a, const Operator& b) {
    a.require_same(b);
    return max_abs(a.matrix() - b.matrix());
}

inline void require_hermitian(const Matrix& m, double tol, const char* what) {
    const double r = hermiticity_residue(m);
    if (!(r <= tol)) {
        std::ostringstream os;
        os << what << " is not Hermitian: max |A - A^dagger| = " << r << " (tolerance " << tol << ")";
        throw InvalidArgument(os.str());
    }
}

// ---- Hermitian eigendecomposition ----

struct EigenPairs {
    RealVector values;  // ascending
    Matrix vectors;     // columns; largest-magnitude component real-positive
};

namespace detail {

inline EigenPairs eigh(const Matrix& m) {
    using ColMatrix = Eigen::MatrixXcd;
    Eigen::SelfAdjointEigenSolver<ColMatrix> es{ColMatrix(m)};
    if (es.info() != Eigen::Success) throw NumericalGuardError("Hermitian eigensolver did not converge");
    EigenPairs out{es.eigenvalues(), Matrix(es.eigenvectors())};
    for (Eigen::Index k = 0; k < out.vectors.cols(); ++k) {
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index i = 0; i < out.vectors.rows(); ++i) {
            const double v = std::abs(out.vectors(i, k));
            if (v > best_abs * (1.0 + 1e-12)) {
                best_abs = v;
                best = i;
            }
        }
        if (best_abs > 0.0) {
            const cplx ph = std::conj(out.vectors(best, k)) / best_abs;
            out.vectors.col(k) *= ph;
        }
    }
    return out;
}

inline RealVector eigvalsh(const Matrix& m) {
    using ColMatrix = Eigen::MatrixXcd;
    Eigen::SelfAdjointEigenSolver<ColMatrix> es(ColMatrix(m), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalGuardError("Hermitian eigensolver did not converge");
    return es.eigenvalues();
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace detail

struct HermitianEig {
    RealVector values;
    Operator vectors;
};

inline HermitianEig hermitian_eig(const Operator& a, const Tolerances& tol = {}) {
    require_hermitian(a.matrix(), tol.hermitian, "hermitian_eig input");
    auto p = detail::eigh(a.matrix());
    return {std::move(p.values), Operator(a.dims(), std::move(p.vectors))};
}

// V diag(f(w)) V†; f may return a real or complex scalar.
template <class F>
Operator func_of_hermitian(const Operator& a, F&& f, const Tolerances& tol = {}) {
    require_hermitian(a.matrix(), tol.hermitian, "func_of_hermitian input");
    const auto p = detail::eigh(a.matrix());
    Vector fw(p.values.size());
    for (Eigen::Index k = 0; k < p.values.size(); ++k) {
        const cplx v = static_cast<cplx>(f(p.values(k)));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::ostringstream os;
            os << "function undefined at eigenvalue " << p.values(k);
            throw InvalidArgument(os.str());
        }
        fw(k) = v;
    }
    Matrix out = p.vectors * fw.asDiagonal() * p.vectors.adjoint();
    return Operator(a.dims(), std::move(out));
}

// ---- Tensor structure ----

inline Operator kron(const Operator& a, const Operator& b) {
    Dims d = a.dims();
    d.insert(d.end(), b.dims().begin(), b.dims().end());
    return Operator(std::move(d), detail::kron(a.matrix(), b.matrix()));
}

inline Operator partial_trace(const Operator& a, std::vector<int> keep) {
    const Dims& dims = a.dims();
    const int nf = static_cast<int>(dims.size());
    if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (int k : keep)
        if (k < 0 || k >= nf) throw InvalidArgument("partial_trace: factor index out of range");

    std::vector<bool> kept(nf, false);
    for (int k : keep) kept[k] = true;
    Dims out_dims;
    long out_side = 1;
    for (int f = 0; f < nf; ++f)
        if (kept[f]) {
            out_dims.push_back(dims[f]);
            out_side *= dims[f];
        }

    const Eigen::Index n = a.dim();
    std::vector<long> kept_idx(n), traced_idx(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        long rem = i, kidx = 0, tidx = 0, kmul = 1, tmul = 1;
        for (int f = nf - 1; f >= 0; --f) {
            const long digit = rem % dims[f];
            rem /= dims[f];
            if (kept[f]) {
                kidx += digit * kmul;
                kmul *= dims[f];
            } else {
                tidx += digit * tmul;
                tmul *= dims[f];
            }
        }
        kept_idx[i] = kidx;
        traced_idx[i] = tidx;
    }
    Matrix out = Matrix::Zero(out_side, out_side);
    const Matrix& m = a.matrix();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (traced_idx[i] == traced_idx[j]) out(kept_idx[i], kept_idx[j]) += m(i, j);
    return Operator(std::move(out_dims), std::move(out));
}

// ---- Norms ----

inline double trace_norm(const Matrix& m, double herm_tol = 1e-10) {
    if (m.size() == 0) return 0.0;
    if (hermiticity_residue(m) <= herm_tol) {
        const RealVector w = detail::eigvalsh(m);
        return w.cwiseAbs().sum();
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd{Eigen::MatrixXcd(m)};
    return svd.singularValues().sum();
}

inline double trace_norm(const Operator& a, const Tolerances& tol = {}) {
    return trace_norm(a.matrix(), tol.hermitian);
}

// ---- DensityMatrix ----

class DensityMatrix {
public:
    explicit DensityMatrix(Operator op, const Tolerances& tol = {}) : op_(std::move(op)) {
        require_hermitian(op_.matrix(), tol.hermitian, "density matrix");
        const cplx tr = op_.trace();
        if (std::abs(tr - 1.0) > tol.trace) {
            std::ostringstream os;
            os << "density matrix trace " << tr.real() << " deviates from 1";
            throw InvalidArgument(os.str());
        }
        const double wmin = detail::eigvalsh(op_.matrix()).minCoeff();
        if (wmin < tol.min_eigenvalue) {
            std::ostringstream os;
            os << "density matrix has eigenvalue " << wmin;
            throw InvalidArgument(os.str());
        }
    }

    // Skips the checks; used for propagated states whose positivity is monitored separately.
    static DensityMatrix unchecked(Operator op) { return DensityMatrix(std::move(op), Unchecked{}); }

    static DensityMatrix pure(const Vector& psi, Dims dims) {
        const double nrm = psi.norm();
        if (!(nrm > 0)) throw InvalidArgument("pure state vector has zero norm");
        const Vector v = psi / nrm;
        return DensityMatrix(Operator(std::move(dims), Matrix(v * v.adjoint())));
    }

    const Operator& op() const noexcept { return op_; }
    const Matrix& matrix() const noexcept { return op_.matrix(); }
    const Dims& dims() const noexcept { return op_.dims(); }
    Eigen::Index dim() const noexcept { return op_.dim(); }

private:
    struct Unchecked {};
    DensityMatrix(Operator op, Unchecked) : op_(std::move(op)) {}
    Operator op_;
};

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
    return DensityMatrix::unchecked(partial_trace(rho.op(), std::move(keep)));
}

inline DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix::unchecked(kron(a.op(), b.op()));
}

}  // namespace rcjc
