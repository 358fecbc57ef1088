#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rcjc/rcjc.hpp"

using namespace rcjc;

namespace {

Matrix to_rm(const oracle::Mat& m) { return Matrix(m); }

Matrix sx() { return pauli(Pauli::x).matrix(); }

}  // namespace

TEST(HermitianEig, IdentityHasUnitEigenvalues) {
    const auto e = hermitian_eig(Operator::identity({2}));
    EXPECT_NEAR(e.values(0), 1.0, 1e-15);
    EXPECT_NEAR(e.values(1), 1.0, 1e-15);
    const Matrix v = e.vectors.matrix();
    EXPECT_LT(max_abs(Matrix(v.adjoint() * v - Matrix::Identity(2, 2))), 1e-12);
}

TEST(HermitianEig, PauliXSpectrum) {
    const auto e = hermitian_eig(pauli(Pauli::x));
    EXPECT_NEAR(e.values(0), -1.0, 1e-15);
    EXPECT_NEAR(e.values(1), 1.0, 1e-15);
}

TEST(HermitianEig, DisplacedOscillatorMatchesJacobiOracle) {
    // Δ₀ = 0, λ = 0.1, Ω = 1, N = 4
    const oracle::Mat h = oracle::spin_boson_hamiltonian(0.0, 0.0, 1.0, 0.1, 4);
    const auto ref = oracle::hermitian_eigvals(h);
    const auto e = hermitian_eig(Operator(Dims{2, 4}, to_rm(h)));
    ASSERT_EQ(static_cast<std::size_t>(e.values.size()), ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(e.values(k), ref[k], 1e-12);
    // Both σ_x branches start at the shifted ground level −λ²/Ω.
    EXPECT_NEAR(e.values(0), -0.01, 1e-6);
    EXPECT_NEAR(e.values(1), -0.01, 1e-6);
}

TEST(HermitianEig, ReconstructionAndOrthonormalityUpTo256) {
    std::mt19937_64 rng(3);
    for (int d : {5, 40, 256}) {
        const Matrix a = to_rm(oracle::random_hermitian(d, rng));
        const auto e = hermitian_eig(Operator(a));
        const Matrix& v = e.vectors.matrix();
        const Matrix rec = v * e.values.cast<cplx>().asDiagonal() * v.adjoint();
        EXPECT_LT((rec - a).norm() / a.norm(), 1e-10) << d;
        EXPECT_LT(max_abs(Matrix(v.adjoint() * v - Matrix::Identity(d, d))), 1e-10) << d;
        for (Eigen::Index k = 1; k < e.values.size(); ++k) EXPECT_LE(e.values(k - 1), e.values(k));
    }
}

TEST(HermitianEig, PhaseConventionLargestComponentRealPositive) {
    std::mt19937_64 rng(5);
    const auto e = hermitian_eig(Operator(to_rm(oracle::random_hermitian(6, rng))));
    const Matrix& v = e.vectors.matrix();
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < v.rows(); ++i)
            if (std::abs(v(i, k)) > std::abs(v(best, k))) best = i;
        EXPECT_NEAR(v(best, k).imag(), 0.0, 1e-12);
        EXPECT_GT(v(best, k).real(), 0.0);
    }
}

TEST(HermitianEig, RejectsNonHermitianWithDeviation) {
    Matrix m(2, 2);
    m << 1, 0.5, 0, 1;
    try {
        hermitian_eig(Operator(m));
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("0.5"), std::string::npos);
    }
}

TEST(FuncOfHermitian, ExpOfZeroIsIdentity) {
    const auto r = func_of_hermitian(Operator::zero({3}), [](double w) { return std::exp(w); });
    EXPECT_LT(max_abs(Matrix(r.matrix() - Matrix::Identity(3, 3))), 1e-15);
}

TEST(FuncOfHermitian, PrecessionPhaseOfSigmaZ) {
    const double t = std::numbers::pi / 2.0;
    const auto u = func_of_hermitian(pauli(Pauli::z), [&](double w) { return std::exp(cplx(0.0, -w * t)); });
    EXPECT_NEAR(std::abs(u(0, 0) - cplx(0.0, -1.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(u(1, 1) - cplx(0.0, 1.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(u(0, 1)), 0.0, 1e-15);
}

TEST(FuncOfHermitian, SqrtOfDiagonal) {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 4;
    d(1, 1) = 9;
    const auto r = func_of_hermitian(Operator(d), [](double w) { return std::sqrt(w); });
    EXPECT_NEAR(r(0, 0).real(), 2.0, 1e-14);
    EXPECT_NEAR(r(1, 1).real(), 3.0, 1e-14);
}

TEST(FuncOfHermitian, IdentityFunctionReturnsInput) {
    std::mt19937_64 rng(9);
    const Matrix a = to_rm(oracle::random_hermitian(12, rng));
    const auto r = func_of_hermitian(Operator(a), [](double w) { return w; });
    EXPECT_LT(max_abs(Matrix(r.matrix() - a)), 1e-12);
}

TEST(FuncOfHermitian, ExponentialIsUnitaryAndMatchesTaylorOracle) {
    std::mt19937_64 rng(10);
    const oracle::Mat a = oracle::random_hermitian(10, rng);
    const double t = 0.7;
    const auto u = func_of_hermitian(Operator(to_rm(a)), [&](double w) { return std::exp(cplx(0.0, -w * t)); });
    EXPECT_LT(max_abs(Matrix(u.matrix() * u.matrix().adjoint() - Matrix::Identity(10, 10))), 1e-10);
    EXPECT_LT(max_abs(Matrix(u.matrix() - to_rm(oracle::expm(cplx(0.0, -t) * a)))), 1e-10);
}

TEST(FuncOfHermitian, UndefinedValueNamesEigenvalue) {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = -0.25;
    d(1, 1) = 1;
    try {
        func_of_hermitian(Operator(d), [](double w) { return std::log(w); });
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("-0.25"), std::string::npos);
    }
}

TEST(Kron, IdentityTimesIdentity) {
    const auto k = kron(Operator::identity({2}), Operator::identity({3}));
    EXPECT_EQ(k.dims(), (Dims{2, 3}));
    EXPECT_LT(max_abs(Matrix(k.matrix() - Matrix::Identity(6, 6))), 1e-15);
}

TEST(Kron, SigmaZOnExcitedGround) {
    const auto k = kron(pauli(Pauli::z), Operator::identity({2}));
    Vector eg = Vector::Zero(4);
    eg(1) = 1.0;  // |e⟩⊗|g⟩
    const Vector r = k.matrix() * eg;
    EXPECT_LT((r - eg).norm(), 1e-15);
}

TEST(Kron, PositionTimesSigmaXMatchesIndexOracle) {
    const auto k = kron(position_op(3), pauli(Pauli::x));
    const oracle::Mat ref = oracle::kron(oracle::lowering(3) + oracle::lowering(3).adjoint(), oracle::Mat(sx()));
    EXPECT_LT(max_abs(Matrix(k.matrix() - to_rm(ref))), 1e-15);
}

TEST(PartialTrace, ProductStateFactorizes) {
    std::mt19937_64 rng(1);
    const Matrix a = to_rm(oracle::random_density(2, rng)), b = to_rm(oracle::random_density(3, rng));
    const auto r = partial_trace(kron(Operator(a), Operator(b)), {0});
    EXPECT_LT(max_abs(Matrix(r.matrix() - a)), 1e-12);
}

TEST(PartialTrace, BellStateReducesToMaximallyMixed) {
    Vector psi = Vector::Zero(4);
    psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
    const auto rho = DensityMatrix::pure(psi, {2, 2});
    const auto r = partial_trace(rho, {0});
    EXPECT_LT(max_abs(Matrix(r.matrix() - 0.5 * Matrix::Identity(2, 2))), 1e-15);
}

TEST(PartialTrace, KeepAllIsIdentityMap) {
    std::mt19937_64 rng(2);
    const Matrix a = to_rm(oracle::random_density(6, rng));
    const auto r = partial_trace(Operator(Dims{2, 3}, a), {0, 1});
    EXPECT_LT(max_abs(Matrix(r.matrix() - a)), 1e-15);
}

TEST(PartialTrace, MatchesEnumerationOracleAndPreservesTrace) {
    std::mt19937_64 rng(4);
    const Dims dims{2, 3, 4};
    const oracle::Mat rho = oracle::random_density(24, rng);
    for (const auto& keep : std::vector<std::vector<int>>{{0}, {1}, {2}, {0, 2}, {1, 2}}) {
        const auto r = partial_trace(Operator(dims, to_rm(rho)), keep);
        EXPECT_LT(max_abs(Matrix(r.matrix() - to_rm(oracle::partial_trace(rho, dims, keep)))), 1e-12);
        EXPECT_NEAR(std::abs(r.trace() - 1.0), 0.0, 1e-12);
    }
}

TEST(PartialTrace, DisjointTracesCommute) {
    std::mt19937_64 rng(6);
    const Operator rho(Dims{2, 3, 4}, to_rm(oracle::random_density(24, rng)));
    const auto a = partial_trace(partial_trace(rho, {0, 1}), {0});
    const auto b = partial_trace(partial_trace(rho, {0, 2}), {0});
    EXPECT_LT(max_abs(Matrix(a.matrix() - b.matrix())), 1e-12);
}

TEST(PartialTrace, IsLinear) {
    std::mt19937_64 rng(7);
    const Matrix a = to_rm(oracle::random_density(6, rng)), b = to_rm(oracle::random_density(6, rng));
    const auto lhs = partial_trace(Operator(Dims{2, 3}, Matrix(0.3 * a + 0.7 * b)), {1});
    const auto rhs = 0.3 * partial_trace(Operator(Dims{2, 3}, a), {1}) + 0.7 * partial_trace(Operator(Dims{2, 3}, b), {1});
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12);
}

TEST(PartialTrace, RejectsEmptyAndOutOfRange) {
    const auto op = Operator::identity({2, 3});
    EXPECT_THROW(partial_trace(op, {}), InvalidArgument);
    EXPECT_THROW(partial_trace(op, {2}), InvalidArgument);
}

TEST(TraceNorm, ZeroAndSigmaZ) {
    EXPECT_EQ(trace_norm(Operator::zero({3})), 0.0);
    EXPECT_NEAR(trace_norm(pauli(Pauli::z)), 2.0, 1e-15);
}

TEST(TraceNorm, HermitianMatchesEigenvalueOracle) {
    std::mt19937_64 rng(8);
    const oracle::Mat a = oracle::random_hermitian(4, rng);
    double ref = 0.0;
    for (double w : oracle::hermitian_eigvals(a)) ref += std::abs(w);
    EXPECT_NEAR(trace_norm(Operator(to_rm(a))), ref, 1e-10);
}

TEST(TraceNorm, GeneralMatrixMatchesSingularValueOracle) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    oracle::Mat a(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) a(i, j) = cplx(nd(rng), nd(rng));
    double ref = 0.0;
    for (double w : oracle::hermitian_eigvals(a.adjoint() * a)) ref += std::sqrt(std::max(w, 0.0));
    EXPECT_NEAR(trace_norm(Operator(to_rm(a))), ref, 1e-10);
}

TEST(TraceNorm, TriangleInequality) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = to_rm(oracle::random_hermitian(5, rng)), b = to_rm(oracle::random_hermitian(5, rng));
        EXPECT_LE(trace_norm(Matrix(a + b)), trace_norm(a) + trace_norm(b) + 1e-9);
    }
}

TEST(DensityMatrixInvariants, RejectsInvalidStates) {
    Matrix m = 0.5 * Matrix::Identity(2, 2);
    EXPECT_NO_THROW((void)DensityMatrix(Operator(m)));
    EXPECT_THROW((void)DensityMatrix(Operator(Matrix(2.0 * m))), InvalidArgument);
    Matrix nh = m;
    nh(0, 1) = 0.1;
    EXPECT_THROW((void)DensityMatrix(Operator(nh)), InvalidArgument);
    Matrix neg = Matrix::Zero(2, 2);
    neg(0, 0) = 1.01;
    neg(1, 1) = -0.01;
    EXPECT_THROW((void)DensityMatrix(Operator(neg)), InvalidArgument);
}

TEST(OperatorInvariants, RejectsMismatchedDims) {
    EXPECT_THROW((void)Operator(Dims{2, 2}, Matrix::Identity(3, 3)), InvalidArgument);
    EXPECT_THROW((void)Operator(Dims{}, Matrix::Identity(1, 1)), InvalidArgument);
    EXPECT_THROW((void)Operator(Dims{0}, Matrix::Identity(0, 0)), InvalidArgument);
}
