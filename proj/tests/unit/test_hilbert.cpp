#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rcjc/rcjc.hpp"

using namespace rcjc;

namespace {

Vector basis(int d, int k) {
    Vector v = Vector::Zero(d);
    v(k) = 1.0;
    return v;
}

}  // namespace

TEST(Pauli, SigmaXEigenstates) {
    const Matrix sx = pauli(Pauli::x).matrix();
    const Vector p = spin_vector(SpinState::plus), m = spin_vector(SpinState::minus);
    EXPECT_LT((sx * p - p).norm(), 1e-15);
    EXPECT_LT((sx * m + m).norm(), 1e-15);
    EXPECT_NEAR(std::abs(p(0) - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m(1) + 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
}

TEST(Pauli, CommutatorXY) {
    const auto c = commutator(pauli(Pauli::x), pauli(Pauli::y));
    EXPECT_LT(max_abs_diff(c, cplx(0.0, 2.0) * pauli(Pauli::z)), 1e-15);
}

TEST(Pauli, RaisingLoweringConventions) {
    const auto pm = pauli(Pauli::plus) * pauli(Pauli::minus);
    EXPECT_LT(max_abs(Matrix(pm.matrix() - basis(2, 0) * basis(2, 0).adjoint())), 1e-15);
    EXPECT_LT((pauli(Pauli::plus).matrix() * spin_vector(SpinState::g) - spin_vector(SpinState::e)).norm(), 1e-15);
    const Operator half_sum = cplx(0.5) * (pauli(Pauli::x) + cplx(0.0, 1.0) * pauli(Pauli::y));
    EXPECT_LT(max_abs_diff(half_sum, pauli(Pauli::plus)), 1e-15);
    EXPECT_LT((pauli(Pauli::z).matrix() * spin_vector(SpinState::e) - spin_vector(SpinState::e)).norm(), 1e-15);
}

TEST(Ladder, AnnihilatesVacuum) {
    const auto l = ladder(5);
    EXPECT_LT((l.a.matrix() * basis(5, 0)).norm(), 1e-15);
}

TEST(Ladder, NumberOperatorDiagonal) {
    const auto l = ladder(6);
    const auto n = l.a_dag * l.a;
    for (int k = 0; k < 6; ++k) EXPECT_NEAR(std::abs(n(k, k) - cplx(k)), 0.0, 1e-15);
    EXPECT_LT(max_abs_diff(n, number_op(6)), 1e-15);
}

TEST(Ladder, DoubleCreationFromVacuum) {
    const auto l = ladder(4);
    const auto a2 = l.a_dag * l.a_dag;
    EXPECT_NEAR(std::abs(a2(2, 0) - std::sqrt(oracle::factorial(2))), 0.0, 1e-15);
}

TEST(Ladder, CommutatorTruncationArtifact) {
    const int n = 7;
    const auto l = ladder(n);
    const auto c = commutator(l.a, l.a_dag);
    Matrix ref = Matrix::Identity(n, n);
    ref(n - 1, n - 1) = 1.0 - n;
    EXPECT_LT(max_abs(Matrix(c.matrix() - ref)), 1e-14);
    EXPECT_LT(max_abs(Matrix(l.a.matrix() - Matrix(oracle::lowering(n)))), 1e-15);
    EXPECT_THROW(ladder(1), InvalidArgument);
}

TEST(Embed, SpinAndModeOperatorsCommute) {
    const SpaceLayout lay({4, 3});
    const auto a = embed_spin(pauli(Pauli::z), lay);
    const auto b = embed_mode(number_op(4), 0, lay);
    EXPECT_LT(max_abs(commutator(a, b).matrix()), 1e-14);
}

TEST(Embed, IdentityStaysIdentity) {
    const SpaceLayout lay({3, 2});
    EXPECT_LT(max_abs_diff(embed_mode(Operator::identity({3}), 0, lay), identity(lay)), 1e-15);
    EXPECT_LT(max_abs_diff(embed_spin(Operator::identity({2}), lay), identity(lay)), 1e-15);
}

TEST(Embed, SecondModeCreationMatchesIndexOracle) {
    const std::vector<int> dims{2, 3, 4};
    const SpaceLayout lay({3, 4});
    const auto op = embed_mode(ladder(4).a_dag, 1, lay);
    for (int r = 0; r < 24; ++r)
        for (int c = 0; c < 24; ++c) {
            const auto dr = oracle::digits(r, dims), dc = oracle::digits(c, dims);
            const double ref = (dr[0] == dc[0] && dr[1] == dc[1] && dr[2] == dc[2] + 1) ? std::sqrt(dr[2]) : 0.0;
            EXPECT_NEAR(std::abs(op(r, c) - ref), 0.0, 1e-15) << r << "," << c;
        }
    // ⟨e,1,1| a₂† |e,1,0⟩ = 1
    EXPECT_NEAR(op(oracle::index_of({0, 1, 1}, dims), oracle::index_of({0, 1, 0}, dims)).real(), 1.0, 1e-15);
}

TEST(Embed, RejectsDimensionMismatch) {
    const SpaceLayout lay({4});
    EXPECT_THROW(embed_mode(number_op(3), 0, lay), InvalidArgument);
    EXPECT_THROW(embed(pauli(Pauli::z), 2, lay), InvalidArgument);
    EXPECT_THROW(SpaceLayout({1}), InvalidArgument);
}

TEST(ThermalState, MilliOccupation) {
    const double bw = std::log(1001.0);
    EXPECT_NEAR(bw, 6.9088, 1e-4);
    EXPECT_NEAR(beta_omega_from_occupation(1e-3), bw, 1e-12);
    const auto th = thermal_state(bw, 12);
    EXPECT_NEAR(th.n_th, 1e-3, 1e-15);
    EXPECT_NEAR(th.mean_occupation, th.n_th, 1e-9 + th.tail_weight);
    EXPECT_NEAR(std::abs(th.rho.op().trace() - 1.0), 0.0, 1e-14);
}

TEST(ThermalState, ColdModeIsVacuum) {
    const auto th = thermal_state(100.0, 6);
    Matrix ref = Matrix::Zero(6, 6);
    ref(0, 0) = 1.0;
    EXPECT_LT(max_abs(Matrix(th.rho.matrix() - ref)), 1e-40);
}

TEST(ThermalState, InfiniteBetaIsExactGroundState) {
    const auto th = thermal_state(kInf, 4);
    EXPECT_EQ(th.rho.matrix()(0, 0), cplx(1.0));
    EXPECT_EQ(th.rho.matrix()(1, 1), cplx(0.0));
    EXPECT_EQ(th.n_th, 0.0);
}

TEST(ThermalState, HotModeNeedsLargerTruncation) {
    EXPECT_THROW(thermal_state(0.5, 6), NumericalGuardError);
    EXPECT_THROW(thermal_state(-1.0, 6), InvalidArgument);
    const auto th = thermal_state(2.0, 12);
    EXPECT_NEAR(th.mean_occupation, 1.0 / std::expm1(2.0), 1e-9 + 12 * th.tail_weight);
}

TEST(Displacement, ZeroIsIdentity) {
    EXPECT_LT(max_abs_diff(displacement(0.0, 8), Operator::identity({8})), 1e-15);
}

TEST(Displacement, VacuumOverlap) {
    const auto d = displacement(0.1, 12);
    EXPECT_NEAR(std::abs(d(0, 0) - std::exp(-0.005)), 0.0, 1e-8);
    for (int m = 0; m < 6; ++m)
        for (int n = 0; n < 6; ++n)
            EXPECT_NEAR(std::abs(d(m, n) - oracle::displacement_element(m, n, 0.1)), 0.0, 1e-8) << m << n;
}

TEST(Displacement, InversePairAndUnitarity) {
    const int n = 12;
    const auto d = displacement(-0.1, n), di = displacement(0.1, n);
    EXPECT_LT(max_abs_diff(d * di, Operator::identity({n})), 1e-8);
    EXPECT_LT(max_abs(Matrix(d.matrix() * d.matrix().adjoint() - Matrix::Identity(n, n))), 1e-8);
}

TEST(Displacement, ShiftsLoweringOperator) {
    const int n = 14;
    const cplx alpha(-0.1, 0.05);
    const auto d = displacement(alpha, n);
    const auto a = ladder(n).a;
    const Matrix lhs = (d.adjoint() * a * d).matrix();
    const Matrix rhs = a.matrix() + alpha * Matrix::Identity(n, n);
    EXPECT_LT(max_abs(Matrix(lhs.topLeftCorner(n / 2, n / 2) - rhs.topLeftCorner(n / 2, n / 2))), 1e-12);
}

TEST(Displacement, RejectsLargeAmplitude) {
    EXPECT_THROW(displacement(2.0, 12), InvalidArgument);
}
