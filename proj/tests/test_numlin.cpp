#include "oracles.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

using namespace ptmhft;

TEST(ComplexMatrix, RejectsNonFiniteAndEmpty)
{
	const double nan = std::numeric_limits<double>::quiet_NaN();
	EXPECT_THROW(ComplexMatrix(2, 2, {1.0, 2.0, cplx{nan, 0.0}, 4.0}), InvalidInput);
	EXPECT_THROW(ComplexMatrix(0, 3), InvalidInput);
	EXPECT_THROW(ComplexMatrix(2, 2, {1.0, 2.0, 3.0}), InvalidInput);
	EXPECT_THROW(ComplexVector({cplx{std::numeric_limits<double>::infinity(), 0.0}}), InvalidInput);
}

TEST(ComplexMatrix, ProductShapesChecked)
{
	const ComplexMatrix a(2, 3);
	const ComplexMatrix b(2, 3);
	EXPECT_THROW(a * b, DimensionMismatch);
}

TEST(EigGeneral, IdentityHasUnitEigenvaluesAndZeroResidual)
{
	const auto r = eig_general(ComplexMatrix::identity(2));
	ASSERT_EQ(r.values.size(), 2u);
	EXPECT_EQ(r.values[0], cplx(1.0));
	EXPECT_EQ(r.values[1], cplx(1.0));
	EXPECT_EQ(r.residual, 0.0);
	// the eigenvectors must still span
	EXPECT_LT(condition_fro(r.right_vectors), 10.0);
}

TEST(EigGeneral, DiagonalSortedByRealPart)
{
	const auto r = eig_general(ComplexMatrix::diagonal({2.0, cplx{0.0, -3.0}}));
	EXPECT_EQ(r.values[0], cplx(0.0, -3.0));
	EXPECT_EQ(r.values[1], cplx(2.0));
}

TEST(EigGeneral, WangUnbrokenAgainstCharacteristicPolynomial)
{
	// eps = 0, gamma = 1, delta = 0, rho = 0.6: E = +-sqrt(1 - 0.36) = +-0.8
	const ComplexMatrix h{{1.0, cplx{0.0, 0.6}}, {cplx{0.0, 0.6}, -1.0}};
	const auto r = eig_general(h);
	const auto roots = oracle::char_poly_roots_2x2(h);
	for(int i = 0; i < 2; ++i) EXPECT_NEAR(std::abs(r.values[i] - roots[i]), 0.0, 1e-14);
	EXPECT_NEAR(r.values[0].real(), -0.8, 1e-14);
	EXPECT_NEAR(r.values[1].real(), 0.8, 1e-14);
}

TEST(EigGeneral, ErrorPaths)
{
	EXPECT_THROW(eig_general(ComplexMatrix(2, 3)), InvalidInput);
	EXPECT_THROW(eig_general(ComplexMatrix::identity(2), 0.0), InvalidInput);
}

TEST(EigGeneral, NearlyParallelVectorsAtJordanBlock)
{
	const ComplexMatrix jordan{{1.0, 1.0}, {0.0, 1.0}};
	const auto r = eig_general(jordan);
	EXPECT_NEAR(std::abs(r.values[0] - 1.0), 0.0, 1e-15);
	EXPECT_GT(condition_fro(r.right_vectors), 1e12);
}

TEST(EigGeneral, DegenerateDiagonalizableClusterStaysIndependent)
{
	std::mt19937_64 gen(42);
	// Q diag(1, 1, 2) Q^-1 with a random well-conditioned Q
	const ComplexMatrix q = oracle::random_matrix(gen, 3) + cplx{3.0} * ComplexMatrix::identity(3);
	const ComplexMatrix a = q * ComplexMatrix::diagonal({1.0, 1.0, 2.0}) * inverse(q);
	const auto r = eig_general(a);
	EXPECT_NEAR(std::abs(r.values[0] - 1.0), 0.0, 1e-7);
	EXPECT_NEAR(std::abs(r.values[2] - 2.0), 0.0, 1e-10);
	EXPECT_LT(condition_fro(r.right_vectors), 1e6);
}

class EigProperties : public ::testing::TestWithParam<std::size_t>
{
};

TEST_P(EigProperties, ResidualSpectrumOfTransposeAndHermitianReality)
{
	const std::size_t n = GetParam();
	std::mt19937_64 gen(1000 + n);
	const double tol = 1e-12;
	for(int trial = 0; trial < 20; ++trial)
	{
		const ComplexMatrix a = oracle::random_matrix(gen, n);
		const auto r = eig_general(a, tol);
		const double anorm = a.norm_fro();
		for(std::size_t i = 0; i < n; ++i)
		{
			const ComplexVector v = r.right_vectors.col(i);
			EXPECT_NEAR(v.norm(), 1.0, 1e-13);
			EXPECT_LE((a * v - r.values[i] * v).norm(), tol * n * anorm);
		}
		// ordering is by real part
		for(std::size_t i = 1; i < n; ++i)
			EXPECT_LE(r.values[i - 1].real(), r.values[i].real() + 1e-7 * anorm);

		const auto rt = eig_general(a.transpose(), tol);
		EXPECT_LE(oracle::spectrum_distance(r.values, rt.values), 1e-10 * anorm);

		const ComplexMatrix h = oracle::random_hermitian(gen, n);
		for(const auto& e : eig_general(h, tol).values) EXPECT_LE(std::abs(e.imag()), tol * h.norm_fro());
	}
}

INSTANTIATE_TEST_SUITE_P(Sizes, EigProperties, ::testing::Values(1, 2, 3, 5, 8, 20));

TEST(Inverse, Examples)
{
	EXPECT_EQ(inverse(ComplexMatrix::identity(3)).max_abs(), 1.0);
	EXPECT_LT(oracle::max_abs_diff(inverse(ComplexMatrix::identity(3)), ComplexMatrix::identity(3)), 1e-16);
	const ComplexMatrix d = inverse(ComplexMatrix::diagonal({2.0, 4.0}));
	EXPECT_LT(oracle::max_abs_diff(d, ComplexMatrix::diagonal({0.5, 0.25})), 1e-16);

	const ComplexMatrix a{{1.0, I_unit}, {0.0, 1.0}};
	const ComplexMatrix ai = inverse(a);
	const ComplexMatrix expected{{1.0, -I_unit}, {0.0, 1.0}};
	EXPECT_LT(oracle::max_abs_diff(ai, expected), 1e-16);
	EXPECT_LT(oracle::max_abs_diff(a * ai, ComplexMatrix::identity(2)), 1e-16);
}

TEST(Inverse, SingularReportsCondition)
{
	const ComplexMatrix s{{1.0, 2.0}, {2.0, 4.0}};
	try
	{
		inverse(s);
		FAIL() << "expected Singular";
	}
	catch(const Singular& e)
	{
		EXPECT_GT(e.condition_estimate(), 1e13);
	}
	EXPECT_THROW(inverse(ComplexMatrix(2, 3)), InvalidInput);
}

TEST(Inverse, InvolutionOnWellConditionedInputs)
{
	std::mt19937_64 gen(7);
	for(int trial = 0; trial < 50; ++trial)
	{
		const std::size_t n = 1 + trial % 8;
		const ComplexMatrix a = oracle::random_matrix(gen, n);
		const double kappa = condition_fro(a);
		if(kappa > 1e8) continue;
		const ComplexMatrix back = inverse(inverse(a));
		EXPECT_LE((back - a).norm_fro() / a.norm_fro(), 1e-14 * kappa * n);
		EXPECT_LE((a * inverse(a) - ComplexMatrix::identity(n)).norm_fro(), 1e-14 * kappa * n);
	}
}

TEST(Expm, MatchesDiagonalAndRotationClosedForms)
{
	const ComplexMatrix d = expm(ComplexMatrix::diagonal({cplx{0.0, 1.0}, 2.0}));
	EXPECT_NEAR(std::abs(d(0, 0) - std::exp(I_unit)), 0.0, 1e-14);
	EXPECT_NEAR(std::abs(d(1, 1) - std::exp(2.0)), 0.0, 1e-13);

	// exp(t [[0, 1], [-1, 0]]) is a rotation by t
	const double t = 3.7;
	const ComplexMatrix r = expm(ComplexMatrix{{0.0, t}, {-t, 0.0}});
	EXPECT_NEAR(r(0, 0).real(), std::cos(t), 1e-13);
	EXPECT_NEAR(r(0, 1).real(), std::sin(t), 1e-13);
	EXPECT_NEAR(r(1, 0).real(), -std::sin(t), 1e-13);

	// nilpotent: exp(N) = I + N
	const ComplexMatrix n = expm(ComplexMatrix{{0.0, 5.0}, {0.0, 0.0}});
	EXPECT_NEAR(std::abs(n(0, 1) - 5.0), 0.0, 1e-13);
	EXPECT_NEAR(std::abs(n(0, 0) - 1.0), 0.0, 1e-14);
}
