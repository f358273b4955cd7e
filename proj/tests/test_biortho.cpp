#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ptmhft;

namespace {

ComplexMatrix wang_h(double gamma, double delta, double rho)
{
	return wang::hamiltonian({0.0, gamma, delta, rho});
}

} // namespace

TEST(BiorthoDecompose, HermitianDiagonal)
{
	const auto sys = biortho_decompose(ComplexMatrix::diagonal({1.0, 2.0}));
	EXPECT_EQ(sys.values[0], cplx(1.0));
	EXPECT_EQ(sys.values[1], cplx(2.0));
	EXPECT_LT(oracle::max_abs_diff(sys.right, ComplexMatrix::identity(2)), 1e-15);
	EXPECT_LT(oracle::max_abs_diff(sys.left, ComplexMatrix::identity(2)), 1e-15);
}

TEST(BiorthoDecompose, WangMatchesClosedFormProjectors)
{
	const wang::Params p{0.0, 1.0, std::numbers::pi / 4, 0.5};
	const auto sys = biortho_decompose(wang::hamiltonian(p));
	EXPECT_LE(sys.biortho_residual, 1e-12);
	EXPECT_NEAR(sys.values[0].real(), -std::sqrt(0.75), 1e-14);
	EXPECT_NEAR(sys.values[1].real(), std::sqrt(0.75), 1e-14);

	// |R_i><L_i| does not depend on how each pair is normalised
	const auto cf = wang::eigenvectors(p);
	const ComplexMatrix p_plus = outer(cf.r_plus, cf.l_plus);
	const ComplexMatrix p_minus = outer(cf.r_minus, cf.l_minus);
	EXPECT_LT(oracle::max_abs_diff(outer(sys.right_vec(1), sys.left_vec(1)), p_plus), 1e-13);
	EXPECT_LT(oracle::max_abs_diff(outer(sys.right_vec(0), sys.left_vec(0)), p_minus), 1e-13);
}

TEST(BiorthoDecompose, ExceptionalPointIsDefective)
{
	try
	{
		biortho_decompose(wang_h(1.0, 0.0, 1.0));
		FAIL() << "expected Defective";
	}
	catch(const Defective& e)
	{
		EXPECT_GT(e.kappa(), default_kappa_defective);
	}
}

TEST(BiorthoDecompose, LeftVectorsAgreeWithAdjointEigensolve)
{
	std::mt19937_64 gen(11);
	for(int trial = 0; trial < 20; ++trial)
	{
		const ComplexMatrix h = oracle::random_matrix(gen, 5);
		const auto sys = biortho_decompose(h);
		const ComplexMatrix l_alt = oracle::left_vectors_by_adjoint(h, sys);
		EXPECT_LT(oracle::max_abs_diff(l_alt, sys.left), 1e-9 * sys.kappa);
	}
}

TEST(SpectralFunction, CompletenessReconstructionAndSquares)
{
	const auto sys = biortho_decompose(wang_h(1.0, 0.0, 0.6));
	EXPECT_LT(oracle::max_abs_diff(spectral_function(sys, [](cplx) { return cplx{1.0}; }),
			ComplexMatrix::identity(2)), 1e-14);
	EXPECT_LT(oracle::max_abs_diff(spectral_function(sys, [](cplx e) { return e; }), wang_h(1.0, 0.0, 0.6)),
			1e-10);
	const auto d = biortho_decompose(ComplexMatrix::diagonal({2.0, 3.0}));
	EXPECT_LT(oracle::max_abs_diff(spectral_function(d, [](cplx e) { return e * e; }),
			ComplexMatrix::diagonal({4.0, 9.0})), 1e-14);
}

TEST(Metric, HermitianInputGivesIdentity)
{
	std::mt19937_64 gen(3);
	const ComplexMatrix h = oracle::random_hermitian(gen, 4);
	const auto g = metric(biortho_decompose(h));
	EXPECT_LT(oracle::max_abs_diff(g.g, ComplexMatrix::identity(4)), 1e-12);
}

TEST(Metric, WangFormulasAgreeAndPositive)
{
	const auto sys = biortho_decompose(wang_h(1.0, 0.0, 0.6));
	const auto g = metric(sys);
	const ComplexMatrix g_alt = inverse(sys.right * sys.right.adjoint());
	EXPECT_LE((g.g - g_alt).norm_fro(), 1e-10);
	EXPECT_LE(g.formula_agreement, 1e-10);
	EXPECT_LE(g.hermiticity_residual, 1e-12);
	// 2x2 Hermitian: both eigenvalues positive iff trace > 0 and det > 0
	const double tr = (g.g(0, 0) + g.g(1, 1)).real();
	const double det = (g.g(0, 0) * g.g(1, 1) - g.g(0, 1) * g.g(1, 0)).real();
	EXPECT_GT(tr, 0.0);
	EXPECT_GT(det, 0.0);
	EXPECT_GT(g.min_eigenvalue, 0.0);
	EXPECT_NEAR(g.min_eigenvalue, 0.5 * tr - std::sqrt(0.25 * tr * tr - det), 1e-12);
}

TEST(GInner, Examples)
{
	const MetricOperator id{ComplexMatrix::identity(2), 0.0, 1.0, 0.0};
	EXPECT_EQ(g_inner(id, ComplexVector{1.0, 0.0}, ComplexVector{1.0, 0.0}), cplx(1.0));
	EXPECT_THROW(g_inner(id, ComplexVector{1.0}, ComplexVector{1.0, 0.0}), DimensionMismatch);

	for(double rho : {0.3, 0.6, 1.4})
	{
		const auto sys = biortho_decompose(wang_h(1.0, 0.2, rho));
		const auto g = metric(sys);
		for(std::size_t i = 0; i < 2; ++i)
			for(std::size_t j = 0; j < 2; ++j)
				EXPECT_NEAR(std::abs(g_inner(g, sys.right_vec(i), sys.right_vec(j)) - (i == j ? 1.0 : 0.0)), 0.0,
						1e-12);
		const ComplexVector s = sys.right_vec(0) + sys.right_vec(1);
		EXPECT_NEAR(std::abs(g_inner(g, s, s) - 2.0), 0.0, 1e-12);
	}
}

TEST(GInner, ConjugateSymmetry)
{
	std::mt19937_64 gen(5);
	for(int trial = 0; trial < 30; ++trial)
	{
		const auto g = metric(biortho_decompose(oracle::random_matrix(gen, 4)));
		const ComplexVector a = oracle::random_vector(gen, 4);
		const ComplexVector b = oracle::random_vector(gen, 4);
		const cplx ab = g_inner(g, a, b);
		EXPECT_LE(std::abs(ab - std::conj(g_inner(g, b, a))), 1e-10 * std::max(1.0, std::abs(ab)));
	}
}

TEST(GExpectation, IdentityHamiltonianAndDerivative)
{
	const ComplexMatrix h = wang_h(1.0, 0.0, 0.6);
	const auto sys = biortho_decompose(h);
	const auto g = metric(sys);
	for(std::size_t i = 0; i < 2; ++i)
	{
		EXPECT_NEAR(std::abs(g_expectation(sys, ComplexMatrix::identity(2), i) - 1.0), 0.0, 1e-14);
		EXPECT_NEAR(std::abs(g_expectation(sys, h, i) - sys.values[i]), 0.0, 1e-14);
		EXPECT_NEAR(std::abs(g_expectation(sys, h, i) - g_expectation_metric_form(sys, g, h, i)), 0.0, 1e-13);
	}
	// oracle: central difference of the larger characteristic-polynomial root
	auto e_plus = [](double rho) { return oracle::char_poly_roots_2x2(wang_h(1.0, 0.0, rho))[1]; };
	const cplx fd = oracle::central_difference(e_plus, 0.6, 1e-6);
	const cplx v = g_expectation(sys, wang::dh_drho({}), 1);
	EXPECT_NEAR(v.real(), -0.75, 1e-13);
	EXPECT_NEAR(std::abs(v - fd), 0.0, 1e-8);

	EXPECT_THROW(g_expectation(sys, ComplexMatrix::identity(3), 0), DimensionMismatch);
	EXPECT_THROW(g_expectation(sys, h, 2), DimensionMismatch);
}

TEST(GoodObservable, IdentityAndWangPhases)
{
	std::mt19937_64 gen(9);
	const auto any = metric(biortho_decompose(oracle::random_matrix(gen, 3)));
	const auto id = is_good_observable(ComplexMatrix::identity(3), any);
	EXPECT_TRUE(id.good);
	EXPECT_LT(id.residual, 1e-13);

	const ComplexMatrix hu = wang_h(1.0, 0.4, 0.5);
	const auto gu = metric(biortho_decompose(hu));
	EXPECT_TRUE(is_good_observable(hu, gu).good);

	const ComplexMatrix hb = wang_h(1.0, 0.4, 1.5);
	const auto gb = metric(biortho_decompose(hb));
	const auto bad = is_good_observable(hb, gb);
	EXPECT_FALSE(bad.good);
	EXPECT_GT(bad.residual, 0.1);

	EXPECT_THROW(is_good_observable(ComplexMatrix::identity(2), any), DimensionMismatch);
}

TEST(GoodObservable, PseudoHermiticityDichotomy)
{
	for(double rho : {0.0, 0.2, 0.5, 0.9, 1.1, 1.5, 2.0})
	{
		const ComplexMatrix h = wang_h(1.0, 0.7, rho);
		const auto sys = biortho_decompose(h);
		const auto g = metric(sys);
		const double res = (h.adjoint() * g.g - g.g * h).norm_fro();
		double max_im = 0.0;
		for(const auto& e : sys.values) max_im = std::max(max_im, std::abs(e.imag()));
		if(rho < 1.0)
		{
			EXPECT_LE(res, 1e-10) << rho;
		}
		else
		{
			EXPECT_GE(res, 2.0 * max_im * g.min_eigenvalue - 1e-10) << rho;
		}
	}
}

TEST(ClassifyPhase, WangExamples)
{
	EXPECT_EQ(classify_phase(biortho_decompose(wang_h(1.0, 0.0, 0.5))).phase, Phase::Unbroken);
	const auto broken = classify_phase(biortho_decompose(wang_h(1.0, 0.0, 1.5)));
	EXPECT_EQ(broken.phase, Phase::Broken);
	EXPECT_NEAR(broken.witness, std::sqrt(1.25), 1e-12);

	const auto near = classify_phase(biortho_decompose(wang_h(1.0, 0.0, 0.999999)));
	EXPECT_EQ(near.phase, Phase::NearEP);
	EXPECT_GT(near.witness, default_kappa_ep);
}

TEST(ClassifyPhase, KappaDivergesLikeInverseSquareRootOfDistance)
{
	// kappa(R) ~ c / sqrt(gamma - rho): successive decades of distance scale kappa by sqrt(10)
	double prev = 0.0;
	for(int k = 2; k <= 12; k += 2)
	{
		const double dist = std::pow(10.0, -k);
		const double kappa = biortho_decompose(wang_h(1.0, 0.0, 1.0 - dist)).kappa;
		if(prev > 0.0)
		{
			EXPECT_NEAR(kappa / prev, 10.0, 0.05);
		}
		prev = kappa;
	}
}

class BiorthoProperties : public ::testing::TestWithParam<std::size_t>
{
};

TEST_P(BiorthoProperties, RandomMatrices)
{
	const std::size_t n = GetParam();
	std::mt19937_64 gen(500 + n);
	int checked = 0;
	for(int trial = 0; trial < 100; ++trial)
	{
		const auto sys = biortho_decompose(oracle::random_matrix(gen, n));
		if(sys.kappa > 1e6) continue;
		++checked;
		EXPECT_LE(sys.biortho_residual, 1e-10);
		EXPECT_LE(sys.completeness_residual, n * 1e-10);
		const ComplexMatrix lr = sys.left.adjoint() * sys.right;
		EXPECT_LT(oracle::max_abs_diff(lr, ComplexMatrix::identity(n)), 1e-10);
		const auto g = metric(sys);
		EXPECT_LE(g.formula_agreement, 1e-8);
		EXPECT_LE(g.hermiticity_residual, 1e-12);
		EXPECT_GT(g.min_eigenvalue, 0.0);
	}
	EXPECT_GT(checked, 90);
}

INSTANTIATE_TEST_SUITE_P(Sizes, BiorthoProperties, ::testing::Values(4, 8));

TEST(GoodObservable, MetricConjugatedHermitianHasRealExpectations)
{
	std::mt19937_64 gen(77);
	for(int trial = 0; trial < 50; ++trial)
	{
		const auto sys = biortho_decompose(oracle::random_matrix(gen, 4));
		const auto g = metric(sys);
		const ComplexMatrix s = oracle::random_hermitian(gen, 4);
		const ComplexMatrix o = inverse(g.g) * s;
		EXPECT_TRUE(is_good_observable(o, g).good);
		for(std::size_t i = 0; i < 4; ++i) EXPECT_LE(std::abs(g_expectation(sys, o, i).imag()), 1e-10);
	}
}
