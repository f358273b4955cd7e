#pragma once

// Biorthonormal eigensystems of non-Hermitian matrices and the quantities
// built on them: the metric operator G = sum_i |L_i><L_i|, G-inner products,
// G-expectations, the good-observable test O^H G = G O, and PT-phase
// classification.

#include "numlin.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ptmhft {

inline constexpr double default_im_tol = 1e-9;
/// Conditioning limit beyond which biortho_decompose reports Defective.
inline constexpr double default_kappa_defective = 1e8;
/// Conditioning above which classify_phase reports NearEP.
inline constexpr double default_kappa_ep = 1e3;

struct BiorthoSystem
{
	std::vector<cplx> values;
	/// Columns |R_i>, unit Euclidean norm.
	ComplexMatrix right;
	/// Columns |L_i>, scaled so that <L_i|R_j> = delta_ij.
	ComplexMatrix left;
	/// Frobenius condition number of `right`.
	double kappa;
	/// max_ij |<L_i|R_j> - delta_ij|
	double biortho_residual;
	/// ||sum_i |R_i><L_i| - I||_F
	double completeness_residual;

	[[nodiscard]] std::size_t dim() const noexcept { return values.size(); }
	[[nodiscard]] ComplexVector right_vec(std::size_t i) const { return right.col(i); }
	[[nodiscard]] ComplexVector left_vec(std::size_t i) const { return left.col(i); }
};

struct MetricOperator
{
	ComplexMatrix g;
	/// ||G - G^H||_F / ||G||_F
	double hermiticity_residual;
	double min_eigenvalue;
	/// ||L L^H - (R R^H)^-1||_F / ||L L^H||_F
	double formula_agreement;
};

enum class Phase
{
	Unbroken,
	Broken,
	NearEP,
};

inline std::string_view to_string(Phase p)
{
	switch(p)
	{
	case Phase::Unbroken: return "unbroken";
	case Phase::Broken: return "broken";
	case Phase::NearEP: return "near_ep";
	}
	return "?";
}

struct PhaseTag
{
	Phase phase;
	/// max |Im E_i| for Unbroken/Broken, kappa(R) for NearEP.
	double witness;
};

namespace detail {

inline double max_deviation_from_identity(const ComplexMatrix& m)
{
	double dev = 0.0;
	for(std::size_t i = 0; i < m.rows(); ++i)
		for(std::size_t j = 0; j < m.cols(); ++j)
			dev = std::max(dev, std::abs(m(i, j) - (i == j ? cplx{1.0} : cplx{})));
	return dev;
}

} // namespace detail

/// Fills the left vectors and diagnostics for given eigenvalues and right
/// vectors. Left vectors are the conjugated rows of R^-1, so L^H = R^-1.
inline BiorthoSystem biortho_from_right(std::vector<cplx> values, ComplexMatrix right,
		double kappa_limit = default_kappa_defective)
{
	const std::size_t n = right.rows();
	ComplexMatrix rinv(n, n);
	try
	{
		rinv = inverse(right);
	}
	catch(const Singular& e)
	{
		throw Defective("right eigenvectors are linearly dependent (exceptional point)",
				e.condition_estimate());
	}
	const double kappa = right.norm_fro() * rinv.norm_fro();
	if(!(kappa <= kappa_limit))
		throw Defective("right eigenvector matrix condition number " + std::to_string(kappa) +
				" exceeds the defectiveness limit", kappa);
	ComplexMatrix left = rinv.adjoint();
	const ComplexMatrix overlap = left.adjoint() * right;
	const ComplexMatrix completeness = right * left.adjoint();
	BiorthoSystem sys{std::move(values), std::move(right), std::move(left), kappa, 0.0, 0.0};
	sys.biortho_residual = detail::max_deviation_from_identity(overlap);
	sys.completeness_residual = (completeness - ComplexMatrix::identity(n)).norm_fro();
	return sys;
}

/// Biorthonormal eigensystem of H, in eig_general ordering.
///
/// Throws Defective when the right eigenvectors are singular or their
/// condition number exceeds `kappa_limit`; this is how an exceptional point
/// shows up numerically.
inline BiorthoSystem biortho_decompose(const ComplexMatrix& h, double tol = 1e-12,
		double kappa_limit = default_kappa_defective)
{
	EigResult eig = eig_general(h, tol);
	return biortho_from_right(std::move(eig.values), std::move(eig.right_vectors), kappa_limit);
}

/// f(H) = sum_i f(E_i) |R_i><L_i|.
inline ComplexMatrix spectral_function(const BiorthoSystem& sys,
		const std::function<cplx(cplx)>& f)
{
	const std::size_t n = sys.dim();
	ComplexMatrix scaled = sys.right;
	for(std::size_t j = 0; j < n; ++j)
	{
		const cplx fj = f(sys.values[j]);
		for(std::size_t i = 0; i < n; ++i) scaled(i, j) *= fj;
	}
	return scaled * sys.left.adjoint();
}

/// Smallest eigenvalue of a (numerically) Hermitian matrix.
inline double hermitian_min_eigenvalue(const ComplexMatrix& a)
{
	const ComplexMatrix sym = cplx{0.5} * (a + a.adjoint());
	const EigResult e = eig_general(sym);
	double m = std::numeric_limits<double>::infinity();
	for(const auto& v : e.values) m = std::min(m, v.real());
	return m;
}

/// G = L L^H, cross-checked against (R R^H)^-1.
inline MetricOperator metric(const BiorthoSystem& sys)
{
	ComplexMatrix g = sys.left * sys.left.adjoint();
	const ComplexMatrix g_alt = inverse(sys.right * sys.right.adjoint());
	const double gnorm = g.norm_fro();
	MetricOperator m{g, 0.0, 0.0, 0.0};
	m.hermiticity_residual = (g - g.adjoint()).norm_fro() / gnorm;
	m.formula_agreement = (g - g_alt).norm_fro() / gnorm;
	m.min_eigenvalue = hermitian_min_eigenvalue(g);
	return m;
}

/// phi^H G psi
inline cplx g_inner(const MetricOperator& g, const ComplexVector& phi, const ComplexVector& psi)
{
	if(phi.dim() != g.g.rows() || psi.dim() != g.g.rows())
		throw DimensionMismatch("g_inner: vector and metric dimensions differ");
	return dot(phi, g.g * psi);
}

/// <L_i|O|R_i>
inline cplx g_expectation(const BiorthoSystem& sys, const ComplexMatrix& o, std::size_t i)
{
	if(!o.is_square() || o.rows() != sys.dim())
		throw DimensionMismatch("g_expectation: observable dimension differs from system");
	if(i >= sys.dim()) throw DimensionMismatch("g_expectation: state index out of range");
	return dot(sys.left_vec(i), o * sys.right_vec(i));
}

/// <R_i|G O|R_i>, the metric form of g_expectation.
inline cplx g_expectation_metric_form(const BiorthoSystem& sys, const MetricOperator& g,
		const ComplexMatrix& o, std::size_t i)
{
	if(!o.is_square() || o.rows() != sys.dim() || g.g.rows() != sys.dim())
		throw DimensionMismatch("g_expectation_metric_form: dimension mismatch");
	if(i >= sys.dim()) throw DimensionMismatch("g_expectation_metric_form: state index out of range");
	const ComplexVector r = sys.right_vec(i);
	return dot(r, g.g * (o * r));
}

struct GoodObservableCheck
{
	bool good;
	/// ||O^H G - G O||_F / (||O||_F ||G||_F)
	double residual;
};

inline GoodObservableCheck is_good_observable(const ComplexMatrix& o, const MetricOperator& g,
		double tol = 1e-10)
{
	if(!o.is_square() || o.rows() != g.g.rows())
		throw DimensionMismatch("is_good_observable: dimension mismatch");
	const double scale = o.norm_fro() * g.g.norm_fro();
	const double diff = (o.adjoint() * g.g - g.g * o).norm_fro();
	const double residual = scale > 0.0 ? diff / scale : 0.0;
	return {residual <= tol, residual};
}

inline PhaseTag classify_phase(const BiorthoSystem& sys, double im_tol = default_im_tol,
		double kappa_ep = default_kappa_ep)
{
	if(sys.kappa > kappa_ep) return {Phase::NearEP, sys.kappa};
	double max_im = 0.0;
	double max_abs = 0.0;
	for(const auto& e : sys.values)
	{
		max_im = std::max(max_im, std::abs(e.imag()));
		max_abs = std::max(max_abs, std::abs(e));
	}
	if(max_im <= im_tol * (1.0 + max_abs)) return {Phase::Unbroken, max_im};
	return {Phase::Broken, max_im};
}

} // namespace ptmhft
