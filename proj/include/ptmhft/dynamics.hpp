#pragma once

// Time evolution under a non-Hermitian H through its biorthogonal spectral
// decomposition, the time-dependent metric G_b(t) = e^{-iH^H t} G e^{iHt},
// and the evolved MHFT sandwich.

#include "mhft.hpp"

#include <cmath>
#include <string_view>
#include <vector>

namespace ptmhft {

struct EvolutionOperator
{
	/// exp(-i H t / hbar)
	ComplexMatrix u_t;
	double t;
	double hbar;
};

inline EvolutionOperator evolution_operator(const BiorthoSystem& sys, double t, double hbar = 1.0)
{
	const cplx k = -I_unit * (t / hbar);
	return {spectral_function(sys, [k](cplx e) { return std::exp(k * e); }), t, hbar};
}

/// exp(-i H t / hbar) by Pade scaling and squaring; usable at or near an EP
/// where the spectral route is unavailable.
inline ComplexMatrix evolution_operator_expm(const ComplexMatrix& h, double t, double hbar = 1.0)
{
	return expm(h * (-I_unit * (t / hbar)));
}

inline ComplexVector evolve(const BiorthoSystem& sys, const ComplexVector& psi0, double t,
		double hbar = 1.0)
{
	if(psi0.dim() != sys.dim()) throw DimensionMismatch("evolve: state dimension differs from system");
	return evolution_operator(sys, t, hbar).u_t * psi0;
}

/// |L_i(t)> = exp(-i H^H t / hbar) |L_i>
inline ComplexVector evolve_left(const BiorthoSystem& sys, const ComplexVector& l0, double t,
		double hbar = 1.0)
{
	const cplx k = I_unit * (t / hbar);
	const ComplexMatrix forward = spectral_function(sys, [k](cplx e) { return std::exp(k * e); });
	return forward.adjoint() * l0;
}

/// Columns |L_i(t)> = exp(-i conj(E_i) t / hbar) |L_i>, so that
/// G_b(t) = S S^H. Quadratic forms are evaluated as |S^H psi|^2: forming G_b(t)
/// itself mixes weights exp(-+2 Im(E) t) and drops the small ones.
inline ComplexMatrix evolved_left_basis(const BiorthoSystem& sys, double t, double hbar = 1.0)
{
	ComplexMatrix s = sys.left;
	for(std::size_t j = 0; j < sys.dim(); ++j)
	{
		const cplx f = std::exp(-I_unit * std::conj(sys.values[j]) * (t / hbar));
		for(std::size_t i = 0; i < sys.dim(); ++i) s(i, j) *= f;
	}
	return s;
}

namespace detail {

// Broken-phase quadratic forms mix weights exp(+-2 Im(E) t), so an O(1) result
// is a sum of terms of size exp(4 max|Im E| t). The evolved forms below are
// therefore evaluated in long double from the (double) right vectors, with
// the left vectors re-derived as R^-H at that precision.
using lcplx = std::complex<long double>;

struct ExtendedBasis
{
	std::size_t n;
	std::vector<lcplx> r; // row-major
	std::vector<lcplx> l; // row-major, L^H R = I
	std::vector<lcplx> e;

	[[nodiscard]] std::vector<lcplx> r_times(const std::vector<lcplx>& c) const { return mul(r, c, false); }
	[[nodiscard]] std::vector<lcplx> l_times(const std::vector<lcplx>& c) const { return mul(l, c, false); }
	[[nodiscard]] std::vector<lcplx> r_adj_times(const std::vector<lcplx>& v) const { return mul(r, v, true); }
	[[nodiscard]] std::vector<lcplx> l_adj_times(const std::vector<lcplx>& v) const { return mul(l, v, true); }

	[[nodiscard]] std::vector<lcplx> mul(const std::vector<lcplx>& m, const std::vector<lcplx>& v, bool adj) const
	{
		std::vector<lcplx> out(n);
		for(std::size_t i = 0; i < n; ++i)
			for(std::size_t k = 0; k < n; ++k)
				out[i] += (adj ? std::conj(m[k * n + i]) : m[i * n + k]) * v[k];
		return out;
	}
};

inline ExtendedBasis extended_basis(const BiorthoSystem& sys)
{
	const std::size_t n = sys.dim();
	ExtendedBasis b{n, std::vector<lcplx>(n * n), std::vector<lcplx>(n * n), std::vector<lcplx>(n)};
	for(std::size_t i = 0; i < n; ++i)
	{
		b.e[i] = sys.values[i];
		for(std::size_t j = 0; j < n; ++j) b.r[i * n + j] = sys.right(i, j);
	}
	// Gauss-Jordan with partial pivoting on [R | I]
	std::vector<lcplx> a = b.r;
	std::vector<lcplx> inv(n * n);
	for(std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0L;
	for(std::size_t c = 0; c < n; ++c)
	{
		std::size_t piv = c;
		for(std::size_t i = c + 1; i < n; ++i)
			if(std::abs(a[i * n + c]) > std::abs(a[piv * n + c])) piv = i;
		if(a[piv * n + c] == lcplx{}) throw Defective("extended basis: singular right vectors", sys.kappa);
		for(std::size_t j = 0; j < n; ++j)
		{
			std::swap(a[c * n + j], a[piv * n + j]);
			std::swap(inv[c * n + j], inv[piv * n + j]);
		}
		const lcplx d = 1.0L / a[c * n + c];
		for(std::size_t j = 0; j < n; ++j)
		{
			a[c * n + j] *= d;
			inv[c * n + j] *= d;
		}
		for(std::size_t i = 0; i < n; ++i)
		{
			if(i == c) continue;
			const lcplx f = a[i * n + c];
			if(f == lcplx{}) continue;
			for(std::size_t j = 0; j < n; ++j)
			{
				a[i * n + j] -= f * a[c * n + j];
				inv[i * n + j] -= f * inv[c * n + j];
			}
		}
	}
	for(std::size_t i = 0; i < n; ++i)
		for(std::size_t j = 0; j < n; ++j) b.l[i * n + j] = std::conj(inv[j * n + i]);
	return b;
}

inline std::vector<lcplx> to_extended(const ComplexVector& v)
{
	std::vector<lcplx> out(v.dim());
	for(std::size_t i = 0; i < v.dim(); ++i) out[i] = v[i];
	return out;
}

inline lcplx ldot(const std::vector<lcplx>& a, const std::vector<lcplx>& b)
{
	lcplx s{};
	for(std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
	return s;
}

inline std::vector<lcplx> lmatvec(const ComplexMatrix& m, const std::vector<lcplx>& v)
{
	std::vector<lcplx> out(m.rows());
	for(std::size_t i = 0; i < m.rows(); ++i)
		for(std::size_t k = 0; k < m.cols(); ++k) out[i] += lcplx(m(i, k)) * v[k];
	return out;
}

// exp(-i E_j t / hbar) (or its conjugate-energy variant) per eigenvalue
inline std::vector<lcplx> phases(const ExtendedBasis& b, long double t, bool conj_energy)
{
	std::vector<lcplx> out(b.n);
	for(std::size_t j = 0; j < b.n; ++j)
		out[j] = std::exp(lcplx{0.0L, -1.0L} * (conj_energy ? std::conj(b.e[j]) : b.e[j]) * t);
	return out;
}

inline std::vector<lcplx> scale(std::vector<lcplx> v, const std::vector<lcplx>& f)
{
	for(std::size_t j = 0; j < v.size(); ++j) v[j] *= f[j];
	return v;
}

inline cplx to_double(lcplx z)
{
	return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

} // namespace detail

/// G_b(t) = exp(-i H^H t) G exp(i H t) = sum_i |L_i(t)><L_i(t)|; the
/// conjugation form is reported through formula_agreement.
inline MetricOperator metric_t(const BiorthoSystem& sys, double t, double hbar = 1.0)
{
	const ComplexMatrix s = evolved_left_basis(sys, t, hbar);
	ComplexMatrix g = s * s.adjoint();

	const cplx k = I_unit * (t / hbar);
	const ComplexMatrix forward = spectral_function(sys, [k](cplx e) { return std::exp(k * e); });
	const ComplexMatrix g_conj = forward.adjoint() * (sys.left * sys.left.adjoint()) * forward;

	const double gnorm = g.norm_fro();
	MetricOperator m{g, 0.0, 0.0, 0.0};
	m.hermiticity_residual = (g - g.adjoint()).norm_fro() / gnorm;
	m.formula_agreement = (g - g_conj).norm_fro() / gnorm;
	m.min_eigenvalue = hermitian_min_eigenvalue(g);
	return m;
}

enum class NormMode
{
	FixedMetric,
	TimeDependentMetric,
	Euclidean,
};

inline std::string_view to_string(NormMode m)
{
	switch(m)
	{
	case NormMode::FixedMetric: return "fixed-G";
	case NormMode::TimeDependentMetric: return "time-dependent-G";
	case NormMode::Euclidean: return "euclidean";
	}
	return "?";
}

struct NormTrace
{
	std::vector<double> times;
	std::vector<double> values;
	NormMode mode;
	/// Largest |Im <psi(t)|M|psi(t)>| encountered; zero up to rounding.
	double max_imag = 0.0;
};

/// <psi(t)|M(t)|psi(t)> along psi(t) = exp(-iHt/hbar) psi0, evaluated in
/// extended precision (see detail::ExtendedBasis).
inline NormTrace norm_trace(const BiorthoSystem& sys, const ComplexVector& psi0,
		const std::vector<double>& times, NormMode mode, double hbar = 1.0)
{
	if(psi0.dim() != sys.dim()) throw DimensionMismatch("norm_trace: state dimension differs from system");
	NormTrace tr{times, std::vector<double>(times.size()), mode, 0.0};
	const detail::ExtendedBasis b = detail::extended_basis(sys);
	const auto coeff0 = b.l_adj_times(detail::to_extended(psi0));
	for(std::size_t k = 0; k < times.size(); ++k)
	{
		const double t = times[k];
		if(!std::isfinite(t)) throw InvalidInput("norm_trace: non-finite time");
		const long double tau = static_cast<long double>(t) / hbar;
		const auto psi = b.r_times(detail::scale(coeff0, detail::phases(b, tau, false)));
		detail::lcplx q;
		switch(mode)
		{
		case NormMode::FixedMetric:
		{
			const auto c = b.l_adj_times(psi);
			q = detail::ldot(c, c);
			break;
		}
		case NormMode::TimeDependentMetric:
		{
			// S^H psi with S = L diag(exp(-i conj(E) t))
			auto c = b.l_adj_times(psi);
			const auto f = detail::phases(b, tau, true);
			for(std::size_t j = 0; j < b.n; ++j) c[j] *= std::conj(f[j]);
			q = detail::ldot(c, c);
			break;
		}
		case NormMode::Euclidean: q = detail::ldot(psi, psi); break;
		}
		tr.values[k] = static_cast<double>(q.real());
		tr.max_imag = std::max(tr.max_imag, std::abs(static_cast<double>(q.imag())));
	}
	return tr;
}

/// Default sample grid {0, 0.25, ..., 5}.
inline std::vector<double> default_time_grid()
{
	std::vector<double> ts;
	for(int k = 0; k <= 20; ++k) ts.push_back(0.25 * k);
	return ts;
}

/// <L_i(t)| dH |R_i(t)> and <R_i(t)| G_b(t) dH |R_i(t)> for eigenstate i.
inline MhftLhs mhft_lhs_t(const HamiltonianFamily& fam, double theta, std::size_t i, double t,
		double hbar = 1.0, double dh_step = 0.0)
{
	if(!std::isfinite(t)) throw InvalidInput("mhft_lhs_t: non-finite time");
	const BiorthoSystem sys = biortho_decompose(detail::family_h(fam, theta));
	if(i >= sys.dim()) throw DimensionMismatch("mhft_lhs_t: state index out of range");
	double step = 0.0;
	const ComplexMatrix dh = family_dh(fam, theta, dh_step, &step);
	const detail::ExtendedBasis eb = detail::extended_basis(sys);
	const long double tau = static_cast<long double>(t) / hbar;
	const auto fwd = detail::phases(eb, tau, false);
	const auto bwd = detail::phases(eb, tau, true);
	// |R(t)> = R D L^H |R_i>,  |L(t)> = exp(-i H^H t)|L_i> = L conj-energy D R^H |L_i>
	std::vector<detail::lcplx> ri(eb.n), li(eb.n);
	for(std::size_t k = 0; k < eb.n; ++k)
	{
		ri[k] = eb.r[k * eb.n + i];
		li[k] = eb.l[k * eb.n + i];
	}
	const auto r_t = eb.r_times(detail::scale(eb.l_adj_times(ri), fwd));
	const auto l_t = eb.l_times(detail::scale(eb.r_adj_times(li), bwd));
	const auto dh_r = detail::lmatvec(dh, r_t);
	// <R(t)| G_b(t) dH |R(t)> = (S^H R(t))^H (S^H dH R(t)), S = L diag(bwd)
	auto c1 = eb.l_adj_times(r_t);
	auto c2 = eb.l_adj_times(dh_r);
	for(std::size_t j = 0; j < eb.n; ++j)
	{
		c1[j] *= std::conj(bwd[j]);
		c2[j] *= std::conj(bwd[j]);
	}
	const cplx a = detail::to_double(detail::ldot(l_t, dh_r));
	const cplx b = detail::to_double(detail::ldot(c1, c2));
	return {a, b, std::abs(a - b), static_cast<bool>(fam.dh_at), step};
}

} // namespace ptmhft
