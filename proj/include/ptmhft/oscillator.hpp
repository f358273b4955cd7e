#pragma once

// Two-dimensional oscillator with a non-Hermitian bilinear coupling,
//   H = (px^2 + py^2)/2m + m wx^2 x^2/2 + m wy^2 y^2/2 + i lambda x y.
//
// The potential is the quadratic form r^T A r / 2 with the complex symmetric
// matrix A = [[m wx^2, i lambda], [i lambda, m wy^2]]. Diagonalising A with a
// complex-orthogonal T (T^T T = I) gives normal coordinates (X, Y) = T (x, y)
// and mode frequencies C_k with m C_k^2 the eigenvalues of A, so that
// E_{n1,n2} = hbar [(n1 + 1/2) C1 + (n2 + 1/2) C2].

#include "mhft.hpp"
#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace ptmhft::osc2d {

struct Params
{
	double m = 1.0;
	double hbar = 1.0;
	double omega_x = 3.0;
	double omega_y = 1.0;
	double lambda = 0.0;

	void validate() const
	{
		if(!std::isfinite(m) || !std::isfinite(hbar) || !std::isfinite(omega_x) ||
				!std::isfinite(omega_y) || !std::isfinite(lambda))
			throw InvalidInput("osc2d: parameters must be finite");
		if(m <= 0.0) throw InvalidInput("osc2d: mass must be positive");
		if(hbar <= 0.0) throw InvalidInput("osc2d: hbar must be positive");
		if(omega_x <= 0.0 || omega_y <= 0.0) throw InvalidInput("osc2d: frequencies must be positive");
		if(omega_x == omega_y) throw InvalidInput("osc2d: omega_x and omega_y must differ");
	}
};

/// Coupling at which A becomes defective: m |wx^2 - wy^2| / 2.
inline double ep_lambda(const Params& p)
{
	return 0.5 * p.m * std::abs(p.omega_x * p.omega_x - p.omega_y * p.omega_y);
}

inline bool at_ep(const Params& p)
{
	const double ep = ep_lambda(p);
	return std::abs(std::abs(p.lambda) - ep) <= 1e-10 * std::max(1.0, ep);
}

inline ComplexMatrix potential_matrix(const Params& p)
{
	return ComplexMatrix{
			{p.m * p.omega_x * p.omega_x, I_unit * p.lambda},
			{I_unit * p.lambda, p.m * p.omega_y * p.omega_y},
	};
}

struct ModeFrequencies
{
	cplx c1;
	cplx c2;
	/// sigma = (m C1^2 - m C2^2) / 2, with sigma^2 = (m (wx^2 - wy^2)/2)^2 - lambda^2.
	cplx sigma;
};

/// C1, C2 without the eigenvector construction; defined at the EP as well.
/// C1 continues to wx as lambda -> 0 and has Im C1 >= 0 past the EP.
inline ModeFrequencies mode_frequencies(const Params& p)
{
	p.validate();
	const double wx2 = p.omega_x * p.omega_x;
	const double wy2 = p.omega_y * p.omega_y;
	const double mean = 0.5 * p.m * (wx2 + wy2);
	const double half_diff = 0.5 * p.m * (wx2 - wy2);
	const double disc = (std::abs(half_diff) - std::abs(p.lambda)) * (std::abs(half_diff) + std::abs(p.lambda));
	const double sign = half_diff >= 0.0 ? 1.0 : -1.0;
	const cplx sigma = disc >= 0.0 ? cplx{sign * std::sqrt(disc), 0.0} : cplx{0.0, std::sqrt(-disc)};
	return {std::sqrt((mean + sigma) / p.m), std::sqrt((mean - sigma) / p.m), sigma};
}

struct NormalModes
{
	cplx c1;
	cplx c2;
	/// Rows are the complex-orthogonal eigenvectors of A; (X, Y) = T (x, y).
	ComplexMatrix rotation;
	cplx alpha1;
	cplx alpha2;
};

namespace detail {

// Eigenvector of the 2x2 A for eigenvalue mu with v^T v = 1; `home` is the
// coordinate the vector reduces to as lambda -> 0.
inline std::array<cplx, 2> orthonormal_eigvec(const Params& p, cplx mu, std::size_t home)
{
	const cplx a = p.m * p.omega_x * p.omega_x;
	const cplx d = p.m * p.omega_y * p.omega_y;
	const cplx b = I_unit * p.lambda;
	std::array<cplx, 2> u{b, mu - a};
	std::array<cplx, 2> w{mu - d, b};
	auto v = std::norm(u[0]) + std::norm(u[1]) > std::norm(w[0]) + std::norm(w[1]) ? u : w;
	const cplx vtv = v[0] * v[0] + v[1] * v[1];
	const double vnorm2 = std::norm(v[0]) + std::norm(v[1]);
	if(std::abs(vtv) <= 1e-14 * vnorm2)
		throw AtEP("osc2d: mode eigenvector is self-orthogonal (exceptional point)");
	const cplx s = std::sqrt(vtv);
	v[0] /= s;
	v[1] /= s;
	if(v[home].real() < 0.0)
	{
		v[0] = -v[0];
		v[1] = -v[1];
	}
	return v;
}

} // namespace detail

inline NormalModes normal_modes(const Params& p)
{
	p.validate();
	if(at_ep(p)) throw AtEP("osc2d: lambda is at the exceptional point of the mode matrix");
	const ModeFrequencies f = mode_frequencies(p);
	const auto v1 = detail::orthonormal_eigvec(p, p.m * f.c1 * f.c1, 0);
	const auto v2 = detail::orthonormal_eigvec(p, p.m * f.c2 * f.c2, 1);
	ComplexMatrix t{{v1[0], v1[1]}, {v2[0], v2[1]}};
	return {f.c1, f.c2, std::move(t), std::sqrt(p.m * f.c1 / p.hbar), std::sqrt(p.m * f.c2 / p.hbar)};
}

/// Locates the EP by bisection on the sign of the discriminant of A's
/// characteristic polynomial, (tr A / 2)^2 - det A, evaluated from the matrix
/// entries.
inline double locate_ep(Params p, double abs_tol = 0.0)
{
	p.validate();
	auto broken = [&](double lam) {
		p.lambda = lam;
		const ComplexMatrix a = potential_matrix(p);
		const cplx tr = a(0, 0) + a(1, 1);
		const cplx det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
		return (0.25 * tr * tr - det).real() < 0.0;
	};
	double lo = 0.0;
	double hi = 1.0;
	while(!broken(hi))
	{
		lo = hi;
		hi *= 2.0;
		if(hi > 1e300) throw NonConvergence("osc2d: no exceptional point found");
	}
	for(int it = 0; it < 2000 && hi - lo > abs_tol * std::max(1.0, hi); ++it)
	{
		const double mid = 0.5 * (lo + hi);
		if(mid <= lo || mid >= hi) break;
		(broken(mid) ? hi : lo) = mid;
	}
	return 0.5 * (lo + hi);
}

inline cplx energy(const Params& p, unsigned n1, unsigned n2)
{
	if(at_ep(p)) throw AtEP("osc2d: energy requested at the exceptional point");
	const ModeFrequencies f = mode_frequencies(p);
	return p.hbar * ((n1 + 0.5) * f.c1 + (n2 + 0.5) * f.c2);
}

/// Closed-form dE_{n1,n2}/dlambda. The symmetric part
/// d(C1 + C2)/dlambda = lambda / (m^2 C1 C2 (C1 + C2)) stays finite at the EP,
/// so states with n1 == n2 are evaluated there too; others raise AtEP.
inline cplx de_dlambda(const Params& p, unsigned n1, unsigned n2)
{
	const ModeFrequencies f = mode_frequencies(p);
	const double lam = p.lambda;
	const cplx sum = lam / (p.m * p.m * f.c1 * f.c2 * (f.c1 + f.c2));
	const double nbar = 0.5 * (static_cast<double>(n1) + static_cast<double>(n2));
	cplx out = (nbar + 0.5) * sum;
	if(n1 != n2)
	{
		if(at_ep(p)) throw AtEP("osc2d: dE/dlambda diverges at the EP for n1 != n2");
		const cplx diff = -lam * (f.c1 + f.c2) / (2.0 * p.m * f.sigma * f.c1 * f.c2);
		out += 0.5 * (static_cast<double>(n1) - static_cast<double>(n2)) * diff;
	}
	return p.hbar * out;
}

/// Physicists' Hermite polynomial by the three-term recurrence.
inline cplx hermite(unsigned n, cplx z)
{
	cplx h0{1.0};
	if(n == 0) return h0;
	cplx h1 = 2.0 * z;
	for(unsigned k = 1; k < n; ++k)
	{
		const cplx h2 = 2.0 * z * h1 - 2.0 * static_cast<double>(k) * h0;
		h0 = h1;
		h1 = h2;
	}
	return h1;
}

struct WavefunctionValues
{
	cplx right;
	cplx left;
};

/// R_{n1,n2}(x, y) and L_{n1,n2}(x, y) with the normalisation constant set to
/// 1; L carries the complex conjugates of C, alpha, X and Y.
inline WavefunctionValues eval_wavefunctions(const Params& p, const NormalModes& nm, unsigned n1,
		unsigned n2, double x, double y)
{
	const ComplexMatrix& t = nm.rotation;
	const cplx bx = t(0, 0) * x + t(0, 1) * y;
	const cplx by = t(1, 0) * x + t(1, 1) * y;
	const double k = p.m / (2.0 * p.hbar);
	const cplx r = std::exp(-k * (nm.c1 * bx * bx + nm.c2 * by * by)) * hermite(n1, nm.alpha1 * bx) *
			hermite(n2, nm.alpha2 * by);
	const cplx bxc = std::conj(bx);
	const cplx byc = std::conj(by);
	const cplx l = std::exp(-k * (std::conj(nm.c1) * bxc * bxc + std::conj(nm.c2) * byc * byc)) *
			hermite(n1, std::conj(nm.alpha1) * bxc) * hermite(n2, std::conj(nm.alpha2) * byc);
	return {r, l};
}

inline WavefunctionValues eval_wavefunctions(const Params& p, unsigned n1, unsigned n2, double x,
		double y)
{
	return eval_wavefunctions(p, normal_modes(p), n1, n2, x, y);
}

struct QuadSpec
{
	std::size_t nodes = 80;
	std::size_t max_nodes = 160;
	double rel_tol = 1e-8;
};

struct RatioIntegral
{
	cplx value;
	cplx numerator;
	cplx denominator;
	std::size_t nodes;
	/// |value(nodes) - value(nodes / 2)|
	double change;
	bool converged;
};

namespace detail {

struct Envelope
{
	// r = basis * u maps Gauss-Hermite coordinates to (x, y)
	double basis[2][2];
};

// Gaussian envelope exp(-r^T M r) of conj(L) R, with M = (m/hbar) Re(T^T C T).
inline Envelope quadrature_envelope(const Params& p, const NormalModes& nm)
{
	const ComplexMatrix& t = nm.rotation;
	double mre[2][2];
	for(int i = 0; i < 2; ++i)
		for(int j = 0; j < 2; ++j)
			mre[i][j] = (p.m / p.hbar) * (t(0, i) * nm.c1 * t(0, j) + t(1, i) * nm.c2 * t(1, j)).real();
	const double off = 0.5 * (mre[0][1] + mre[1][0]);
	const double a = mre[0][0];
	const double d = mre[1][1];
	const double mid = 0.5 * (a + d);
	const double rad = std::hypot(0.5 * (a - d), off);
	const double e1 = mid + rad;
	const double e2 = mid - rad;
	if(!(e2 > 0.0))
		throw QuadratureDivergent("osc2d: Gaussian exponent of L* R is not positive definite (min eigenvalue " +
				std::to_string(e2) + ")");
	// eigenvectors of the real symmetric 2x2
	double q1[2];
	if(std::abs(off) > 0.0)
	{
		q1[0] = off;
		q1[1] = e1 - a;
	}
	else if(a >= d)
	{
		q1[0] = 1.0;
		q1[1] = 0.0;
	}
	else
	{
		q1[0] = 0.0;
		q1[1] = 1.0;
	}
	const double qn = std::hypot(q1[0], q1[1]);
	q1[0] /= qn;
	q1[1] /= qn;
	const double q2[2] = {-q1[1], q1[0]};
	Envelope env{};
	for(int i = 0; i < 2; ++i)
	{
		env.basis[i][0] = q1[i] / std::sqrt(e1);
		env.basis[i][1] = q2[i] / std::sqrt(e2);
	}
	return env;
}

inline std::pair<cplx, cplx> ratio_sums(const Params& p, const NormalModes& nm, unsigned n1,
		unsigned n2, const Envelope& env, const GaussRule& rule)
{
	const std::size_t n = rule.nodes.size();
	std::vector<cplx> num(n * n), den(n * n);
	for(std::size_t a = 0; a < n; ++a)
	{
		const double ua = rule.nodes[a];
		for(std::size_t b = 0; b < n; ++b)
		{
			const double ub = rule.nodes[b];
			const double x = env.basis[0][0] * ua + env.basis[0][1] * ub;
			const double y = env.basis[1][0] * ua + env.basis[1][1] * ub;
			const auto wf = eval_wavefunctions(p, nm, n1, n2, x, y);
			const cplx f = std::conj(wf.left) * wf.right * (rule.weights[a] * rule.weights[b] *
					std::exp(ua * ua + ub * ub));
			den[a * n + b] = f;
			num[a * n + b] = f * (I_unit * x * y);
		}
	}
	return {pairwise_sum<cplx>(num), pairwise_sum<cplx>(den)};
}

} // namespace detail

/// [int L* (i x y) R dx dy] / [int L* R dx dy] by tensor Gauss-Hermite
/// quadrature matched to the Gaussian envelope. The node count doubles from
/// spec.nodes until two successive values agree to spec.rel_tol (relative,
/// with an absolute floor of 1e-13) or spec.max_nodes is reached.
inline RatioIntegral mhft_ratio_integral_detailed(const Params& p, unsigned n1, unsigned n2,
		const QuadSpec& spec = {})
{
	if(spec.nodes == 0 || spec.max_nodes < spec.nodes || !(spec.rel_tol > 0.0))
		throw InvalidInput("osc2d: invalid quadrature specification");
	const NormalModes nm = normal_modes(p);
	const detail::Envelope env = detail::quadrature_envelope(p, nm);

	auto evaluate = [&](std::size_t nodes) {
		const GaussRule rule = gauss_hermite(nodes);
		const auto [num, den] = detail::ratio_sums(p, nm, n1, n2, env, rule);
		if(den == cplx{}) throw QuadratureDivergent("osc2d: vanishing normalisation integral");
		return RatioIntegral{num / den, num, den, nodes, std::numeric_limits<double>::infinity(), false};
	};

	RatioIntegral prev = evaluate(spec.nodes);
	if(spec.max_nodes == spec.nodes)
		return prev;
	for(std::size_t nodes = spec.nodes * 2;; nodes *= 2)
	{
		nodes = std::min(nodes, spec.max_nodes);
		RatioIntegral cur = evaluate(nodes);
		cur.change = std::abs(cur.value - prev.value);
		cur.converged = cur.change <= std::max(spec.rel_tol * std::abs(cur.value), 1e-13);
		if(cur.converged || nodes >= spec.max_nodes) return cur;
		prev = cur;
	}
}

inline cplx mhft_ratio_integral(const Params& p, unsigned n1, unsigned n2, const QuadSpec& spec = {})
{
	return mhft_ratio_integral_detailed(p, n1, n2, spec).value;
}

/// Position matrix <n|q|n'> of a single oscillator of frequency w, truncated
/// to levels 0..n_max.
inline ComplexMatrix position_matrix(const Params& p, double omega, unsigned n_max)
{
	const std::size_t dim = n_max + 1;
	ComplexMatrix q(dim, dim);
	const double scale = std::sqrt(p.hbar / (2.0 * p.m * omega));
	for(std::size_t n = 0; n + 1 < dim; ++n)
	{
		const double v = scale * std::sqrt(static_cast<double>(n + 1));
		q(n, n + 1) = v;
		q(n + 1, n) = v;
	}
	return q;
}

/// dH/dlambda = i x (x) y in the truncated product basis.
inline ComplexMatrix truncated_dh(const Params& p, unsigned n_max)
{
	p.validate();
	return I_unit * kron(position_matrix(p, p.omega_x, n_max), position_matrix(p, p.omega_y, n_max));
}

/// H in the product basis |n1>|n2> (n1, n2 = 0..n_max) of the uncoupled
/// oscillators; basis index n1 * (n_max + 1) + n2. Complex symmetric.
inline ComplexMatrix build_truncated_h(const Params& p, unsigned n_max)
{
	p.validate();
	if(n_max < 1) throw InvalidInput("osc2d: basis cutoff must be >= 1");
	ComplexMatrix h = p.lambda * truncated_dh(p, n_max);
	const std::size_t m = n_max + 1;
	for(std::size_t a = 0; a < m; ++a)
		for(std::size_t b = 0; b < m; ++b)
			h(a * m + b, a * m + b) += p.hbar * ((a + 0.5) * p.omega_x + (b + 0.5) * p.omega_y);
	return h;
}

/// The truncated Hamiltonian as a family in lambda.
inline HamiltonianFamily truncated_family(Params p, unsigned n_max)
{
	p.validate();
	const std::size_t m = n_max + 1;
	HamiltonianFamily f{m * m, {}, {}, "lambda", {}, {}};
	f.h_at = [p, n_max](double lam) {
		Params q = p;
		q.lambda = lam;
		return build_truncated_h(q, n_max);
	};
	f.dh_at = [p, n_max](double) { return truncated_dh(p, n_max); };
	return f;
}

} // namespace ptmhft::osc2d
