#pragma once

// Independent reference computations used only by the tests. Nothing here
// goes through the eigensolver path it is used to check unless stated.

#include "ptmhft/ptmhft.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using ptmhft::ComplexMatrix;
using ptmhft::ComplexVector;
using ptmhft::cplx;

/// Roots of the 2x2 characteristic polynomial x^2 - tr x + det, sorted like
/// eig_general (real part, then imaginary part).
inline std::vector<cplx> char_poly_roots_2x2(const ComplexMatrix& m)
{
	const cplx tr = m(0, 0) + m(1, 1);
	const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
	const cplx disc = std::sqrt(0.25 * tr * tr - det);
	std::vector<cplx> r{0.5 * tr - disc, 0.5 * tr + disc};
	std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
		if(std::abs(a.real() - b.real()) > 1e-9) return a.real() < b.real();
		return a.imag() < b.imag();
	});
	return r;
}

template<typename F>
auto central_difference(F&& f, double x, double h)
{
	return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Left eigenvectors from a separate eigensolve of H^H, paired to the right
/// eigenvalues by nearest conj(E'_j) and scaled so <L_i|R_i> = 1.
inline ComplexMatrix left_vectors_by_adjoint(const ComplexMatrix& h, const ptmhft::BiorthoSystem& sys)
{
	const auto adj = ptmhft::eig_general(h.adjoint());
	const std::size_t n = sys.dim();
	ComplexMatrix l(n, n);
	std::vector<bool> used(n, false);
	for(std::size_t i = 0; i < n; ++i)
	{
		std::size_t best = n;
		double dist = 1e300;
		for(std::size_t j = 0; j < n; ++j)
		{
			if(used[j]) continue;
			const double d = std::abs(std::conj(adj.values[j]) - sys.values[i]);
			if(d < dist)
			{
				dist = d;
				best = j;
			}
		}
		used[best] = true;
		ComplexVector v = adj.right_vectors.col(best);
		const cplx ov = ptmhft::dot(v, sys.right_vec(i));
		v *= 1.0 / std::conj(ov);
		l.set_col(i, v);
	}
	return l;
}

inline ComplexMatrix random_matrix(std::mt19937_64& gen, std::size_t n)
{
	std::normal_distribution<double> nd;
	ComplexMatrix m(n, n);
	for(std::size_t i = 0; i < n; ++i)
		for(std::size_t j = 0; j < n; ++j) m(i, j) = cplx{nd(gen), nd(gen)};
	return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& gen, std::size_t n)
{
	const ComplexMatrix a = random_matrix(gen, n);
	return cplx{0.5} * (a + a.adjoint());
}

inline ComplexVector random_vector(std::mt19937_64& gen, std::size_t n)
{
	std::normal_distribution<double> nd;
	std::vector<cplx> v(n);
	for(auto& z : v) z = cplx{nd(gen), nd(gen)};
	return ComplexVector(std::move(v));
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b)
{
	return (a - b).max_abs();
}

/// Multiset distance between two spectra via greedy nearest matching.
inline double spectrum_distance(std::vector<cplx> a, std::vector<cplx> b)
{
	double worst = 0.0;
	for(const auto& x : a)
	{
		auto it = std::min_element(b.begin(), b.end(),
				[&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
		worst = std::max(worst, std::abs(*it - x));
		b.erase(it);
	}
	return worst;
}

} // namespace oracle
