#pragma once

#include "error.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace ptmhft {

struct GaussRule
{
	std::vector<double> nodes;
	std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight exp(-x^2): Newton iteration on the
/// orthonormal Hermite recurrence, nodes ascending.
inline GaussRule gauss_hermite(std::size_t n)
{
	if(n == 0) throw InvalidInput("gauss_hermite: need at least one node");
	const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
	const double dn = static_cast<double>(n);
	std::vector<double> x(n), w(n);
	const std::size_t m = (n + 1) / 2;
	double z = 0.0;
	for(std::size_t i = 0; i < m; ++i)
	{
		// initial guesses for the largest roots, then extrapolation from earlier ones
		if(i == 0)
			z = std::sqrt(2.0 * dn + 1.0) - 1.85575 * std::pow(2.0 * dn + 1.0, -1.0 / 6.0);
		else if(i == 1)
			z -= 1.14 * std::pow(dn, 0.426) / z;
		else if(i == 2)
			z = 1.86 * z - 0.86 * x[0];
		else if(i == 3)
			z = 1.91 * z - 0.91 * x[1];
		else
			z = 2.0 * z - x[i - 2];

		double pp = 0.0;
		bool converged = false;
		for(int it = 0; it < 100; ++it)
		{
			double p1 = pim4;
			double p2 = 0.0;
			for(std::size_t j = 1; j <= n; ++j)
			{
				const double p3 = p2;
				p2 = p1;
				const double dj = static_cast<double>(j);
				p1 = z * std::sqrt(2.0 / dj) * p2 - std::sqrt((dj - 1.0) / dj) * p3;
			}
			pp = std::sqrt(2.0 * dn) * p2;
			const double z1 = z;
			z = z1 - p1 / pp;
			if(std::abs(z - z1) <= 3e-15 * std::max(1.0, std::abs(z)))
			{
				converged = true;
				break;
			}
		}
		if(!converged)
			throw NonConvergence("gauss_hermite: Newton iteration failed for n = " + std::to_string(n));
		x[i] = z;
		x[n - 1 - i] = -z;
		w[i] = 2.0 / (pp * pp);
		w[n - 1 - i] = w[i];
	}
	if(n % 2 == 1) x[n / 2] = 0.0;
	// stored from largest to smallest above; flip to ascending
	GaussRule r{std::vector<double>(x.rbegin(), x.rend()), std::vector<double>(w.rbegin(), w.rend())};
	return r;
}

/// Fixed-order pairwise (cascade) summation.
template<typename T>
T pairwise_sum(std::span<const T> xs)
{
	if(xs.empty()) return T{};
	if(xs.size() <= 8)
	{
		T s{};
		for(const auto& x : xs) s += x;
		return s;
	}
	const std::size_t half = xs.size() / 2;
	return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

} // namespace ptmhft
