#pragma once

// PT-symmetric two-level model
//   H = [[eps + g cos d, -i (g sin d - rho)], [i (g sin d + rho), eps - g cos d]]
// with eigenvalues E_+- = eps +- sqrt(g^2 - rho^2) and its PT transition at
// rho = gamma.

#include "mhft.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace ptmhft::wang {

struct Params
{
	double eps = 0.0;
	double gamma = 1.0;
	double delta = 0.0;
	double rho = 0.0;

	void validate() const
	{
		if(!std::isfinite(eps) || !std::isfinite(gamma) || !std::isfinite(delta) ||
				!std::isfinite(rho))
			throw InvalidInput("wang: parameters must be finite");
		if(gamma < 0.0) throw InvalidInput("wang: gamma must be >= 0");
		if(rho < 0.0) throw InvalidInput("wang: rho must be >= 0");
	}
};

enum class Branch
{
	Minus = 0,
	Plus = 1,
};

/// Position of a branch in eig_general ordering: E_- sorts before E_+ in both
/// phases (by real part when unbroken, by imaginary part when broken).
inline constexpr std::size_t index_of(Branch b) { return static_cast<std::size_t>(b); }

inline bool at_ep(const Params& p) { return std::abs(p.rho - p.gamma) <= 1e-12 * std::max(1.0, p.gamma); }

inline ComplexMatrix hamiltonian(const Params& p)
{
	const double gs = p.gamma * std::sin(p.delta);
	const double gc = p.gamma * std::cos(p.delta);
	return ComplexMatrix{
			{p.eps + gc, -I_unit * (gs - p.rho)},
			{I_unit * (gs + p.rho), p.eps - gc},
	};
}

inline ComplexMatrix dh_drho(const Params&)
{
	return ComplexMatrix{{0.0, I_unit}, {I_unit, 0.0}};
}

inline ComplexMatrix dh_ddelta(const Params& p)
{
	const double gs = p.gamma * std::sin(p.delta);
	const double gc = p.gamma * std::cos(p.delta);
	return ComplexMatrix{{-gs, -I_unit * gc}, {I_unit * gc, gs}};
}

/// P = diag(1, -1); T is complex conjugation.
inline ComplexMatrix parity()
{
	return ComplexMatrix::diagonal({1.0, -1.0});
}

/// (PT) H (PT)^-1 = P conj(H) P
inline ComplexMatrix pt_transform(const ComplexMatrix& h)
{
	const ComplexMatrix p = parity();
	return p * h.conjugate() * p;
}

/// sqrt(gamma^2 - rho^2) on the principal branch: real when unbroken,
/// +i sqrt(rho^2 - gamma^2) when broken.
inline cplx root(const Params& p)
{
	const double d = (p.gamma - p.rho) * (p.gamma + p.rho);
	return d >= 0.0 ? cplx{std::sqrt(d), 0.0} : cplx{0.0, std::sqrt(-d)};
}

struct Eigenvalues
{
	cplx plus;
	cplx minus;
};

inline Eigenvalues eigenvalues(const Params& p)
{
	const cplx r = root(p);
	return {p.eps + r, p.eps - r};
}

struct Eigenvectors
{
	ComplexVector r_plus;
	ComplexVector r_minus;
	ComplexVector l_plus;
	ComplexVector l_minus;
};

/// Closed-form biorthonormal eigenvectors, parametrised by sin(alpha) = rho/gamma.
///
/// Unbroken: the half-angle vectors with 1/sqrt(cos alpha) prefactor.
/// Broken: the same expressions continued to alpha = pi/2 - i arccosh(rho/gamma)
/// (applied to the bra components of L), then rescaled so <L_i|R_i> = 1.
inline Eigenvectors eigenvectors(const Params& p)
{
	p.validate();
	if(at_ep(p)) throw AtEP("wang: eigenvectors coalesce at rho = gamma");
	if(p.gamma == 0.0) throw AtEP("wang: gamma = 0 leaves sin(alpha) = rho/gamma undefined");
	const double s = p.rho / p.gamma;
	const cplx alpha = s <= 1.0 ? cplx{std::asin(s), 0.0}
	                            : cplx{0.5 * std::numbers::pi, -std::acosh(s)};
	const cplx norm = 1.0 / std::sqrt(std::cos(alpha));
	const cplx hp = 0.5 * (p.delta + alpha);
	const cplx hm = 0.5 * (p.delta - alpha);

	ComplexVector rp{norm * std::cos(hp), norm * I_unit * std::sin(hp)};
	ComplexVector rm{norm * I_unit * std::sin(hm), norm * std::cos(hm)};
	// bra components continued analytically, then conjugated into kets
	ComplexVector lp{std::conj(norm * std::cos(hm)), std::conj(-I_unit * norm * std::sin(hm))};
	ComplexVector lm{std::conj(-I_unit * norm * std::sin(hp)), std::conj(norm * std::cos(hp))};

	const cplx np = dot(lp, rp);
	const cplx nm = dot(lm, rm);
	lp *= 1.0 / std::conj(np);
	lm *= 1.0 / std::conj(nm);
	return {std::move(rp), std::move(rm), std::move(lp), std::move(lm)};
}

/// Closed-form <L_+-| dH/drho |R_+-> = dE_+-/drho:
/// unbroken -+ rho / sqrt(gamma^2 - rho^2), broken +- i rho / sqrt(rho^2 - gamma^2).
inline cplx mhft_closed(const Params& p, Branch b)
{
	p.validate();
	if(at_ep(p)) throw AtEP("wang: dE/drho diverges at rho = gamma");
	const double sign = b == Branch::Plus ? 1.0 : -1.0;
	if(p.rho < p.gamma)
		return {-sign * p.rho / std::sqrt((p.gamma - p.rho) * (p.gamma + p.rho)), 0.0};
	return {0.0, sign * p.rho / std::sqrt((p.rho - p.gamma) * (p.rho + p.gamma))};
}

inline std::vector<std::string> branch_labels() { return {"-", "+"}; }

/// H as a function of rho with the other parameters fixed.
inline HamiltonianFamily family_rho(Params p)
{
	p.validate();
	HamiltonianFamily f{2, {}, {}, "rho", {}, branch_labels()};
	f.h_at = [p](double rho) {
		Params q = p;
		q.rho = rho;
		return hamiltonian(q);
	};
	f.dh_at = [p](double) { return dh_drho(p); };
	return f;
}

inline HamiltonianFamily family_delta(Params p)
{
	p.validate();
	HamiltonianFamily f{2, {}, {}, "delta", {}, branch_labels()};
	f.h_at = [p](double d) {
		Params q = p;
		q.delta = d;
		return hamiltonian(q);
	};
	f.dh_at = [p](double d) {
		Params q = p;
		q.delta = d;
		return dh_ddelta(q);
	};
	return f;
}

/// Families in eps or gamma; dH is left to the central difference.
inline HamiltonianFamily family_numeric(Params p, const std::string& name)
{
	p.validate();
	double Params::*field = nullptr;
	ParamInterval dom{};
	if(name == "eps")
		field = &Params::eps;
	else if(name == "gamma")
	{
		field = &Params::gamma;
		dom.lo = 0.0;
	}
	else if(name == "rho")
		field = &Params::rho;
	else if(name == "delta")
		field = &Params::delta;
	else
		throw InvalidInput("wang: unknown parameter '" + name + "'");
	HamiltonianFamily f{2, {}, {}, name, dom, branch_labels()};
	f.h_at = [p, field](double v) {
		Params q = p;
		q.*field = v;
		return hamiltonian(q);
	};
	return f;
}

} // namespace ptmhft::wang
