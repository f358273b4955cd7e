#pragma once

// Parameter derivatives of non-Hermitian eigenvalues through the biorthogonal
// sandwich dE_i/dtheta = <L_i| dH/dtheta |R_i> = <R_i| G dH/dtheta |R_i>, and a
// finite-difference eigenvalue oracle (with branch tracking) to check it.

#include "biortho.hpp"
#include "parallel.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ptmhft {

struct ParamInterval
{
	double lo = -std::numeric_limits<double>::infinity();
	double hi = std::numeric_limits<double>::infinity();

	[[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

struct HamiltonianFamily
{
	std::size_t dim;
	std::function<ComplexMatrix(double)> h_at;
	/// Analytic dH/dtheta; a central difference is used when empty.
	std::function<ComplexMatrix(double)> dh_at;
	std::string param_name = "theta";
	ParamInterval domain{};
	/// Optional display names for eigenvalue indices.
	std::vector<std::string> state_labels{};

	[[nodiscard]] std::string label(std::size_t i) const
	{
		return i < state_labels.size() ? state_labels[i] : std::to_string(i);
	}
};

inline double default_fd_step(double theta)
{
	return 1e-5 * std::max(1.0, std::abs(theta));
}

namespace detail {

inline void check_domain(const HamiltonianFamily& fam, double theta)
{
	if(!std::isfinite(theta) || !fam.domain.contains(theta))
		throw DomainError(fam.param_name + " = " + std::to_string(theta) +
				" lies outside the family's parameter domain");
}

inline ComplexMatrix family_h(const HamiltonianFamily& fam, double theta)
{
	check_domain(fam, theta);
	ComplexMatrix h = fam.h_at(theta);
	if(h.rows() != fam.dim || h.cols() != fam.dim)
		throw DimensionMismatch("family returned a matrix of the wrong dimension");
	return h;
}

} // namespace detail

/// dH/dtheta, analytic when available. Returns the step used (0 if analytic).
inline ComplexMatrix family_dh(const HamiltonianFamily& fam, double theta, double h,
		double* step_used = nullptr)
{
	detail::check_domain(fam, theta);
	if(fam.dh_at)
	{
		if(step_used) *step_used = 0.0;
		return fam.dh_at(theta);
	}
	if(!(h > 0.0)) h = default_fd_step(theta);
	if(step_used) *step_used = h;
	return cplx{0.5 / h} * (detail::family_h(fam, theta + h) - detail::family_h(fam, theta - h));
}

struct MhftLhs
{
	/// <L_i| dH |R_i>
	cplx value;
	/// <R_i| G dH |R_i>
	cplx metric_form;
	/// |value - metric_form|
	double form_agreement;
	bool used_analytic_dh;
	/// Central-difference step for dH (0 when analytic).
	double dh_step;
};

/// Both sandwich forms for state i of an already decomposed system.
inline MhftLhs mhft_lhs_from(const BiorthoSystem& sys, const ComplexMatrix& dh, std::size_t i)
{
	const MetricOperator g = metric(sys);
	const cplx a = g_expectation(sys, dh, i);
	const cplx b = g_expectation_metric_form(sys, g, dh, i);
	return {a, b, std::abs(a - b), true, 0.0};
}

inline MhftLhs mhft_lhs(const HamiltonianFamily& fam, double theta, std::size_t i,
		double dh_step = 0.0)
{
	const BiorthoSystem sys = biortho_decompose(detail::family_h(fam, theta));
	if(i >= sys.dim()) throw DimensionMismatch("mhft_lhs: state index out of range");
	double step = 0.0;
	const ComplexMatrix dh = family_dh(fam, theta, dh_step, &step);
	MhftLhs out = mhft_lhs_from(sys, dh, i);
	out.used_analytic_dh = static_cast<bool>(fam.dh_at);
	out.dh_step = step;
	return out;
}

/// Permutation p with state i of `a` continuing as state p[i] of `b`,
/// maximising the overlaps |<L_i^a|R_j^b>| greedily. Raises AmbiguousTracking
/// when a chosen overlap has a competitor within 1e-3.
inline std::vector<std::size_t> track_states(const BiorthoSystem& a, const BiorthoSystem& b,
		double ambiguity = 1e-3)
{
	const std::size_t n = a.dim();
	if(b.dim() != n) throw DimensionMismatch("track_states: systems differ in dimension");
	const ComplexMatrix ov = a.left.adjoint() * b.right;
	std::vector<std::size_t> perm(n, n);
	std::vector<bool> row_used(n, false), col_used(n, false);
	for(std::size_t step = 0; step < n; ++step)
	{
		double best = -1.0;
		std::size_t bi = 0, bj = 0;
		for(std::size_t i = 0; i < n; ++i)
		{
			if(row_used[i]) continue;
			for(std::size_t j = 0; j < n; ++j)
			{
				if(col_used[j]) continue;
				const double v = std::abs(ov(i, j));
				if(v > best)
				{
					best = v;
					bi = i;
					bj = j;
				}
			}
		}
		for(std::size_t k = 0; k < n; ++k)
		{
			if(k != bj && !col_used[k] && best - std::abs(ov(bi, k)) < ambiguity)
				throw AmbiguousTracking("state " + std::to_string(bi) + " overlaps candidates " +
						std::to_string(bj) + " and " + std::to_string(k) + " almost equally",
						bi, bj, k);
			if(k != bi && !row_used[k] && best - std::abs(ov(k, bj)) < ambiguity)
				throw AmbiguousTracking("candidate " + std::to_string(bj) + " overlaps states " +
						std::to_string(bi) + " and " + std::to_string(k) + " almost equally",
						bi, bj, k);
		}
		perm[bi] = bj;
		row_used[bi] = true;
		col_used[bj] = true;
	}
	return perm;
}

/// Central difference of the tracked eigenvalue branch through state i.
inline cplx mhft_rhs_fd(const HamiltonianFamily& fam, double theta, std::size_t i, double h)
{
	if(!(h > 0.0)) throw InvalidInput("mhft_rhs_fd: step must be positive");
	const BiorthoSystem s0 = biortho_decompose(detail::family_h(fam, theta));
	const BiorthoSystem sp = biortho_decompose(detail::family_h(fam, theta + h));
	const BiorthoSystem sm = biortho_decompose(detail::family_h(fam, theta - h));
	if(i >= s0.dim()) throw DimensionMismatch("mhft_rhs_fd: state index out of range");
	const auto pp = track_states(s0, sp);
	const auto pm = track_states(s0, sm);
	return (sp.values[pp[i]] - sm.values[pm[i]]) / (2.0 * h);
}

/// Which derivative the sandwich matched: dE/dtheta itself or its conjugate.
enum class Pairing
{
	Direct,
	Conjugate,
	Both,
	Neither,
};

inline std::string_view to_string(Pairing p)
{
	switch(p)
	{
	case Pairing::Direct: return "direct";
	case Pairing::Conjugate: return "conjugate";
	case Pairing::Both: return "both";
	case Pairing::Neither: return "neither";
	}
	return "?";
}

struct MhftReport
{
	double theta;
	std::size_t state;
	std::string label;
	cplx lhs{};
	/// Tracked finite-difference dE/dtheta.
	cplx rhs{};
	/// |lhs - rhs|; empty at defective points.
	std::optional<double> residual;
	/// |lhs - conj(rhs)|
	std::optional<double> residual_conj;
	Pairing pairing = Pairing::Neither;
	/// |<L|dH|R> - <R|G dH|R>|
	std::optional<double> form_agreement;
	PhaseTag phase{Phase::NearEP, 0.0};
	double fd_step;
	bool used_analytic_dh;
	/// Failure text for points that could not be evaluated.
	std::string note{};
};

struct VerifyOptions
{
	/// Finite-difference step; non-positive selects default_fd_step(theta).
	double h = 0.0;
	std::size_t threads = 1;
	double im_tol = default_im_tol;
	double kappa_ep = default_kappa_ep;
	/// Residual at or below which a pairing counts as satisfied.
	double pairing_tol = 1e-6;
};

/// One report per (grid point, state), ordered by grid index then by the
/// order of `states`. Defective points are tagged NearEP without residuals.
inline std::vector<MhftReport> verify(const HamiltonianFamily& fam, const std::vector<double>& grid,
		const std::vector<std::size_t>& states, const VerifyOptions& opt = {})
{
	std::vector<MhftReport> out(grid.size() * states.size());
	parallel_for(grid.size(), opt.threads, [&](std::size_t g) {
		const double theta = grid[g];
		const double h = opt.h > 0.0 ? opt.h : default_fd_step(theta);
		for(std::size_t k = 0; k < states.size(); ++k)
		{
			auto& r = out[g * states.size() + k];
			r.theta = theta;
			r.state = states[k];
			r.label = fam.label(states[k]);
			r.fd_step = h;
			r.used_analytic_dh = static_cast<bool>(fam.dh_at);
		}
		try
		{
			const BiorthoSystem s0 = biortho_decompose(detail::family_h(fam, theta));
			const BiorthoSystem sp = biortho_decompose(detail::family_h(fam, theta + h));
			const BiorthoSystem sm = biortho_decompose(detail::family_h(fam, theta - h));
			const auto pp = track_states(s0, sp);
			const auto pm = track_states(s0, sm);
			const PhaseTag phase = classify_phase(s0, opt.im_tol, opt.kappa_ep);
			const ComplexMatrix dh = family_dh(fam, theta, h);
			for(std::size_t k = 0; k < states.size(); ++k)
			{
				auto& r = out[g * states.size() + k];
				const std::size_t i = states[k];
				if(i >= s0.dim()) throw DimensionMismatch("verify: state index out of range");
				const MhftLhs lhs = mhft_lhs_from(s0, dh, i);
				r.lhs = lhs.value;
				r.form_agreement = lhs.form_agreement;
				r.rhs = (sp.values[pp[i]] - sm.values[pm[i]]) / (2.0 * h);
				r.residual = std::abs(r.lhs - r.rhs);
				r.residual_conj = std::abs(r.lhs - std::conj(r.rhs));
				const bool direct = *r.residual <= opt.pairing_tol;
				const bool conj = *r.residual_conj <= opt.pairing_tol;
				r.pairing = direct && conj ? Pairing::Both
						: direct           ? Pairing::Direct
						: conj             ? Pairing::Conjugate
										   : Pairing::Neither;
				r.phase = phase;
			}
		}
		catch(const Defective& e)
		{
			for(std::size_t k = 0; k < states.size(); ++k)
			{
				auto& r = out[g * states.size() + k];
				r.phase = {Phase::NearEP, e.kappa()};
				r.note = e.what();
			}
		}
		catch(const AmbiguousTracking& e)
		{
			for(std::size_t k = 0; k < states.size(); ++k)
			{
				auto& r = out[g * states.size() + k];
				r.phase = {Phase::NearEP, 0.0};
				r.note = e.what();
			}
		}
	});
	return out;
}

} // namespace ptmhft
