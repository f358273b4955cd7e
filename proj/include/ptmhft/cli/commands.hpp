#pragma once

// The four subcommands. Each writes its CSV (and optional SVG) under the
// output directory and returns an exit code plus a human-readable summary.

#include "../ptmhft.hpp"
#include "../parallel.hpp"
#include "config.hpp"
#include "format.hpp"
#include "matrix_file.hpp"
#include "svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ptmhft::cli {

enum ExitCode : int
{
	exit_ok = 0,
	exit_tolerance = 1,
	exit_config = 2,
	exit_numerical = 3,
};

struct CommandOutcome
{
	int exit_code = exit_ok;
	std::vector<std::filesystem::path> files;
	std::string summary;
};

struct RunOptions
{
	std::filesystem::path out_dir = ".";
	bool svg = false;
	std::size_t threads = 1;
};

namespace detail {

inline std::size_t parse_index(const std::string& s, std::size_t dim, const std::string& key)
{
	std::size_t v = 0;
	const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
	if(ec != std::errc{} || ptr != s.data() + s.size())
		throw ConfigError("'" + key + "': '" + s + "' is not a state index", key);
	if(v >= dim)
		throw ConfigError("'" + key + "': state " + s + " out of range for dimension " + std::to_string(dim), key);
	return v;
}

inline std::size_t resolve_state(const HamiltonianFamily& fam, const std::string& s, const std::string& key)
{
	for(std::size_t i = 0; i < fam.state_labels.size(); ++i)
		if(fam.state_labels[i] == s) return i;
	return parse_index(s, fam.dim, key);
}

struct ModeState
{
	unsigned n1;
	unsigned n2;
	std::string label;
};

inline ModeState parse_mode_state(const std::string& s)
{
	const auto colon = s.find(':');
	unsigned a = 0;
	unsigned b = 0;
	bool ok = colon != std::string::npos;
	if(ok)
	{
		const auto r1 = std::from_chars(s.data(), s.data() + colon, a);
		const auto r2 = std::from_chars(s.data() + colon + 1, s.data() + s.size(), b);
		ok = r1.ec == std::errc{} && r1.ptr == s.data() + colon && r2.ec == std::errc{} &&
				r2.ptr == s.data() + s.size() && a <= 40 && b <= 40;
	}
	if(!ok) throw ConfigError("'states': expected n1:n2 with quantum numbers <= 40, got '" + s + "'", "states");
	return {a, b, s};
}

inline HamiltonianFamily wang_family(const RunConfig& c)
{
	if(c.sweep_param == "rho") return wang::family_rho(c.wang);
	if(c.sweep_param == "delta") return wang::family_delta(c.wang);
	return wang::family_numeric(c.wang, c.sweep_param);
}

inline wang::Params wang_at(const RunConfig& c, double theta)
{
	wang::Params p = c.wang;
	if(c.sweep_param == "rho") p.rho = theta;
	if(c.sweep_param == "delta") p.delta = theta;
	if(c.sweep_param == "eps") p.eps = theta;
	if(c.sweep_param == "gamma") p.gamma = theta;
	return p;
}

/// H(theta) = H0 + theta V.
inline HamiltonianFamily matrix_family(const RunConfig& c)
{
	const ComplexMatrix h0 = read_matrix_file(c.matrix_file, "matrix_file");
	ComplexMatrix v(h0.rows(), h0.cols());
	if(!c.perturbation_file.empty())
	{
		v = read_matrix_file(c.perturbation_file, "perturbation_file");
		if(v.rows() != h0.rows())
			throw ConfigError("perturbation matrix dimension differs from the base matrix", "perturbation_file");
	}
	HamiltonianFamily f{h0.rows(), {}, {}, "theta", {}, {}};
	f.h_at = [h0, v](double theta) { return h0 + cplx{theta} * v; };
	f.dh_at = [v](double) { return v; };
	return f;
}

/// Whether a defective decomposition at theta is the model's known
/// exceptional point. Only the 2x2 model has it in closed form; elsewhere a
/// defective matrix is taken at face value.
inline bool defect_expected(const RunConfig& c, double theta)
{
	if(c.model == "wang") return wang::at_ep(wang_at(c, theta));
	return true;
}

struct PhaseStats
{
	std::size_t rows = 0;
	std::size_t with_residual = 0;
	double max_residual = 0.0;
};

inline std::string pad(std::string s, std::size_t w)
{
	if(s.size() < w) s.append(w - s.size(), ' ');
	return s;
}

inline std::string phase_table(const std::map<std::string, PhaseStats>& stats)
{
	std::string out = pad("phase", 10) + pad("rows", 7) + "max_residual\n";
	for(const char* ph : {"unbroken", "broken", "near_ep"})
	{
		const auto it = stats.find(ph);
		if(it == stats.end()) continue;
		const PhaseStats& s = it->second;
		out += pad(ph, 10) + pad(std::to_string(s.rows), 7) +
				(s.with_residual ? format_double(s.max_residual) : std::string("-")) + "\n";
	}
	return out;
}

inline PhaseTag mode_matrix_phase(const osc2d::Params& p, double im_tol, double kappa_ep)
{
	try
	{
		return classify_phase(biortho_decompose(osc2d::potential_matrix(p)), im_tol, kappa_ep);
	}
	catch(const Defective& e)
	{
		return {Phase::NearEP, e.kappa()};
	}
}

struct VerifyRow
{
	double theta;
	std::string state;
	std::optional<cplx> lhs;
	std::optional<cplx> rhs;
	std::optional<double> residual;
	std::string phase;
	double fd_step;
	bool defect_unexpected = false;
};

inline std::vector<VerifyRow> verify_family(const RunConfig& c, const HamiltonianFamily& fam, std::size_t threads)
{
	std::vector<std::size_t> states;
	for(const auto& s : c.states) states.push_back(resolve_state(fam, s, "states"));
	VerifyOptions opt;
	opt.h = c.fd_step;
	opt.threads = threads;
	opt.im_tol = c.im_tol;
	opt.kappa_ep = c.kappa_ep;
	opt.pairing_tol = c.tol;
	std::vector<VerifyRow> rows;
	for(const MhftReport& r : verify(fam, c.sweep_grid(), states, opt))
	{
		VerifyRow row{r.theta, r.label, {}, {}, r.residual, std::string(to_string(r.phase.phase)), r.fd_step};
		if(r.residual)
		{
			row.lhs = r.lhs;
			row.rhs = r.rhs;
		}
		else
			row.defect_unexpected = !defect_expected(c, r.theta);
		rows.push_back(std::move(row));
	}
	return rows;
}

// LHS from the normal-mode ratio integral, RHS from the closed-form derivative.
inline std::vector<VerifyRow> verify_oscillator_quadrature(const RunConfig& c, std::size_t threads)
{
	std::vector<ModeState> states;
	for(const auto& s : c.states) states.push_back(parse_mode_state(s));
	const auto grid = c.sweep_grid();
	const osc2d::QuadSpec spec{c.quad_nodes, c.quad_max_nodes, c.quad_rel_tol};
	std::vector<VerifyRow> rows(grid.size() * states.size());
	parallel_for(grid.size(), threads, [&](std::size_t g) {
		osc2d::Params p = c.osc;
		p.lambda = grid[g];
		const bool ep = osc2d::at_ep(p);
		const std::string phase(to_string(ep ? Phase::NearEP : mode_matrix_phase(p, c.im_tol, c.kappa_ep).phase));
		for(std::size_t k = 0; k < states.size(); ++k)
		{
			VerifyRow& row = rows[g * states.size() + k];
			row = VerifyRow{grid[g], states[k].label, {}, {}, {}, phase, 0.0};
			if(ep) continue;
			row.lhs = osc2d::mhft_ratio_integral(p, states[k].n1, states[k].n2, spec);
			row.rhs = osc2d::de_dlambda(p, states[k].n1, states[k].n2);
			row.residual = std::abs(*row.lhs - *row.rhs);
		}
	});
	return rows;
}

inline std::string opt_re(const std::optional<cplx>& z) { return z ? format_double(z->real()) : std::string{}; }
inline std::string opt_im(const std::optional<cplx>& z) { return z ? format_double(z->imag()) : std::string{}; }

inline std::filesystem::path emit(CommandOutcome& out, const RunOptions& o, const std::string& name,
		const std::string& text)
{
	const std::filesystem::path path = o.out_dir / name;
	write_text_file(path, text);
	out.files.push_back(path);
	return path;
}

inline ComplexVector parse_vector_spec(const std::string& spec, std::size_t dim)
{
	std::vector<cplx> xs;
	for(const auto& tok : split_list(spec))
	{
		try
		{
			xs.push_back(parse_complex(tok));
		}
		catch(const InvalidInput& e)
		{
			throw ConfigError(std::string("'psi0': ") + e.what(), "psi0");
		}
	}
	if(xs.size() != dim)
		throw ConfigError("'psi0': vector has " + std::to_string(xs.size()) + " entries, system dimension is " +
						std::to_string(dim),
				"psi0");
	return ComplexVector(std::move(xs));
}

inline ComplexVector resolve_psi0(const RunConfig& c, const BiorthoSystem& sys, const std::vector<std::string>& labels)
{
	const std::string& s = c.psi0;
	if(s.rfind("vector:", 0) == 0) return parse_vector_spec(s.substr(7), sys.dim());
	if(s == "superposition")
	{
		ComplexVector v(sys.dim());
		for(std::size_t i = 0; i < sys.dim(); ++i) v = v + sys.right_vec(i);
		const double n = v.norm();
		if(n == 0.0) throw ConfigError("'psi0': eigenvector sum vanishes", "psi0");
		return cplx{1.0 / n} * v;
	}
	for(std::size_t i = 0; i < labels.size(); ++i)
		if(labels[i] == s) return sys.right_vec(i);
	return sys.right_vec(parse_index(s, sys.dim(), "psi0"));
}

} // namespace detail

inline CommandOutcome cmd_verify(const RunConfig& c, const RunOptions& o)
{
	std::vector<detail::VerifyRow> rows;
	if(c.model == "wang")
		rows = detail::verify_family(c, detail::wang_family(c), o.threads);
	else if(c.model == "matrix-file")
		rows = detail::verify_family(c, detail::matrix_family(c), o.threads);
	else if(c.method == "truncated")
		rows = detail::verify_family(c, osc2d::truncated_family(c.osc, c.basis_n), o.threads);
	else
		rows = detail::verify_oscillator_quadrature(c, o.threads);

	CsvDocument csv(c.echo_line(), {"theta", "state", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual", "phase", "fd_step"});
	std::map<std::string, detail::PhaseStats> stats;
	std::size_t failures = 0;
	bool unexpected_defect = false;
	for(const auto& r : rows)
	{
		csv.row({format_double(r.theta), r.state, detail::opt_re(r.lhs), detail::opt_im(r.lhs), detail::opt_re(r.rhs),
				detail::opt_im(r.rhs), format_optional(r.residual), r.phase, format_double(r.fd_step)});
		auto& s = stats[r.phase];
		++s.rows;
		if(r.residual)
		{
			++s.with_residual;
			s.max_residual = std::max(s.max_residual, *r.residual);
			if(!(*r.residual <= c.tol)) ++failures;
		}
		unexpected_defect = unexpected_defect || r.defect_unexpected;
	}
	CommandOutcome out;
	detail::emit(out, o, "mhft_verify.csv", csv.text());
	out.summary = detail::phase_table(stats) + std::to_string(failures) + " of " + std::to_string(rows.size()) +
			" rows exceed tol=" + format_double(c.tol) + "\n";
	if(unexpected_defect)
	{
		out.summary += "defective decomposition away from the exceptional point\n";
		out.exit_code = exit_numerical;
	}
	else if(failures)
		out.exit_code = exit_tolerance;
	return out;
}

inline CommandOutcome cmd_fig1(const RunConfig& c, const RunOptions& o)
{
	std::vector<detail::ModeState> states;
	for(const auto& s : c.states) states.push_back(detail::parse_mode_state(s));
	const auto grid = c.sweep_grid();
	const osc2d::QuadSpec spec{c.quad_nodes, c.quad_max_nodes, c.quad_rel_tol};
	struct Cell
	{
		std::optional<double> lhs;
		std::optional<double> rhs;
	};
	std::vector<Cell> cells(grid.size() * states.size());
	parallel_for(grid.size(), o.threads, [&](std::size_t g) {
		osc2d::Params p = c.osc;
		p.lambda = grid[g];
		const bool ep = osc2d::at_ep(p);
		for(std::size_t k = 0; k < states.size(); ++k)
		{
			Cell& cell = cells[g * states.size() + k];
			const auto& st = states[k];
			if(!ep || st.n1 == st.n2) cell.rhs = std::abs(osc2d::de_dlambda(p, st.n1, st.n2));
			if(!ep) cell.lhs = std::abs(osc2d::mhft_ratio_integral(p, st.n1, st.n2, spec));
		}
	});

	CsvDocument csv(c.echo_line(), {"lambda", "state", "abs_lhs", "abs_rhs"});
	const double ep = osc2d::locate_ep(c.osc, 1e-15);
	double max_out = 0.0;
	double max_in = 0.0;
	for(std::size_t g = 0; g < grid.size(); ++g)
		for(std::size_t k = 0; k < states.size(); ++k)
		{
			const Cell& cell = cells[g * states.size() + k];
			csv.row({format_double(grid[g]), states[k].label, format_optional(cell.lhs), format_optional(cell.rhs)});
			if(cell.lhs && cell.rhs)
				(std::abs(grid[g] - ep) < 0.2 ? max_in : max_out) =
						std::max(std::abs(grid[g] - ep) < 0.2 ? max_in : max_out, std::abs(*cell.lhs - *cell.rhs));
		}

	CommandOutcome out;
	detail::emit(out, o, "fig1.csv", csv.text());
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.12f", ep);
	out.summary = "exceptional point at lambda = " + std::string(buf) + "\n" +
			"max | |LHS| - |RHS| | with |lambda - EP| >= 0.2: " + format_double(max_out) + "\n" +
			"max | |LHS| - |RHS| | with |lambda - EP| < 0.2: " + format_double(max_in) + "\n";
	if(o.svg)
	{
		static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
		SvgChart chart{"|<dH/dlambda>_G| (solid) vs |dE/dlambda| (dotted)", "lambda", "absolute value",
				grid.front(), grid.back(), 0.0, c.svg_ymax, {}};
		for(std::size_t k = 0; k < states.size(); ++k)
		{
			SvgSeries lhs{"(" + std::to_string(states[k].n1) + "," + std::to_string(states[k].n2) + ")", grid, {},
					palette[k % 6], false};
			SvgSeries rhs{lhs.name + " dE/dlambda", grid, {}, "black", true};
			for(std::size_t g = 0; g < grid.size(); ++g)
			{
				const Cell& cell = cells[g * states.size() + k];
				lhs.y.push_back(cell.lhs.value_or(NAN));
				rhs.y.push_back(cell.rhs.value_or(NAN));
			}
			chart.series.push_back(std::move(lhs));
			chart.series.push_back(std::move(rhs));
		}
		detail::emit(out, o, "fig1.svg", render_svg(chart));
	}
	return out;
}

inline CommandOutcome cmd_trace(const RunConfig& c, const RunOptions& o)
{
	const ComplexMatrix h = c.model == "wang" ? wang::hamiltonian(c.wang)
			: c.model == "matrix-file"        ? detail::matrix_family(c).h_at(c.theta)
											  : osc2d::build_truncated_h(c.osc, c.basis_n);
	const std::vector<std::string> labels = c.model == "wang" ? wang::branch_labels() : std::vector<std::string>{};

	std::vector<NormMode> modes;
	if(c.metric_mode == "all" || c.metric_mode == "fixed-G") modes.push_back(NormMode::FixedMetric);
	if(c.metric_mode == "all" || c.metric_mode == "time-dependent-G") modes.push_back(NormMode::TimeDependentMetric);
	if(c.metric_mode == "all" || c.metric_mode == "euclidean") modes.push_back(NormMode::Euclidean);
	const auto times = c.time_grid();

	CsvDocument csv(c.echo_line(), {"t", "value", "mode", "phase"});
	CommandOutcome out;
	std::optional<BiorthoSystem> sys;
	std::string defect;
	try
	{
		sys = biortho_decompose(h);
	}
	catch(const Defective& e)
	{
		defect = e.what();
	}

	std::vector<NormTrace> traces;
	if(sys)
	{
		const std::string phase(to_string(classify_phase(*sys, c.im_tol, c.kappa_ep).phase));
		const ComplexVector psi0 = detail::resolve_psi0(c, *sys, labels);
		for(NormMode m : modes)
		{
			traces.push_back(norm_trace(*sys, psi0, times, m, c.osc.hbar));
			const NormTrace& tr = traces.back();
			for(std::size_t k = 0; k < times.size(); ++k)
				csv.row({format_double(times[k]), format_double(tr.values[k]), std::string(to_string(m)), phase});
			const auto [lo, hi] = std::minmax_element(tr.values.begin(), tr.values.end());
			out.summary += detail::pad(std::string(to_string(m)), 18) + "first " + format_double(tr.values.front()) +
					"  last " + format_double(tr.values.back()) + "  spread " + format_double(*hi - *lo) + "\n";
		}
	}
	else
	{
		for(NormMode m : modes)
			for(double t : times) csv.row({format_double(t), "", std::string(to_string(m)), "near_ep"});
		out.summary = "defective Hamiltonian: " + defect + "\n";
		if(!detail::defect_expected(c, c.model == "wang" ? c.wang.rho : c.theta))
			out.exit_code = exit_numerical;
	}
	detail::emit(out, o, "norm_trace.csv", csv.text());

	if(o.svg && !traces.empty())
	{
		static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c"};
		double ymax = 0.0;
		for(const auto& tr : traces)
			for(double v : tr.values) ymax = std::max(ymax, v);
		SvgChart chart{"norm trace", "t", "<psi(t)|M|psi(t)>", times.front(), times.back(), 0.0,
				ymax > 0.0 ? 1.05 * ymax : 1.0, {}};
		for(std::size_t k = 0; k < traces.size(); ++k)
			chart.series.push_back({std::string(to_string(traces[k].mode)), times, traces[k].values, palette[k % 3], false});
		detail::emit(out, o, "norm_trace.svg", render_svg(chart));
	}
	return out;
}

inline CommandOutcome cmd_scan_phase(const RunConfig& c, const RunOptions& o)
{
	std::function<ComplexMatrix(double)> h_at;
	if(c.model == "wang")
		h_at = detail::wang_family(c).h_at;
	else if(c.model == "matrix-file")
		h_at = detail::matrix_family(c).h_at;
	else
		h_at = [p = c.osc](double lam) {
			osc2d::Params q = p;
			q.lambda = lam;
			return osc2d::potential_matrix(q);
		};

	const auto grid = c.sweep_grid();
	struct Row
	{
		PhaseTag tag{Phase::NearEP, 0.0};
		std::optional<double> max_im;
		double kappa = 0.0;
	};
	std::vector<Row> rows(grid.size());
	parallel_for(grid.size(), o.threads, [&](std::size_t g) {
		Row& r = rows[g];
		try
		{
			const BiorthoSystem sys = biortho_decompose(h_at(grid[g]));
			r.tag = classify_phase(sys, c.im_tol, c.kappa_ep);
			double m = 0.0;
			for(const auto& e : sys.values) m = std::max(m, std::abs(e.imag()));
			r.max_im = m;
			r.kappa = sys.kappa;
		}
		catch(const Defective& e)
		{
			r.tag = {Phase::NearEP, e.kappa()};
			r.kappa = e.kappa();
		}
	});

	CsvDocument csv(c.echo_line(), {"theta", "phase", "witness", "max_abs_im", "kappa"});
	std::map<std::string, detail::PhaseStats> stats;
	std::string transitions;
	for(std::size_t g = 0; g < grid.size(); ++g)
	{
		const std::string phase(to_string(rows[g].tag.phase));
		csv.row({format_double(grid[g]), phase, format_double(rows[g].tag.witness), format_optional(rows[g].max_im),
				format_double(rows[g].kappa)});
		++stats[phase].rows;
		if(g > 0 && rows[g].tag.phase != rows[g - 1].tag.phase)
			transitions += "  " + std::string(to_string(rows[g - 1].tag.phase)) + " -> " + phase + " between " +
					format_double(grid[g - 1]) + " and " + format_double(grid[g]) + "\n";
	}
	CommandOutcome out;
	detail::emit(out, o, "phase_scan.csv", csv.text());
	out.summary = "points per phase:";
	for(const char* ph : {"unbroken", "broken", "near_ep"})
		if(stats.count(ph)) out.summary += std::string(" ") + ph + "=" + std::to_string(stats[ph].rows);
	out.summary += "\n" + (transitions.empty() ? std::string("no phase change on the grid\n") : "transitions:\n" + transitions);
	return out;
}

inline CommandOutcome run_command(const RunConfig& c, const RunOptions& o)
{
	switch(c.command)
	{
	case Command::Verify: return cmd_verify(c, o);
	case Command::Fig1: return cmd_fig1(c, o);
	case Command::Trace: return cmd_trace(c, o);
	case Command::ScanPhase: return cmd_scan_phase(c, o);
	}
	throw ConfigError("unknown command", "command");
}

} // namespace ptmhft::cli
