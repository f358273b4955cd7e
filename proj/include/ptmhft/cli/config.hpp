#pragma once

// Run configuration for the command-line front end: a key=value text file,
// overridden by --set key=value, resolved into typed settings with
// model- and command-dependent defaults. Unknown keys are rejected.

#include "../error.hpp"
#include "../biortho.hpp"
#include "../oscillator.hpp"
#include "../ptmhft.hpp"
#include "../wang.hpp"
#include "format.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ptmhft::cli {

inline constexpr std::array known_keys{
		"model",
		"eps", "gamma", "delta", "rho",
		"m", "hbar", "omega_x", "omega_y", "lambda",
		"matrix_file", "perturbation_file", "theta",
		"sweep.param", "sweep.start", "sweep.stop", "sweep.step",
		"states", "method",
		"fd_step", "tol", "im_tol", "kappa_ep",
		"quad_nodes", "quad_max_nodes", "quad_rel_tol", "basis_n",
		"t_start", "t_stop", "t_step", "metric_mode", "psi0",
		"svg.ymax",
};

inline bool is_known_key(std::string_view key)
{
	return std::find(known_keys.begin(), known_keys.end(), key) != known_keys.end();
}

/// Raw key/value pairs in the order they were last assigned.
class ConfigSource
{
public:
	void set(const std::string& key, const std::string& value)
	{
		if(!is_known_key(key)) throw ConfigError("unknown configuration key '" + key + "'", key);
		values_[key] = value;
	}

	/// Parses one `key=value` assignment (as given to --set).
	void set_assignment(std::string_view text)
	{
		const auto eq = text.find('=');
		if(eq == std::string_view::npos)
			throw ConfigError("expected key=value, got '" + std::string(text) + "'", std::string(text));
		set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
	}

	/// File format: one key = value per line; blank lines and lines starting
	/// with '#' are ignored.
	void load_text(std::string_view text)
	{
		std::istringstream in{std::string(text)};
		std::string line;
		int lineno = 0;
		while(std::getline(in, line))
		{
			++lineno;
			const std::string t = trim(line);
			if(t.empty() || t[0] == '#') continue;
			if(t.find('=') == std::string::npos)
				throw ConfigError("line " + std::to_string(lineno) + ": expected key = value", t);
			set_assignment(t);
		}
	}

	void load_file(const std::string& path)
	{
		std::ifstream in(path);
		if(!in) throw IoError("cannot read config file '" + path + "'");
		std::stringstream ss;
		ss << in.rdbuf();
		load_text(ss.str());
	}

	[[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
	[[nodiscard]] const std::string& get(const std::string& key) const { return values_.at(key); }

	static std::string trim(std::string_view s)
	{
		const auto b = s.find_first_not_of(" \t\r\n");
		if(b == std::string_view::npos) return {};
		const auto e = s.find_last_not_of(" \t\r\n");
		return std::string(s.substr(b, e - b + 1));
	}

private:
	std::map<std::string, std::string> values_;
};

enum class Command
{
	Verify,
	Fig1,
	Trace,
	ScanPhase,
};

inline std::string_view to_string(Command c)
{
	switch(c)
	{
	case Command::Verify: return "verify";
	case Command::Fig1: return "fig1";
	case Command::Trace: return "trace";
	case Command::ScanPhase: return "scan-phase";
	}
	return "?";
}

inline Command parse_command(std::string_view name)
{
	if(name == "verify") return Command::Verify;
	if(name == "fig1") return Command::Fig1;
	if(name == "trace") return Command::Trace;
	if(name == "scan-phase") return Command::ScanPhase;
	throw ConfigError("unknown command '" + std::string(name) + "'", "command");
}

/// Fully resolved settings. `echo` lists every effective parameter in a
/// fixed order for the `# config:` line.
struct RunConfig
{
	Command command = Command::Verify;
	std::string model;
	wang::Params wang{};
	osc2d::Params osc{};
	std::string matrix_file;
	std::string perturbation_file;
	double theta = 0.0;

	std::string sweep_param;
	double sweep_start = 0.0;
	double sweep_stop = 0.0;
	double sweep_step = 0.0;
	std::vector<std::string> states;
	std::string method;

	double fd_step = 0.0;
	double tol = 0.0;
	double im_tol = default_im_tol;
	double kappa_ep = default_kappa_ep;
	std::size_t quad_nodes = 80;
	std::size_t quad_max_nodes = 160;
	double quad_rel_tol = 1e-8;
	unsigned basis_n = 10;

	double t_start = 0.0;
	double t_stop = 5.0;
	double t_step = 0.25;
	std::string metric_mode;
	std::string psi0;
	double svg_ymax = 1.0;

	std::vector<std::pair<std::string, std::string>> echo;

	[[nodiscard]] std::string echo_line() const
	{
		std::string out = "# config:";
		for(const auto& [k, v] : echo) out += " " + k + "=" + v;
		return out;
	}

	/// Sweep grid start + k step, rounded to 12 significant digits so that
	/// e.g. 3 * 0.1 is written as 0.3 and lands exactly on 0.3.
	[[nodiscard]] std::vector<double> sweep_grid() const { return make_grid(sweep_start, sweep_stop, sweep_step); }
	[[nodiscard]] std::vector<double> time_grid() const { return make_grid(t_start, t_stop, t_step); }

	static std::vector<double> make_grid(double start, double stop, double step)
	{
		std::vector<double> g;
		const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
		for(long long k = 0; k <= count; ++k) g.push_back(round_sig(start + static_cast<double>(k) * step, 12));
		return g;
	}
};

namespace detail {

inline double parse_double(const ConfigSource& src, const std::string& key, double fallback)
{
	if(!src.has(key)) return fallback;
	const std::string& s = src.get(key);
	double v = 0.0;
	const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
	if(ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
		throw ConfigError("'" + key + "' must be a finite number, got '" + s + "'", key);
	return v;
}

inline std::size_t parse_count(const ConfigSource& src, const std::string& key, std::size_t fallback)
{
	if(!src.has(key)) return fallback;
	const std::string& s = src.get(key);
	std::size_t v = 0;
	const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
	if(ec != std::errc{} || ptr != s.data() + s.size())
		throw ConfigError("'" + key + "' must be a non-negative integer, got '" + s + "'", key);
	return v;
}

inline std::string parse_string(const ConfigSource& src, const std::string& key, std::string fallback)
{
	return src.has(key) ? src.get(key) : std::move(fallback);
}

inline std::vector<std::string> split_list(const std::string& s)
{
	std::vector<std::string> out;
	std::string cur;
	for(char c : s + ",")
	{
		if(c == ',')
		{
			const std::string t = ConfigSource::trim(cur);
			if(!t.empty()) out.push_back(t);
			cur.clear();
		}
		else
			cur += c;
	}
	return out;
}

inline void require(bool ok, const std::string& key, const std::string& what)
{
	if(!ok) throw ConfigError("'" + key + "' " + what, key);
}

} // namespace detail

inline RunConfig resolve(const ConfigSource& src, Command cmd)
{
	using detail::parse_count;
	using detail::parse_double;
	using detail::parse_string;
	using detail::require;

	RunConfig c;
	c.command = cmd;
	c.model = parse_string(src, "model", cmd == Command::Fig1 ? "osc2d" : "wang");
	require(c.model == "wang" || c.model == "osc2d" || c.model == "matrix-file", "model",
			"must be one of wang, osc2d, matrix-file");
	if(cmd == Command::Fig1) require(c.model == "osc2d", "model", "must be osc2d for fig1");

	auto& e = c.echo;
	auto put = [&e](const std::string& k, std::string v) { e.emplace_back(k, std::move(v)); };
	put("command", std::string(to_string(cmd)));
	put("model", c.model);

	if(c.model == "wang")
	{
		c.wang.eps = parse_double(src, "eps", 0.0);
		c.wang.gamma = parse_double(src, "gamma", 1.0);
		c.wang.delta = parse_double(src, "delta", 0.0);
		c.wang.rho = parse_double(src, "rho", 0.0);
		require(c.wang.gamma >= 0.0, "gamma", "must be >= 0");
		require(c.wang.rho >= 0.0, "rho", "must be >= 0");
		put("eps", format_double(c.wang.eps));
		put("gamma", format_double(c.wang.gamma));
		put("delta", format_double(c.wang.delta));
		put("rho", format_double(c.wang.rho));
	}
	c.osc.hbar = parse_double(src, "hbar", 1.0);
	require(c.osc.hbar > 0.0, "hbar", "must be positive");
	if(c.model == "osc2d")
	{
		c.osc.m = parse_double(src, "m", 1.0);
		c.osc.omega_x = parse_double(src, "omega_x", 3.0);
		c.osc.omega_y = parse_double(src, "omega_y", 1.0);
		c.osc.lambda = parse_double(src, "lambda", 0.0);
		require(c.osc.m > 0.0, "m", "must be positive");
		require(c.osc.omega_x > 0.0, "omega_x", "must be positive");
		require(c.osc.omega_y > 0.0, "omega_y", "must be positive");
		require(c.osc.omega_x != c.osc.omega_y, "omega_y", "must differ from omega_x");
		put("m", format_double(c.osc.m));
		put("omega_x", format_double(c.osc.omega_x));
		put("omega_y", format_double(c.osc.omega_y));
		put("lambda", format_double(c.osc.lambda));
	}
	put("hbar", format_double(c.osc.hbar));
	if(c.model == "matrix-file")
	{
		c.matrix_file = parse_string(src, "matrix_file", "");
		c.perturbation_file = parse_string(src, "perturbation_file", "");
		c.theta = parse_double(src, "theta", 0.0);
		require(!c.matrix_file.empty(), "matrix_file", "is required for model matrix-file");
		if(cmd == Command::Verify || cmd == Command::ScanPhase)
			require(!c.perturbation_file.empty(), "perturbation_file",
					"is required to sweep a matrix-file model (H = H0 + theta V)");
		put("matrix_file", c.matrix_file);
		put("perturbation_file", c.perturbation_file);
		put("theta", format_double(c.theta));
	}

	// method only matters for osc2d verification
	c.method = parse_string(src, "method", "quadrature");
	require(c.method == "quadrature" || c.method == "truncated", "method", "must be quadrature or truncated");
	const bool osc_truncated = c.model == "osc2d" && (c.method == "truncated" || cmd == Command::Trace);
	if(c.model == "osc2d" && cmd == Command::Verify) put("method", c.method);
	if(c.model == "osc2d" && cmd == Command::Fig1)
		require(c.method == "quadrature", "method", "fig1 uses the quadrature form");

	if(cmd != Command::Trace)
	{
		const char* def_param = c.model == "wang" ? "rho" : c.model == "osc2d" ? "lambda" : "theta";
		const double def_stop = c.model == "wang" ? 2.0 : c.model == "osc2d" ? 8.0 : 1.0;
		const double def_step = c.model == "wang" ? 0.05 : 0.1;
		c.sweep_param = parse_string(src, "sweep.param", def_param);
		if(c.model == "wang")
			require(c.sweep_param == "rho" || c.sweep_param == "delta" || c.sweep_param == "eps" ||
							c.sweep_param == "gamma",
					"sweep.param", "must be rho, delta, eps or gamma for wang");
		else
			require(c.sweep_param == def_param, "sweep.param", std::string("must be ") + def_param);
		c.sweep_start = parse_double(src, "sweep.start", 0.0);
		c.sweep_stop = parse_double(src, "sweep.stop", def_stop);
		c.sweep_step = parse_double(src, "sweep.step", def_step);
		require(c.sweep_step > 0.0, "sweep.step", "must be positive");
		require(c.sweep_start <= c.sweep_stop, "sweep.start", "must not exceed sweep.stop");
		require((c.sweep_stop - c.sweep_start) / c.sweep_step <= 1e6, "sweep.step", "gives more than 1e6 grid points");
		put("sweep.param", c.sweep_param);
		put("sweep.start", format_double(c.sweep_start));
		put("sweep.stop", format_double(c.sweep_stop));
		put("sweep.step", format_double(c.sweep_step));
	}

	if(cmd == Command::Verify || cmd == Command::Fig1)
	{
		std::string def_states;
		if(c.model == "wang")
			def_states = "-,+";
		else if(c.model == "osc2d" && !osc_truncated)
			def_states = "0:0,1:0,1:1,2:0";
		else if(c.model == "osc2d")
			def_states = "0,1,2,3";
		else
			def_states = "0";
		c.states = detail::split_list(parse_string(src, "states", def_states));
		require(!c.states.empty(), "states", "must list at least one state");
		std::string joined;
		for(const auto& s : c.states) joined += (joined.empty() ? "" : ",") + s;
		put("states", joined);
	}

	if(cmd == Command::Verify)
	{
		c.fd_step = parse_double(src, "fd_step", 0.0);
		require(c.fd_step >= 0.0, "fd_step", "must be >= 0 (0 selects 1e-5 max(1, |theta|))");
		put("fd_step", c.fd_step == 0.0 ? "auto" : format_double(c.fd_step));
	}
	if(cmd == Command::Verify)
	{
		const double def_tol = c.model == "osc2d" && !osc_truncated ? 1e-6 : 1e-7;
		c.tol = parse_double(src, "tol", def_tol);
		require(c.tol > 0.0, "tol", "must be positive");
		put("tol", format_double(c.tol));
	}
	c.im_tol = parse_double(src, "im_tol", default_im_tol);
	c.kappa_ep = parse_double(src, "kappa_ep", default_kappa_ep);
	require(c.im_tol > 0.0, "im_tol", "must be positive");
	require(c.kappa_ep > 1.0, "kappa_ep", "must exceed 1");
	put("im_tol", format_double(c.im_tol));
	put("kappa_ep", format_double(c.kappa_ep));

	if(c.model == "osc2d" && !osc_truncated && (cmd == Command::Verify || cmd == Command::Fig1))
	{
		c.quad_nodes = parse_count(src, "quad_nodes", 80);
		c.quad_max_nodes = parse_count(src, "quad_max_nodes", std::max<std::size_t>(160, c.quad_nodes));
		c.quad_rel_tol = parse_double(src, "quad_rel_tol", 1e-8);
		require(c.quad_nodes > 0, "quad_nodes", "must be positive");
		require(c.quad_max_nodes >= c.quad_nodes, "quad_max_nodes", "must be >= quad_nodes");
		require(c.quad_rel_tol > 0.0, "quad_rel_tol", "must be positive");
		put("quad_nodes", std::to_string(c.quad_nodes));
		put("quad_max_nodes", std::to_string(c.quad_max_nodes));
		put("quad_rel_tol", format_double(c.quad_rel_tol));
	}
	if(osc_truncated)
	{
		const std::size_t n = parse_count(src, "basis_n", 10);
		require(n >= 1 && n <= 60, "basis_n", "must be between 1 and 60");
		c.basis_n = static_cast<unsigned>(n);
		put("basis_n", std::to_string(c.basis_n));
	}

	if(cmd == Command::Trace)
	{
		c.t_start = parse_double(src, "t_start", 0.0);
		c.t_stop = parse_double(src, "t_stop", 5.0);
		c.t_step = parse_double(src, "t_step", 0.25);
		require(c.t_step > 0.0, "t_step", "must be positive");
		require(c.t_start <= c.t_stop, "t_start", "must not exceed t_stop");
		c.metric_mode = parse_string(src, "metric_mode", "fixed-G");
		require(c.metric_mode == "fixed-G" || c.metric_mode == "time-dependent-G" || c.metric_mode == "euclidean" ||
						c.metric_mode == "all",
				"metric_mode", "must be fixed-G, time-dependent-G, euclidean or all");
		c.psi0 = parse_string(src, "psi0", c.model == "wang" ? "+" : "0");
		put("t_start", format_double(c.t_start));
		put("t_stop", format_double(c.t_stop));
		put("t_step", format_double(c.t_step));
		put("metric_mode", c.metric_mode);
		put("psi0", c.psi0);
	}
	c.svg_ymax = parse_double(src, "svg.ymax", 1.0);
	require(c.svg_ymax > 0.0, "svg.ymax", "must be positive");
	if(cmd == Command::Fig1) put("svg.ymax", format_double(c.svg_ymax));
	put("version", version);
	return c;
}

} // namespace ptmhft::cli
