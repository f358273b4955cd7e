#include <ptmhft/cli/commands.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <iostream>

namespace {

std::string utc_timestamp()
{
	const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
	std::tm tm{};
	gmtime_r(&now, &tm);
	char buf[32];
	std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
	return buf;
}

} // namespace

int main(int argc, char** argv)
{
	namespace cli = ptmhft::cli;

	CLI::App app{"Modified Hellmann-Feynman checks for PT-symmetric Hamiltonians"};
	app.set_version_flag("--version", std::string(ptmhft::version));
	app.require_subcommand(1);

	std::string config_file;
	std::vector<std::string> overrides;
	std::string out_dir = ".";
	bool svg = false;
	std::size_t threads = ptmhft::default_thread_count();

	const std::vector<std::pair<const char*, const char*>> commands{
			{"verify", "compare <dH/dtheta>_G with finite-difference dE/dtheta along a sweep"},
			{"fig1", "|LHS| and |RHS| for the 2D oscillator across the coupling range"},
			{"trace", "norm of an evolving state under fixed-G, time-dependent-G or Euclidean metric"},
			{"scan-phase", "classify unbroken / broken / near-EP along a sweep"},
	};
	for(const auto& [name, help] : commands)
	{
		CLI::App* sub = app.add_subcommand(name, help);
		sub->add_option("--config", config_file, "key=value configuration file")->check(CLI::ExistingFile);
		sub->add_option("--set", overrides, "override one key (repeatable)")->take_all();
		sub->add_option("--out", out_dir, "output directory");
		sub->add_flag("--svg", svg, "also write an SVG chart");
		sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
	}

	try
	{
		app.parse(argc, argv);
	}
	catch(const CLI::CallForHelp& e)
	{
		return app.exit(e);
	}
	catch(const CLI::CallForAllHelp& e)
	{
		return app.exit(e);
	}
	catch(const CLI::CallForVersion& e)
	{
		return app.exit(e);
	}
	catch(const CLI::ParseError& e)
	{
		app.exit(e);
		return cli::exit_config;
	}

	try
	{
		const cli::Command cmd = cli::parse_command(app.get_subcommands().front()->get_name());
		cli::ConfigSource src;
		if(!config_file.empty()) src.load_file(config_file);
		for(const auto& s : overrides) src.set_assignment(s);
		const cli::RunConfig cfg = cli::resolve(src, cmd);

		const cli::CommandOutcome out = cli::run_command(cfg, {out_dir, svg, threads});
		std::cout << "ptmhft " << ptmhft::version << " " << cli::to_string(cmd) << " at " << utc_timestamp() << "\n";
		std::cout << out.summary;
		for(const auto& f : out.files) std::cout << "wrote " << f.string() << "\n";
		return out.exit_code;
	}
	catch(const ptmhft::ConfigError& e)
	{
		std::cerr << "config error [" << e.key() << "]: " << e.what() << "\n";
		return cli::exit_config;
	}
	catch(const ptmhft::IoError& e)
	{
		std::cerr << "i/o error: " << e.what() << "\n";
		return cli::exit_config;
	}
	catch(const ptmhft::InvalidInput& e)
	{
		std::cerr << "invalid input: " << e.what() << "\n";
		return cli::exit_config;
	}
	catch(const ptmhft::DomainError& e)
	{
		std::cerr << "invalid input: " << e.what() << "\n";
		return cli::exit_config;
	}
	catch(const ptmhft::Error& e)
	{
		std::cerr << "numerical failure: " << e.what() << "\n";
		return cli::exit_numerical;
	}
	catch(const std::exception& e)
	{
		std::cerr << "error: " << e.what() << "\n";
		return cli::exit_numerical;
	}
}
