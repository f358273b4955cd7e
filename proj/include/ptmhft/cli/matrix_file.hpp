#pragma once

// Plain-text matrices: first line n, then n lines of n whitespace-separated
// complex entries written as a+bi (also a, bi, a-bi, i, -i).

#include "../error.hpp"
#include "../numlin.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace ptmhft::cli {

namespace detail {

inline bool parse_real(std::string_view s, double& out)
{
	if(s.empty()) return false;
	if(s.front() == '+') s.remove_prefix(1);
	if(s.empty() || s.front() == '+') return false;
	const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
	return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

// coefficient of i: "" / "+" / "-" stand for +-1
inline bool parse_imag_coeff(std::string_view s, double& out)
{
	if(s.empty() || s == "+")
	{
		out = 1.0;
		return true;
	}
	if(s == "-")
	{
		out = -1.0;
		return true;
	}
	return parse_real(s, out);
}

} // namespace detail

inline cplx parse_complex(std::string_view tok)
{
	const auto bad = [&] { return InvalidInput("malformed complex entry '" + std::string(tok) + "'"); };
	if(tok.empty()) throw bad();
	if(tok.back() != 'i' && tok.back() != 'j')
	{
		double re = 0.0;
		if(!detail::parse_real(tok, re)) throw bad();
		return {re, 0.0};
	}
	const std::string_view body = tok.substr(0, tok.size() - 1);
	// split at the last sign that is not a leading sign or part of an exponent
	std::size_t split = std::string_view::npos;
	for(std::size_t k = body.size(); k-- > 1;)
	{
		if((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E')
		{
			split = k;
			break;
		}
	}
	double re = 0.0;
	double im = 0.0;
	if(split == std::string_view::npos)
	{
		if(!detail::parse_imag_coeff(body, im)) throw bad();
		return {0.0, im};
	}
	if(!detail::parse_real(body.substr(0, split), re) || !detail::parse_imag_coeff(body.substr(split), im))
		throw bad();
	return {re, im};
}

inline ComplexMatrix parse_matrix(std::string_view text)
{
	std::istringstream in{std::string(text)};
	std::string line;
	if(!std::getline(in, line)) throw InvalidInput("matrix file is empty");
	std::size_t n = 0;
	{
		std::istringstream first(line);
		std::string tok;
		std::string extra;
		if(!(first >> tok) || (first >> extra)) throw InvalidInput("first line must hold the dimension n");
		const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
		if(ec != std::errc{} || ptr != tok.data() + tok.size() || n == 0)
			throw InvalidInput("dimension must be a positive integer, got '" + tok + "'");
	}
	ComplexMatrix m(n, n);
	for(std::size_t r = 0; r < n; ++r)
	{
		if(!std::getline(in, line))
			throw InvalidInput("expected " + std::to_string(n) + " rows, found " + std::to_string(r));
		std::istringstream row(line);
		std::string tok;
		std::size_t c = 0;
		while(row >> tok)
		{
			if(c == n) throw InvalidInput("row " + std::to_string(r + 1) + " has more than n entries");
			m(r, c++) = parse_complex(tok);
		}
		if(c != n) throw InvalidInput("row " + std::to_string(r + 1) + " has " + std::to_string(c) + " entries, expected " + std::to_string(n));
	}
	while(std::getline(in, line))
		if(line.find_first_not_of(" \t\r") != std::string::npos) throw InvalidInput("trailing content after n rows");
	return m;
}

/// Reads a matrix file; unreadable files raise IoError, malformed ones
/// ConfigError tagged with `key`.
inline ComplexMatrix read_matrix_file(const std::string& path, const std::string& key)
{
	std::ifstream in(path);
	if(!in) throw IoError("cannot read matrix file '" + path + "'");
	std::stringstream ss;
	ss << in.rdbuf();
	try
	{
		return parse_matrix(ss.str());
	}
	catch(const InvalidInput& e)
	{
		throw ConfigError(path + ": " + e.what(), key);
	}
}

} // namespace ptmhft::cli
