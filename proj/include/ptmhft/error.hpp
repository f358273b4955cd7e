#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace ptmhft {

/// Base for every failure raised by the library.
class Error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

class InvalidInput : public Error
{
public:
	using Error::Error;
};

class DimensionMismatch : public Error
{
public:
	using Error::Error;
};

/// Iteration cap hit inside an iterative solver.
class NonConvergence : public Error
{
public:
	using Error::Error;
};

/// Pivot below the singularity threshold during elimination.
class Singular : public Error
{
public:
	Singular(const std::string& what, double condition_estimate)
		: Error(what), condition_estimate_{condition_estimate}
	{
	}

	[[nodiscard]] double condition_estimate() const noexcept { return condition_estimate_; }

private:
	double condition_estimate_;
};

/// The right-eigenvector matrix is too ill-conditioned to invert; the input
/// sits at (or numerically indistinguishable from) an exceptional point.
class Defective : public Error
{
public:
	Defective(const std::string& what, double kappa)
		: Error(what), kappa_{kappa}
	{
	}

	[[nodiscard]] double kappa() const noexcept { return kappa_; }

private:
	double kappa_;
};

/// Two candidate branches overlap a reference state almost equally.
class AmbiguousTracking : public Error
{
public:
	AmbiguousTracking(const std::string& what, std::size_t state, std::size_t first,
			std::size_t second)
		: Error(what), state_{state}, first_{first}, second_{second}
	{
	}

	[[nodiscard]] std::size_t state() const noexcept { return state_; }
	[[nodiscard]] std::size_t first_candidate() const noexcept { return first_; }
	[[nodiscard]] std::size_t second_candidate() const noexcept { return second_; }

private:
	std::size_t state_;
	std::size_t first_;
	std::size_t second_;
};

class DomainError : public Error
{
public:
	using Error::Error;
};

/// A closed form was requested exactly at a model's exceptional point.
class AtEP : public Error
{
public:
	using Error::Error;
};

class QuadratureDivergent : public Error
{
public:
	using Error::Error;
};

class ConfigError : public Error
{
public:
	ConfigError(const std::string& what, std::string key)
		: Error(what), key_{std::move(key)}
	{
	}

	[[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
	std::string key_;
};

class IoError : public Error
{
public:
	using Error::Error;
};

} // namespace ptmhft
