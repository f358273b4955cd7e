#pragma once

#include "../error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ptmhft::cli {

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double x)
{
	if(std::isnan(x)) return "nan";
	if(std::isinf(x)) return x > 0 ? "inf" : "-inf";
	if(x == 0.0) x = 0.0; // drop the sign of -0
	char buf[64];
	const auto res = std::to_chars(buf, buf + sizeof buf, x);
	return {buf, res.ptr};
}

inline std::string format_optional(const std::optional<double>& x)
{
	return x ? format_double(*x) : std::string{};
}

inline double round_sig(double x, int digits)
{
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.*g", digits, x);
	const double r = std::strtod(buf, nullptr);
	return r == 0.0 ? 0.0 : r;
}

/// Accumulates a CSV document: the `# config:` line, a header and rows.
class CsvDocument
{
public:
	CsvDocument(std::string config_line, std::vector<std::string> header)
		: columns_{header.size()}
	{
		text_ = std::move(config_line) + "\n";
		append(header);
	}

	void row(const std::vector<std::string>& fields)
	{
		if(fields.size() != columns_) throw InvalidInput("csv: row width differs from header");
		append(fields);
	}

	[[nodiscard]] const std::string& text() const noexcept { return text_; }
	[[nodiscard]] std::size_t rows() const noexcept { return rows_; }

private:
	void append(const std::vector<std::string>& fields)
	{
		for(std::size_t i = 0; i < fields.size(); ++i)
		{
			if(i) text_ += ',';
			text_ += fields[i];
		}
		text_ += '\n';
		++rows_;
	}

	std::size_t columns_;
	std::string text_;
	std::size_t rows_ = 0;
};

inline void write_text_file(const std::filesystem::path& path, std::string_view text)
{
	std::error_code ec;
	if(path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if(!out) throw IoError("cannot open '" + path.string() + "' for writing");
	out.write(text.data(), static_cast<std::streamsize>(text.size()));
	if(!out) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace ptmhft::cli
