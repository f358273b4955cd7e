#pragma once

// Minimal self-contained SVG line charts. NaN samples break a curve, points
// outside the y range are clipped to the frame.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace ptmhft::cli {

struct SvgSeries
{
	std::string name;
	std::vector<double> x;
	std::vector<double> y;
	std::string color = "#1f77b4";
	bool dotted = false;
};

struct SvgChart
{
	std::string title;
	std::string x_label;
	std::string y_label;
	double x_min = 0.0;
	double x_max = 1.0;
	double y_min = 0.0;
	double y_max = 1.0;
	std::vector<SvgSeries> series;
};

namespace detail {

inline std::string fixed(double v, int decimals = 2)
{
	char buf[48];
	std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
	return buf;
}

inline std::string escape_xml(const std::string& s)
{
	std::string out;
	for(char c : s)
	{
		switch(c)
		{
		case '&': out += "&amp;"; break;
		case '<': out += "&lt;"; break;
		case '>': out += "&gt;"; break;
		case '"': out += "&quot;"; break;
		default: out += c;
		}
	}
	return out;
}

inline std::string tick_label(double v)
{
	char buf[48];
	std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
	return buf;
}

} // namespace detail

inline std::string render_svg(const SvgChart& c)
{
	using detail::fixed;
	constexpr double width = 720, height = 480;
	constexpr double left = 70, right = 170, top = 40, bottom = 60;
	const double pw = width - left - right;
	const double ph = height - top - bottom;
	const double xspan = c.x_max > c.x_min ? c.x_max - c.x_min : 1.0;
	const double yspan = c.y_max > c.y_min ? c.y_max - c.y_min : 1.0;
	auto sx = [&](double x) { return left + (x - c.x_min) / xspan * pw; };
	auto sy = [&](double y) { return top + ph - (std::clamp(y, c.y_min, c.y_max) - c.y_min) / yspan * ph; };

	std::string s;
	s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) + "\" height=\"" + fixed(height, 0) +
			"\" viewBox=\"0 0 " + fixed(width, 0) + " " + fixed(height, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
	s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
	s += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
			detail::escape_xml(c.title) + "</text>\n";
	s += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(pw) + "\" height=\"" + fixed(ph) +
			"\" fill=\"none\" stroke=\"black\"/>\n";

	for(int k = 0; k <= 4; ++k)
	{
		const double xv = c.x_min + xspan * k / 4.0;
		const double yv = c.y_min + yspan * k / 4.0;
		const std::string px = fixed(sx(xv));
		const std::string py = fixed(sy(yv));
		s += "<line x1=\"" + px + "\" y1=\"" + fixed(top + ph) + "\" x2=\"" + px + "\" y2=\"" + fixed(top + ph + 5) +
				"\" stroke=\"black\"/>\n";
		s += "<text x=\"" + px + "\" y=\"" + fixed(top + ph + 18) + "\" text-anchor=\"middle\">" +
				detail::tick_label(xv) + "</text>\n";
		s += "<line x1=\"" + fixed(left - 5) + "\" y1=\"" + py + "\" x2=\"" + fixed(left) + "\" y2=\"" + py +
				"\" stroke=\"black\"/>\n";
		s += "<text x=\"" + fixed(left - 8) + "\" y=\"" + fixed(sy(yv) + 4) + "\" text-anchor=\"end\">" +
				detail::tick_label(yv) + "</text>\n";
	}
	s += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"" + fixed(height - 16) + "\" text-anchor=\"middle\">" +
			detail::escape_xml(c.x_label) + "</text>\n";
	s += "<text x=\"18\" y=\"" + fixed(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
			fixed(top + ph / 2) + ")\">" + detail::escape_xml(c.y_label) + "</text>\n";

	for(std::size_t k = 0; k < c.series.size(); ++k)
	{
		const SvgSeries& ser = c.series[k];
		const std::string style = "fill=\"none\" stroke=\"" + ser.color + "\" stroke-width=\"" +
				(ser.dotted ? "2\" stroke-dasharray=\"2 3\"" : "1.5\"");
		std::string pts;
		auto flush = [&] {
			if(!pts.empty()) s += "<polyline " + style + " points=\"" + pts + "\"/>\n";
			pts.clear();
		};
		for(std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i)
		{
			if(!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i]))
			{
				flush();
				continue;
			}
			if(!pts.empty()) pts += ' ';
			pts += fixed(sx(ser.x[i])) + "," + fixed(sy(ser.y[i]));
		}
		flush();

		const double ly = top + 10 + 18.0 * static_cast<double>(k);
		s += "<line x1=\"" + fixed(left + pw + 12) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(left + pw + 42) +
				"\" y2=\"" + fixed(ly) + "\" " + style + "/>\n";
		s += "<text x=\"" + fixed(left + pw + 48) + "\" y=\"" + fixed(ly + 4) + "\">" + detail::escape_xml(ser.name) +
				"</text>\n";
	}
	s += "</svg>\n";
	return s;
}

} // namespace ptmhft::cli
