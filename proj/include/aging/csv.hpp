#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aging/timeseries.hpp"

// CSV ingestion and write-back. Input is RFC-4180-style: comma separated,
// optional header in the first row, double quotes for fields containing
// commas/quotes, '.' as the decimal point, no thousands separators.
// Values are written with 17 significant digits so a load/save cycle
// round-trips doubles bit-exactly.

namespace aging {

namespace csv_detail {

inline std::vector<std::string> split_row(const std::string& line) {
	std::vector<std::string> fields;
	std::string cur;
	bool quoted = false;
	for (std::size_t i = 0; i < line.size(); ++i) {
		const char c = line[i];
		if (quoted) {
			if (c == '"') {
				if (i + 1 < line.size() && line[i + 1] == '"') {
					cur += '"';
					++i;
				} else {
					quoted = false;
				}
			} else {
				cur += c;
			}
		} else if (c == '"') {
			quoted = true;
		} else if (c == ',') {
			fields.push_back(cur);
			cur.clear();
		} else {
			cur += c;
		}
	}
	fields.push_back(cur);
	return fields;
}

inline std::string trim(const std::string& s) {
	std::size_t a = 0;
	std::size_t b = s.size();
	while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
		++a;
	while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
		--b;
	return s.substr(a, b - a);
}

inline std::optional<double> parse_number(const std::string& raw) {
	const std::string s = trim(raw);
	if (s.empty())
		return std::nullopt;
	const char* begin = s.c_str();
	char* end = nullptr;
	const double v = std::strtod(begin, &end);
	if (end != begin + s.size())
		return std::nullopt;
	return v;
}

inline std::string format17(double v) {
	char buf[64];
	std::snprintf(buf, sizeof(buf), "%.17g", v);
	return buf;
}

} // namespace csv_detail

// Identifies a CSV column either by header name or by zero-based index.
struct ColumnRef {
	std::string name;        // empty when selecting by index
	std::size_t index = 0;
	bool by_name = false;

	static ColumnRef by_header(std::string n) { return ColumnRef{std::move(n), 0, true}; }
	static ColumnRef by_index(std::size_t i) { return ColumnRef{{}, i, false}; }

	// "3" means index 3, anything non-numeric means a header name.
	static ColumnRef parse(const std::string& text) {
		const std::string t = csv_detail::trim(text);
		if (!t.empty() && t.find_first_not_of("0123456789") == std::string::npos)
			return by_index(std::stoul(t));
		return by_header(t);
	}

	std::string describe() const { return by_name ? name : "#" + std::to_string(index); }
};

// Reads one column of a CSV file into a TimeSeries. When the column is
// selected by name the first row must be a header; when selected by index
// the first row is treated as a header only if its selected cell does not
// parse as a number. Row numbers in errors count data rows from 1.
inline TimeSeries load_csv(const std::string& path, const ColumnRef& column,
                           double sample_interval) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw std::runtime_error("load_csv: cannot open file: " + path);

	std::vector<std::string> lines;
	std::string line;
	while (std::getline(in, line)) {
		if (!line.empty() && line.back() == '\r')
			line.pop_back();
		lines.push_back(line);
	}
	while (!lines.empty() && csv_detail::trim(lines.back()).empty())
		lines.pop_back();
	if (lines.empty())
		throw std::runtime_error("load_csv: empty file: " + path);

	std::size_t col = column.index;
	std::size_t first_data_row = 0;
	std::string var_name = column.by_name ? column.name : "column" + std::to_string(column.index);
	const auto header = csv_detail::split_row(lines[0]);

	if (column.by_name) {
		bool found = false;
		for (std::size_t i = 0; i < header.size(); ++i) {
			if (csv_detail::trim(header[i]) == column.name) {
				col = i;
				found = true;
				break;
			}
		}
		if (!found)
			throw std::runtime_error("load_csv: column \"" + column.name + "\" not found in header of " + path);
		first_data_row = 1;
	} else {
		if (col < header.size() && !csv_detail::parse_number(header[col]).has_value()) {
			first_data_row = 1;  // header row
			var_name = csv_detail::trim(header[col]);
		}
	}

	TimeSeries out;
	out.sample_interval = sample_interval;
	out.variable_name = var_name;
	for (std::size_t r = first_data_row; r < lines.size(); ++r) {
		if (csv_detail::trim(lines[r]).empty())
			continue;
		const auto fields = csv_detail::split_row(lines[r]);
		const std::size_t data_row = r - first_data_row + 1;
		if (col >= fields.size())
			throw std::runtime_error("load_csv: row " + std::to_string(data_row) + " has no column " +
			                         column.describe());
		const auto v = csv_detail::parse_number(fields[col]);
		if (!v.has_value())
			throw std::runtime_error("load_csv: non-numeric cell \"" + csv_detail::trim(fields[col]) +
			                         "\" in column " + column.describe() + " at row " +
			                         std::to_string(data_row));
		out.values.push_back(*v);
	}
	if (out.values.empty())
		throw std::runtime_error("load_csv: no data rows in " + path);
	out.validate();
	return out;
}

// Writes "index,<variable_name>" rows; values carry 17 significant digits.
inline void save_csv(const TimeSeries& series, const std::string& path) {
	series.validate();
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw std::runtime_error("save_csv: cannot open file for writing: " + path);
	const std::string name = series.variable_name.empty() ? "value" : series.variable_name;
	out << "index," << name << "\n";
	for (std::size_t i = 0; i < series.values.size(); ++i)
		out << (series.start_index + i) << ',' << csv_detail::format17(series.values[i]) << "\n";
	if (!out)
		throw std::runtime_error("save_csv: write failed: " + path);
}

} // namespace aging
