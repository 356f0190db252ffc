#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

// Core time-series data model and the chronological train/validation/test
// split. A TimeSeries is a uniformly sampled sequence of one resource
// variable (response time in milliseconds, swap or memory in kilobytes,
// or unitless once scaled).

namespace aging {

struct TimeSeries {
	std::vector<double> values;
	std::size_t start_index = 0;   // absolute sample index of values[0]
	double sample_interval = 1.0;  // seconds between consecutive samples
	std::string variable_name;

	std::size_t size() const { return values.size(); }

	// Invariants: at least one value, every value finite, positive interval.
	void validate() const {
		if (values.empty())
			throw std::invalid_argument("TimeSeries: must contain at least one value");
		if (!(sample_interval > 0.0))
			throw std::invalid_argument("TimeSeries: sample_interval must be > 0");
		for (std::size_t i = 0; i < values.size(); ++i) {
			if (!std::isfinite(values[i]))
				throw std::invalid_argument("TimeSeries: non-finite value at index " +
				                            std::to_string(start_index + i));
		}
	}
};

// Fractions of the chronological three-way split. The test fraction is
// the remainder 1 - train_fraction - validation_fraction.
struct SplitSpec {
	double train_fraction = 0.6;
	double validation_fraction = 0.2;

	void validate() const {
		if (!(train_fraction > 0.0 && train_fraction < 1.0))
			throw std::invalid_argument("SplitSpec: train_fraction must be in (0,1)");
		if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
			throw std::invalid_argument("SplitSpec: validation_fraction must be in (0,1)");
		if (!(train_fraction + validation_fraction < 1.0))
			throw std::invalid_argument("SplitSpec: train + validation fractions must sum to < 1");
	}
};

// Chronological split into three contiguous segments. Boundaries are
// floor(N*train_fraction) and floor(N*(train_fraction+validation_fraction));
// no shuffling, the test segment is always the most recent data.
inline std::tuple<TimeSeries, TimeSeries, TimeSeries> split(const TimeSeries& series,
                                                            const SplitSpec& spec) {
	series.validate();
	spec.validate();
	const std::size_t n = series.size();
	const auto b1 = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.train_fraction));
	const auto b2 = static_cast<std::size_t>(
	    std::floor(static_cast<double>(n) * (spec.train_fraction + spec.validation_fraction)));
	if (b1 < 1 || b2 <= b1 || n <= b2)
		throw std::invalid_argument("split: series of length " + std::to_string(n) +
		                            " leaves an empty segment under fractions (" +
		                            std::to_string(spec.train_fraction) + ", " +
		                            std::to_string(spec.validation_fraction) + ")");

	auto slice = [&](std::size_t from, std::size_t to) {
		TimeSeries out;
		out.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(from),
		                  series.values.begin() + static_cast<std::ptrdiff_t>(to));
		out.start_index = series.start_index + from;
		out.sample_interval = series.sample_interval;
		out.variable_name = series.variable_name;
		return out;
	};
	return {slice(0, b1), slice(b1, b2), slice(b2, n)};
}

// Concatenation helper, used e.g. to fit the scaler on train+validation.
inline TimeSeries concat(const TimeSeries& a, const TimeSeries& b) {
	TimeSeries out = a;
	out.values.insert(out.values.end(), b.values.begin(), b.values.end());
	return out;
}

} // namespace aging
