#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aging/timeseries.hpp"

// Data conditioning ahead of training: sliding-window median despiking,
// min-max scaling onto [0,1], and embedding a series into supervised
// (lag window -> future value) pairs.

namespace aging {

// Which sample index a window's median is attributed to. The window
// contents are the same either way; only the output start_index moves.
enum class WindowAlignment { leading, trailing, centered };

inline WindowAlignment parse_alignment(const std::string& s) {
	if (s == "leading")
		return WindowAlignment::leading;
	if (s == "trailing")
		return WindowAlignment::trailing;
	if (s == "centered")
		return WindowAlignment::centered;
	throw std::invalid_argument("unknown window alignment: " + s);
}

inline std::string to_string(WindowAlignment a) {
	switch (a) {
	case WindowAlignment::leading: return "leading";
	case WindowAlignment::trailing: return "trailing";
	default: return "centered";
	}
}

// Replaces each point with the median of the window of `window_samples`
// consecutive values starting there (leading alignment: value at t is the
// median of [t, t+w-1]). Output length is N - w + 1. Even windows use the
// mean of the two middle order statistics.
inline TimeSeries sliding_median(const TimeSeries& series, std::size_t window_samples,
                                 WindowAlignment alignment = WindowAlignment::leading) {
	series.validate();
	if (window_samples < 1)
		throw std::invalid_argument("sliding_median: window must be >= 1 sample");
	if (window_samples > series.size())
		throw std::invalid_argument("sliding_median: window of " + std::to_string(window_samples) +
		                            " samples exceeds series length " + std::to_string(series.size()));

	const std::size_t n = series.size();
	const std::size_t w = window_samples;
	TimeSeries out;
	out.sample_interval = series.sample_interval;
	out.variable_name = series.variable_name;
	out.values.reserve(n - w + 1);

	std::vector<double> scratch(w);
	for (std::size_t t = 0; t + w <= n; ++t) {
		std::copy(series.values.begin() + static_cast<std::ptrdiff_t>(t),
		          series.values.begin() + static_cast<std::ptrdiff_t>(t + w), scratch.begin());
		const std::size_t mid = w / 2;
		std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(mid), scratch.end());
		double med = scratch[mid];
		if (w % 2 == 0) {
			// lower middle = max of the elements left of mid
			const double lo = *std::max_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(mid));
			med = 0.5 * (lo + med);
		}
		out.values.push_back(med);
	}

	std::size_t shift = 0;
	if (alignment == WindowAlignment::trailing)
		shift = w - 1;
	else if (alignment == WindowAlignment::centered)
		shift = (w - 1) / 2;
	out.start_index = series.start_index + shift;
	return out;
}

// Min/max fitted on a reference segment, used to scale onto [0,1] and to
// map forecasts back to resource units. Fit on train+validation only;
// test values falling outside [0,1] after scaling are expected and legal.
struct ScalerParams {
	double min_value = 0.0;
	double max_value = 1.0;

	void validate() const {
		if (!(max_value > min_value))
			throw std::invalid_argument("ScalerParams: max must be strictly greater than min");
	}
};

inline ScalerParams fit_scaler(const TimeSeries& segment) {
	segment.validate();
	if (segment.size() < 2)
		throw std::invalid_argument("fit_scaler: segment must hold at least 2 values");
	const auto [lo, hi] = std::minmax_element(segment.values.begin(), segment.values.end());
	if (*lo == *hi)
		throw std::invalid_argument("fit_scaler: constant segment (min == max), scaling undefined");
	return ScalerParams{*lo, *hi};
}

inline TimeSeries scale(const TimeSeries& series, const ScalerParams& params) {
	series.validate();
	params.validate();
	TimeSeries out = series;
	const double span = params.max_value - params.min_value;
	for (double& v : out.values)
		v = (v - params.min_value) / span;
	return out;
}

inline TimeSeries unscale(const TimeSeries& series, const ScalerParams& params) {
	series.validate();
	params.validate();
	TimeSeries out = series;
	const double span = params.max_value - params.min_value;
	for (double& v : out.values)
		v = v * span + params.min_value;
	return out;
}

inline double unscale_value(double v, const ScalerParams& params) {
	return v * (params.max_value - params.min_value) + params.min_value;
}

// Supervised pairs for an n-step predictor of order d: window i holds the
// d consecutive values starting at source index i (oldest first), and its
// target is the value n steps after the window's end.
struct LagDataset {
	std::vector<double> inputs;  // flat, row-major: pair i at [i*order_d, (i+1)*order_d)
	std::vector<double> targets;
	std::size_t order_d = 1;
	std::size_t horizon_n = 1;

	std::size_t size() const { return targets.size(); }

	std::span<const double> input(std::size_t i) const {
		return {inputs.data() + i * order_d, order_d};
	}
};

inline LagDataset embed(const TimeSeries& series, std::size_t order_d, std::size_t horizon_n) {
	series.validate();
	if (order_d < 1)
		throw std::invalid_argument("embed: order_d must be >= 1");
	if (horizon_n < 1)
		throw std::invalid_argument("embed: horizon_n must be >= 1");
	const std::size_t n = series.size();
	if (n < order_d + horizon_n)
		throw std::invalid_argument("embed: series length " + std::to_string(n) +
		                            " too short for order " + std::to_string(order_d) +
		                            " and horizon " + std::to_string(horizon_n));

	LagDataset ds;
	ds.order_d = order_d;
	ds.horizon_n = horizon_n;
	const std::size_t count = n - order_d - horizon_n + 1;
	ds.inputs.reserve(count * order_d);
	ds.targets.reserve(count);
	for (std::size_t i = 0; i < count; ++i) {
		for (std::size_t k = 0; k < order_d; ++k)
			ds.inputs.push_back(series.values[i + k]);
		ds.targets.push_back(series.values[i + order_d - 1 + horizon_n]);
	}
	return ds;
}

} // namespace aging
