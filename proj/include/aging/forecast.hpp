#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aging/mlp.hpp"
#include "aging/preprocess.hpp"
#include "aging/timeseries.hpp"

// Multi-step forecasting by feeding one-step predictions back into the
// input window, plus resource-exhaustion estimation: the first forecast
// step at which the trajectory crosses a capacity threshold, and a
// rejuvenation step recommended some safety margin before it.

namespace aging {

enum class CrossingDirection { rising, falling };

inline CrossingDirection parse_direction(const std::string& s) {
	if (s == "rising")
		return CrossingDirection::rising;
	if (s == "falling")
		return CrossingDirection::falling;
	throw std::invalid_argument("unknown crossing direction: " + s);
}

inline std::string to_string(CrossingDirection d) {
	return d == CrossingDirection::rising ? "rising" : "falling";
}

// Iterates a one-step forecaster: each prediction is appended to the
// window and the oldest value dropped. StepFn is any callable taking
// std::span<const double> (the current window) and returning the next
// value; the MlpModel overload below is the production path.
template <class StepFn>
std::vector<double> forecast_iterated_fn(StepFn&& step, std::span<const double> seed_window,
                                         std::size_t steps) {
	if (steps < 1)
		throw std::invalid_argument("forecast_iterated: steps must be >= 1");
	if (seed_window.empty())
		throw std::invalid_argument("forecast_iterated: empty seed window");

	std::vector<double> window(seed_window.begin(), seed_window.end());
	std::vector<double> out;
	out.reserve(steps);
	for (std::size_t k = 0; k < steps; ++k) {
		const double y = step(std::span<const double>(window));
		if (!std::isfinite(y))
			throw std::runtime_error("forecast_iterated: non-finite prediction at step " +
			                         std::to_string(k + 1));
		out.push_back(y);
		window.erase(window.begin());
		window.push_back(y);
	}
	return out;
}

inline std::vector<double> forecast_iterated(const MlpModel& model,
                                             std::span<const double> seed_window,
                                             std::size_t steps) {
	if (seed_window.size() != model.topology.input_width)
		throw std::invalid_argument("forecast_iterated: window length " +
		                            std::to_string(seed_window.size()) +
		                            " does not match model input width " +
		                            std::to_string(model.topology.input_width));
	return forecast_iterated_fn([&](std::span<const double> w) { return forward(model, w); },
	                            seed_window, steps);
}

// First index (1-based step count) at which the forecast crosses the
// threshold: value >= threshold for rising, value <= threshold for
// falling. A single-sample touch counts.
inline std::optional<std::size_t> scan_crossing(std::span<const double> forecast, double threshold,
                                                CrossingDirection direction) {
	for (std::size_t k = 0; k < forecast.size(); ++k) {
		const bool crossed = direction == CrossingDirection::rising ? forecast[k] >= threshold
		                                                            : forecast[k] <= threshold;
		if (crossed)
			return k + 1;
	}
	return std::nullopt;
}

struct ExhaustionEstimate {
	double threshold = 0.0;  // raw resource units
	CrossingDirection direction = CrossingDirection::rising;
	std::optional<std::size_t> steps_to_crossing;
	std::optional<double> crossing_time_seconds;
	std::optional<std::size_t> recommended_rejuvenation_step;

	std::string to_csv_row() const {
		auto opt_u = [](const std::optional<std::size_t>& v) {
			return v ? std::to_string(*v) : std::string("none");
		};
		std::string seconds = crossing_time_seconds
		                          ? csv_detail::format17(*crossing_time_seconds)
		                          : std::string("none");
		return csv_detail::format17(threshold) + "," + aging::to_string(direction) + "," +
		       opt_u(steps_to_crossing) + "," + seconds + "," +
		       opt_u(recommended_rejuvenation_step);
	}

	static std::string csv_header() {
		return "threshold,direction,steps_to_crossing,crossing_time_seconds,"
		       "recommended_rejuvenation_step";
	}

	std::string to_text() const {
		std::string s;
		s += "threshold:                " + csv_detail::format17(threshold) + "\n";
		s += "direction:                " + aging::to_string(direction) + "\n";
		if (steps_to_crossing) {
			s += "steps_to_crossing:        " + std::to_string(*steps_to_crossing) + "\n";
			s += "crossing_time_seconds:    " + csv_detail::format17(*crossing_time_seconds) + "\n";
			s += "recommended_rejuvenation: step " + std::to_string(*recommended_rejuvenation_step) + "\n";
		} else {
			s += "steps_to_crossing:        none within horizon\n";
		}
		return s;
	}
};

// Negative safety margin selects the default rule: 10% of the crossing
// step, rounded down, at least 1.
constexpr long kAutoSafetyMargin = -1;

template <class StepFn>
ExhaustionEstimate estimate_exhaustion_fn(StepFn&& step, const TimeSeries& recent,
                                          const ScalerParams& scaler, std::size_t window_width,
                                          double threshold, CrossingDirection direction,
                                          std::size_t max_horizon,
                                          long safety_margin_steps = kAutoSafetyMargin) {
	recent.validate();
	scaler.validate();
	if (!std::isfinite(threshold))
		throw std::invalid_argument("estimate_exhaustion: threshold must be finite");
	if (max_horizon < 1)
		throw std::invalid_argument("estimate_exhaustion: max_horizon must be >= 1");
	if (recent.size() < window_width)
		throw std::invalid_argument("estimate_exhaustion: series of length " +
		                            std::to_string(recent.size()) +
		                            " shorter than the model input width " +
		                            std::to_string(window_width));

	const TimeSeries scaled = scale(recent, scaler);
	const std::span<const double> window(scaled.values.data() + scaled.size() - window_width,
	                                     window_width);
	std::vector<double> forecast = forecast_iterated_fn(step, window, max_horizon);
	for (double& v : forecast)
		v = unscale_value(v, scaler);

	ExhaustionEstimate est;
	est.threshold = threshold;
	est.direction = direction;
	est.steps_to_crossing = scan_crossing(forecast, threshold, direction);
	if (est.steps_to_crossing) {
		const std::size_t steps = *est.steps_to_crossing;
		est.crossing_time_seconds = static_cast<double>(steps) * recent.sample_interval;
		std::size_t margin;
		if (safety_margin_steps < 0)
			margin = std::max<std::size_t>(steps / 10, 1);
		else
			margin = static_cast<std::size_t>(safety_margin_steps);
		est.recommended_rejuvenation_step = margin >= steps ? 1 : steps - margin;
	}
	return est;
}

inline ExhaustionEstimate estimate_exhaustion(const MlpModel& model, const TimeSeries& recent,
                                              const ScalerParams& scaler, double threshold,
                                              CrossingDirection direction, std::size_t max_horizon,
                                              long safety_margin_steps = kAutoSafetyMargin) {
	return estimate_exhaustion_fn([&](std::span<const double> w) { return forward(model, w); },
	                              recent, scaler, model.topology.input_width, threshold, direction,
	                              max_horizon, safety_margin_steps);
}

} // namespace aging
