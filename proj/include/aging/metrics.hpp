#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "aging/csv.hpp"

// Forecast accuracy measures: RMSE, MAPE and SMAPE. Undefined
// denominators are hard errors naming the offending index; silently
// skipping points would change n and corrupt cross-model comparisons.

namespace aging {

namespace metrics_detail {
inline void check_lengths(std::span<const double> actual, std::span<const double> forecast,
                          const char* who) {
	if (actual.empty())
		throw std::invalid_argument(std::string(who) + ": empty input");
	if (actual.size() != forecast.size())
		throw std::invalid_argument(std::string(who) + ": length mismatch (" +
		                            std::to_string(actual.size()) + " vs " +
		                            std::to_string(forecast.size()) + ")");
}
} // namespace metrics_detail

// sqrt(mean((actual - forecast)^2))
inline double rmse(std::span<const double> actual, std::span<const double> forecast) {
	metrics_detail::check_lengths(actual, forecast, "rmse");
	double sum = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		const double d = actual[i] - forecast[i];
		sum += d * d;
	}
	return std::sqrt(sum / static_cast<double>(actual.size()));
}

// (100/n) * sum(|actual - forecast| / |actual|), in percent.
inline double mape(std::span<const double> actual, std::span<const double> forecast) {
	metrics_detail::check_lengths(actual, forecast, "mape");
	double sum = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		if (actual[i] == 0.0)
			throw std::invalid_argument("mape: undefined denominator, actual value is 0 at index " +
			                            std::to_string(i));
		sum += 100.0 * std::abs((actual[i] - forecast[i]) / actual[i]);
	}
	return sum / static_cast<double>(actual.size());
}

// (100/n) * sum(|actual - forecast| / (0.5*(actual + forecast))), in
// percent. The denominator is the plain half-sum, not its absolute
// value; non-positive half-sums are rejected.
inline double smape(std::span<const double> actual, std::span<const double> forecast) {
	metrics_detail::check_lengths(actual, forecast, "smape");
	double sum = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		const double denom = 0.5 * (actual[i] + forecast[i]);
		if (!(denom > 0.0))
			throw std::invalid_argument("smape: undefined (non-positive) denominator at index " +
			                            std::to_string(i));
		sum += 100.0 * std::abs(actual[i] - forecast[i]) / denom;
	}
	return sum / static_cast<double>(actual.size());
}

struct ErrorReport {
	double rmse = 0.0;
	double mape_percent = 0.0;
	double smape_percent = 0.0;
	std::size_t n_observations = 0;

	// One row in the layout (variable, n, rmse, mape, smape).
	std::string to_csv_row(const std::string& variable) const {
		return variable + "," + std::to_string(n_observations) + "," + csv_detail::format17(rmse) +
		       "," + csv_detail::format17(mape_percent) + "," + csv_detail::format17(smape_percent);
	}

	static std::string csv_header() { return "variable,n,rmse,mape_percent,smape_percent"; }
};

inline ErrorReport compute_report(std::span<const double> actual, std::span<const double> forecast) {
	ErrorReport r;
	r.rmse = rmse(actual, forecast);
	r.mape_percent = mape(actual, forecast);
	r.smape_percent = smape(actual, forecast);
	r.n_observations = actual.size();
	return r;
}

} // namespace aging
