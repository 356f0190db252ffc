#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "aging/rng.hpp"
#include "aging/timeseries.hpp"

// Seeded generator for the three aging signal shapes this library is
// aimed at: a trending response time with transient spikes, a seasonal
// swap-usage staircase, and a sawtooth of free memory that collapses to a
// floor and recovers. Stands in for real collected traces in tests and
// demos.
//
// Draw order per sample is fixed (see rng.hpp): every shape first draws
// one gaussian (two raw draws); response_time then draws one uniform for
// the spike test. Parameter values never change how many draws happen,
// so e.g. a spike_rate=0 series is sample-for-sample identical to the
// same seed's spiked series minus the spikes.

namespace aging {

enum class SynthShape { response_time, swap_staircase, memory_sawtooth };

inline SynthShape parse_shape(const std::string& s) {
	if (s == "response_time")
		return SynthShape::response_time;
	if (s == "swap_staircase")
		return SynthShape::swap_staircase;
	if (s == "memory_sawtooth")
		return SynthShape::memory_sawtooth;
	throw std::invalid_argument("unknown synthetic shape: " + s);
}

inline std::string to_string(SynthShape s) {
	switch (s) {
	case SynthShape::response_time: return "response_time";
	case SynthShape::swap_staircase: return "swap_staircase";
	default: return "memory_sawtooth";
	}
}

struct SynthSpec {
	SynthShape shape = SynthShape::response_time;
	std::size_t length = 5000;
	std::uint64_t seed = 42;
	double sample_interval = 60.0;

	double base_level = 100.0;
	double trend_per_step = 0.02;    // slope for response_time, decay for memory_sawtooth
	std::size_t season_period = 200; // samples between swap staircase jumps
	double season_step = 50.0;       // size of each staircase jump
	double spike_rate = 0.0;         // probability of a spike per sample
	double spike_magnitude = 0.0;    // added on top of the sample
	double reset_floor = 0.0;        // memory_sawtooth reset trigger level
	double noise_sigma = 0.0;        // gaussian noise stddev

	void validate() const {
		if (length < 1)
			throw std::invalid_argument("SynthSpec: length must be >= 1");
		if (!(sample_interval > 0.0))
			throw std::invalid_argument("SynthSpec: sample_interval must be > 0");
		if (shape == SynthShape::swap_staircase && season_period < 2)
			throw std::invalid_argument("SynthSpec: season_period must be >= 2");
		if (spike_rate < 0.0 || spike_rate > 1.0)
			throw std::invalid_argument("SynthSpec: spike_rate must be in [0,1]");
		if (noise_sigma < 0.0)
			throw std::invalid_argument("SynthSpec: noise_sigma must be >= 0");
		for (double v : {base_level, trend_per_step, season_step, spike_magnitude, reset_floor})
			if (!std::isfinite(v))
				throw std::invalid_argument("SynthSpec: non-finite shape parameter");
	}

	std::string default_variable_name() const {
		switch (shape) {
		case SynthShape::response_time: return "response_time";
		case SynthShape::swap_staircase: return "swap_used";
		default: return "free_mem";
		}
	}
};

inline TimeSeries generate(const SynthSpec& spec) {
	spec.validate();
	SplitMix64 rng(spec.seed);

	TimeSeries out;
	out.sample_interval = spec.sample_interval;
	out.variable_name = spec.default_variable_name();
	out.values.reserve(spec.length);

	switch (spec.shape) {
	case SynthShape::response_time:
		for (std::size_t t = 0; t < spec.length; ++t) {
			double v = spec.base_level + spec.trend_per_step * static_cast<double>(t);
			v += rng.gaussian() * spec.noise_sigma;
			if (rng.uniform01() < spec.spike_rate)
				v += spec.spike_magnitude;
			out.values.push_back(v);
		}
		break;

	case SynthShape::swap_staircase:
		for (std::size_t t = 0; t < spec.length; ++t) {
			double v = spec.base_level +
			           spec.season_step * static_cast<double>(t / spec.season_period);
			v += rng.gaussian() * spec.noise_sigma;
			out.values.push_back(std::max(0.0, v));
		}
		break;

	case SynthShape::memory_sawtooth: {
		// Deterministic core: decay by trend_per_step, reset to base when
		// the next step would land below reset_floor. The core never goes
		// below the floor; noise rides on top.
		double level = spec.base_level;
		for (std::size_t t = 0; t < spec.length; ++t) {
			const double v = level + rng.gaussian() * spec.noise_sigma;
			out.values.push_back(std::max(0.0, v));
			const double next = level - spec.trend_per_step;
			level = next < spec.reset_floor ? spec.base_level : next;
		}
		break;
	}
	}
	out.validate();
	return out;
}

} // namespace aging
