#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

// Seeded randomness for the whole library. Everything random in this
// project flows through SplitMix64 so that a run is reproducible from a
// single 64-bit seed, and so that a reimplementation in another language
// can match our streams bit for bit. The algorithm is Steele, Lea &
// Flood's SplitMix64 as published in the java.util.SplittableRandom
// reference implementation.
//
// Stream layout rules (kept deliberately rigid):
//   - uniform01() consumes exactly one raw draw,
//   - gaussian() consumes exactly two raw draws (Box-Muller, cosine
//     branch only, no caching),
// so the number of raw draws per generated sample never depends on
// parameter values.

namespace aging {

constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output mix (finalizer). Also used standalone as a 64-bit
// hash when deriving sub-seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
	z ^= z >> 30;
	z *= 0xBF58476D1CE4E5B9ULL;
	z ^= z >> 27;
	z *= 0x94D049BB133111EBULL;
	z ^= z >> 31;
	return z;
}

class SplitMix64 {
public:
	explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

	std::uint64_t next_u64() {
		state_ += kSplitMixGamma;
		return mix64(state_);
	}

	// Uniform on [0,1): the top 53 bits scaled by 2^-53.
	double uniform01() {
		return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
	}

	// Uniform on [-half_width, +half_width].
	double uniform_symmetric(double half_width) {
		return (2.0 * uniform01() - 1.0) * half_width;
	}

	// Standard normal via Box-Muller. u1 is shifted into (0,1] so the
	// logarithm is always finite.
	double gaussian() {
		const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
		const double u2 = uniform01();
		constexpr double two_pi = 6.283185307179586476925286766559;
		return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
	}

private:
	std::uint64_t state_;
};

// Folds a list of integers into a base seed, one mix64 per part. Used to
// give every (grid cell, replicate, purpose) its own independent stream
// regardless of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
	std::uint64_t s = mix64(base ^ kSplitMixGamma);
	for (std::uint64_t p : parts)
		s = mix64(s ^ (p + kSplitMixGamma));
	return s;
}

} // namespace aging
