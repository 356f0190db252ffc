#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aging/csv.hpp"
#include "aging/preprocess.hpp"
#include "aging/rng.hpp"

// One-hidden-layer fully connected feed-forward network trained by
// online backpropagation. The hidden layer is logistic; the output
// neuron is identity by default (regression on [0,1]-scaled data) with a
// logistic option.
//
// Forward pass, for input x of width d:
//   h_j = sigmoid(sum_i W[j][i]*x_i + b_j)      j = 0..hidden-1
//   y   = g(sum_j v_j*h_j + c)                  g = identity or sigmoid
// Loss per example is (y - target)^2 / 2.

namespace aging {

enum class Activation { identity, sigmoid };

inline Activation parse_activation(const std::string& s) {
	if (s == "identity")
		return Activation::identity;
	if (s == "sigmoid")
		return Activation::sigmoid;
	throw std::invalid_argument("unknown activation: " + s);
}

inline std::string to_string(Activation a) {
	return a == Activation::identity ? "identity" : "sigmoid";
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct MlpTopology {
	std::size_t input_width = 1;
	std::size_t hidden_width = 1;
	Activation hidden_activation = Activation::sigmoid;
	Activation output_activation = Activation::identity;

	void validate() const {
		if (input_width < 1 || hidden_width < 1)
			throw std::invalid_argument("MlpTopology: widths must be >= 1");
		if (hidden_activation != Activation::sigmoid)
			throw std::invalid_argument("MlpTopology: hidden activation must be sigmoid");
	}

	std::size_t parameter_count() const {
		return hidden_width * input_width + hidden_width + hidden_width + 1;
	}
};

struct MlpModel {
	MlpTopology topology;
	std::vector<double> hidden_weights;  // hidden_width x input_width, row-major
	std::vector<double> hidden_biases;   // hidden_width
	std::vector<double> output_weights;  // hidden_width
	double output_bias = 0.0;

	double& w(std::size_t j, std::size_t i) { return hidden_weights[j * topology.input_width + i]; }
	double w(std::size_t j, std::size_t i) const { return hidden_weights[j * topology.input_width + i]; }

	bool all_finite() const {
		for (double p : hidden_weights)
			if (!std::isfinite(p)) return false;
		for (double p : hidden_biases)
			if (!std::isfinite(p)) return false;
		for (double p : output_weights)
			if (!std::isfinite(p)) return false;
		return std::isfinite(output_bias);
	}
};

// Weights uniform on [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer, biases
// zero. Draw order (one SplitMix64 stream from `seed`): hidden weights
// row-major, then output weights.
inline MlpModel init_model(const MlpTopology& topology, std::uint64_t seed) {
	topology.validate();
	MlpModel m;
	m.topology = topology;
	m.hidden_weights.resize(topology.hidden_width * topology.input_width);
	m.hidden_biases.assign(topology.hidden_width, 0.0);
	m.output_weights.resize(topology.hidden_width);
	SplitMix64 rng(seed);
	const double hidden_bound = 1.0 / std::sqrt(static_cast<double>(topology.input_width));
	for (double& p : m.hidden_weights)
		p = rng.uniform_symmetric(hidden_bound);
	const double output_bound = 1.0 / std::sqrt(static_cast<double>(topology.hidden_width));
	for (double& p : m.output_weights)
		p = rng.uniform_symmetric(output_bound);
	m.output_bias = 0.0;
	return m;
}

namespace mlp_detail {
inline void check_input(const MlpModel& model, std::span<const double> input, const char* who) {
	if (input.size() != model.topology.input_width)
		throw std::invalid_argument(std::string(who) + ": input width " + std::to_string(input.size()) +
		                            " does not match model input width " +
		                            std::to_string(model.topology.input_width));
}

// Forward pass keeping the hidden activations, shared by gradient().
inline double forward_into(const MlpModel& model, std::span<const double> input,
                           std::vector<double>& hidden) {
	const std::size_t d = model.topology.input_width;
	const std::size_t h = model.topology.hidden_width;
	hidden.resize(h);
	for (std::size_t j = 0; j < h; ++j) {
		double z = model.hidden_biases[j];
		const double* row = model.hidden_weights.data() + j * d;
		for (std::size_t i = 0; i < d; ++i)
			z += row[i] * input[i];
		hidden[j] = sigmoid(z);
	}
	double out = model.output_bias;
	for (std::size_t j = 0; j < h; ++j)
		out += model.output_weights[j] * hidden[j];
	if (model.topology.output_activation == Activation::sigmoid)
		out = sigmoid(out);
	return out;
}
} // namespace mlp_detail

inline double forward(const MlpModel& model, std::span<const double> input) {
	mlp_detail::check_input(model, input, "forward");
	std::vector<double> hidden;
	return mlp_detail::forward_into(model, input, hidden);
}

// Gradient of the squared-error loss (y - target)^2 / 2, laid out like
// the model parameters.
struct MlpGradient {
	std::vector<double> hidden_weights;
	std::vector<double> hidden_biases;
	std::vector<double> output_weights;
	double output_bias = 0.0;
};

inline MlpGradient gradient(const MlpModel& model, std::span<const double> input, double target) {
	mlp_detail::check_input(model, input, "gradient");
	const std::size_t d = model.topology.input_width;
	const std::size_t h = model.topology.hidden_width;

	std::vector<double> hidden;
	const double y = mlp_detail::forward_into(model, input, hidden);

	// delta = dL/d(output preactivation)
	double delta = y - target;
	if (model.topology.output_activation == Activation::sigmoid)
		delta *= y * (1.0 - y);

	MlpGradient g;
	g.hidden_weights.resize(h * d);
	g.hidden_biases.resize(h);
	g.output_weights.resize(h);
	g.output_bias = delta;
	for (std::size_t j = 0; j < h; ++j) {
		g.output_weights[j] = delta * hidden[j];
		const double back = delta * model.output_weights[j] * hidden[j] * (1.0 - hidden[j]);
		g.hidden_biases[j] = back;
		double* grow = g.hidden_weights.data() + j * d;
		for (std::size_t i = 0; i < d; ++i)
			grow[i] = back * input[i];
	}
	return g;
}

struct TrainConfig {
	double learning_rate = 0.01;
	std::size_t max_epochs = 6000;
	std::size_t patience = 300;  // epochs without validation improvement; 0 disables
	std::uint64_t seed = 0;      // example shuffling
	bool shuffle_each_epoch = true;

	void validate() const {
		if (!(learning_rate > 0.0))
			throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
		if (max_epochs < 1)
			throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
	}
};

struct TrainingTrace {
	std::vector<double> train_rmse;       // one entry per completed epoch
	std::vector<double> validation_rmse;  // NaN entries when no validation data
	std::size_t best_epoch = 0;
	bool stopped_early = false;

	std::size_t epochs_run() const { return train_rmse.size(); }
};

struct TrainResult {
	MlpModel model;  // snapshot with the best validation RMSE seen
	TrainingTrace trace;
};

namespace mlp_detail {
inline double dataset_rmse(const MlpModel& model, const LagDataset& ds) {
	double sum = 0.0;
	std::vector<double> hidden;
	for (std::size_t i = 0; i < ds.size(); ++i) {
		const double e = forward_into(model, ds.input(i), hidden) - ds.targets[i];
		sum += e * e;
	}
	return std::sqrt(sum / static_cast<double>(ds.size()));
}
} // namespace mlp_detail

// Online (per-example) stochastic gradient descent. The validation set
// is scored after every epoch and the best snapshot is returned, which
// need not be the final epoch. With an empty validation set the trace
// records NaN and the final epoch wins.
inline TrainResult train(MlpModel model, const LagDataset& train_set,
                         const LagDataset& validation_set, const TrainConfig& config) {
	model.topology.validate();
	config.validate();
	if (train_set.size() == 0)
		throw std::invalid_argument("train: empty train set");
	if (train_set.order_d != model.topology.input_width)
		throw std::invalid_argument("train: dataset order " + std::to_string(train_set.order_d) +
		                            " does not match model input width " +
		                            std::to_string(model.topology.input_width));
	if (validation_set.size() > 0 && validation_set.order_d != model.topology.input_width)
		throw std::invalid_argument("train: validation set order does not match model input width");

	const std::size_t d = model.topology.input_width;
	const std::size_t h = model.topology.hidden_width;
	const double lr = config.learning_rate;
	const bool has_validation = validation_set.size() > 0;

	std::vector<std::size_t> order(train_set.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	SplitMix64 shuffle_rng(config.seed);

	TrainResult result;
	result.model = model;
	double best_val = std::numeric_limits<double>::infinity();
	std::size_t epochs_since_improvement = 0;
	std::vector<double> hidden;

	for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
		if (config.shuffle_each_epoch) {
			// Fisher-Yates driven by the shuffle stream
			for (std::size_t i = order.size() - 1; i > 0; --i) {
				const auto j = static_cast<std::size_t>(shuffle_rng.next_u64() % (i + 1));
				std::swap(order[i], order[j]);
			}
		}

		for (std::size_t k = 0; k < order.size(); ++k) {
			const std::size_t ex = order[k];
			const auto input = train_set.input(ex);
			const double y = mlp_detail::forward_into(model, input, hidden);
			double delta = y - train_set.targets[ex];
			if (model.topology.output_activation == Activation::sigmoid)
				delta *= y * (1.0 - y);

			bool finite = true;
			model.output_bias -= lr * delta;
			finite = finite && std::isfinite(model.output_bias);
			for (std::size_t j = 0; j < h; ++j) {
				const double vj = model.output_weights[j];
				const double back = delta * vj * hidden[j] * (1.0 - hidden[j]);
				model.output_weights[j] = vj - lr * delta * hidden[j];
				model.hidden_biases[j] -= lr * back;
				finite = finite && std::isfinite(model.output_weights[j]) &&
				         std::isfinite(model.hidden_biases[j]);
				double* row = model.hidden_weights.data() + j * d;
				for (std::size_t i = 0; i < d; ++i) {
					row[i] -= lr * back * input[i];
					finite = finite && std::isfinite(row[i]);
				}
			}
			if (!finite)
				throw std::runtime_error("train: non-finite parameter at epoch " +
				                         std::to_string(epoch + 1) + ", example " +
				                         std::to_string(k + 1));
		}

		result.trace.train_rmse.push_back(mlp_detail::dataset_rmse(model, train_set));
		double val = std::numeric_limits<double>::quiet_NaN();
		if (has_validation) {
			val = mlp_detail::dataset_rmse(model, validation_set);
			if (val < best_val) {
				best_val = val;
				result.model = model;
				result.trace.best_epoch = epoch;
				epochs_since_improvement = 0;
			} else {
				++epochs_since_improvement;
			}
		} else {
			result.model = model;
			result.trace.best_epoch = epoch;
		}
		result.trace.validation_rmse.push_back(val);

		if (config.patience > 0 && has_validation && epochs_since_improvement >= config.patience) {
			result.trace.stopped_early = true;
			break;
		}
	}
	return result;
}

// --- flat text serialization, bit-exact round-trip -----------------------

inline void save_model(const MlpModel& model, const std::string& path) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw std::runtime_error("save_model: cannot open file for writing: " + path);
	const auto& t = model.topology;
	out << "mlp 1\n";
	out << "input_width " << t.input_width << "\n";
	out << "hidden_width " << t.hidden_width << "\n";
	out << "hidden_activation " << to_string(t.hidden_activation) << "\n";
	out << "output_activation " << to_string(t.output_activation) << "\n";
	for (std::size_t j = 0; j < t.hidden_width; ++j)
		for (std::size_t i = 0; i < t.input_width; ++i)
			out << "hidden_weight " << j << ' ' << i << ' ' << csv_detail::format17(model.w(j, i)) << "\n";
	for (std::size_t j = 0; j < t.hidden_width; ++j)
		out << "hidden_bias " << j << ' ' << csv_detail::format17(model.hidden_biases[j]) << "\n";
	for (std::size_t j = 0; j < t.hidden_width; ++j)
		out << "output_weight " << j << ' ' << csv_detail::format17(model.output_weights[j]) << "\n";
	out << "output_bias " << csv_detail::format17(model.output_bias) << "\n";
	if (!out)
		throw std::runtime_error("save_model: write failed: " + path);
}

inline MlpModel load_model(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw std::runtime_error("load_model: cannot open file: " + path);

	auto fail = [&](const std::string& why) -> std::runtime_error {
		return std::runtime_error("load_model: " + why + " in " + path);
	};

	std::string line;
	if (!std::getline(in, line) || line != "mlp 1")
		throw fail("missing \"mlp 1\" header");

	MlpTopology t;
	auto read_kv = [&](const std::string& key) {
		if (!std::getline(in, line))
			throw fail("truncated header");
		std::istringstream ss(line);
		std::string k, v;
		ss >> k >> v;
		if (k != key || v.empty())
			throw fail("expected \"" + key + "\", got \"" + line + "\"");
		return v;
	};
	t.input_width = std::stoul(read_kv("input_width"));
	t.hidden_width = std::stoul(read_kv("hidden_width"));
	t.hidden_activation = parse_activation(read_kv("hidden_activation"));
	t.output_activation = parse_activation(read_kv("output_activation"));
	t.validate();

	MlpModel m;
	m.topology = t;
	m.hidden_weights.assign(t.hidden_width * t.input_width, 0.0);
	m.hidden_biases.assign(t.hidden_width, 0.0);
	m.output_weights.assign(t.hidden_width, 0.0);

	auto parse_value = [&](const std::string& text) {
		const auto v = csv_detail::parse_number(text);
		if (!v.has_value())
			throw fail("bad numeric value \"" + text + "\"");
		return *v;
	};

	std::size_t seen = 0;
	const std::size_t expected = t.parameter_count();
	while (std::getline(in, line)) {
		if (csv_detail::trim(line).empty())
			continue;
		std::istringstream ss(line);
		std::string tag;
		ss >> tag;
		if (tag == "hidden_weight") {
			std::size_t j = 0, i = 0;
			std::string val;
			if (!(ss >> j >> i >> val) || j >= t.hidden_width || i >= t.input_width)
				throw fail("bad hidden_weight line \"" + line + "\"");
			m.w(j, i) = parse_value(val);
		} else if (tag == "hidden_bias") {
			std::size_t j = 0;
			std::string val;
			if (!(ss >> j >> val) || j >= t.hidden_width)
				throw fail("bad hidden_bias line \"" + line + "\"");
			m.hidden_biases[j] = parse_value(val);
		} else if (tag == "output_weight") {
			std::size_t j = 0;
			std::string val;
			if (!(ss >> j >> val) || j >= t.hidden_width)
				throw fail("bad output_weight line \"" + line + "\"");
			m.output_weights[j] = parse_value(val);
		} else if (tag == "output_bias") {
			std::string val;
			if (!(ss >> val))
				throw fail("bad output_bias line \"" + line + "\"");
			m.output_bias = parse_value(val);
		} else {
			throw fail("unknown line \"" + line + "\"");
		}
		++seen;
	}
	if (seen != expected)
		throw fail("expected " + std::to_string(expected) + " parameter lines, found " +
		           std::to_string(seen));
	if (!m.all_finite())
		throw fail("non-finite parameter");
	return m;
}

} // namespace aging
