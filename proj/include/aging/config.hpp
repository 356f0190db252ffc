#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aging/csv.hpp"
#include "aging/forecast.hpp"
#include "aging/preprocess.hpp"
#include "aging/tuner.hpp"

// Run configuration: a flat key=value text file. Every key has a CLI
// flag override; precedence is flags > file > defaults. The manifest a
// run writes is itself a config file with every value resolved, so a run
// can be reproduced from its manifest alone.

namespace aging {

struct PipelineConfig {
	std::string input;           // CSV path
	std::string column = "0";    // header name or zero-based index
	double sample_interval = 60.0;

	std::size_t despike_window = 0;  // samples; 0 disables the median filter
	WindowAlignment despike_alignment = WindowAlignment::leading;

	double train_fraction = 0.6;
	double validation_fraction = 0.2;

	std::vector<std::size_t> lags{3, 4, 5, 6, 7};
	std::vector<std::size_t> hidden{2, 3, 4, 5, 6, 7};
	std::size_t horizon = 1;
	std::size_t seeds_per_cell = 3;

	double learning_rate = 0.01;
	std::size_t max_epochs = 6000;
	std::size_t patience = 300;
	bool shuffle = true;
	Activation output_activation = Activation::identity;
	SelectionSegment selection = SelectionSegment::validation;

	double threshold = std::numeric_limits<double>::quiet_NaN();  // NaN = auto
	CrossingDirection direction = CrossingDirection::rising;
	long safety_margin = kAutoSafetyMargin;  // steps; negative = auto rule
	std::size_t max_horizon = 1000;

	std::uint64_t seed = 42;
	std::size_t threads = 1;
	std::string outdir = "run_out";

	bool threshold_is_auto() const { return !std::isfinite(threshold); }

	void validate() const {
		if (input.empty())
			throw std::invalid_argument("config: input path is required");
		if (!(sample_interval > 0.0))
			throw std::invalid_argument("config: sample_interval must be > 0");
		SplitSpec{train_fraction, validation_fraction}.validate();
		to_grid_spec().validate();
		if (max_horizon < 1)
			throw std::invalid_argument("config: max_horizon must be >= 1");
		if (threads < 1)
			throw std::invalid_argument("config: threads must be >= 1");
		if (outdir.empty())
			throw std::invalid_argument("config: outdir is required");
	}

	GridSpec to_grid_spec() const {
		GridSpec g;
		g.lag_values = lags;
		g.hidden_values = hidden;
		g.horizon_n = horizon;
		g.seeds_per_cell = seeds_per_cell;
		g.base_seed = seed;
		g.train_config.learning_rate = learning_rate;
		g.train_config.max_epochs = max_epochs;
		g.train_config.patience = patience;
		g.train_config.shuffle_each_epoch = shuffle;
		g.output_activation = output_activation;
		g.selection_segment = selection;
		return g;
	}
};

namespace config_detail {

inline std::vector<std::size_t> parse_size_list(const std::string& text) {
	std::vector<std::size_t> out;
	std::stringstream ss(text);
	std::string item;
	while (std::getline(ss, item, ',')) {
		const std::string t = csv_detail::trim(item);
		if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
			throw std::invalid_argument("expected a comma-separated list of integers, got \"" + text + "\"");
		out.push_back(std::stoul(t));
	}
	if (out.empty())
		throw std::invalid_argument("empty integer list");
	return out;
}

inline std::string format_size_list(const std::vector<std::size_t>& v) {
	std::string out;
	for (std::size_t i = 0; i < v.size(); ++i) {
		if (i)
			out += ',';
		out += std::to_string(v[i]);
	}
	return out;
}

inline double parse_double(const std::string& key, const std::string& text) {
	const auto v = csv_detail::parse_number(text);
	if (!v.has_value())
		throw std::invalid_argument("config: key \"" + key + "\": not a number: \"" + text + "\"");
	return *v;
}

inline std::size_t parse_size(const std::string& key, const std::string& text) {
	const std::string t = csv_detail::trim(text);
	if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
		throw std::invalid_argument("config: key \"" + key + "\": not a non-negative integer: \"" + text + "\"");
	return std::stoul(t);
}

inline bool parse_bool(const std::string& key, const std::string& text) {
	if (text == "true" || text == "1" || text == "yes")
		return true;
	if (text == "false" || text == "0" || text == "no")
		return false;
	throw std::invalid_argument("config: key \"" + key + "\": not a boolean: \"" + text + "\"");
}

} // namespace config_detail

// Applies one key=value assignment. Shared by the file loader and the
// CLI flag layer so both accept exactly the same keys.
inline void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value) {
	using namespace config_detail;
	if (key == "input") cfg.input = value;
	else if (key == "column") cfg.column = value;
	else if (key == "sample_interval") cfg.sample_interval = parse_double(key, value);
	else if (key == "despike_window") cfg.despike_window = parse_size(key, value);
	else if (key == "despike_window_hours") {
		const double hours = parse_double(key, value);
		if (!(hours > 0.0))
			throw std::invalid_argument("config: despike_window_hours must be > 0");
		if (!(cfg.sample_interval > 0.0))
			throw std::invalid_argument("config: sample_interval must be set before despike_window_hours");
		cfg.despike_window = static_cast<std::size_t>(hours * 3600.0 / cfg.sample_interval + 0.5);
		if (cfg.despike_window == 0)
			cfg.despike_window = 1;
	}
	else if (key == "despike_alignment") cfg.despike_alignment = parse_alignment(value);
	else if (key == "train_fraction") cfg.train_fraction = parse_double(key, value);
	else if (key == "validation_fraction") cfg.validation_fraction = parse_double(key, value);
	else if (key == "lags") cfg.lags = parse_size_list(value);
	else if (key == "hidden") cfg.hidden = parse_size_list(value);
	else if (key == "horizon") cfg.horizon = parse_size(key, value);
	else if (key == "seeds_per_cell") cfg.seeds_per_cell = parse_size(key, value);
	else if (key == "learning_rate") cfg.learning_rate = parse_double(key, value);
	else if (key == "max_epochs") cfg.max_epochs = parse_size(key, value);
	else if (key == "patience") cfg.patience = parse_size(key, value);
	else if (key == "shuffle") cfg.shuffle = parse_bool(key, value);
	else if (key == "output_activation") cfg.output_activation = parse_activation(value);
	else if (key == "selection") cfg.selection = parse_selection(value);
	else if (key == "threshold") {
		if (value == "auto")
			cfg.threshold = std::numeric_limits<double>::quiet_NaN();
		else
			cfg.threshold = parse_double(key, value);
	}
	else if (key == "direction") cfg.direction = parse_direction(value);
	else if (key == "safety_margin") {
		if (value == "auto")
			cfg.safety_margin = kAutoSafetyMargin;
		else
			cfg.safety_margin = static_cast<long>(parse_size(key, value));
	}
	else if (key == "max_horizon") cfg.max_horizon = parse_size(key, value);
	else if (key == "seed") {
		const std::string t = csv_detail::trim(value);
		if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
			throw std::invalid_argument("config: key \"seed\": not a non-negative integer: \"" + value + "\"");
		cfg.seed = std::stoull(t);
	}
	else if (key == "threads") cfg.threads = parse_size(key, value);
	else if (key == "outdir") cfg.outdir = value;
	else
		throw std::invalid_argument("config: unknown key \"" + key + "\"");
}

// Parses a flat key=value file. '#' starts a comment; blank lines are
// ignored.
inline void load_config_file(PipelineConfig& cfg, const std::string& path) {
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("config: cannot open file: " + path);
	std::string line;
	std::size_t lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		if (!line.empty() && line.back() == '\r')
			line.pop_back();
		const std::string trimmed = csv_detail::trim(line);
		if (trimmed.empty() || trimmed[0] == '#')
			continue;
		const auto eq = trimmed.find('=');
		if (eq == std::string::npos)
			throw std::runtime_error("config: " + path + ":" + std::to_string(lineno) +
			                         ": expected key=value, got \"" + trimmed + "\"");
		const std::string key = csv_detail::trim(trimmed.substr(0, eq));
		const std::string value = csv_detail::trim(trimmed.substr(eq + 1));
		try {
			apply_config_entry(cfg, key, value);
		} catch (const std::exception& e) {
			throw std::runtime_error("config: " + path + ":" + std::to_string(lineno) + ": " + e.what());
		}
	}
}

// Serializes every field, resolved. `threshold` may still read "auto"
// when the caller has not resolved it against data yet.
inline std::string config_to_text(const PipelineConfig& cfg) {
	using config_detail::format_size_list;
	std::ostringstream out;
	out << "input=" << cfg.input << "\n";
	out << "column=" << cfg.column << "\n";
	out << "sample_interval=" << csv_detail::format17(cfg.sample_interval) << "\n";
	out << "despike_window=" << cfg.despike_window << "\n";
	out << "despike_alignment=" << to_string(cfg.despike_alignment) << "\n";
	out << "train_fraction=" << csv_detail::format17(cfg.train_fraction) << "\n";
	out << "validation_fraction=" << csv_detail::format17(cfg.validation_fraction) << "\n";
	out << "lags=" << format_size_list(cfg.lags) << "\n";
	out << "hidden=" << format_size_list(cfg.hidden) << "\n";
	out << "horizon=" << cfg.horizon << "\n";
	out << "seeds_per_cell=" << cfg.seeds_per_cell << "\n";
	out << "learning_rate=" << csv_detail::format17(cfg.learning_rate) << "\n";
	out << "max_epochs=" << cfg.max_epochs << "\n";
	out << "patience=" << cfg.patience << "\n";
	out << "shuffle=" << (cfg.shuffle ? "true" : "false") << "\n";
	out << "output_activation=" << to_string(cfg.output_activation) << "\n";
	out << "selection=" << to_string(cfg.selection) << "\n";
	out << "threshold=" << (cfg.threshold_is_auto() ? std::string("auto") : csv_detail::format17(cfg.threshold)) << "\n";
	out << "direction=" << to_string(cfg.direction) << "\n";
	out << "safety_margin=" << (cfg.safety_margin < 0 ? std::string("auto") : std::to_string(cfg.safety_margin)) << "\n";
	out << "max_horizon=" << cfg.max_horizon << "\n";
	out << "seed=" << cfg.seed << "\n";
	out << "threads=" << cfg.threads << "\n";
	out << "outdir=" << cfg.outdir << "\n";
	return out.str();
}

} // namespace aging
