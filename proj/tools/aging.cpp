// Command-line front end: generate synthetic aging traces, run the full
// forecasting pipeline, or drive the individual stages (grid search,
// single training, iterated forecasting, exhaustion estimation, error
// metrics) on their own.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "aging/aging.hpp"

namespace {

// Config flags are collected as (key, value) pairs and applied on top of
// the config file, so precedence is flags > file > defaults. AGING_SEED
// beats even an explicit --seed.
struct ConfigFlags {
	std::string config_path;
	std::vector<std::pair<std::string, std::string>> entries;

	void register_on(CLI::App* cmd) {
		cmd->add_option("--config", config_path, "key=value config file");
		auto opt = [&](const std::string& flag, const std::string& key, const std::string& help) {
			cmd->add_option_function<std::string>(
			       flag, [this, key](const std::string& v) { entries.emplace_back(key, v); }, help)
			    ->take_last();
		};
		opt("--input", "input", "input CSV path");
		opt("--column", "column", "CSV column, header name or zero-based index");
		opt("--interval", "sample_interval", "seconds between samples");
		opt("--despike-window", "despike_window", "median filter window in samples (0 = off)");
		opt("--despike-hours", "despike_window_hours", "median filter window in hours");
		opt("--despike-alignment", "despike_alignment", "leading|trailing|centered");
		opt("--train-fraction", "train_fraction", "train segment fraction");
		opt("--validation-fraction", "validation_fraction", "validation segment fraction");
		opt("--lags", "lags", "comma-separated time-lag candidates");
		opt("--hidden", "hidden", "comma-separated hidden-width candidates");
		opt("--horizon", "horizon", "forecast horizon in steps");
		opt("--seeds-per-cell", "seeds_per_cell", "training restarts per grid cell");
		opt("--learning-rate", "learning_rate", "SGD learning rate");
		opt("--max-epochs", "max_epochs", "maximum training epochs");
		opt("--patience", "patience", "early-stopping patience in epochs (0 = off)");
		opt("--shuffle", "shuffle", "shuffle training examples each epoch (true|false)");
		opt("--output-activation", "output_activation", "identity|sigmoid");
		opt("--selection", "selection", "grid selection segment: validation|test");
		opt("--threshold", "threshold", "exhaustion threshold in raw units, or auto");
		opt("--direction", "direction", "rising|falling");
		opt("--safety-margin", "safety_margin", "rejuvenation margin in steps, or auto");
		opt("--max-horizon", "max_horizon", "exhaustion scan horizon in steps");
		opt("--seed", "seed", "base seed");
		opt("--threads", "threads", "parallel grid workers");
		opt("--outdir", "outdir", "run output directory");

		cmd->add_flag_callback(
		    "--tune-on-test",
		    [this] { entries.emplace_back("selection", "test"); },
		    "select the grid winner on the test segment (leaky; for comparison studies)");
	}

	aging::PipelineConfig resolve() const {
		aging::PipelineConfig cfg;
		if (!config_path.empty())
			aging::load_config_file(cfg, config_path);
		// sample_interval first: despike_window_hours converts through it
		for (const auto& [key, value] : entries)
			if (key == "sample_interval")
				aging::apply_config_entry(cfg, key, value);
		for (const auto& [key, value] : entries)
			if (key != "sample_interval")
				aging::apply_config_entry(cfg, key, value);
		if (const char* env_seed = std::getenv("AGING_SEED"))
			aging::apply_config_entry(cfg, "seed", env_seed);
		return cfg;
	}
};

void print_series_summary(const aging::TimeSeries& s) {
	double lo = s.values[0], hi = s.values[0], sum = 0.0;
	for (double v : s.values) {
		lo = std::min(lo, v);
		hi = std::max(hi, v);
		sum += v;
	}
	std::cout << "variable " << s.variable_name << ", n " << s.size() << ", min " << lo << ", max "
	          << hi << ", mean " << sum / static_cast<double>(s.size()) << "\n";
}

int cmd_synth(const aging::SynthSpec& spec, const std::string& out_path, const std::string& name) {
	aging::TimeSeries series = aging::generate(spec);
	if (!name.empty())
		series.variable_name = name;
	aging::save_csv(series, out_path);
	std::cout << out_path << "\n";
	print_series_summary(series);
	return 0;
}

int cmd_run(const ConfigFlags& flags) {
	const aging::RunResult run = aging::run_pipeline(flags.resolve());
	std::cout << "run directory: " << run.outdir.string() << "\n";
	std::cout << "selected cell: lags " << run.grid.best_lags << ", hidden " << run.grid.best_hidden
	          << ", selection rmse " << run.grid.best_cell().selection_rmse << "\n";
	const auto& raw = run.evaluation.raw_report;
	std::cout << "test (raw units): rmse " << raw.rmse << ", mape " << raw.mape_percent
	          << "%, smape " << raw.smape_percent << "%\n";
	std::cout << run.exhaustion.to_text();
	return 0;
}

int cmd_grid(const ConfigFlags& flags, const std::string& out_path) {
	aging::PipelineConfig cfg = flags.resolve();
	cfg.validate();
	const aging::PreparedData data = aging::prepare_data(cfg);
	const aging::GridSearchReport report = aging::run_grid(data, cfg);
	const std::string table = aging::emit_grid_table(report);
	std::cout << table;
	std::cout << "best: lags " << report.best_lags << ", hidden " << report.best_hidden << "\n";
	if (!out_path.empty()) {
		std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
		if (!out)
			throw std::runtime_error("cannot open " + out_path);
		out << table;
	}
	return 0;
}

int cmd_train(const ConfigFlags& flags, std::size_t lags, std::size_t hidden,
              const std::string& model_out) {
	aging::PipelineConfig cfg = flags.resolve();
	cfg.lags = {lags};
	cfg.hidden = {hidden};
	cfg.validate();
	const aging::PreparedData data = aging::prepare_data(cfg);
	aging::GridSearchReport single;
	single.best_lags = lags;
	single.best_hidden = hidden;
	single.best_replicate = 0;
	const aging::TrainResult result = aging::train_best(data, cfg, single);
	aging::save_model(result.model, model_out);
	std::cout << "model written to " << model_out << "\n";
	std::cout << "epochs run " << result.trace.epochs_run() << ", best epoch "
	          << result.trace.best_epoch + 1 << ", validation rmse "
	          << result.trace.validation_rmse[result.trace.best_epoch] << "\n";
	std::cout << "scaler min " << data.scaler.min_value << ", max " << data.scaler.max_value << "\n";
	return 0;
}

int cmd_forecast(const std::string& model_path, const std::string& input, const std::string& column,
                 double interval, std::size_t steps, double scale_min, double scale_max,
                 const std::string& out_path) {
	const aging::MlpModel model = aging::load_model(model_path);
	const aging::TimeSeries series = aging::load_csv(input, aging::ColumnRef::parse(column), interval);
	const aging::ScalerParams scaler{scale_min, scale_max};
	scaler.validate();
	if (series.size() < model.topology.input_width)
		throw std::invalid_argument("input series shorter than the model input width");

	const aging::TimeSeries scaled = aging::scale(series, scaler);
	const std::span<const double> window(scaled.values.data() + scaled.size() - model.topology.input_width,
	                                     model.topology.input_width);
	std::vector<double> forecast = aging::forecast_iterated(model, window, steps);
	for (double& v : forecast)
		v = aging::unscale_value(v, scaler);

	std::ostream* out = &std::cout;
	std::ofstream file;
	if (!out_path.empty()) {
		file.open(out_path, std::ios::binary | std::ios::trunc);
		if (!file)
			throw std::runtime_error("cannot open " + out_path);
		out = &file;
	}
	*out << "index,forecast\n";
	const std::size_t last = series.start_index + series.size() - 1;
	for (std::size_t k = 0; k < forecast.size(); ++k)
		*out << (last + 1 + k) << ',' << aging::csv_detail::format17(forecast[k]) << "\n";
	return 0;
}

int cmd_exhaustion(const std::string& model_path, const std::string& input,
                   const std::string& column, double interval, double scale_min, double scale_max,
                   double threshold, const std::string& direction, std::size_t max_horizon,
                   long margin) {
	const aging::MlpModel model = aging::load_model(model_path);
	const aging::TimeSeries series = aging::load_csv(input, aging::ColumnRef::parse(column), interval);
	const aging::ScalerParams scaler{scale_min, scale_max};
	const aging::ExhaustionEstimate est =
	    aging::estimate_exhaustion(model, series, scaler, threshold,
	                               aging::parse_direction(direction), max_horizon, margin);
	std::cout << est.to_text();
	return 0;
}

int cmd_metrics(const std::string& actual_path, const std::string& actual_column,
                const std::string& forecast_path, const std::string& forecast_column,
                std::string name) {
	const aging::TimeSeries actual = aging::load_csv(actual_path, aging::ColumnRef::parse(actual_column), 1.0);
	const aging::TimeSeries forecast = aging::load_csv(forecast_path, aging::ColumnRef::parse(forecast_column), 1.0);
	const aging::ErrorReport report = aging::compute_report(actual.values, forecast.values);
	if (name.empty())
		name = actual.variable_name;
	std::cout << aging::ErrorReport::csv_header() << "\n" << report.to_csv_row(name) << "\n";
	return 0;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"software-aging resource forecasting"};
	app.require_subcommand(1);

	// synth
	auto* synth = app.add_subcommand("synth", "generate a synthetic aging trace as CSV");
	aging::SynthSpec spec;
	std::string shape_name = "response_time";
	std::string synth_out = "synth.csv";
	std::string synth_var_name;
	synth->add_option("--shape", shape_name, "response_time|swap_staircase|memory_sawtooth");
	synth->add_option("--length", spec.length, "number of samples")->check(CLI::PositiveNumber);
	synth->add_option("--seed", spec.seed, "generator seed");
	synth->add_option("--interval", spec.sample_interval, "seconds between samples");
	synth->add_option("--base", spec.base_level, "base level");
	synth->add_option("--trend", spec.trend_per_step, "trend (or sawtooth decay) per step");
	synth->add_option("--season-period", spec.season_period, "staircase jump period in samples");
	synth->add_option("--season-step", spec.season_step, "staircase jump size");
	synth->add_option("--spike-rate", spec.spike_rate, "spike probability per sample");
	synth->add_option("--spike-magnitude", spec.spike_magnitude, "spike height");
	synth->add_option("--reset-floor", spec.reset_floor, "sawtooth reset trigger level");
	synth->add_option("--noise-sigma", spec.noise_sigma, "gaussian noise stddev");
	synth->add_option("--name", synth_var_name, "variable name for the CSV header");
	synth->add_option("--out", synth_out, "output CSV path");

	// run
	auto* run = app.add_subcommand("run", "full pipeline: ingest, tune, train, evaluate, estimate");
	ConfigFlags run_flags;
	run_flags.register_on(run);

	// grid
	auto* grid = app.add_subcommand("grid", "grid search only; print the RMSE table");
	ConfigFlags grid_flags;
	grid_flags.register_on(grid);
	std::string grid_out;
	grid->add_option("--out", grid_out, "also write the table CSV here");

	// train
	auto* train = app.add_subcommand("train", "train a single (lags, hidden) model");
	ConfigFlags train_flags;
	train_flags.register_on(train);
	std::size_t train_lags = 0, train_hidden = 0;
	std::string model_out = "model.txt";
	train->add_option("--cell-lags", train_lags, "time lags (input width)")->required();
	train->add_option("--cell-hidden", train_hidden, "hidden neurons")->required();
	train->add_option("--model-out", model_out, "model file to write");

	// forecast
	auto* fc = app.add_subcommand("forecast", "iterated multi-step forecast from a model file");
	std::string fc_model, fc_input, fc_column = "0", fc_out;
	double fc_interval = 60.0, fc_min = 0.0, fc_max = 1.0;
	std::size_t fc_steps = 100;
	fc->add_option("--model", fc_model, "model file")->required();
	fc->add_option("--input", fc_input, "CSV with the most recent observations")->required();
	fc->add_option("--column", fc_column, "CSV column");
	fc->add_option("--interval", fc_interval, "seconds between samples");
	fc->add_option("--steps", fc_steps, "forecast steps")->check(CLI::PositiveNumber);
	fc->add_option("--scale-min", fc_min, "scaler minimum used at training time")->required();
	fc->add_option("--scale-max", fc_max, "scaler maximum used at training time")->required();
	fc->add_option("--out", fc_out, "output CSV path (default stdout)");

	// exhaustion
	auto* ex = app.add_subcommand("exhaustion", "threshold-crossing estimate from a model file");
	std::string ex_model, ex_input, ex_column = "0", ex_direction = "rising";
	double ex_interval = 60.0, ex_min = 0.0, ex_max = 1.0, ex_threshold = 0.0;
	std::size_t ex_horizon = 1000;
	long ex_margin = aging::kAutoSafetyMargin;
	ex->add_option("--model", ex_model, "model file")->required();
	ex->add_option("--input", ex_input, "CSV with the most recent observations")->required();
	ex->add_option("--column", ex_column, "CSV column");
	ex->add_option("--interval", ex_interval, "seconds between samples");
	ex->add_option("--scale-min", ex_min, "scaler minimum used at training time")->required();
	ex->add_option("--scale-max", ex_max, "scaler maximum used at training time")->required();
	ex->add_option("--threshold", ex_threshold, "capacity threshold in raw units")->required();
	ex->add_option("--direction", ex_direction, "rising|falling");
	ex->add_option("--max-horizon", ex_horizon, "scan horizon in steps");
	ex->add_option("--margin", ex_margin, "safety margin in steps (negative = auto)");

	// metrics
	auto* me = app.add_subcommand("metrics", "RMSE/MAPE/SMAPE between two CSV columns");
	std::string me_actual, me_forecast, me_acol = "0", me_fcol = "0", me_name;
	me->add_option("--actual", me_actual, "CSV with actual values")->required();
	me->add_option("--forecast", me_forecast, "CSV with forecast values")->required();
	me->add_option("--actual-column", me_acol, "column in the actuals CSV");
	me->add_option("--forecast-column", me_fcol, "column in the forecast CSV");
	me->add_option("--name", me_name, "variable label for the report row");

	CLI11_PARSE(app, argc, argv);

	try {
		if (synth->parsed()) {
			spec.shape = aging::parse_shape(shape_name);
			return cmd_synth(spec, synth_out, synth_var_name);
		}
		if (run->parsed())
			return cmd_run(run_flags);
		if (grid->parsed())
			return cmd_grid(grid_flags, grid_out);
		if (train->parsed())
			return cmd_train(train_flags, train_lags, train_hidden, model_out);
		if (fc->parsed())
			return cmd_forecast(fc_model, fc_input, fc_column, fc_interval, fc_steps, fc_min, fc_max, fc_out);
		if (ex->parsed())
			return cmd_exhaustion(ex_model, ex_input, ex_column, ex_interval, ex_min, ex_max,
			                      ex_threshold, ex_direction, ex_horizon, ex_margin);
		if (me->parsed())
			return cmd_metrics(me_actual, me_acol, me_forecast, me_fcol, me_name);
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 1;
	}
	return 0;
}
