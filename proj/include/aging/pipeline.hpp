#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "aging/config.hpp"
#include "aging/csv.hpp"
#include "aging/forecast.hpp"
#include "aging/metrics.hpp"
#include "aging/mlp.hpp"
#include "aging/preprocess.hpp"
#include "aging/timeseries.hpp"
#include "aging/tuner.hpp"

// End-to-end run: ingest -> optional despike -> chronological split ->
// scaler fit on train+validation -> grid search -> final training at the
// selected cell -> test-segment error report (scaled and raw units) ->
// exhaustion estimate. Every stage failure is tagged with the stage name
// and any partially written outputs are removed.

namespace aging {

namespace pipeline_detail {
template <class F>
auto stage(const char* name, F&& f) {
	try {
		return f();
	} catch (const std::exception& e) {
		throw std::runtime_error("[" + std::string(name) + "] " + e.what());
	}
}
} // namespace pipeline_detail

// The series and segments a run works on, before any training.
struct PreparedData {
	TimeSeries conditioned;  // raw units, despiked when configured
	TimeSeries train_raw, validation_raw, test_raw;
	ScalerParams scaler;     // fitted on train+validation, never on test
	TimeSeries train_scaled, validation_scaled, test_scaled;
};

inline PreparedData prepare_data(const PipelineConfig& cfg) {
	using pipeline_detail::stage;
	PreparedData d;

	d.conditioned = stage("ingest", [&] {
		return load_csv(cfg.input, ColumnRef::parse(cfg.column), cfg.sample_interval);
	});

	if (cfg.despike_window > 0) {
		d.conditioned = stage("despike", [&] {
			return sliding_median(d.conditioned, cfg.despike_window, cfg.despike_alignment);
		});
	}

	stage("split", [&] {
		std::tie(d.train_raw, d.validation_raw, d.test_raw) =
		    split(d.conditioned, SplitSpec{cfg.train_fraction, cfg.validation_fraction});
		return 0;
	});

	stage("scale", [&] {
		d.scaler = fit_scaler(concat(d.train_raw, d.validation_raw));
		d.train_scaled = scale(d.train_raw, d.scaler);
		d.validation_scaled = scale(d.validation_raw, d.scaler);
		d.test_scaled = scale(d.test_raw, d.scaler);
		return 0;
	});
	return d;
}

inline GridSearchReport run_grid(const PreparedData& data, const PipelineConfig& cfg) {
	return pipeline_detail::stage("grid", [&] {
		const TimeSeries& selection = cfg.selection == SelectionSegment::test
		                                  ? data.test_scaled
		                                  : data.validation_scaled;
		return grid_search(data.train_scaled, selection, cfg.to_grid_spec(), cfg.threads);
	});
}

// Re-runs the winning replicate of the selected cell. Deterministic: the
// derived seeds reproduce exactly the model the grid scored.
inline TrainResult train_best(const PreparedData& data, const PipelineConfig& cfg,
                              const GridSearchReport& report) {
	return pipeline_detail::stage("train", [&] {
		const GridSpec spec = cfg.to_grid_spec();
		const std::size_t d = report.best_lags;
		const std::size_t h = report.best_hidden;
		const std::size_t r = report.best_replicate;

		const TimeSeries& selection = cfg.selection == SelectionSegment::test
		                                  ? data.test_scaled
		                                  : data.validation_scaled;
		const LagDataset train_set = embed(data.train_scaled, d, spec.horizon_n);
		const LagDataset selection_set = embed(selection, d, spec.horizon_n);

		MlpTopology topology;
		topology.input_width = d;
		topology.hidden_width = h;
		topology.output_activation = spec.output_activation;

		TrainConfig config = spec.train_config;
		config.seed = cell_shuffle_seed(spec.base_seed, d, h, r);
		return train(init_model(topology, cell_init_seed(spec.base_seed, d, h, r)), train_set,
		             selection_set, config);
	});
}

// One-step-ahead evaluation pairs over the test segment.
struct TestEvaluation {
	std::vector<double> actual_raw, predicted_raw;
	std::vector<double> actual_scaled, predicted_scaled;
	std::vector<std::size_t> indices;  // absolute sample index per target
	ErrorReport raw_report, scaled_report;
};

inline TestEvaluation evaluate_on_test(const PreparedData& data, const PipelineConfig& cfg,
                                       const MlpModel& model) {
	return pipeline_detail::stage("evaluate", [&] {
		TestEvaluation ev;
		const std::size_t d = model.topology.input_width;
		const LagDataset test_set = embed(data.test_scaled, d, cfg.horizon);
		for (std::size_t i = 0; i < test_set.size(); ++i) {
			const double pred = forward(model, test_set.input(i));
			ev.actual_scaled.push_back(test_set.targets[i]);
			ev.predicted_scaled.push_back(pred);
			ev.actual_raw.push_back(unscale_value(test_set.targets[i], data.scaler));
			ev.predicted_raw.push_back(unscale_value(pred, data.scaler));
			ev.indices.push_back(data.test_scaled.start_index + i + d - 1 + cfg.horizon);
		}
		ev.raw_report = compute_report(ev.actual_raw, ev.predicted_raw);
		ev.scaled_report = compute_report(ev.actual_scaled, ev.predicted_scaled);
		return ev;
	});
}

// Resolves threshold=auto against the observed series: one tenth of the
// observed range beyond the max (rising) or below the min (falling).
inline double resolve_threshold(const PipelineConfig& cfg, const TimeSeries& observed) {
	if (!cfg.threshold_is_auto())
		return cfg.threshold;
	const auto [lo, hi] = std::minmax_element(observed.values.begin(), observed.values.end());
	const double range = *hi - *lo;
	return cfg.direction == CrossingDirection::rising ? *hi + 0.1 * range : *lo - 0.1 * range;
}

struct RunResult {
	PipelineConfig resolved;  // as written to the manifest
	PreparedData data;
	GridSearchReport grid;
	TrainResult training;
	TestEvaluation evaluation;
	ExhaustionEstimate exhaustion;
	std::filesystem::path outdir;
};

// Output files of a run directory.
inline const char* kManifestFile = "manifest.txt";
inline const char* kGridTableFile = "grid_table.csv";
inline const char* kErrorsFile = "errors.csv";
inline const char* kForecastFile = "forecast_vs_actual.csv";
inline const char* kModelFile = "model.txt";
inline const char* kExhaustionFile = "exhaustion.csv";

inline RunResult run_pipeline(PipelineConfig cfg) {
	using pipeline_detail::stage;
	namespace fs = std::filesystem;

	// Everything is validated before any work starts; failures carry the
	// stage the offending parameters belong to.
	stage("config", [&] {
		if (cfg.input.empty())
			throw std::invalid_argument("config: input path is required");
		if (!(cfg.sample_interval > 0.0))
			throw std::invalid_argument("config: sample_interval must be > 0");
		if (cfg.max_horizon < 1)
			throw std::invalid_argument("config: max_horizon must be >= 1");
		if (cfg.threads < 1)
			throw std::invalid_argument("config: threads must be >= 1");
		if (cfg.outdir.empty())
			throw std::invalid_argument("config: outdir is required");
		cfg.input = fs::absolute(cfg.input).string();
		return 0;
	});
	stage("split", [&] {
		SplitSpec{cfg.train_fraction, cfg.validation_fraction}.validate();
		return 0;
	});
	stage("grid", [&] {
		cfg.to_grid_spec().validate();
		return 0;
	});

	RunResult run;
	run.data = prepare_data(cfg);
	cfg.threshold = resolve_threshold(cfg, run.data.conditioned);
	run.resolved = cfg;

	run.grid = run_grid(run.data, cfg);
	run.training = train_best(run.data, cfg, run.grid);
	run.evaluation = evaluate_on_test(run.data, cfg, run.training.model);

	run.exhaustion = stage("exhaustion", [&] {
		return estimate_exhaustion(run.training.model, run.data.conditioned, run.data.scaler,
		                           cfg.threshold, cfg.direction, cfg.max_horizon,
		                           cfg.safety_margin);
	});

	// Write the six run artifacts; on any failure remove what was created.
	run.outdir = fs::path(cfg.outdir);
	std::vector<fs::path> created;
	bool created_dir = false;
	try {
		stage("write", [&] {
			if (!fs::exists(run.outdir)) {
				fs::create_directories(run.outdir);
				created_dir = true;
			}
			auto emit = [&](const char* name, const std::string& content) {
				const fs::path p = run.outdir / name;
				std::ofstream out(p, std::ios::binary | std::ios::trunc);
				if (!out)
					throw std::runtime_error(std::string("cannot open ") + p.string());
				created.push_back(p);
				out << content;
				if (!out)
					throw std::runtime_error(std::string("write failed: ") + p.string());
			};

			std::string manifest = config_to_text(cfg);
			manifest += "# resolved values below are informational\n";
			manifest += "# scaler_min=" + csv_detail::format17(run.data.scaler.min_value) + "\n";
			manifest += "# scaler_max=" + csv_detail::format17(run.data.scaler.max_value) + "\n";
			manifest += "# best_lags=" + std::to_string(run.grid.best_lags) + "\n";
			manifest += "# best_hidden=" + std::to_string(run.grid.best_hidden) + "\n";
			emit(kManifestFile, manifest);

			emit(kGridTableFile, emit_grid_table(run.grid));

			std::string errors = ErrorReport::csv_header() + "\n";
			const std::string var = run.data.conditioned.variable_name;
			errors += run.evaluation.raw_report.to_csv_row(var + "/raw") + "\n";
			errors += run.evaluation.scaled_report.to_csv_row(var + "/scaled") + "\n";
			emit(kErrorsFile, errors);

			std::string fva = "index,actual,forecast\n";
			for (std::size_t i = 0; i < run.evaluation.indices.size(); ++i) {
				fva += std::to_string(run.evaluation.indices[i]) + "," +
				       csv_detail::format17(run.evaluation.actual_raw[i]) + "," +
				       csv_detail::format17(run.evaluation.predicted_raw[i]) + "\n";
			}
			emit(kForecastFile, fva);

			const fs::path model_path = run.outdir / kModelFile;
			created.push_back(model_path);
			save_model(run.training.model, model_path.string());

			emit(kExhaustionFile,
			     ExhaustionEstimate::csv_header() + "\n" + run.exhaustion.to_csv_row() + "\n");
			return 0;
		});
	} catch (...) {
		std::error_code ec;
		for (const auto& p : created)
			fs::remove(p, ec);
		if (created_dir)
			fs::remove(run.outdir, ec);
		throw;
	}
	return run;
}

} // namespace aging
