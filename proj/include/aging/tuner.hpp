#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "aging/mlp.hpp"
#include "aging/preprocess.hpp"
#include "aging/rng.hpp"
#include "aging/timeseries.hpp"

// Topology selection: exhaustive grid over (number of time lags x hidden
// neurons), each cell trained a few times from derived seeds, scored by
// RMSE on the selection segment, minimum wins. Cells are independent and
// may run in parallel; per-cell seeds are derived from (base seed, lags,
// hidden, replicate) so the result is identical regardless of evaluation
// order.

namespace aging {

enum class SelectionSegment { validation, test };

inline SelectionSegment parse_selection(const std::string& s) {
	if (s == "validation")
		return SelectionSegment::validation;
	if (s == "test")
		return SelectionSegment::test;
	throw std::invalid_argument("unknown selection segment: " + s);
}

inline std::string to_string(SelectionSegment s) {
	return s == SelectionSegment::validation ? "validation" : "test";
}

struct GridSpec {
	std::vector<std::size_t> lag_values{3, 4, 5, 6, 7};
	std::vector<std::size_t> hidden_values{2, 3, 4, 5, 6, 7};
	std::size_t horizon_n = 1;
	std::size_t seeds_per_cell = 3;
	std::uint64_t base_seed = 42;
	TrainConfig train_config;  // template; per-run seeds are derived
	Activation output_activation = Activation::identity;
	SelectionSegment selection_segment = SelectionSegment::validation;

	void validate() const {
		if (lag_values.empty() || hidden_values.empty())
			throw std::invalid_argument("GridSpec: lag and hidden value sets must be non-empty");
		for (std::size_t d : lag_values)
			if (d < 1)
				throw std::invalid_argument("GridSpec: lag values must be >= 1");
		for (std::size_t h : hidden_values)
			if (h < 1)
				throw std::invalid_argument("GridSpec: hidden values must be >= 1");
		if (horizon_n < 1)
			throw std::invalid_argument("GridSpec: horizon must be >= 1");
		if (seeds_per_cell < 1)
			throw std::invalid_argument("GridSpec: seeds_per_cell must be >= 1");
		train_config.validate();
	}
};

// Seeds for one training run of cell (lags, hidden), replicate r.
// Weight init and example shuffling get separate derived streams.
inline std::uint64_t cell_init_seed(std::uint64_t base, std::size_t lags, std::size_t hidden,
                                    std::size_t replicate) {
	return derive_seed(base, {lags, hidden, replicate, 0});
}
inline std::uint64_t cell_shuffle_seed(std::uint64_t base, std::size_t lags, std::size_t hidden,
                                       std::size_t replicate) {
	return derive_seed(base, {lags, hidden, replicate, 1});
}

struct GridCell {
	std::size_t lags = 0;
	std::size_t hidden = 0;
	bool failed = false;
	std::string fail_reason;
	double selection_rmse = std::numeric_limits<double>::quiet_NaN();
	std::uint64_t seed_used = 0;      // init seed of the winning replicate
	std::size_t replicate_used = 0;
};

struct GridSearchReport {
	std::vector<GridCell> cells;  // row-major: lags ascending, hidden ascending
	std::vector<std::size_t> lag_values;
	std::vector<std::size_t> hidden_values;
	std::size_t best_lags = 0;
	std::size_t best_hidden = 0;
	std::size_t best_replicate = 0;
	SelectionSegment selection_segment = SelectionSegment::validation;

	const GridCell& cell(std::size_t lags, std::size_t hidden) const {
		for (const auto& c : cells)
			if (c.lags == lags && c.hidden == hidden)
				return c;
		throw std::invalid_argument("GridSearchReport: no cell (" + std::to_string(lags) + "," +
		                            std::to_string(hidden) + ")");
	}

	const GridCell& best_cell() const { return cell(best_lags, best_hidden); }

	// Full report with per-cell seeds, one line per cell.
	std::string to_text() const {
		std::ostringstream out;
		out << "grid_search_report v1\n";
		out << "selection_segment " << aging::to_string(selection_segment) << "\n";
		for (const auto& c : cells) {
			out << "cell lags=" << c.lags << " hidden=" << c.hidden;
			if (c.failed) {
				out << " status=failed reason=\"" << c.fail_reason << "\"\n";
			} else {
				out << " status=ok rmse=" << csv_detail::format17(c.selection_rmse)
				    << " seed=" << c.seed_used << " replicate=" << c.replicate_used << "\n";
			}
		}
		out << "best lags=" << best_lags << " hidden=" << best_hidden << "\n";
		return out.str();
	}
};

// Scores one (lags, hidden, replicate) combination; returns the selection
// RMSE. The production evaluator embeds both segments and trains an MLP;
// tests may inject a stub.
using CellEvaluator = std::function<double(std::size_t lags, std::size_t hidden, std::size_t replicate)>;

// Grid scaffold shared by the production path and stub-injected tests.
// Evaluator exceptions mark the cell failed; a cell fails only if every
// replicate fails.
inline GridSearchReport grid_search_with(const CellEvaluator& evaluate, const GridSpec& spec,
                                         std::size_t n_threads = 1) {
	spec.validate();

	GridSearchReport report;
	report.lag_values = spec.lag_values;
	report.hidden_values = spec.hidden_values;
	report.selection_segment = spec.selection_segment;
	report.cells.resize(spec.lag_values.size() * spec.hidden_values.size());

	auto run_cell = [&](std::size_t flat) {
		GridCell cell;
		cell.lags = spec.lag_values[flat / spec.hidden_values.size()];
		cell.hidden = spec.hidden_values[flat % spec.hidden_values.size()];
		cell.failed = true;
		double best = std::numeric_limits<double>::infinity();
		std::string last_error = "no replicates run";
		for (std::size_t r = 0; r < spec.seeds_per_cell; ++r) {
			try {
				const double score = evaluate(cell.lags, cell.hidden, r);
				if (score < best) {
					best = score;
					cell.selection_rmse = score;
					cell.seed_used = cell_init_seed(spec.base_seed, cell.lags, cell.hidden, r);
					cell.replicate_used = r;
					cell.failed = false;
				}
			} catch (const std::exception& e) {
				last_error = e.what();
			}
		}
		if (cell.failed)
			cell.fail_reason = last_error;
		report.cells[flat] = cell;
	};

	const std::size_t n_cells = report.cells.size();
	if (n_threads <= 1) {
		for (std::size_t flat = 0; flat < n_cells; ++flat)
			run_cell(flat);
	} else {
		std::atomic<std::size_t> next{0};
		auto worker = [&] {
			for (std::size_t flat = next.fetch_add(1); flat < n_cells; flat = next.fetch_add(1))
				run_cell(flat);
		};
		std::vector<std::thread> pool;
		const std::size_t count = std::min(n_threads, n_cells);
		pool.reserve(count);
		for (std::size_t i = 0; i < count; ++i)
			pool.emplace_back(worker);
		for (auto& t : pool)
			t.join();
	}

	// argmin over non-failed cells; ties broken toward smaller lags, then
	// smaller hidden (cells are stored in that order, so strict < works)
	const GridCell* best = nullptr;
	for (const auto& c : report.cells) {
		if (c.failed)
			continue;
		if (best == nullptr || c.selection_rmse < best->selection_rmse)
			best = &c;
	}
	if (best == nullptr)
		throw std::runtime_error("grid_search: every grid cell failed; last reason: " +
		                         report.cells.back().fail_reason);
	report.best_lags = best->lags;
	report.best_hidden = best->hidden;
	report.best_replicate = best->replicate_used;
	return report;
}

// Trains one cell replicate on the embedded segments and returns the
// returned snapshot's RMSE on the selection segment.
inline double evaluate_cell(const TimeSeries& train_segment, const TimeSeries& selection_segment,
                            const GridSpec& spec, std::size_t lags, std::size_t hidden,
                            std::size_t replicate) {
	const LagDataset train_set = embed(train_segment, lags, spec.horizon_n);
	const LagDataset selection_set = embed(selection_segment, lags, spec.horizon_n);

	MlpTopology topology;
	topology.input_width = lags;
	topology.hidden_width = hidden;
	topology.output_activation = spec.output_activation;

	TrainConfig config = spec.train_config;
	config.seed = cell_shuffle_seed(spec.base_seed, lags, hidden, replicate);
	const MlpModel start = init_model(topology, cell_init_seed(spec.base_seed, lags, hidden, replicate));
	const TrainResult result = train(start, train_set, selection_set, config);
	return mlp_detail::dataset_rmse(result.model, selection_set);
}

// Production entry point: train on the first segment, score every
// (lags, hidden) combination on the selection segment, pick the minimum.
inline GridSearchReport grid_search(const TimeSeries& train_segment,
                                    const TimeSeries& selection_segment, const GridSpec& spec,
                                    std::size_t n_threads = 1) {
	train_segment.validate();
	selection_segment.validate();
	return grid_search_with(
	    [&](std::size_t lags, std::size_t hidden, std::size_t replicate) {
		    return evaluate_cell(train_segment, selection_segment, spec, lags, hidden, replicate);
	    },
	    spec, n_threads);
}

// Table in the grid layout: rows are lag counts ascending, columns hidden
// counts ascending, cells the selection RMSE. The best cell carries a
// trailing '*'; failed cells render as FAIL.
inline std::string emit_grid_table(const GridSearchReport& report) {
	std::ostringstream out;
	out << "lags";
	for (std::size_t h : report.hidden_values)
		out << ',' << h;
	out << '\n';
	for (std::size_t d : report.lag_values) {
		out << d;
		for (std::size_t h : report.hidden_values) {
			const GridCell& c = report.cell(d, h);
			out << ',';
			if (c.failed)
				out << "FAIL";
			else
				out << csv_detail::format17(c.selection_rmse);
			if (d == report.best_lags && h == report.best_hidden)
				out << '*';
		}
		out << '\n';
	}
	return out.str();
}

} // namespace aging
