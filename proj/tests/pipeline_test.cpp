#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aging/config.hpp"
#include "aging/csv.hpp"
#include "aging/pipeline.hpp"
#include "aging/synthgen.hpp"

using namespace aging;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
	std::ifstream in(p, std::ios::binary);
	REQUIRE(in);
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

fs::path scratch_dir() {
	const fs::path dir = fs::temp_directory_path() / "aging_pipeline_test";
	fs::create_directories(dir);
	return dir;
}

// A small staircase CSV plus a config that trains quickly.
PipelineConfig quick_config(const fs::path& dir, const std::string& tag) {
	SynthSpec spec;
	spec.shape = SynthShape::swap_staircase;
	spec.length = 600;
	spec.base_level = 0.0;
	spec.season_step = 40.0;
	spec.season_period = 60;
	spec.noise_sigma = 0.4;
	spec.seed = 21;
	const fs::path csv = dir / (tag + "_input.csv");
	save_csv(generate(spec), csv.string());

	PipelineConfig cfg;
	cfg.input = csv.string();
	cfg.column = "swap_used";
	cfg.lags = {3};
	cfg.hidden = {2, 3};
	cfg.seeds_per_cell = 1;
	cfg.max_epochs = 40;
	cfg.patience = 6;
	cfg.max_horizon = 200;
	cfg.outdir = (dir / (tag + "_out")).string();
	return cfg;
}

} // namespace

TEST_CASE("config file, overrides and unknown keys") {
	const fs::path dir = scratch_dir();
	const fs::path file = dir / "cfg.txt";
	std::ofstream(file) << "# comment\n"
	                       "input=data.csv\n"
	                       "sample_interval=30\n"
	                       "lags=4,5\n"
	                       "shuffle=false\n"
	                       "threshold=auto\n"
	                       "selection=test\n";
	PipelineConfig cfg;
	load_config_file(cfg, file.string());
	CHECK(cfg.input == "data.csv");
	CHECK(cfg.sample_interval == 30.0);
	CHECK(cfg.lags == std::vector<std::size_t>{4, 5});
	CHECK_FALSE(cfg.shuffle);
	CHECK(cfg.threshold_is_auto());
	CHECK(cfg.selection == SelectionSegment::test);

	// flags override the file
	apply_config_entry(cfg, "lags", "6");
	CHECK(cfg.lags == std::vector<std::size_t>{6});

	CHECK_THROWS_WITH(apply_config_entry(cfg, "not_a_key", "1"), ContainsSubstring("unknown key"));
	std::ofstream(file) << "garbage line\n";
	CHECK_THROWS_WITH(load_config_file(cfg, file.string()),
	                  ContainsSubstring(":1") && ContainsSubstring("key=value"));
	std::ofstream(file) << "learning_rate=fast\n";
	CHECK_THROWS_WITH(load_config_file(cfg, file.string()), ContainsSubstring("not a number"));
}

TEST_CASE("despike window in hours converts through the sample interval") {
	PipelineConfig cfg;
	cfg.sample_interval = 60.0;
	apply_config_entry(cfg, "despike_window_hours", "24");
	CHECK(cfg.despike_window == 1440);
	apply_config_entry(cfg, "sample_interval", "3600");
	apply_config_entry(cfg, "despike_window_hours", "24");
	CHECK(cfg.despike_window == 24);
}

TEST_CASE("config round-trips through its text form") {
	PipelineConfig cfg;
	cfg.input = "x.csv";
	cfg.column = "swap";
	cfg.lags = {3, 5};
	cfg.threshold = 123.5;
	cfg.safety_margin = 7;
	cfg.selection = SelectionSegment::test;
	const std::string text = config_to_text(cfg);

	PipelineConfig back;
	const fs::path file = scratch_dir() / "roundtrip.txt";
	std::ofstream(file) << text;
	load_config_file(back, file.string());
	CHECK(config_to_text(back) == text);
}

TEST_CASE("run_pipeline writes exactly the six run artifacts") {
	const fs::path dir = scratch_dir();
	const PipelineConfig cfg = quick_config(dir, "six");
	fs::remove_all(cfg.outdir);
	const RunResult run = run_pipeline(cfg);

	std::set<std::string> names;
	for (const auto& entry : fs::directory_iterator(cfg.outdir))
		names.insert(entry.path().filename().string());
	CHECK(names == std::set<std::string>{"manifest.txt", "grid_table.csv", "errors.csv",
	                                     "forecast_vs_actual.csv", "model.txt", "exhaustion.csv"});

	// errors.csv carries raw and scaled rows for the variable
	const std::string errors = slurp(fs::path(cfg.outdir) / "errors.csv");
	CHECK_THAT(errors, ContainsSubstring("swap_used/raw") && ContainsSubstring("swap_used/scaled"));

	// the grid table has one row per lag value
	const std::string table = slurp(fs::path(cfg.outdir) / "grid_table.csv");
	CHECK_THAT(table, ContainsSubstring("lags,2,3\n3,"));

	// threshold=auto resolved against the data, rising: above the max
	CHECK(run.resolved.threshold > 0.0);
	CHECK_FALSE(run.resolved.threshold_is_auto());
}

TEST_CASE("rerunning the same config is bit-identical") {
	const fs::path dir = scratch_dir();
	PipelineConfig cfg = quick_config(dir, "rerun");
	fs::remove_all(cfg.outdir);
	run_pipeline(cfg);
	const std::string errors1 = slurp(fs::path(cfg.outdir) / kErrorsFile);
	const std::string model1 = slurp(fs::path(cfg.outdir) / kModelFile);
	const std::string grid1 = slurp(fs::path(cfg.outdir) / kGridTableFile);

	PipelineConfig again = cfg;
	again.outdir = cfg.outdir + "_b";
	fs::remove_all(again.outdir);
	run_pipeline(again);
	CHECK(slurp(fs::path(again.outdir) / kErrorsFile) == errors1);
	CHECK(slurp(fs::path(again.outdir) / kModelFile) == model1);
	CHECK(slurp(fs::path(again.outdir) / kGridTableFile) == grid1);
}

TEST_CASE("the manifest alone reproduces the run") {
	const fs::path dir = scratch_dir();
	PipelineConfig cfg = quick_config(dir, "manifest");
	fs::remove_all(cfg.outdir);
	run_pipeline(cfg);

	PipelineConfig from_manifest;
	load_config_file(from_manifest, (fs::path(cfg.outdir) / kManifestFile).string());
	from_manifest.outdir = cfg.outdir + "_repro";
	fs::remove_all(from_manifest.outdir);
	run_pipeline(from_manifest);

	CHECK(slurp(fs::path(cfg.outdir) / kErrorsFile) ==
	      slurp(fs::path(from_manifest.outdir) / kErrorsFile));
	CHECK(slurp(fs::path(cfg.outdir) / kModelFile) ==
	      slurp(fs::path(from_manifest.outdir) / kModelFile));
}

TEST_CASE("stage failures carry the stage tag and leave no partial outputs") {
	const fs::path dir = scratch_dir();
	PipelineConfig cfg = quick_config(dir, "fail");
	// fractions are valid in themselves but leave an empty validation
	// segment on this series
	cfg.train_fraction = 0.999;
	cfg.validation_fraction = 0.0005;
	fs::remove_all(cfg.outdir);
	CHECK_THROWS_WITH(run_pipeline(cfg), ContainsSubstring("[split]"));
	CHECK_FALSE(fs::exists(cfg.outdir));

	// an over-unity fraction sum is caught upfront, with the same tag
	PipelineConfig overfull = quick_config(dir, "overfull");
	overfull.train_fraction = 0.99;  // + default validation 0.2
	CHECK_THROWS_WITH(run_pipeline(overfull), ContainsSubstring("[split]"));

	PipelineConfig missing = quick_config(dir, "missing");
	missing.input = "/nonexistent/never.csv";
	CHECK_THROWS_WITH(run_pipeline(missing), ContainsSubstring("[ingest]"));
}

TEST_CASE("config validation runs before any work") {
	PipelineConfig cfg;
	cfg.input = "";  // required
	CHECK_THROWS_WITH(run_pipeline(cfg), ContainsSubstring("input path"));
	cfg.input = "whatever.csv";
	cfg.threads = 0;
	CHECK_THROWS_WITH(run_pipeline(cfg), ContainsSubstring("threads"));
	cfg.threads = 1;
	cfg.lags.clear();
	CHECK_THROWS_WITH(run_pipeline(cfg), ContainsSubstring("[grid]"));
}

TEST_CASE("despiking inside the pipeline shortens the series by window-1") {
	const fs::path dir = scratch_dir();
	PipelineConfig cfg = quick_config(dir, "despike");
	cfg.despike_window = 5;
	fs::remove_all(cfg.outdir);
	const RunResult run = run_pipeline(cfg);
	CHECK(run.data.conditioned.size() == 600 - 5 + 1);
}
