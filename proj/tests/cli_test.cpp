// Exercises the installed CLI binary end to end: subcommand wiring, exit
// codes, file outputs, and the AGING_SEED override. argv[1] is the path
// to the binary.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::string g_cli;
fs::path g_dir;

void check(bool ok, const std::string& what) {
	if (!ok) {
		std::printf("FAIL: %s\n", what.c_str());
		++g_failures;
	}
}

int run(const std::string& args, const std::string& log_name = "out.log",
        const std::string& env_prefix = "") {
	const fs::path log = g_dir / log_name;
	const std::string cmd =
	    env_prefix + "\"" + g_cli + "\" " + args + " > \"" + log.string() + "\" 2>&1";
	const int status = std::system(cmd.c_str());
	return status;
}

std::string slurp(const fs::path& p) {
	std::ifstream in(p, std::ios::binary);
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

} // namespace

int main(int argc, char** argv) {
	if (argc < 2) {
		std::printf("usage: cli_test <path-to-aging-binary>\n");
		return 1;
	}
	g_cli = argv[1];
	g_dir = fs::temp_directory_path() / "aging_cli_test";
	fs::remove_all(g_dir);
	fs::create_directories(g_dir);

	const std::string csv = (g_dir / "sw.csv").string();

	// synth: writes the requested number of rows, deterministically
	check(run("synth --shape swap_staircase --length 300 --seed 42 --season-period 50"
	          " --season-step 25 --base 100 --noise-sigma 0.3 --out " + csv) == 0,
	      "synth exits 0");
	const std::string first = slurp(csv);
	check(!first.empty(), "synth wrote the CSV");
	{
		std::istringstream ss(first);
		std::string line;
		int rows = -1;  // header
		while (std::getline(ss, line))
			++rows;
		check(rows == 300, "synth row count = --length");
	}
	check(run("synth --shape swap_staircase --length 300 --seed 42 --season-period 50"
	          " --season-step 25 --base 100 --noise-sigma 0.3 --out " + csv) == 0,
	      "synth rerun exits 0");
	check(slurp(csv) == first, "same synth invocation twice gives identical bytes");

	// usage errors exit nonzero
	check(run("synth --length 0 --out " + (g_dir / "zero.csv").string()) != 0,
	      "synth --length 0 is a usage error");
	check(run("nonsense") != 0, "unknown subcommand is an error");
	check(run("run --input /nonexistent.csv --outdir " + (g_dir / "r0").string()) != 0,
	      "run with a missing input fails");

	// grid subcommand prints the table
	check(run("grid --input " + csv + " --column swap_used --lags 3 --hidden 2"
	          " --seeds-per-cell 1 --max-epochs 30 --patience 5",
	          "grid.log") == 0,
	      "grid exits 0");
	check(slurp(g_dir / "grid.log").find("lags,2") != std::string::npos, "grid table printed");

	// train writes a loadable model and reports the scaler
	const std::string model = (g_dir / "model.txt").string();
	check(run("train --input " + csv + " --column swap_used --cell-lags 3 --cell-hidden 2"
	          " --max-epochs 30 --patience 5 --model-out " + model,
	          "train.log") == 0,
	      "train exits 0");
	check(slurp(model).rfind("mlp 1", 0) == 0, "model file starts with the format header");
	check(slurp(g_dir / "train.log").find("scaler min") != std::string::npos,
	      "train reports the fitted scaler");

	// forecast from the trained model
	check(run("forecast --model " + model + " --input " + csv + " --column swap_used"
	          " --steps 5 --scale-min 100 --scale-max 225 --out " + (g_dir / "fc.csv").string(),
	          "fc.log") == 0,
	      "forecast exits 0");
	{
		std::istringstream ss(slurp(g_dir / "fc.csv"));
		std::string line;
		int rows = -1;
		while (std::getline(ss, line))
			++rows;
		check(rows == 5, "forecast emits --steps rows");
		check(slurp(g_dir / "fc.csv").rfind("index,forecast", 0) == 0, "forecast CSV header");
	}

	// exhaustion estimate from the same model
	check(run("exhaustion --model " + model + " --input " + csv + " --column swap_used"
	          " --scale-min 100 --scale-max 225 --threshold 500 --direction rising"
	          " --max-horizon 50",
	          "ex.log") == 0,
	      "exhaustion exits 0");
	check(slurp(g_dir / "ex.log").find("threshold:") != std::string::npos,
	      "exhaustion prints the estimate block");

	// metrics between a column and itself is all zeros
	check(run("metrics --actual " + csv + " --forecast " + csv +
	          " --actual-column swap_used --forecast-column swap_used",
	          "me.log") == 0,
	      "metrics exits 0");
	check(slurp(g_dir / "me.log").find(",0,0,0") != std::string::npos,
	      "metrics of identical columns is zero");

	// full run + AGING_SEED override lands in the manifest
	const fs::path run_dir = g_dir / "run1";
	check(run("run --input " + csv + " --column swap_used --lags 3 --hidden 2"
	          " --seeds-per-cell 1 --max-epochs 30 --patience 5 --seed 7 --outdir " +
	          run_dir.string(),
	          "run.log", "AGING_SEED=99 ") == 0,
	      "run exits 0");
	check(slurp(run_dir / "manifest.txt").find("seed=99\n") != std::string::npos,
	      "AGING_SEED overrides --seed in the manifest");
	for (const char* name : {"manifest.txt", "grid_table.csv", "errors.csv",
	                         "forecast_vs_actual.csv", "model.txt", "exhaustion.csv"})
		check(fs::exists(run_dir / name), std::string("run wrote ") + name);

	if (g_failures == 0)
		std::printf("cli_test: all checks passed\n");
	return g_failures;
}
