#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "aging/csv.hpp"
#include "aging/rng.hpp"
#include "aging/timeseries.hpp"

using namespace aging;
using Catch::Matchers::ContainsSubstring;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
	const auto path = std::filesystem::temp_directory_path() / name;
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	out << content;
	return path;
}

} // namespace

TEST_CASE("load_csv reads a named column in file order") {
	const auto path = write_temp("ts_basic.csv", "time,swap\n1,10\n2,20\n3,30\n");
	const TimeSeries s = load_csv(path.string(), ColumnRef::by_header("swap"), 60.0);
	CHECK(s.values == std::vector<double>{10, 20, 30});
	CHECK(s.start_index == 0);
	CHECK(s.sample_interval == 60.0);
	CHECK(s.variable_name == "swap");
}

TEST_CASE("load_csv reports the row of a non-numeric cell") {
	const auto path = write_temp("ts_bad.csv", "swap\n10\nabc\n30\n");
	CHECK_THROWS_WITH(load_csv(path.string(), ColumnRef::by_header("swap"), 60.0),
	                  ContainsSubstring("row 2") && ContainsSubstring("abc"));
}

TEST_CASE("load_csv rejects a header-only file") {
	const auto path = write_temp("ts_empty.csv", "swap\n");
	CHECK_THROWS_WITH(load_csv(path.string(), ColumnRef::by_header("swap"), 60.0),
	                  ContainsSubstring("no data rows"));
}

TEST_CASE("load_csv rejects a missing file and a missing column") {
	CHECK_THROWS_WITH(load_csv("/nonexistent/nowhere.csv", ColumnRef::by_index(0), 1.0),
	                  ContainsSubstring("cannot open"));
	const auto path = write_temp("ts_cols.csv", "a,b\n1,2\n");
	CHECK_THROWS_WITH(load_csv(path.string(), ColumnRef::by_header("swap"), 1.0),
	                  ContainsSubstring("\"swap\" not found"));
}

TEST_CASE("load_csv by index skips a non-numeric first row and handles quoting") {
	const auto path = write_temp("ts_idx.csv", "\"resp,onse\",mem\n\"1\",5\n2,6\n");
	const TimeSeries s = load_csv(path.string(), ColumnRef::by_index(0), 1.0);
	CHECK(s.values == std::vector<double>{1, 2});
	CHECK(s.variable_name == "resp,onse");

	const auto headerless = write_temp("ts_idx2.csv", "1,5\n2,6\n");
	const TimeSeries t = load_csv(headerless.string(), ColumnRef::by_index(1), 1.0);
	CHECK(t.values == std::vector<double>{5, 6});
}

TEST_CASE("ColumnRef::parse distinguishes names from indices") {
	CHECK(ColumnRef::parse("3").by_name == false);
	CHECK(ColumnRef::parse("3").index == 3);
	CHECK(ColumnRef::parse("swap").by_name == true);
	CHECK(ColumnRef::parse("swap").name == "swap");
}

TEST_CASE("csv write/load round-trips doubles bit-exactly") {
	TimeSeries s;
	s.variable_name = "resp";
	s.sample_interval = 1.0;
	SplitMix64 rng(99);
	for (int i = 0; i < 200; ++i) {
		const double mag = std::pow(10.0, rng.uniform_symmetric(300.0));
		s.values.push_back(rng.uniform_symmetric(1.0) * mag);
	}
	s.values.push_back(0.0);
	s.values.push_back(-0.0);
	s.values.push_back(1.7976931348623157e308);
	s.values.push_back(5e-324);

	const auto path = std::filesystem::temp_directory_path() / "ts_roundtrip.csv";
	save_csv(s, path.string());
	const TimeSeries back = load_csv(path.string(), ColumnRef::by_header("resp"), 1.0);
	REQUIRE(back.values.size() == s.values.size());
	for (std::size_t i = 0; i < s.values.size(); ++i) {
		CAPTURE(i, s.values[i]);
		CHECK(std::memcmp(&back.values[i], &s.values[i], sizeof(double)) == 0);
	}
}

TEST_CASE("TimeSeries invariants are enforced") {
	TimeSeries s;
	CHECK_THROWS_AS(s.validate(), std::invalid_argument);  // empty
	s.values = {1.0, std::numeric_limits<double>::quiet_NaN()};
	CHECK_THROWS_WITH(s.validate(), ContainsSubstring("non-finite"));
	s.values = {1.0};
	s.sample_interval = 0.0;
	CHECK_THROWS_WITH(s.validate(), ContainsSubstring("sample_interval"));
}

TEST_CASE("split honors the floor-boundary arithmetic") {
	TimeSeries s;
	s.sample_interval = 1.0;
	SECTION("N=10, (0.6, 0.2) gives 6/2/2") {
		for (int i = 0; i < 10; ++i)
			s.values.push_back(i);
		const auto [a, b, c] = split(s, SplitSpec{0.6, 0.2});
		CHECK(a.size() == 6);
		CHECK(b.size() == 2);
		CHECK(c.size() == 2);
		CHECK(a.start_index == 0);
		CHECK(b.start_index == 6);
		CHECK(c.start_index == 8);
	}
	SECTION("N=5000, (0.6, 0.2) gives 3000/1000/1000") {
		for (int i = 0; i < 5000; ++i)
			s.values.push_back(i);
		const auto [a, b, c] = split(s, SplitSpec{0.6, 0.2});
		CHECK(a.size() == 3000);
		CHECK(b.size() == 1000);
		CHECK(c.size() == 1000);
	}
	SECTION("N=3, (0.9, 0.09) leaves an empty segment") {
		s.values = {1, 2, 3};
		CHECK_THROWS_WITH(split(s, SplitSpec{0.9, 0.09}), ContainsSubstring("empty segment"));
	}
}

TEST_CASE("split segments concatenate back to the original series") {
	std::mt19937 gen(7);
	std::uniform_real_distribution<double> value(-100.0, 100.0);
	std::uniform_real_distribution<double> frac(0.05, 0.9);
	for (int trial = 0; trial < 200; ++trial) {
		TimeSeries s;
		s.sample_interval = 1.0;
		s.start_index = trial;
		const int n = 3 + static_cast<int>(gen() % 400);
		for (int i = 0; i < n; ++i)
			s.values.push_back(value(gen));
		const double tf = frac(gen);
		const double vf = frac(gen) * (1.0 - tf);
		if (vf <= 0.0 || tf + vf >= 1.0)
			continue;
		std::tuple<TimeSeries, TimeSeries, TimeSeries> parts;
		try {
			parts = split(s, SplitSpec{tf, vf});
		} catch (const std::invalid_argument&) {
			continue;  // fractions leave an empty segment at this length
		}
		const auto& [a, b, c] = parts;
		std::vector<double> joined = a.values;
		joined.insert(joined.end(), b.values.begin(), b.values.end());
		joined.insert(joined.end(), c.values.begin(), c.values.end());
		REQUIRE(joined == s.values);
		CHECK(a.start_index == s.start_index);
		CHECK(b.start_index == s.start_index + a.size());
		CHECK(c.start_index == s.start_index + a.size() + b.size());
	}
}

TEST_CASE("SplitSpec validates its fractions") {
	CHECK_THROWS_AS((SplitSpec{0.0, 0.5}.validate()), std::invalid_argument);
	CHECK_THROWS_AS((SplitSpec{0.5, 0.5}.validate()), std::invalid_argument);
	CHECK_THROWS_AS((SplitSpec{0.7, 0.4}.validate()), std::invalid_argument);
	CHECK_NOTHROW((SplitSpec{0.6, 0.2}.validate()));
}
