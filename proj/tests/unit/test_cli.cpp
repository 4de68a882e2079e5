#include "fixtures.hpp"

#include "ppo/cli.hpp"
#include "ppo/correction.hpp"
#include "ppo/format.hpp"
#include "ppo/metrics.hpp"
#include "ppo/schedule_io.hpp"
#include "ppo/scheduler.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <sstream>

using namespace ppo;
using namespace ppo::fixtures;
using Json = nlohmann::json;

namespace {

struct Run {
	int code;
	std::string out;
	std::string err;
};

Run run(const std::vector<std::string> &args) {
	std::ostringstream out;
	std::ostringstream err;
	const int code = run_cli(args, out, err);
	return {code, out.str(), err.str()};
}

std::vector<double> csv_values(const std::filesystem::path &path) {
	std::vector<double> out;
	for (const auto &row : read_timestamped_csv(path)) {
		out.push_back(row.value.value_or(NAN));
	}
	return out;
}

// Everything after the first comma on each line.
std::string value_column(const std::string &csv) {
	std::istringstream in(csv);
	std::string line;
	std::string out;
	while (std::getline(in, line)) {
		out += line.substr(line.find(',') + 1) + "\n";
	}
	return out;
}

struct Scenario {
	TempDir dir {"cli"};
	Calendar cal = Calendar::for_month("2020-11");
	NetLoadSeries actual;
	std::string instance = (dir / "example.ppoi").string();
	std::string prices = (dir / "prices.csv").string();
	std::string actual_csv = (dir / "actual.csv").string();
	std::string forecast_csv = (dir / "forecast.csv").string();

	Scenario() {
		std::mt19937_64 rng(41);
		actual = synthetic_load(rng, cal);
		write_file(instance, kExampleInstance);
		write_price_csv(prices, cal, synthetic_prices(rng, cal));
		write_month_csv(actual_csv, cal, actual.values);
		std::vector<double> forecast = actual.values;
		for (auto &v : forecast) {
			v *= 0.9;
		}
		write_month_csv(forecast_csv, cal, forecast);
	}
};

} // namespace

TEST_CASE("argument errors exit 2") {
	CHECK(run({}).code == kExitInput);
	CHECK(run({"bogus"}).code == kExitInput);
	CHECK(run({"parse"}).code == kExitInput);
	CHECK(run({"optimize", "--policy", "reckless"}).code == kExitInput);
	CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("parse reports counts and validation") {
	TempDir dir("parse");
	write_file(dir / "ok.ppoi", kExampleInstance);
	auto r = run({"parse", "--instance", (dir / "ok.ppoi").string()});
	REQUIRE(r.code == kExitOk);
	const auto j = Json::parse(r.out);
	CHECK(j["valid"] == true);
	CHECK(j["counts"]["buildings"] == 3);
	CHECK(j["counts"]["solar"] == 2);
	CHECK(j["counts"]["batteries"] == 1);
	CHECK(j["counts"]["recurring"] == 4);
	CHECK(j["counts"]["onceoff"] == 2);

	write_file(dir / "empty.ppoi", "");
	r = run({"parse", "--instance", (dir / "empty.ppoi").string()});
	CHECK(r.code == kExitInput);
	CHECK(r.err.find("missing header") != std::string::npos);

	write_file(dir / "cycle.ppoi", "ppoi 1 0 0 2 0\nb 0 1 0\nr 0 1 S 1 1 1 1\nr 1 1 S 1 1 1 0\n");
	r = run({"parse", "--instance", (dir / "cycle.ppoi").string()});
	CHECK(r.code == kExitDomain);
	CHECK(Json::parse(r.out)["violations"][0]["kind"] == "precedence_cycle");

	CHECK(run({"parse", "--instance", (dir / "absent.ppoi").string()}).code == kExitInput);
}

TEST_CASE("stats writes the net load") {
	TempDir dir("stats");
	const auto cal = Calendar::for_month("2020-11");
	std::mt19937_64 rng(3);
	const auto b = synthetic_load(rng, cal);
	const std::vector<double> s(static_cast<std::size_t>(cal.horizon()), 25.0);
	write_month_csv(dir / "b.csv", cal, b.values);
	write_month_csv(dir / "s.csv", cal, s);
	const auto r = run({"stats", "--month", "2020-11", "--buildings", (dir / "b.csv").string(), "--solars",
	                    (dir / "s.csv").string(), "-o", (dir / "net.csv").string()});
	REQUIRE(r.code == kExitOk);
	const auto j = Json::parse(r.out);
	CHECK(j["periods"] == 2880);
	CHECK(j["working_periods"] == 672);
	CHECK(j["buildings"][0]["missing"] == 0);
	const auto net = csv_values(dir / "net.csv");
	REQUIRE(net.size() == b.values.size());
	for (std::size_t t = 0; t < net.size(); ++t) {
		CHECK(net[t] == doctest::Approx(b.values[t] - 25.0).epsilon(1e-12));
	}
	CHECK(run({"stats", "--month", "2020-13"}).code == kExitInput);
}

TEST_CASE("metrics and perturb") {
	Scenario sc;
	auto r = run({"metrics", "--actual", sc.actual_csv, "--forecast", sc.actual_csv});
	REQUIRE(r.code == kExitOk);
	auto j = Json::parse(r.out);
	for (const auto &key : {"mae", "mean_under", "mean_over", "residual_mean", "residual_std", "residual_skewness",
	                        "residual_kurtosis"}) {
		CHECK(j[key].get<double>() == 0.0);
	}

	r = run({"metrics", "--actual", sc.actual_csv, "--forecast", sc.forecast_csv});
	REQUIRE(r.code == kExitOk);
	j = Json::parse(r.out);
	CHECK(j["mase"].is_null());
	CHECK(j["mean_over"].get<double>() == 0.0);
	CHECK(j["mae"].get<double>() == doctest::Approx(j["mean_under"].get<double>()));

	r = run({"metrics", "--actual", sc.actual_csv, "--forecast", sc.forecast_csv, "--train", sc.actual_csv,
	         "--season", "96"});
	REQUIRE(r.code == kExitOk);
	CHECK(Json::parse(r.out)["mase"].is_number());

	const auto perturbed = (sc.dir / "p.csv").string();
	r = run({"perturb", "--actual", sc.actual_csv, "--factor", "0.2", "-o", perturbed});
	REQUIRE(r.code == kExitOk);
	const auto p = csv_values(perturbed);
	for (std::size_t t = 0; t < p.size(); ++t) {
		CHECK(p[t] == doctest::Approx(1.2 * sc.actual.values[t]).epsilon(1e-12));
	}
	CHECK(run({"perturb", "--actual", sc.actual_csv, "--factor", "0.9"}).code == kExitInput);

	// mismatched horizons
	write_file(sc.dir / "short.csv", "timestamp,value\n2020-11-01 00:00,1\n");
	CHECK(run({"metrics", "--actual", sc.actual_csv, "--forecast", (sc.dir / "short.csv").string()}).code ==
	      kExitInput);
}

TEST_CASE("optimize then evaluate") {
	Scenario sc;
	auto optimize_into = [&](const std::string &name) {
		return run({"optimize", "--instance", sc.instance, "--month", "2020-11", "--forecast", sc.forecast_csv,
		            "--actual", sc.actual_csv, "--prices", sc.prices, "--policy", "liberal", "--warm-starts", "3",
		            "--iters", "150", "--seed", "7", "--out", (sc.dir / name).string()});
	};
	const auto first = optimize_into("a");
	REQUIRE(first.code == kExitOk);
	const auto second = optimize_into("b");
	REQUIRE(second.code == kExitOk);
	CHECK(first.out == second.out);
	CHECK(read_file(sc.dir / "a" / "schedule.json") == read_file(sc.dir / "b" / "schedule.json"));
	CHECK(read_file(sc.dir / "a" / "run_report.json") == read_file(sc.dir / "b" / "run_report.json"));

	const auto report = Json::parse(read_file(sc.dir / "a" / "run_report.json"));
	CHECK(report["policy"] == "liberal");
	CHECK(report["forecast_cost"].get<double>() <=
	      report["warm_start_costs"][report["best_warm_start"].get<int>()].get<double>() + 1e-9);
	CHECK(report["metrics"]["mean_over"].get<double>() == 0.0);

	const auto schedule = (sc.dir / "a" / "schedule.json").string();
	const auto eval = run({"evaluate", "--instance", sc.instance, "--month", "2020-11", "--schedule", schedule,
	                       "--actual", sc.actual_csv, "--prices", sc.prices, "--policy", "liberal"});
	REQUIRE(eval.code == kExitOk);
	const auto e = Json::parse(eval.out);
	CHECK(e["feasible"] == true);
	CHECK(e["cost"].get<double>() == doctest::Approx(report["actual_cost"].get<double>()).epsilon(1e-12));

	// an empty schedule places nothing
	write_file(sc.dir / "empty.json", "{\"placements\": [], \"battery_plan\": []}");
	const auto bad = run({"evaluate", "--instance", sc.instance, "--month", "2020-11", "--schedule",
	                      (sc.dir / "empty.json").string(), "--actual", sc.actual_csv, "--prices", sc.prices});
	CHECK(bad.code == kExitDomain);
	CHECK(Json::parse(bad.out)["feasible"] == false);

	CHECK(run({"optimize", "--instance", sc.instance, "--month", "2020-11", "--prices", sc.prices, "--out",
	           (sc.dir / "c").string()})
	          .code == kExitInput);
}

TEST_CASE("perturb, optimize and evaluate on the actuals") {
	Scenario sc;
	const auto forecast = (sc.dir / "plus20.csv").string();
	REQUIRE(run({"perturb", "--actual", sc.actual_csv, "--factor", "0.2", "-o", forecast}).code == kExitOk);
	const auto out = (sc.dir / "run").string();
	REQUIRE(run({"optimize", "--instance", sc.instance, "--month", "2020-11", "--forecast", forecast, "--prices",
	             sc.prices, "--policy", "forced-discharge", "--warm-starts", "2", "--iters", "100", "--out", out})
	            .code == kExitOk);
	const auto eval = run({"evaluate", "--instance", sc.instance, "--month", "2020-11", "--schedule",
	                       out + "/schedule.json", "--actual", sc.actual_csv, "--prices", sc.prices, "--policy",
	                       "forced-discharge"});
	REQUIRE(eval.code == kExitOk);
	const auto j = Json::parse(eval.out);
	CHECK(j["feasible"] == true);
	CHECK(j["cost"].get<double>() > 0.0);
	// no actuals given, so the run report carries no realised cost
	CHECK_FALSE(Json::parse(read_file(out + "/run_report.json")).contains("actual_cost"));
}

TEST_CASE("run manifests feed optimize and evaluate") {
	Scenario sc;
	const Json manifest {{"instance", "example.ppoi"},   {"month", "2020-11"},       {"forecast", "forecast.csv"},
	                     {"prices", "prices.csv"},       {"actual", "actual.csv"},   {"policy", "very-liberal"},
	                     {"warm_starts", 2},             {"iterations", 80},         {"seed", 3},
	                     {"out", "from_manifest"}};
	write_file(sc.dir / "run.json", manifest.dump(2));
	const auto m = (sc.dir / "run.json").string();
	auto r = run({"optimize", "--manifest", m});
	REQUIRE(r.code == kExitOk);
	auto report = Json::parse(r.out);
	CHECK(report["policy"] == "very-liberal");
	CHECK(report["seed"] == 3);
	CHECK(report["iterations"] == 80);

	// flags win over manifest entries
	r = run({"optimize", "--manifest", m, "--seed", "4", "--policy", "liberal", "--out", (sc.dir / "flags").string()});
	REQUIRE(r.code == kExitOk);
	report = Json::parse(r.out);
	CHECK(report["policy"] == "liberal");
	CHECK(report["seed"] == 4);
	CHECK(std::filesystem::exists(sc.dir / "flags" / "schedule.json"));

	const auto eval = run({"evaluate", "--manifest", m, "--schedule", (sc.dir / "from_manifest" / "schedule.json").string()});
	REQUIRE(eval.code == kExitOk);
	CHECK(Json::parse(eval.out)["cost"].get<double>() ==
	      doctest::Approx(Json::parse(read_file(sc.dir / "from_manifest" / "run_report.json"))["actual_cost"].get<double>())
	          .epsilon(1e-12));

	write_file(sc.dir / "partial.json", Json {{"month", "2020-11"}}.dump());
	r = run({"optimize", "--manifest", (sc.dir / "partial.json").string()});
	CHECK(r.code == kExitInput);
	CHECK(r.err.find("--instance") != std::string::npos);
	write_file(sc.dir / "typed.json", Json {{"instance", "example.ppoi"}, {"seed", "x"}}.dump());
	CHECK(run({"optimize", "--manifest", (sc.dir / "typed.json").string()}).code == kExitInput);
}

TEST_CASE("fit-correction recovers planted parameters") {
	TempDir dir("fit");
	std::mt19937_64 rng(5);
	const auto cal = Calendar::for_month("2021-02");
	const auto actual = synthetic_load(rng, cal).values;
	write_month_csv(dir / "actual.csv", cal, actual);
	const auto z = Standardizer::of(actual);
	const CostModelParams planted {1.0, 0.5};
	Json runs = Json::array();
	std::normal_distribution<double> noise(0.0, 25.0);
	for (int k = 0; k < 12; ++k) {
		const double factor = -0.3 + 0.05 * k;
		std::vector<double> f(actual.size());
		for (std::size_t t = 0; t < f.size(); ++t) {
			f[t] = actual[t] * (1.0 + factor) + noise(rng);
		}
		const auto name = "f" + std::to_string(k) + ".csv";
		write_month_csv(dir / name, cal, f);
		runs.push_back({{"forecast_csv", name}, {"cost", v_cost(z.apply(actual), z.apply(f), planted)}});
	}
	write_file(dir / "manifest.json", Json {{"actual_csv", "actual.csv"}, {"month", "2021-02"}, {"runs", runs}}.dump());
	const auto r = run({"fit-correction", "--manifest", (dir / "manifest.json").string(), "-o",
	                    (dir / "params.json").string()});
	REQUIRE(r.code == kExitOk);
	const auto j = Json::parse(r.out);
	CHECK(std::abs(j["gamma"].get<double>() - 1.0) <= 0.1);
	CHECK(std::abs(j["epsilon"].get<double>() - 0.5) <= 0.1);
	CHECK(j["correlation"].get<double>() >= 0.99);
	CHECK(j.contains("alpha"));
	CHECK(j.contains("beta"));
	CHECK(read_file(dir / "params.json") == r.out);

	write_file(dir / "broken.json", "{\"runs\": 3}");
	CHECK(run({"fit-correction", "--manifest", (dir / "broken.json").string()}).code == kExitInput);
	write_file(dir / "few.json", Json {{"actual_csv", "actual.csv"}, {"runs", Json::array()}}.dump());
	CHECK(run({"fit-correction", "--manifest", (dir / "few.json").string()}).code == kExitInput);
}

TEST_CASE("correct applies alpha and beta") {
	Scenario sc;
	write_file(sc.dir / "identity.json", "{\"alpha\": 1, \"beta\": 0}");
	auto r = run({"correct", "--forecast", sc.forecast_csv, "--params", (sc.dir / "identity.json").string()});
	REQUIRE(r.code == kExitOk);
	CHECK(value_column(r.out) == value_column(read_file(sc.forecast_csv)));

	write_file(sc.dir / "shift.json", "{\"alpha\": 2, \"beta\": -1.5}");
	const auto out = (sc.dir / "corrected.csv").string();
	r = run({"correct", "--forecast", sc.forecast_csv, "--params", (sc.dir / "shift.json").string(), "-o", out});
	REQUIRE(r.code == kExitOk);
	const auto before = csv_values(sc.forecast_csv);
	const auto after = csv_values(out);
	REQUIRE(after.size() == before.size());
	for (std::size_t t = 0; t < after.size(); ++t) {
		CHECK(after[t] == -1.5 + 2.0 * before[t]);
	}
	write_file(sc.dir / "bad.json", "{\"alpha\": \"x\"}");
	CHECK(run({"correct", "--forecast", sc.forecast_csv, "--params", (sc.dir / "bad.json").string()}).code ==
	      kExitInput);
}

TEST_CASE("report correlates metrics with cost") {
	TempDir dir("report");
	for (int k = 0; k < 6; ++k) {
		const double mae_v = 10.0 + 3.0 * k;
		const Json rep {{"actual_cost", 500.0 + 7.0 * mae_v + 0.01 * k * k},
		                {"metrics",
		                 {{"mase", nullptr},
		                  {"mae", mae_v},
		                  {"mean_under", mae_v},
		                  {"mean_over", 0.0}}}};
		write_file(dir / ("run" + std::to_string(k)) / "run_report.json", rep.dump(2));
	}
	write_file(dir / "notes" / "readme.txt", "not a run");
	const auto r = run({"report", "--runs", dir.path().string()});
	REQUIRE(r.code == kExitOk);
	const auto j = Json::parse(r.out);
	CHECK(j["runs"] == 6);
	CHECK(j["correlation_with_cost"]["mae"].get<double>() > 0.99);
	CHECK(j["correlation_with_cost"]["mase"].is_null());
	CHECK(j["correlation_with_cost"]["mean_over"].is_null());
	const auto csv = read_file(dir / "report.csv");
	CHECK(csv.rfind("run,cost,mase,mae,mean_under,mean_over\nrun0,", 0) == 0);
	CHECK(Json::parse(read_file(dir / "correlations.json")) == j);

	// the correlations are pearson over the emitted table
	std::istringstream table(csv);
	std::string line;
	std::getline(table, line);
	std::vector<double> cost_col;
	std::vector<double> mae_col;
	while (std::getline(table, line)) {
		std::vector<std::string> cells;
		std::stringstream fields(line);
		for (std::string cell; std::getline(fields, cell, ',');) {
			cells.push_back(cell);
		}
		cost_col.push_back(*parse_double(cells[1]));
		mae_col.push_back(*parse_double(cells[3]));
	}
	CHECK(pearson(mae_col, cost_col) == j["correlation_with_cost"]["mae"].get<double>());

	TempDir lonely("report_few");
	write_file(lonely / "a" / "run_report.json", "{\"actual_cost\": 1, \"metrics\": {\"mae\": 1}}");
	CHECK(run({"report", "--runs", lonely.path().string()}).code == kExitInput);
}
