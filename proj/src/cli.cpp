#include "ppo/cli.hpp"

#include "ppo/correction.hpp"
#include "ppo/error.hpp"
#include "ppo/format.hpp"
#include "ppo/instance.hpp"
#include "ppo/metrics.hpp"
#include "ppo/schedule_io.hpp"
#include "ppo/scheduler.hpp"
#include "ppo/series.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace ppo {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string read_text(const fs::path &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw InputError("cannot open " + path.string());
	}
	std::ostringstream buf;
	buf << in.rdbuf();
	return buf.str();
}

void write_text(const fs::path &path, const std::string &text) {
	if (path.has_parent_path()) {
		fs::create_directories(path.parent_path());
	}
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw InputError("cannot write " + path.string());
	}
	out << text;
}

// Optional doubles become null, everything else keeps nlohmann's shortest round-trip text.
Json number_or_null(const std::optional<double> &v) {
	return v ? Json(*v) : Json(nullptr);
}

Json stats_json(const DescriptiveStats &s) {
	return Json {{"count", s.count}, {"mean", s.mean}, {"std", s.std},
	             {"iqr", s.iqr},     {"min", s.min},   {"max", s.max}};
}

Json report_json(const ErrorReport &r) {
	return Json {{"mase", number_or_null(r.mase)},
	             {"mae", r.mae},
	             {"mean_under", r.mean_under},
	             {"mean_over", r.mean_over},
	             {"residual_mean", r.residual_mean},
	             {"residual_std", r.residual_std},
	             {"residual_skewness", r.residual_skewness},
	             {"residual_kurtosis", r.residual_kurtosis}};
}

Json violations_json(const std::vector<Violation> &violations) {
	Json out = Json::array();
	for (const auto &v : violations) {
		out.push_back(Json {{"kind", v.kind}, {"message", v.message}});
	}
	return out;
}

// Every period of the month must be present.
std::vector<double> complete_series(const fs::path &path, const Calendar &calendar) {
	const auto raw = load_series_csv(path, calendar);
	std::vector<double> out(raw.size());
	for (std::size_t t = 0; t < raw.size(); ++t) {
		if (!raw.values[t]) {
			throw InputError(path.string() + ": no value for period " + std::to_string(t) + " of " +
			                 std::to_string(raw.size()));
		}
		out[t] = *raw.values[t];
	}
	return out;
}

// Rows of a timestamped CSV with every value present.
struct PlainSeries {
	std::vector<CsvRow> rows;
	std::vector<double> values;
};

PlainSeries plain_series(const fs::path &path, bool zero_fill = false) {
	PlainSeries out;
	out.rows = read_timestamped_csv(path);
	for (const auto &row : out.rows) {
		if (!row.value && !zero_fill) {
			throw InputError(path.string() + ":" + std::to_string(row.line) + ": missing value");
		}
		out.values.push_back(row.value.value_or(0.0));
	}
	if (out.values.empty()) {
		throw InputError(path.string() + ": no data rows");
	}
	return out;
}

void require_same_timestamps(const PlainSeries &a, const PlainSeries &b, const std::string &what) {
	bool same = a.rows.size() == b.rows.size();
	for (std::size_t i = 0; same && i < a.rows.size(); ++i) {
		same = format_timestamp(a.rows[i].timestamp) == format_timestamp(b.rows[i].timestamp);
	}
	if (!same) {
		throw InputError(what + ": series do not cover the same timestamps");
	}
}

void write_rows_csv(std::ostream &out, const std::vector<CsvRow> &rows, const std::vector<double> &values) {
	out << "timestamp,value\n";
	for (std::size_t i = 0; i < rows.size(); ++i) {
		out << format_timestamp(rows[i].timestamp) << ',';
		if (rows[i].value) {
			out << format_number(values[i]);
		}
		out << '\n';
	}
}

BatteryPolicy policy_from(const std::string &name) {
	const auto p = parse_policy(name);
	if (!p) {
		throw InputError("unknown policy '" + name + "'");
	}
	return *p;
}

Instance load_instance(const fs::path &path) {
	const auto inst = parse_instance(read_text(path));
	return inst;
}

NetLoadSeries net_from_components(const std::vector<std::string> &buildings, const std::vector<std::string> &solars,
                                  const Calendar &calendar) {
	std::vector<RawSeries> b;
	std::vector<RawSeries> s;
	for (const auto &p : buildings) {
		b.push_back(load_series_csv(p, calendar));
	}
	for (const auto &p : solars) {
		s.push_back(load_series_csv(p, calendar));
	}
	return net_load(b, s, calendar);
}

struct Options {
	std::string instance;
	std::vector<std::string> buildings;
	std::vector<std::string> solars;
	std::string prices;
	std::string actual;
	std::string forecast;
	std::string train;
	std::string policy = "no-forced-discharge";
	int warm_starts = 46;
	std::uint64_t seed = 0;
	int iters = 4000;
	double time_limit = 0.0;
	std::string out_dir;
	std::string month;
	std::string manifest;
	std::string output;
	double factor = 0.0;
	double factor_limit = 0.5;
	std::size_t season = kDefaultSeason;
	std::string params;
	std::string schedule;
	std::string runs;
};

Json read_json(const std::string &path) {
	try {
		return Json::parse(read_text(path));
	} catch (const Json::parse_error &e) {
		throw InputError(path + ": " + e.what());
	}
}

// Fills options a run manifest provides and the command line left unset. Paths in the manifest
// are relative to its own directory.
void apply_run_manifest(Options &o, const CLI::App &cmd) {
	if (o.manifest.empty()) {
		return;
	}
	const auto m = read_json(o.manifest);
	if (!m.is_object()) {
		throw InputError(o.manifest + ": run manifest must be a JSON object");
	}
	const auto base = fs::path(o.manifest).parent_path();
	auto given = [&](const char *flag) {
		const auto *opt = cmd.get_option_no_throw(flag);
		return opt && opt->count() > 0;
	};
	auto path_of = [&](const Json &v, const char *key) {
		if (!v.is_string()) {
			throw InputError(o.manifest + ": '" + key + "' must be a path string");
		}
		const fs::path p(v.get<std::string>());
		return (p.is_absolute() ? p : base / p).string();
	};
	auto path = [&](const char *key, const char *flag, std::string &dest) {
		if (m.contains(key) && !given(flag)) {
			dest = path_of(m[key], key);
		}
	};
	auto paths = [&](const char *key, const char *flag, std::vector<std::string> &dest) {
		if (m.contains(key) && !given(flag)) {
			if (!m[key].is_array()) {
				throw InputError(o.manifest + ": '" + key + "' must be an array of paths");
			}
			dest.clear();
			for (const auto &v : m[key]) {
				dest.push_back(path_of(v, key));
			}
		}
	};
	auto value = [&](const char *key, const char *flag, auto &dest) {
		if (m.contains(key) && !given(flag)) {
			try {
				dest = m[key].get<std::remove_reference_t<decltype(dest)>>();
			} catch (const Json::exception &) {
				throw InputError(o.manifest + ": '" + key + "' has the wrong type");
			}
		}
	};
	path("instance", "--instance", o.instance);
	paths("buildings", "--buildings", o.buildings);
	paths("solars", "--solars", o.solars);
	path("forecast", "--forecast", o.forecast);
	path("prices", "--prices", o.prices);
	path("actual", "--actual", o.actual);
	path("train", "--train", o.train);
	path("schedule", "--schedule", o.schedule);
	path("out", "--out", o.out_dir);
	value("month", "--month", o.month);
	value("policy", "--policy", o.policy);
	value("warm_starts", "--warm-starts", o.warm_starts);
	value("iterations", "--iters", o.iters);
	value("seed", "--seed", o.seed);
	value("season", "--season", o.season);
}

void require(const std::string &v, const char *what) {
	if (v.empty()) {
		throw InputError(std::string("missing ") + what + " (flag or run manifest)");
	}
}

void emit(std::ostream &out, const Json &j) {
	out << j.dump(2) << '\n';
}

int cmd_parse(const Options &o, std::ostream &out) {
	const auto inst = load_instance(o.instance);
	const auto violations = validate_instance(inst);
	emit(out, Json {{"valid", violations.empty()},
	                {"counts",
	                 {{"buildings", inst.num_buildings()},
	                  {"solar", inst.num_solar()},
	                  {"batteries", inst.num_batteries()},
	                  {"recurring", inst.num_recurring()},
	                  {"onceoff", inst.num_onceoff()}}},
	                {"violations", violations_json(violations)}});
	return violations.empty() ? kExitOk : kExitDomain;
}

int cmd_stats(const Options &o, std::ostream &out) {
	const auto cal = Calendar::for_month(o.month);
	Json j;
	auto describe = [&](const std::vector<std::string> &paths) {
		Json arr = Json::array();
		for (const auto &p : paths) {
			const auto s = load_series_csv(p, cal);
			Json entry {{"file", fs::path(p).filename().string()}, {"missing", s.missing()}};
			entry["stats"] = s.missing() == s.size() ? Json(nullptr) : stats_json(descriptive_stats(s));
			arr.push_back(entry);
		}
		return arr;
	};
	j["month"] = o.month;
	j["periods"] = cal.horizon();
	j["working_periods"] = working_periods(cal).size();
	j["buildings"] = describe(o.buildings);
	j["solars"] = describe(o.solars);
	if (!o.buildings.empty() || !o.solars.empty()) {
		const auto net = net_from_components(o.buildings, o.solars, cal);
		j["net_load"] = stats_json(descriptive_stats(net.values));
		if (!o.output.empty()) {
			std::ostringstream csv;
			write_series_csv(csv, cal, std::span<const double>(net.values), "net_load");
			write_text(o.output, csv.str());
		}
	}
	if (!o.prices.empty()) {
		j["prices"] = stats_json(descriptive_stats(load_price_csv(o.prices, cal)));
	}
	emit(out, j);
	return kExitOk;
}

ErrorReport metrics_for(const PlainSeries &actual, const PlainSeries &forecast, const std::string &train,
                        std::size_t season) {
	require_same_timestamps(actual, forecast, "metrics");
	if (train.empty()) {
		return error_report(actual.values, forecast.values);
	}
	const auto t = plain_series(train, true);
	return error_report(actual.values, forecast.values, t.values, season);
}

int cmd_metrics(const Options &o, std::ostream &out) {
	const auto actual = plain_series(o.actual);
	const auto forecast = plain_series(o.forecast);
	emit(out, report_json(metrics_for(actual, forecast, o.train, o.season)));
	return kExitOk;
}

int cmd_perturb(const Options &o, std::ostream &out) {
	const auto spec = PerturbationSpec::make(o.factor, o.factor_limit);
	const auto actual = plain_series(o.actual, true);
	const auto values = perturb(actual.values, spec);
	std::ostringstream csv;
	write_rows_csv(csv, actual.rows, values);
	if (o.output.empty()) {
		out << csv.str();
	} else {
		write_text(o.output, csv.str());
	}
	return kExitOk;
}

NetLoadSeries forecast_input(const Options &o, const Calendar &cal) {
	if (!o.forecast.empty()) {
		if (!o.buildings.empty() || !o.solars.empty()) {
			throw InputError("give either --forecast or --buildings/--solars, not both");
		}
		return NetLoadSeries {complete_series(o.forecast, cal)};
	}
	if (o.buildings.empty()) {
		throw InputError("a net load forecast needs --forecast or --buildings");
	}
	return net_from_components(o.buildings, o.solars, cal);
}

int cmd_optimize(const Options &o, std::ostream &out) {
	require(o.instance, "--instance");
	require(o.month, "--month");
	require(o.prices, "--prices");
	require(o.out_dir, "--out");
	const auto inst = load_instance(o.instance);
	const auto cal = Calendar::for_month(o.month);
	const auto forecast = forecast_input(o, cal);
	const auto prices = expand_prices(load_price_csv(o.prices, cal), cal);
	const auto policy = policy_from(o.policy);

	OptimizerConfig config;
	config.num_warm_starts = o.warm_starts;
	config.local_search_iterations = o.iters;
	config.seed = o.seed;
	if (o.time_limit > 0.0) {
		config.time_limit_seconds = o.time_limit;
	}
	const auto result = optimize(inst, cal, forecast, prices, policy, config);

	Json report;
	report["policy"] = policy_name(policy);
	report["seed"] = o.seed;
	report["month"] = o.month;
	report["warm_starts"] = o.warm_starts;
	report["iterations"] = result.iterations;
	report["accepted_moves"] = result.accepted_moves;
	report["warm_start_costs"] = result.warm_start_costs;
	report["best_warm_start"] = result.best_warm_start;
	report["forecast_cost"] = result.cost;
	if (!o.actual.empty()) {
		const NetLoadSeries actual {complete_series(o.actual, cal)};
		report["actual_cost"] = evaluate_against_actual(result.schedule, actual, prices, inst, cal);
		std::optional<std::vector<double>> train;
		ErrorReport metrics;
		if (!o.train.empty()) {
			const auto t = plain_series(o.train, true);
			metrics = error_report(actual.values, forecast.values, t.values, o.season);
		} else {
			metrics = error_report(actual.values, forecast.values);
		}
		report["metrics"] = report_json(metrics);
	}
	const fs::path dir(o.out_dir);
	fs::create_directories(dir);
	write_schedule(dir / "schedule.json", result.schedule);
	write_text(dir / "run_report.json", report.dump(2) + "\n");
	emit(out, report);
	return kExitOk;
}

int cmd_evaluate(const Options &o, std::ostream &out) {
	require(o.instance, "--instance");
	require(o.month, "--month");
	require(o.prices, "--prices");
	require(o.schedule, "--schedule");
	const auto inst = load_instance(o.instance);
	const auto cal = Calendar::for_month(o.month);
	const auto schedule = read_schedule(o.schedule);
	const NetLoadSeries actual {o.actual.empty() ? forecast_input(o, cal).values : complete_series(o.actual, cal)};
	const auto prices = expand_prices(load_price_csv(o.prices, cal), cal);
	std::optional<BatteryPolicy> policy;
	if (!o.policy.empty()) {
		policy = policy_from(o.policy);
	}
	const auto violations = check_feasibility(inst, cal, schedule, policy);
	if (!violations.empty()) {
		emit(out, Json {{"feasible", false}, {"violations", violations_json(violations)}});
		return kExitDomain;
	}
	const auto profile = load_profile(actual, inst, cal, schedule);
	emit(out, Json {{"feasible", true},
	                {"cost", objective(profile.total, prices.values)},
	                {"energy_cost", energy_cost(profile.total, prices.values)},
	                {"peak_kw", *std::max_element(profile.total.begin(), profile.total.end())}});
	return kExitOk;
}

int cmd_fit_correction(const Options &o, std::ostream &out) {
	const fs::path manifest_path(o.manifest);
	Json m = read_json(o.manifest);
	const auto base = manifest_path.parent_path();
	auto resolve = [&](const Json &v, const char *what) {
		if (!v.is_string()) {
			throw InputError(o.manifest + ": " + what + " must be a path string");
		}
		const fs::path p(v.get<std::string>());
		return p.is_absolute() ? p : base / p;
	};
	if (!m.is_object() || !m.contains("actual_csv") || !m.contains("runs") || !m["runs"].is_array()) {
		throw InputError(o.manifest + ": expected {\"actual_csv\": ..., \"runs\": [{\"forecast_csv\": ..., \"cost\": ...}]}");
	}
	const auto actual = plain_series(resolve(m["actual_csv"], "actual_csv"));
	std::vector<ForecastOutcome> outcomes;
	for (const auto &run : m["runs"]) {
		if (!run.is_object() || !run.contains("forecast_csv") || !run.contains("cost") || !run["cost"].is_number()) {
			throw InputError(o.manifest + ": each run needs forecast_csv and a numeric cost");
		}
		const auto forecast = plain_series(resolve(run["forecast_csv"], "forecast_csv"));
		require_same_timestamps(actual, forecast, "fit-correction");
		outcomes.push_back({actual.values, forecast.values, run["cost"].get<double>()});
	}
	const auto fit = fit_gamma_epsilon(outcomes);

	// The correction is fitted on all forecasts pooled, in the standardised units the parameters
	// were chosen in, then mapped back to kW.
	const auto z = Standardizer::of(actual.values);
	std::vector<double> ya;
	std::vector<double> yp;
	for (const auto &oc : outcomes) {
		const auto a = z.apply(oc.actual);
		const auto p = z.apply(oc.predicted);
		ya.insert(ya.end(), a.begin(), a.end());
		yp.insert(yp.end(), p.begin(), p.end());
	}
	Json j {{"gamma", fit.params.gamma}, {"epsilon", fit.params.epsilon}, {"correlation", fit.correlation}};
	try {
		const auto c = linear_correction(ya, yp, fit.params);
		j["alpha"] = c.alpha;
		j["beta"] = z.scale * c.beta + z.mean * (1.0 - c.alpha);
	} catch (const DomainError &e) {
		j["alpha"] = nullptr;
		j["beta"] = nullptr;
		j["correction_error"] = e.what();
	}
	const auto text = j.dump(2) + "\n";
	if (!o.output.empty()) {
		write_text(o.output, text);
	}
	out << text;
	return kExitOk;
}

int cmd_correct(const Options &o, std::ostream &out) {
	const Json p = read_json(o.params);
	if (!p.is_object() || !p.contains("alpha") || !p.contains("beta") || !p["alpha"].is_number() ||
	    !p["beta"].is_number()) {
		throw InputError(o.params + ": needs numeric alpha and beta");
	}
	const LinearCorrection c {p["alpha"].get<double>(), p["beta"].get<double>()};
	const auto forecast = plain_series(o.forecast, true);
	const auto values = apply_correction(forecast.values, c);
	std::ostringstream csv;
	write_rows_csv(csv, forecast.rows, values);
	if (o.output.empty()) {
		out << csv.str();
	} else {
		write_text(o.output, csv.str());
	}
	return kExitOk;
}

int cmd_report(const Options &o, std::ostream &out) {
	const fs::path root(o.runs);
	if (!fs::is_directory(root)) {
		throw InputError(o.runs + " is not a directory");
	}
	std::vector<fs::path> dirs;
	for (const auto &entry : fs::directory_iterator(root)) {
		if (entry.is_directory() && fs::exists(entry.path() / "run_report.json")) {
			dirs.push_back(entry.path());
		}
	}
	std::sort(dirs.begin(), dirs.end());

	const std::vector<std::string> metric_names {"mase", "mae", "mean_under", "mean_over"};
	std::vector<std::string> names;
	std::vector<double> costs;
	std::vector<std::vector<std::optional<double>>> columns(metric_names.size());
	for (const auto &d : dirs) {
		const Json r = read_json((d / "run_report.json").string());
		if (!r.contains("actual_cost") || !r.contains("metrics")) {
			continue; // optimised without actuals, nothing to correlate
		}
		names.push_back(d.filename().string());
		costs.push_back(r["actual_cost"].get<double>());
		for (std::size_t k = 0; k < metric_names.size(); ++k) {
			const auto &v = r["metrics"][metric_names[k]];
			columns[k].push_back(v.is_number() ? std::optional<double>(v.get<double>()) : std::nullopt);
		}
	}
	if (names.size() < 3) {
		throw InputError("report needs at least three runs with actual costs, found " + std::to_string(names.size()));
	}

	std::ostringstream csv;
	csv << "run,cost";
	for (const auto &n : metric_names) {
		csv << ',' << n;
	}
	csv << '\n';
	for (std::size_t i = 0; i < names.size(); ++i) {
		csv << names[i] << ',' << format_number(costs[i]);
		for (const auto &col : columns) {
			csv << ',';
			if (col[i]) {
				csv << format_number(*col[i]);
			}
		}
		csv << '\n';
	}

	Json corr;
	for (std::size_t k = 0; k < metric_names.size(); ++k) {
		const auto &col = columns[k];
		const bool complete = std::all_of(col.begin(), col.end(), [](const auto &v) { return v.has_value(); });
		std::optional<double> r;
		if (complete) {
			std::vector<double> x;
			for (const auto &v : col) {
				x.push_back(*v);
			}
			try {
				r = pearson(x, costs);
			} catch (const DomainError &) {
			}
		}
		corr[metric_names[k]] = number_or_null(r);
	}
	Json j {{"runs", names.size()}, {"correlation_with_cost", corr}};
	const fs::path dest = o.out_dir.empty() ? root : fs::path(o.out_dir);
	write_text(dest / "report.csv", csv.str());
	write_text(dest / "correlations.json", j.dump(2) + "\n");
	emit(out, j);
	return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
	CLI::App app {"Predict-and-optimise energy scheduling toolkit", "ppo"};
	app.require_subcommand(1);
	Options o;

	auto *parse = app.add_subcommand("parse", "Parse and validate an instance file");
	parse->add_option("--instance", o.instance, "Instance file")->required();

	auto *stats = app.add_subcommand("stats", "Descriptive statistics of building, solar and price series");
	stats->add_option("--month", o.month, "Month as YYYY-MM")->required();
	stats->add_option("--buildings", o.buildings, "Building demand CSVs");
	stats->add_option("--solars", o.solars, "Solar generation CSVs");
	stats->add_option("--prices", o.prices, "Half-hourly price CSV");
	stats->add_option("-o,--output", o.output, "Write the net load CSV here");

	auto *metrics = app.add_subcommand("metrics", "Forecast error report");
	metrics->add_option("--actual", o.actual, "Actual series CSV")->required();
	metrics->add_option("--forecast", o.forecast, "Forecast series CSV")->required();
	metrics->add_option("--train", o.train, "Training series CSV for MASE");
	metrics->add_option("--season", o.season, "MASE seasonal lag in periods")->capture_default_str();

	auto *perturb_cmd = app.add_subcommand("perturb", "Scale a series by (1 + factor)");
	perturb_cmd->add_option("--actual", o.actual, "Series CSV")->required();
	perturb_cmd->add_option("--factor", o.factor, "Proportional error, e.g. 0.2 or -0.3")->required();
	perturb_cmd->add_option("--limit", o.factor_limit, "Largest accepted |factor|")->capture_default_str();
	perturb_cmd->add_option("-o,--output", o.output, "Output CSV (default stdout)");

	auto add_scenario = [&](CLI::App *cmd) {
		cmd->add_option("--manifest", o.manifest, "Run manifest JSON; flags override its entries");
		cmd->add_option("--instance", o.instance, "Instance file");
		cmd->add_option("--month", o.month, "Month as YYYY-MM");
		cmd->add_option("--prices", o.prices, "Half-hourly price CSV");
		cmd->add_option("--buildings", o.buildings, "Building demand CSVs (forecast)");
		cmd->add_option("--solars", o.solars, "Solar generation CSVs (forecast)");
		cmd->add_option("--forecast", o.forecast, "Net load forecast CSV");
		cmd->add_option("--actual", o.actual, "Actual net load CSV");
	};

	auto *optimize_cmd = app.add_subcommand("optimize", "Schedule activities and batteries against a forecast");
	add_scenario(optimize_cmd);
	optimize_cmd->add_option("--policy", o.policy, "Battery policy")
	    ->check(CLI::IsMember({"conservative", "forced-discharge", "no-forced-discharge", "liberal", "very-liberal"}))
	    ->capture_default_str();
	optimize_cmd->add_option("--warm-starts", o.warm_starts, "Number of warm starts")->capture_default_str();
	optimize_cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
	optimize_cmd->add_option("--iters", o.iters, "Local search iterations")->capture_default_str();
	optimize_cmd->add_option("--time-limit", o.time_limit, "Wall-clock cap in seconds (breaks reproducibility)");
	optimize_cmd->add_option("--train", o.train, "Training series CSV for MASE in the run report");
	optimize_cmd->add_option("--season", o.season, "MASE seasonal lag in periods")->capture_default_str();
	optimize_cmd->add_option("--out", o.out_dir, "Output directory");

	auto *evaluate = app.add_subcommand("evaluate", "Cost of a schedule against a net load");
	add_scenario(evaluate);
	evaluate->add_option("--schedule", o.schedule, "Schedule JSON");
	std::string evaluate_policy;
	evaluate->add_option("--policy", evaluate_policy, "Also check this battery policy")
	    ->check(CLI::IsMember({"conservative", "forced-discharge", "no-forced-discharge", "liberal", "very-liberal"}));

	auto *fit = app.add_subcommand("fit-correction", "Fit the asymmetric cost model and a linear correction");
	fit->add_option("--manifest", o.manifest, "JSON manifest of forecasts and realised costs")->required();
	fit->add_option("-o,--output", o.output, "Also write the parameters here");

	auto *correct = app.add_subcommand("correct", "Apply a linear correction to a forecast");
	correct->add_option("--forecast", o.forecast, "Forecast CSV")->required();
	correct->add_option("--params", o.params, "JSON with alpha and beta")->required();
	correct->add_option("-o,--output", o.output, "Output CSV (default stdout)");

	auto *report = app.add_subcommand("report", "Correlate run costs with forecast error metrics");
	report->add_option("--runs", o.runs, "Directory whose subdirectories hold run_report.json")->required();
	report->add_option("--out", o.out_dir, "Output directory (default: the runs directory)");

	std::vector<std::string> reversed(args.rbegin(), args.rend());
	try {
		app.parse(reversed);
	} catch (const CLI::CallForHelp &) {
		out << app.help();
		return kExitOk;
	} catch (const CLI::CallForAllHelp &) {
		out << app.help("", CLI::AppFormatMode::All);
		return kExitOk;
	} catch (const CLI::ParseError &e) {
		err << "error: " << e.what() << '\n';
		return kExitInput;
	}

	try {
		if (*parse) {
			return cmd_parse(o, out);
		}
		if (*stats) {
			return cmd_stats(o, out);
		}
		if (*metrics) {
			return cmd_metrics(o, out);
		}
		if (*perturb_cmd) {
			return cmd_perturb(o, out);
		}
		if (*optimize_cmd) {
			apply_run_manifest(o, *optimize_cmd);
			return cmd_optimize(o, out);
		}
		if (*evaluate) {
			// evaluate checks a policy only when one is asked for
			o.policy = evaluate_policy;
			apply_run_manifest(o, *evaluate);
			return cmd_evaluate(o, out);
		}
		if (*fit) {
			return cmd_fit_correction(o, out);
		}
		if (*correct) {
			return cmd_correct(o, out);
		}
		if (*report) {
			return cmd_report(o, out);
		}
	} catch (const DomainError &e) {
		err << "error: " << e.what() << '\n';
		return kExitDomain;
	} catch (const InputError &e) {
		err << "error: " << e.what() << '\n';
		return kExitInput;
	} catch (const fs::filesystem_error &e) {
		err << "error: " << e.what() << '\n';
		return kExitInput;
	}
	return kExitInput;
}

} // namespace ppo
