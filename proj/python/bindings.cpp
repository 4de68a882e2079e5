#include "ppo/cli.hpp"
#include "ppo/correction.hpp"
#include "ppo/error.hpp"
#include "ppo/instance.hpp"
#include "ppo/metrics.hpp"
#include "ppo/schedule_io.hpp"
#include "ppo/scheduler.hpp"
#include "ppo/series.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ppo;

namespace {

BatteryPolicy policy_arg(const std::string &name) {
	const auto p = parse_policy(name);
	if (!p) {
		throw InputError("unknown policy '" + name + "'");
	}
	return *p;
}

std::vector<std::pair<std::string, std::string>> violation_pairs(const std::vector<Violation> &vs) {
	std::vector<std::pair<std::string, std::string>> out;
	for (const auto &v : vs) {
		out.emplace_back(v.kind, v.message);
	}
	return out;
}

py::dict report_dict(const ErrorReport &r) {
	py::dict d;
	d["mase"] = r.mase ? py::cast(*r.mase) : py::none();
	d["mae"] = r.mae;
	d["mean_under"] = r.mean_under;
	d["mean_over"] = r.mean_over;
	d["residual_mean"] = r.residual_mean;
	d["residual_std"] = r.residual_std;
	d["residual_skewness"] = r.residual_skewness;
	d["residual_kurtosis"] = r.residual_kurtosis;
	return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
	m.doc() = "Predict-and-optimise energy scheduling: instances, metrics, scheduling and forecast correction";

	auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
	py::register_exception<ParseError>(m, "ParseError", input_error.ptr());
	py::register_exception<DomainError>(m, "DomainError", PyExc_RuntimeError);

	py::class_<Instance>(m, "Instance")
	    .def_property_readonly("num_buildings", &Instance::num_buildings)
	    .def_property_readonly("num_solar", &Instance::num_solar)
	    .def_property_readonly("num_batteries", &Instance::num_batteries)
	    .def_property_readonly("num_recurring", &Instance::num_recurring)
	    .def_property_readonly("num_onceoff", &Instance::num_onceoff)
	    .def("counts", [](const Instance &i) {
		    return py::make_tuple(i.num_buildings(), i.num_solar(), i.num_batteries(), i.num_recurring(),
		                          i.num_onceoff());
	    })
	    .def("serialize", &serialize_instance)
	    .def("validate", [](const Instance &i) { return violation_pairs(validate_instance(i)); })
	    .def("__eq__", [](const Instance &a, const Instance &b) { return a == b; });

	m.def("parse_instance", [](const std::string &text) { return parse_instance(text); }, py::arg("text"),
	      "Parse the ppoi text format; raises ParseError with the line number.");

	py::class_<Calendar>(m, "Calendar")
	    .def(py::init([](int first_weekday, int days, int periods_per_day, int work_begin, int work_end) {
		         if (first_weekday < 0 || first_weekday > 6) {
			         throw InputError("first_weekday must be 0 (Monday) to 6");
		         }
		         return Calendar(static_cast<Weekday>(first_weekday), days, periods_per_day, work_begin, work_end);
	         }),
	         py::arg("first_weekday"), py::arg("days"), py::arg("periods_per_day") = Calendar::kPeriodsPerDay,
	         py::arg("work_begin") = Calendar::kWorkBegin, py::arg("work_end") = Calendar::kWorkEnd)
	    .def_static("for_month", [](const std::string &ym) { return Calendar::for_month(ym); }, py::arg("year_month"))
	    .def_property_readonly("horizon", &Calendar::horizon)
	    .def_property_readonly("days", &Calendar::days)
	    .def_property_readonly("periods_per_day", &Calendar::periods_per_day)
	    .def("is_working_period", &Calendar::is_working_period);

	m.def("mase", [](const std::vector<double> &a, const std::vector<double> &f, const std::vector<double> &train,
	                 std::size_t season) { return mase(a, f, train, season); },
	      py::arg("actual"), py::arg("forecast"), py::arg("train"), py::arg("season") = kDefaultSeason);
	m.def("mae", [](const std::vector<double> &a, const std::vector<double> &f) { return mae(a, f); });
	m.def("bias_decomposition", [](const std::vector<double> &a, const std::vector<double> &f) {
		const auto b = bias_decomposition(a, f);
		return py::make_tuple(b.mean_under, b.mean_over);
	});
	m.def("pearson", [](const std::vector<double> &x, const std::vector<double> &y) { return pearson(x, y); });
	m.def("error_report",
	      [](const std::vector<double> &a, const std::vector<double> &f, const std::vector<double> &train,
	         std::size_t season) { return report_dict(error_report(a, f, train, season)); },
	      py::arg("actual"), py::arg("forecast"), py::arg("train") = std::vector<double> {},
	      py::arg("season") = kDefaultSeason);

	m.def("objective", [](const std::vector<double> &load, const std::vector<double> &prices) {
		return objective(load, prices);
	});
	m.def("energy_cost", [](const std::vector<double> &load, const std::vector<double> &prices) {
		return energy_cost(load, prices);
	});

	m.def("perturb", [](const std::vector<double> &a, double factor) { return perturb(a, PerturbationSpec::make(factor)); },
	      py::arg("actual"), py::arg("factor"));
	m.def("u_cost", [](const std::vector<double> &a, const std::vector<double> &p) { return u_cost(a, p); });
	m.def("v_cost",
	      [](const std::vector<double> &a, const std::vector<double> &p, double gamma, double epsilon) {
		      return v_cost(a, p, {gamma, epsilon});
	      },
	      py::arg("actual"), py::arg("predicted"), py::arg("gamma"), py::arg("epsilon"));
	m.def("fit_gamma_epsilon",
	      [](const std::vector<std::tuple<std::vector<double>, std::vector<double>, double>> &runs) {
		      std::vector<ForecastOutcome> outcomes;
		      for (const auto &[a, p, c] : runs) {
			      outcomes.push_back({a, p, c});
		      }
		      const auto fit = fit_gamma_epsilon(outcomes);
		      return py::make_tuple(fit.params.gamma, fit.params.epsilon, fit.correlation);
	      },
	      py::arg("runs"), "runs: [(actual, predicted, observed_cost)] -> (gamma, epsilon, correlation)");
	m.def("linear_correction",
	      [](const std::vector<double> &a, const std::vector<double> &p, double gamma, double epsilon) {
		      const auto c = linear_correction(a, p, {gamma, epsilon});
		      return py::make_tuple(c.alpha, c.beta);
	      },
	      py::arg("actual"), py::arg("predicted"), py::arg("gamma") = 0.0, py::arg("epsilon") = 0.0);
	m.def("apply_correction", [](const std::vector<double> &p, double alpha, double beta) {
		return apply_correction(p, {alpha, beta});
	});

	m.def("optimize",
	      [](const Instance &inst, const Calendar &cal, const std::vector<double> &forecast,
	         const std::vector<double> &prices, const std::string &policy, int warm_starts, int iterations,
	         std::uint64_t seed) {
		      OptimizerConfig config;
		      config.num_warm_starts = warm_starts;
		      config.local_search_iterations = iterations;
		      config.seed = seed;
		      OptimizeResult r;
		      {
			      py::gil_scoped_release release;
			      r = optimize(inst, cal, NetLoadSeries {forecast}, PriceSeries {prices}, policy_arg(policy), config);
		      }
		      py::dict d;
		      d["schedule"] = schedule_to_json(r.schedule);
		      d["cost"] = r.cost;
		      d["warm_start_costs"] = r.warm_start_costs;
		      d["best_warm_start"] = r.best_warm_start;
		      d["iterations"] = r.iterations;
		      d["accepted_moves"] = r.accepted_moves;
		      return d;
	      },
	      py::arg("instance"), py::arg("calendar"), py::arg("forecast"), py::arg("prices"),
	      py::arg("policy") = "no-forced-discharge", py::arg("warm_starts") = 46, py::arg("iterations") = 4000,
	      py::arg("seed") = 0, "Returns a dict whose 'schedule' is the schedule JSON text.");
	m.def("check_feasibility",
	      [](const Instance &inst, const Calendar &cal, const std::string &schedule,
	         const std::optional<std::string> &policy) {
		      std::optional<BatteryPolicy> p;
		      if (policy) {
			      p = policy_arg(*policy);
		      }
		      return violation_pairs(check_feasibility(inst, cal, schedule_from_json(schedule), p));
	      },
	      py::arg("instance"), py::arg("calendar"), py::arg("schedule"), py::arg("policy") = py::none());
	m.def("evaluate",
	      [](const Instance &inst, const Calendar &cal, const std::string &schedule, const std::vector<double> &actual,
	         const std::vector<double> &prices) {
		      return total_cost(NetLoadSeries {actual}, PriceSeries {prices}, inst, cal, schedule_from_json(schedule));
	      },
	      py::arg("instance"), py::arg("calendar"), py::arg("schedule"), py::arg("actual"), py::arg("prices"),
	      "Cost of the schedule against a net load; raises DomainError when it is infeasible.");

	m.def("run_cli",
	      [](const std::vector<std::string> &args) {
		      std::ostringstream out;
		      std::ostringstream err;
		      int code = 0;
		      {
			      py::gil_scoped_release release;
			      code = run_cli(args, out, err);
		      }
		      return py::make_tuple(code, out.str(), err.str());
	      },
	      py::arg("args"), "Runs one ppo subcommand; returns (exit_code, stdout, stderr).");
}
