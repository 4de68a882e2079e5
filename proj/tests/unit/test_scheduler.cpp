#include "fixtures.hpp"

#include "ppo/error.hpp"
#include "ppo/scheduler.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace ppo;

namespace {

using fixtures::DispatchCase;

DispatchCase random_case(std::mt19937_64 &rng, int horizon, int batteries, BatteryPolicy policy) {
	return fixtures::random_dispatch_case(rng, horizon, batteries, policy);
}

double idle_cost(const DispatchCase &c) {
	return objective(c.net, c.prices);
}

} // namespace

TEST_CASE("exact dispatch matches plain enumeration") {
	std::mt19937_64 rng(21);
	for (auto policy : kAllPolicies) {
		for (int k = 0; k < 12; ++k) {
			const int horizon = std::uniform_int_distribution<int>(1, 8)(rng);
			const auto c = random_case(rng, horizon, 1, policy);
			const auto plan = dispatch_battery_exact(c.input());
			CHECK(fixtures::plan_feasible(c.batteries, plan, c.recurring, policy, c.calendar));
			const double expected =
			    fixtures::enumerate_single_battery(c.batteries[0], c.net, c.recurring, c.prices, policy, c.calendar);
			CHECK(dispatch_cost(c.input(), plan) == doctest::Approx(expected).epsilon(1e-12));
		}
	}
}

TEST_CASE("exact dispatch limits") {
	std::mt19937_64 rng(1);
	const auto c = random_case(rng, kMaxExactHorizon + 1, 1, BatteryPolicy::VeryLiberal);
	CHECK_THROWS_AS(dispatch_battery_exact(c.input()), InputError);
	const auto two = random_case(rng, 4, 2, BatteryPolicy::VeryLiberal);
	CHECK_THROWS_AS(dispatch_battery_exact(two.input()), InputError);
}

TEST_CASE("heuristic dispatch is feasible and between exact and idle") {
	std::mt19937_64 rng(33);
	for (auto policy : kAllPolicies) {
		for (int k = 0; k < 20; ++k) {
			const int horizon = std::uniform_int_distribution<int>(1, 12)(rng);
			const auto c = random_case(rng, horizon, 1, policy);
			const auto heuristic = dispatch_battery_heuristic(c.input());
			REQUIRE(fixtures::plan_feasible(c.batteries, heuristic, c.recurring, policy, c.calendar));
			const double h = dispatch_cost(c.input(), heuristic);
			const double e = dispatch_cost(c.input(), dispatch_battery_exact(c.input()));
			CHECK(h >= e - 1e-9);
			CHECK(h <= idle_cost(c) + 1e-9);
		}
	}
}

TEST_CASE("heuristic dispatch shaves a single peak") {
	// flat 100 kW with one 200 kW spike, cheap energy: charge before, discharge into the spike
	const Calendar cal(Weekday::Mon, 1, 8, 4, 6);
	std::vector<double> net(8, 100.0);
	net[5] = 200.0;
	const std::vector<double> recurring(8, 0.0);
	const std::vector<double> prices(8, 10.0);
	const std::vector<Battery> bat {{0, 10.0, 40.0, 1.0}};
	const DispatchInput in {net, recurring, prices, bat, BatteryPolicy::NoForcedDischarge, &cal};
	const auto plan = dispatch_battery_heuristic(in);
	CHECK(plan.at(0, 5) == BatteryAction::Discharge);
	CHECK(dispatch_cost(in, plan) < objective(net, prices));
	CHECK(dispatch_cost(in, plan) == doctest::Approx(dispatch_cost(in, dispatch_battery_exact(in))));
}

TEST_CASE("multi-battery heuristic, repair and improvement stay feasible") {
	std::mt19937_64 rng(44);
	for (auto policy : kAllPolicies) {
		for (int k = 0; k < 10; ++k) {
			const int horizon = std::uniform_int_distribution<int>(4, 200)(rng);
			const auto c = random_case(rng, horizon, 3, policy);
			const auto plan = dispatch_battery_heuristic(c.input());
			CHECK(fixtures::plan_feasible(c.batteries, plan, c.recurring, policy, c.calendar));

			BatteryPlan noise(3, horizon);
			for (int b = 0; b < 3; ++b) {
				for (int t = 0; t < horizon; ++t) {
					noise.set(b, t, static_cast<BatteryAction>(std::uniform_int_distribution<int>(0, 2)(rng)));
				}
			}
			const auto repaired = repair_battery_plan(c.input(), noise);
			CHECK(fixtures::plan_feasible(c.batteries, repaired, c.recurring, policy, c.calendar));
			const auto improved = improve_battery_plan(c.input(), noise);
			CHECK(fixtures::plan_feasible(c.batteries, improved, c.recurring, policy, c.calendar));
			CHECK(dispatch_cost(c.input(), improved) <= dispatch_cost(c.input(), repaired) + 1e-9);
			const auto again = improve_battery_plan(c.input(), plan);
			CHECK(dispatch_cost(c.input(), again) <= dispatch_cost(c.input(), plan) + 1e-9);
		}
	}
}

TEST_CASE("warm starts on the example instance") {
	const auto inst = parse_instance(fixtures::kExampleInstance);
	const auto cal = Calendar::for_month("2020-11");
	const auto starts = conservative_warm_starts(inst, cal, 1, 0);
	REQUIRE(starts.size() == 1);
	const auto &s = starts[0];
	CHECK(check_feasibility(inst, cal, s, BatteryPolicy::Conservative).empty());
	CHECK(s.battery_plan.all_idle());
	const auto slot_of = [&](int a) {
		for (const auto &p : s.placements) {
			if (p.activity == a) {
				return week_position(p.slot, cal);
			}
		}
		return -1;
	};
	CHECK(slot_of(2) + 4 <= slot_of(0));

	const auto many = conservative_warm_starts(inst, cal, 46, 9);
	CHECK(many.size() == 46);
	for (const auto &w : many) {
		CHECK(check_feasibility(inst, cal, w, BatteryPolicy::Conservative).empty());
	}
	CHECK(many == conservative_warm_starts(inst, cal, 46, 9));
}

TEST_CASE("warm starts fail cleanly") {
	auto inst = parse_instance("ppoi 1 0 0 1 0\nb 0 1 0\nr 0 1 S 5 40 0\n"); // longer than the working day
	const auto cal = Calendar::for_month("2020-11");
	CHECK_THROWS_AS(conservative_warm_starts(inst, cal, 1, 0), DomainError);
	inst = parse_instance("ppoi 1 0 0 2 0\nb 0 1 0\nr 0 1 S 5 4 1 1\nr 1 1 S 5 4 1 0\n");
	CHECK_THROWS_AS(conservative_warm_starts(inst, cal, 1, 0), DomainError);
	CHECK_THROWS_AS(conservative_warm_starts(inst, cal, 0, 0), InputError);
}

TEST_CASE("optimizer on the example instance") {
	const auto inst = parse_instance(fixtures::kExampleInstance);
	const auto cal = Calendar::for_month("2020-11");
	std::mt19937_64 rng(2);
	const auto forecast = fixtures::synthetic_load(rng, cal, 5.0, 20.0);
	const auto prices = fixtures::synthetic_prices(rng, cal);
	OptimizerConfig config;
	config.num_warm_starts = 8;
	config.local_search_iterations = 600;
	for (auto policy : kAllPolicies) {
		CAPTURE(policy_name(policy));
		const auto r = optimize(inst, cal, forecast, prices, policy, config);
		CHECK(check_feasibility(inst, cal, r.schedule, policy).empty());
		const double best_start = *std::min_element(r.warm_start_costs.begin(), r.warm_start_costs.end());
		CHECK(r.cost <= best_start + 1e-9);
		CHECK(r.cost == doctest::Approx(total_cost(forecast, prices, inst, cal, r.schedule)));
		if (policy == BatteryPolicy::Conservative) {
			CHECK(r.schedule.battery_plan.all_idle());
		}
	}
	const auto a = optimize(inst, cal, forecast, prices, BatteryPolicy::Liberal, config);
	const auto b = optimize(inst, cal, forecast, prices, BatteryPolicy::Liberal, config);
	CHECK(a.schedule == b.schedule);
	CHECK(a.cost == b.cost);
}

TEST_CASE("optimizer input checks") {
	const auto inst = parse_instance(fixtures::kExampleInstance);
	const auto cal = Calendar::for_month("2020-11");
	const NetLoadSeries short_forecast {std::vector<double>(10, 1.0)};
	const PriceSeries prices {std::vector<double>(cal.horizon(), 1.0)};
	CHECK_THROWS_AS(optimize(inst, cal, short_forecast, prices, BatteryPolicy::Liberal), InputError);
	const auto empty = parse_instance("ppoi 0 0 0 0 0");
	const NetLoadSeries flat {std::vector<double>(cal.horizon(), 3.0)};
	const auto r = optimize(empty, cal, flat, prices, BatteryPolicy::VeryLiberal);
	CHECK(r.iterations == 0);
	CHECK(r.cost == doctest::Approx(objective(flat.values, prices.values)));
}

TEST_CASE("optimizer reaches the enumerated optimum on tiny instances") {
	std::mt19937_64 rng(77);
	const Calendar cal(Weekday::Mon, 1, 16, 4, 12);
	for (int k = 0; k < 6; ++k) {
		const int activities = std::uniform_int_distribution<int>(1, 3)(rng);
		const int batteries = std::uniform_int_distribution<int>(0, 1)(rng);
		const auto inst = fixtures::random_schedulable_instance(rng, cal, activities, batteries, 1);
		const auto forecast = fixtures::synthetic_load(rng, cal, 60.0, 80.0);
		const auto prices = fixtures::synthetic_prices(rng, cal);
		for (auto policy : kAllPolicies) {
			OptimizerConfig config;
			config.num_warm_starts = 6;
			config.local_search_iterations = 800;
			config.seed = static_cast<std::uint64_t>(k);
			const auto r = optimize(inst, cal, forecast, prices, policy, config);
			const double best = fixtures::brute_force_optimum(inst, cal, forecast, prices, policy);
			CAPTURE(k);
			CAPTURE(policy_name(policy));
			CHECK(check_feasibility(inst, cal, r.schedule, policy).empty());
			CHECK(r.cost >= best - 1e-9);
			CHECK(r.cost <= best * 1.01 + 1e-9);
		}
	}
}
