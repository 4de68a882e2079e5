#pragma once

#include "ppo/battery_policy.hpp"
#include "ppo/correction.hpp"
#include "ppo/evaluator.hpp"
#include "ppo/instance.hpp"
#include "ppo/scheduler.hpp"
#include "ppo/series.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace ppo::fixtures {

// The three-building example instance used throughout the tests.
extern const std::string kExampleInstance;

// Any instance the parser must accept: arbitrary counts, ids in range, acyclic or not.
Instance random_instance(std::mt19937_64 &rng, int max_count = 6);

// A valid instance whose recurring activities fit the calendar's working window.
Instance random_schedulable_instance(std::mt19937_64 &rng, const Calendar &calendar, int recurring, int batteries,
                                     int buildings = 2);

std::vector<double> uniform_series(std::mt19937_64 &rng, std::size_t n, double lo, double hi);

// Base load with a daytime hump and prices with an evening premium over the calendar.
NetLoadSeries synthetic_load(std::mt19937_64 &rng, const Calendar &calendar, double base = 200.0, double hump = 150.0);
PriceSeries synthetic_prices(std::mt19937_64 &rng, const Calendar &calendar);

// Minimum objective over every slot combination of the recurring activities, with the single
// battery (if any) dispatched exactly. Room feasibility is the per-period capacity count, which
// is exact for interval demands. Needs at most one battery and a horizon within exact range.
double brute_force_optimum(const Instance &inst, const Calendar &calendar, const NetLoadSeries &forecast,
                           const PriceSeries &prices, BatteryPolicy policy);

// Every action sequence of a single battery, no pruning. 3^horizon plans.
double enumerate_single_battery(const Battery &battery, std::span<const double> net, std::span<const double> recurring,
                                std::span<const double> prices, BatteryPolicy policy, const Calendar &calendar);

// Independent check of SOC bounds and the policy rules for a battery plan.
bool plan_feasible(std::span<const Battery> batteries, const BatteryPlan &plan, std::span<const double> recurring,
                   BatteryPolicy policy, const Calendar &calendar);

// `count` forecasts of one 200-point actual with random bias, slope and jitter, each costed by
// v_cost under `truth` in standardised units, plus Gaussian noise of `noise` times the costs' std.
std::vector<ForecastOutcome> planted_outcomes(std::mt19937_64 &rng, CostModelParams truth, int count, double noise);

// One dispatch problem over a single day of `horizon` periods with a random working window.
struct DispatchCase {
	Calendar calendar;
	std::vector<Battery> batteries;
	std::vector<double> net;
	std::vector<double> recurring;
	std::vector<double> prices;
	BatteryPolicy policy;

	DispatchInput input() const {
		return DispatchInput {net, recurring, prices, batteries, policy, &calendar};
	}
};

DispatchCase random_dispatch_case(std::mt19937_64 &rng, int horizon, int batteries, BatteryPolicy policy);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
	explicit TempDir(const std::string &tag);
	~TempDir();
	TempDir(const TempDir &) = delete;
	TempDir &operator=(const TempDir &) = delete;

	const std::filesystem::path &path() const {
		return path_;
	}
	std::filesystem::path operator/(const std::string &name) const {
		return path_ / name;
	}

private:
	std::filesystem::path path_;
};

void write_file(const std::filesystem::path &path, const std::string &text);
std::string read_file(const std::filesystem::path &path);

// 15-minute series CSV over a real month.
void write_month_csv(const std::filesystem::path &path, const Calendar &calendar, std::span<const double> values);
// Half-hourly price CSV built from a 15-minute price series (first period of each half hour).
void write_price_csv(const std::filesystem::path &path, const Calendar &calendar, const PriceSeries &prices);

} // namespace ppo::fixtures
