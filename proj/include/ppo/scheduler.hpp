#pragma once

#include "ppo/battery_policy.hpp"
#include "ppo/evaluator.hpp"
#include "ppo/instance.hpp"
#include "ppo/series.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ppo {

// Violations of `policy` by the schedule's battery plan. Plan dimensions are assumed valid.
//   Conservative       every action is Idle
//   NoForcedDischarge  no Charge in a working period
//   ForcedDischarge    as above, and in every working period where some battery holds at
//                      least one period of discharge energy, at least one battery discharges
//   Liberal            max(recurring + charge power) <= max(recurring)
//   VeryLiberal        nothing
std::vector<Violation> policy_check(BatteryPolicy policy, const Instance &inst, const Calendar &calendar,
                                    const Schedule &schedule);

// Everything a battery dispatcher sees. Spans must all have calendar.horizon() entries.
struct DispatchInput {
	std::span<const double> net;       // base load plus recurring activities, kW
	std::span<const double> recurring; // recurring activities alone, kW
	std::span<const double> prices;    // $/MWh
	std::span<const Battery> batteries;
	BatteryPolicy policy = BatteryPolicy::NoForcedDischarge;
	const Calendar *calendar = nullptr;
};

// Objective of `net` plus the plan's grid effect.
double dispatch_cost(const DispatchInput &input, const BatteryPlan &plan);

// Greedy dispatch from an all-idle plan. Never costs more than all-idle and always satisfies
// the policy and the state-of-charge bounds.
BatteryPlan dispatch_battery_heuristic(const DispatchInput &input);

// Greedy local improvement of an existing plan (add, pair and remove moves). A plan that breaks
// the policy or SOC bounds is repaired first; the result never costs more than the repaired start.
BatteryPlan improve_battery_plan(const DispatchInput &input, BatteryPlan start);

// Drops actions that break SOC bounds or the policy, scanning forward in time, and adds the
// discharges ForcedDischarge requires.
BatteryPlan repair_battery_plan(const DispatchInput &input, BatteryPlan plan);

inline constexpr int kMaxExactHorizon = 16;

// Cost-minimal plan for a single battery by depth-first enumeration of every action sequence,
// pruned only by SOC/policy feasibility and a valid lower bound. Ties keep the sequence that
// comes first with Idle < Charge < Discharge. Throws InputError beyond kMaxExactHorizon periods.
BatteryPlan dispatch_battery_exact(const DispatchInput &input);

// `n` feasible schedules with idle batteries, built by greedy peak levelling of the recurring
// load over one week. Throws DomainError when no feasible placement can be found.
std::vector<Schedule> conservative_warm_starts(const Instance &inst, const Calendar &calendar, int n,
                                               std::uint64_t seed);

struct OptimizerConfig {
	int num_warm_starts = 46;
	int local_search_iterations = 4000;
	std::uint64_t seed = 0;
	// Wall-clock cap on local search. Results stop being reproducible when it triggers.
	std::optional<double> time_limit_seconds;
	// Annealing: the start temperature accepts a typical uphill move with this probability,
	// then cools geometrically to final_temperature_ratio of the start.
	double initial_acceptance = 0.5;
	double final_temperature_ratio = 1e-4;
};

struct OptimizeResult {
	Schedule schedule;
	double cost = 0.0; // against the forecast the run optimised
	std::vector<double> warm_start_costs;
	int best_warm_start = 0;
	int iterations = 0;
	int accepted_moves = 0;
	double initial_temperature = 0.0;
};

// Warm starts, then simulated annealing over activity slots and rooms with battery re-dispatch
// of every candidate before it is priced. Deterministic for a given seed unless the time limit triggers.
OptimizeResult optimize(const Instance &inst, const Calendar &calendar, const NetLoadSeries &forecast,
                        const PriceSeries &prices, BatteryPolicy policy, const OptimizerConfig &config = {});

// Cost the schedule realises when the actual net load turns up.
double evaluate_against_actual(const Schedule &schedule, const NetLoadSeries &actual, const PriceSeries &prices,
                               const Instance &inst, const Calendar &calendar);

} // namespace ppo
