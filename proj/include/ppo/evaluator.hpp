#pragma once

#include "ppo/battery_policy.hpp"
#include "ppo/instance.hpp"
#include "ppo/series.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ppo {

// Start of a recurring activity within the week. period_of_day counts from midnight.
struct Slot {
	Weekday weekday = Weekday::Mon;
	int period_of_day = Calendar::kWorkBegin;

	bool operator==(const Slot &) const = default;
};

struct RoomAssignment {
	int building = 0;
	RoomSize size = RoomSize::Small;

	bool operator==(const RoomAssignment &) const = default;
};

struct Placement {
	int activity = 0;
	Slot slot;
	std::vector<RoomAssignment> rooms;

	bool operator==(const Placement &) const = default;
};

enum class BatteryAction : unsigned char { Idle, Charge, Discharge };

char action_code(BatteryAction action);

// Battery x period matrix of full-power actions.
class BatteryPlan {
public:
	BatteryPlan() = default;
	BatteryPlan(std::size_t batteries, std::size_t horizon)
	    : batteries_(batteries), horizon_(horizon), actions_(batteries * horizon, BatteryAction::Idle) {
	}

	std::size_t batteries() const {
		return batteries_;
	}
	std::size_t horizon() const {
		return horizon_;
	}
	BatteryAction at(std::size_t battery, std::size_t period) const {
		return actions_[battery * horizon_ + period];
	}
	void set(std::size_t battery, std::size_t period, BatteryAction action) {
		actions_[battery * horizon_ + period] = action;
	}
	std::span<const BatteryAction> row(std::size_t battery) const {
		return {actions_.data() + battery * horizon_, horizon_};
	}
	bool all_idle() const;

	bool operator==(const BatteryPlan &) const = default;

private:
	std::size_t batteries_ = 0;
	std::size_t horizon_ = 0;
	std::vector<BatteryAction> actions_;
};

struct Schedule {
	std::vector<Placement> placements; // one per recurring activity
	BatteryPlan battery_plan;

	bool operator==(const Schedule &) const = default;
};

// Per-period energy bookkeeping of one battery acting at full power for 15 minutes.
struct BatteryStep {
	double charge_kw = 0.0;      // drawn from the grid while charging
	double discharge_kw = 0.0;   // delivered to the grid while discharging
	double charge_kwh = 0.0;     // stored per charging period
	double discharge_kwh = 0.0;  // drained per discharging period
};

// Round-trip efficiency is split evenly: sqrt(eta) on the way in and on the way out.
BatteryStep battery_step(const Battery &battery);

inline constexpr double kPeriodHours = 0.25;
inline constexpr double kSocTolerance = 1e-9;

// Position of a period-of-day on a weekday within the week, for ordering slots.
int week_position(const Slot &slot, const Calendar &calendar);

// Days of the calendar month that fall on `weekday`.
std::vector<int> days_on(const Calendar &calendar, Weekday weekday);

// kW drawn by recurring activities in every period of the month.
std::vector<double> activity_load_profile(const Instance &inst, const Calendar &calendar, const Schedule &schedule);

struct BatteryProfile {
	std::vector<double> grid_effect;      // kW added to the net load
	std::vector<std::vector<double>> soc; // kWh per battery after each period
	std::vector<Violation> violations;    // state-of-charge bound breaches
};

// State of charge starts at zero. Plan dimensions must match the instance's batteries.
BatteryProfile battery_profile(const Instance &inst, const Schedule &schedule);

struct LoadProfile {
	std::vector<double> base;
	std::vector<double> activities;
	std::vector<double> battery;
	std::vector<double> total;
};

LoadProfile load_profile(const NetLoadSeries &base, const Instance &inst, const Calendar &calendar,
                         const Schedule &schedule);

// Sum over periods of 0.25 * load * price / 1000.
double energy_cost(std::span<const double> load, std::span<const double> prices);
// Energy cost plus the 0.005 * (max load)^2 peak charge. Once-off terms are not modelled.
double objective(std::span<const double> load, std::span<const double> prices);

// Every violated scheduling rule; empty means the schedule is feasible (and policy-compliant
// when a policy is given).
std::vector<Violation> check_feasibility(const Instance &inst, const Calendar &calendar, const Schedule &schedule,
                                         std::optional<BatteryPolicy> policy = std::nullopt);

// Objective of the schedule against `base`. Throws DomainError if the schedule is infeasible.
double total_cost(const NetLoadSeries &base, const PriceSeries &prices, const Instance &inst,
                  const Calendar &calendar, const Schedule &schedule);

// Schedule with no placements and an all-idle plan sized for the instance and calendar.
Schedule idle_schedule(const Instance &inst, const Calendar &calendar);

} // namespace ppo
