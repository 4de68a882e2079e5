#include "ppo/evaluator.hpp"

#include "ppo/error.hpp"
#include "ppo/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ppo {

std::string_view policy_name(BatteryPolicy policy) {
	switch (policy) {
	case BatteryPolicy::Conservative:
		return "conservative";
	case BatteryPolicy::ForcedDischarge:
		return "forced-discharge";
	case BatteryPolicy::NoForcedDischarge:
		return "no-forced-discharge";
	case BatteryPolicy::Liberal:
		return "liberal";
	case BatteryPolicy::VeryLiberal:
		return "very-liberal";
	}
	return "unknown";
}

std::optional<BatteryPolicy> parse_policy(std::string_view name) {
	for (auto p : kAllPolicies) {
		if (policy_name(p) == name) {
			return p;
		}
	}
	return std::nullopt;
}

char action_code(BatteryAction action) {
	switch (action) {
	case BatteryAction::Charge:
		return 'C';
	case BatteryAction::Discharge:
		return 'D';
	case BatteryAction::Idle:
		break;
	}
	return 'I';
}

bool BatteryPlan::all_idle() const {
	return std::all_of(actions_.begin(), actions_.end(), [](BatteryAction a) { return a == BatteryAction::Idle; });
}

BatteryStep battery_step(const Battery &battery) {
	const double root = std::sqrt(battery.efficiency);
	BatteryStep s;
	s.charge_kw = battery.max_power;
	s.discharge_kw = root * battery.max_power;
	s.charge_kwh = kPeriodHours * battery.max_power * root;
	s.discharge_kwh = kPeriodHours * battery.max_power;
	return s;
}

int week_position(const Slot &slot, const Calendar &calendar) {
	return static_cast<int>(slot.weekday) * calendar.periods_per_day() + slot.period_of_day;
}

std::vector<int> days_on(const Calendar &calendar, Weekday weekday) {
	std::vector<int> out;
	for (int d = (static_cast<int>(weekday) - static_cast<int>(calendar.first_weekday()) + 7) % 7; d < calendar.days();
	     d += 7) {
		out.push_back(d);
	}
	return out;
}

std::vector<double> activity_load_profile(const Instance &inst, const Calendar &calendar, const Schedule &schedule) {
	const int horizon = calendar.horizon();
	const int ppd = calendar.periods_per_day();
	std::vector<double> out(horizon, 0.0);
	for (const auto &p : schedule.placements) {
		if (p.activity < 0 || static_cast<std::size_t>(p.activity) >= inst.num_recurring()) {
			continue;
		}
		const auto &act = inst.recurring[p.activity];
		for (int d : days_on(calendar, p.slot.weekday)) {
			for (int k = 0; k < act.duration; ++k) {
				const int pod = p.slot.period_of_day + k;
				if (pod < 0 || pod >= ppd) {
					continue;
				}
				out[d * ppd + pod] += act.load;
			}
		}
	}
	return out;
}

BatteryProfile battery_profile(const Instance &inst, const Schedule &schedule) {
	const auto &plan = schedule.battery_plan;
	if (plan.batteries() != inst.num_batteries()) {
		throw InputError("battery plan has " + std::to_string(plan.batteries()) + " rows for " +
		                 std::to_string(inst.num_batteries()) + " batteries");
	}
	const auto horizon = plan.horizon();
	BatteryProfile out;
	out.grid_effect.assign(horizon, 0.0);
	out.soc.assign(plan.batteries(), std::vector<double>(horizon, 0.0));
	for (std::size_t b = 0; b < plan.batteries(); ++b) {
		const auto &bat = inst.batteries[b];
		const auto step = battery_step(bat);
		double soc = 0.0;
		bool reported = false;
		for (std::size_t t = 0; t < horizon; ++t) {
			switch (plan.at(b, t)) {
			case BatteryAction::Charge:
				out.grid_effect[t] += step.charge_kw;
				soc += step.charge_kwh;
				break;
			case BatteryAction::Discharge:
				out.grid_effect[t] -= step.discharge_kw;
				soc -= step.discharge_kwh;
				break;
			case BatteryAction::Idle:
				break;
			}
			out.soc[b][t] = soc;
			if (!reported && (soc < -kSocTolerance || soc > bat.capacity + kSocTolerance)) {
				out.violations.push_back({"soc_bounds", "battery " + std::to_string(b) + " state of charge " +
				                                            std::to_string(soc) + " kWh leaves [0, " +
				                                            std::to_string(bat.capacity) + "] at period " +
				                                            std::to_string(t)});
				reported = true;
			}
		}
	}
	return out;
}

LoadProfile load_profile(const NetLoadSeries &base, const Instance &inst, const Calendar &calendar,
                         const Schedule &schedule) {
	const auto horizon = static_cast<std::size_t>(calendar.horizon());
	if (base.values.size() != horizon) {
		throw InputError("net load has " + std::to_string(base.values.size()) + " periods, calendar horizon is " +
		                 std::to_string(horizon));
	}
	LoadProfile out;
	out.base = base.values;
	out.activities = activity_load_profile(inst, calendar, schedule);
	if (schedule.battery_plan.batteries() == 0) {
		out.battery.assign(horizon, 0.0);
	} else {
		if (schedule.battery_plan.horizon() != horizon) {
			throw InputError("battery plan horizon does not match the calendar");
		}
		out.battery = battery_profile(inst, schedule).grid_effect;
	}
	out.total.resize(horizon);
	for (std::size_t t = 0; t < horizon; ++t) {
		out.total[t] = out.base[t] + out.activities[t] + out.battery[t];
	}
	return out;
}

double energy_cost(std::span<const double> load, std::span<const double> prices) {
	if (load.size() != prices.size()) {
		throw InputError("load and price series differ in length");
	}
	double sum = 0.0;
	for (std::size_t t = 0; t < load.size(); ++t) {
		sum += kPeriodHours * load[t] * prices[t] / 1000.0;
	}
	return sum;
}

double objective(std::span<const double> load, std::span<const double> prices) {
	if (load.empty()) {
		return 0.0;
	}
	const double peak = *std::max_element(load.begin(), load.end());
	return energy_cost(load, prices) + 0.005 * peak * peak;
}

namespace {

void check_placements(const Instance &inst, const Calendar &calendar, const Schedule &schedule,
                      std::vector<Violation> &out) {
	const int nr = static_cast<int>(inst.num_recurring());
	const int ppd = calendar.periods_per_day();
	auto report = [&](std::string kind, std::string message) { out.push_back({std::move(kind), std::move(message)}); };

	std::vector<const Placement *> by_activity(nr, nullptr);
	for (const auto &p : schedule.placements) {
		if (p.activity < 0 || p.activity >= nr) {
			report("unknown_activity", "placement for unknown activity " + std::to_string(p.activity));
			continue;
		}
		if (by_activity[p.activity]) {
			report("duplicate_placement", "activity " + std::to_string(p.activity) + " placed more than once");
			continue;
		}
		by_activity[p.activity] = &p;
	}

	// building x size x (weekday, period) occupancy
	const auto nb = inst.num_buildings();
	std::vector<int> used(nb * 2 * 5 * ppd, 0);
	auto cell = [&](std::size_t b, RoomSize size, int weekday, int pod) -> int & {
		return used[((b * 2 + (size == RoomSize::Large)) * 5 + weekday) * ppd + pod];
	};

	std::vector<bool> slot_ok(nr, false);
	for (int a = 0; a < nr; ++a) {
		const auto *p = by_activity[a];
		const auto name = "activity " + std::to_string(a);
		if (!p) {
			report("missing_placement", name + " is not scheduled");
			continue;
		}
		const auto &act = inst.recurring[a];
		const int wd = static_cast<int>(p->slot.weekday);
		const int begin = p->slot.period_of_day;
		if (wd > 4 || !calendar.contains_weekday(p->slot.weekday) || begin < calendar.work_begin() ||
		    begin + act.duration > calendar.work_end()) {
			report("working_hours", name + " at " + weekday_name(p->slot.weekday) + " period " + std::to_string(begin) +
			                            " does not fit inside working hours");
			continue;
		}
		slot_ok[a] = true;
		if (static_cast<int>(p->rooms.size()) != act.rooms_required) {
			report("room_mismatch", name + " needs " + std::to_string(act.rooms_required) + " rooms, got " +
			                            std::to_string(p->rooms.size()));
		}
		for (const auto &room : p->rooms) {
			if (room.building < 0 || static_cast<std::size_t>(room.building) >= nb) {
				report("room_mismatch", name + " uses unknown building " + std::to_string(room.building));
				continue;
			}
			if (room.size != act.room_size) {
				report("room_mismatch", name + " uses a room of the wrong size");
			}
			for (int k = 0; k < act.duration; ++k) {
				++cell(room.building, room.size, wd, begin + k);
			}
		}
	}

	for (std::size_t b = 0; b < nb; ++b) {
		for (auto size : {RoomSize::Small, RoomSize::Large}) {
			const int available = inst.buildings[b].rooms(size);
			for (int wd = 0; wd < 5; ++wd) {
				for (int pod = 0; pod < ppd; ++pod) {
					if (cell(b, size, wd, pod) > available) {
						report("room_capacity", "building " + std::to_string(b) + " needs " +
						                            std::to_string(cell(b, size, wd, pod)) + " " +
						                            (size == RoomSize::Small ? "small" : "large") + " rooms on " +
						                            weekday_name(static_cast<Weekday>(wd)) + " period " +
						                            std::to_string(pod) + ", has " + std::to_string(available));
					}
				}
			}
		}
	}

	for (int a = 0; a < nr; ++a) {
		if (!slot_ok[a]) {
			continue;
		}
		const int start = week_position(by_activity[a]->slot, calendar);
		for (int pred : inst.recurring[a].precedences) {
			if (pred < 0 || pred >= nr || !slot_ok[pred]) {
				continue;
			}
			const int pred_end = week_position(by_activity[pred]->slot, calendar) + inst.recurring[pred].duration;
			if (pred_end > start) {
				report("precedence", "activity " + std::to_string(pred) + " must finish before activity " +
				                         std::to_string(a) + " starts");
			}
		}
	}
}

} // namespace

std::vector<Violation> check_feasibility(const Instance &inst, const Calendar &calendar, const Schedule &schedule,
                                         std::optional<BatteryPolicy> policy) {
	std::vector<Violation> out;
	check_placements(inst, calendar, schedule, out);

	const auto &plan = schedule.battery_plan;
	bool plan_ok = true;
	if (plan.batteries() != inst.num_batteries() ||
	    (plan.batteries() > 0 && plan.horizon() != static_cast<std::size_t>(calendar.horizon()))) {
		out.push_back({"battery_dimensions", "battery plan is " + std::to_string(plan.batteries()) + " x " +
		                                         std::to_string(plan.horizon()) + ", expected " +
		                                         std::to_string(inst.num_batteries()) + " x " +
		                                         std::to_string(calendar.horizon())});
		plan_ok = false;
	} else {
		auto soc = battery_profile(inst, schedule).violations;
		plan_ok = soc.empty();
		out.insert(out.end(), soc.begin(), soc.end());
	}

	if (policy && plan_ok) {
		auto extra = policy_check(*policy, inst, calendar, schedule);
		out.insert(out.end(), extra.begin(), extra.end());
	}
	return out;
}

double total_cost(const NetLoadSeries &base, const PriceSeries &prices, const Instance &inst,
                  const Calendar &calendar, const Schedule &schedule) {
	const auto violations = check_feasibility(inst, calendar, schedule);
	if (!violations.empty()) {
		throw DomainError("infeasible schedule: " + violations.front().message);
	}
	if (prices.values.size() != static_cast<std::size_t>(calendar.horizon())) {
		throw InputError("price series length does not match the calendar horizon");
	}
	return objective(load_profile(base, inst, calendar, schedule).total, prices.values);
}

Schedule idle_schedule(const Instance &inst, const Calendar &calendar) {
	Schedule s;
	s.battery_plan = BatteryPlan(inst.num_batteries(), inst.num_batteries() ? calendar.horizon() : 0);
	return s;
}

} // namespace ppo
