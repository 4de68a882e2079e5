#include "ppo/error.hpp"
#include "ppo/scheduler.hpp"
#include "room_book.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ppo {

namespace {

constexpr int kTemperatureSamples = 40;

// Incumbent of the local search: placements indexed by activity, room bookings, the battery
// plan and the load profile they induce against the forecast.
class SearchState {
public:
	SearchState(const Instance &inst, const Calendar &calendar, const NetLoadSeries &forecast,
	            const PriceSeries &prices, BatteryPolicy policy, const Schedule &start)
	    : inst_(inst), calendar_(calendar), forecast_(forecast), prices_(prices), policy_(policy),
	      book_(inst, calendar), successors_(inst.num_recurring()) {
		placements_.resize(inst.num_recurring());
		for (const auto &p : start.placements) {
			placements_[p.activity] = p;
			book_.add(p, inst.recurring[p.activity].duration);
		}
		for (const auto &r : inst.recurring) {
			for (int p : r.precedences) {
				successors_[p].push_back(r.id);
			}
		}
		plan_ = start.battery_plan;
		refresh();
	}

	double cost() const {
		return cost_;
	}

	Schedule schedule() const {
		return Schedule {placements_, plan_};
	}

	const BatteryPlan &plan() const {
		return plan_;
	}

	DispatchInput dispatch_input() const {
		return DispatchInput {net_, activities_, prices_.values, inst_.batteries, policy_, &calendar_};
	}

	// Moves activities to new slots with freshly allocated rooms. On failure nothing changes.
	bool relocate(const std::vector<std::pair<int, Slot>> &moves, std::mt19937_64 &rng) {
		for (const auto &[a, slot] : moves) {
			if (!slot_allowed(a, slot, moves)) {
				return false;
			}
		}
		undo_.clear();
		for (const auto &[a, slot] : moves) {
			undo_.push_back(placements_[a]);
			book_.remove(placements_[a], inst_.recurring[a].duration);
		}
		std::vector<Placement> fresh;
		for (const auto &[a, slot] : moves) {
			const auto &act = inst_.recurring[a];
			const auto order = detail::shuffled_buildings(inst_.num_buildings(), rng);
			auto rooms = book_.allocate(act.room_size, act.rooms_required, static_cast<int>(slot.weekday),
			                            slot.period_of_day, act.duration, order);
			if (!rooms) {
				for (const auto &p : fresh) {
					book_.remove(p, inst_.recurring[p.activity].duration);
				}
				for (const auto &p : undo_) {
					book_.add(p, inst_.recurring[p.activity].duration);
				}
				undo_.clear();
				return false;
			}
			fresh.push_back(Placement {a, slot, std::move(*rooms)});
			book_.add(fresh.back(), act.duration);
		}
		for (auto &p : fresh) {
			placements_[p.activity] = std::move(p);
		}
		saved_plan_ = plan_;
		refresh();
		if (policy_ == BatteryPolicy::Liberal && !plan_.all_idle()) {
			auto repaired = repair_battery_plan(dispatch_input(), plan_);
			if (!(repaired == plan_)) {
				plan_ = std::move(repaired);
				refresh();
			}
		}
		return true;
	}

	// Reverts the last successful relocate.
	void undo() {
		for (const auto &p : undo_) {
			book_.remove(placements_[p.activity], inst_.recurring[p.activity].duration);
		}
		for (const auto &p : undo_) {
			placements_[p.activity] = p;
			book_.add(p, inst_.recurring[p.activity].duration);
		}
		undo_.clear();
		plan_ = saved_plan_;
		refresh();
	}

	void redispatch() {
		if (inst_.num_batteries() == 0 || policy_ == BatteryPolicy::Conservative) {
			return;
		}
		plan_ = improve_battery_plan(dispatch_input(), plan_);
		refresh();
	}

	const Placement &placement(int a) const {
		return placements_[a];
	}

private:
	bool slot_allowed(int a, const Slot &slot, const std::vector<std::pair<int, Slot>> &moves) const {
		const auto &act = inst_.recurring[a];
		if (slot.period_of_day < calendar_.work_begin() || slot.period_of_day + act.duration > calendar_.work_end()) {
			return false;
		}
		auto slot_of = [&](int x) {
			for (const auto &[m, s] : moves) {
				if (m == x) {
					return s;
				}
			}
			return placements_[x].slot;
		};
		const int start = week_position(slot, calendar_);
		for (int p : act.precedences) {
			if (week_position(slot_of(p), calendar_) + inst_.recurring[p].duration > start) {
				return false;
			}
		}
		for (int s : successors_[a]) {
			if (start + act.duration > week_position(slot_of(s), calendar_)) {
				return false;
			}
		}
		return true;
	}

	void refresh() {
		const Schedule s {placements_, plan_};
		activities_ = activity_load_profile(inst_, calendar_, s);
		const auto horizon = activities_.size();
		net_.resize(horizon);
		total_.resize(horizon);
		for (std::size_t t = 0; t < horizon; ++t) {
			net_[t] = forecast_.values[t] + activities_[t];
			total_[t] = net_[t];
		}
		for (std::size_t b = 0; b < plan_.batteries(); ++b) {
			const auto step = battery_step(inst_.batteries[b]);
			for (std::size_t t = 0; t < horizon; ++t) {
				const auto action = plan_.at(b, t);
				if (action == BatteryAction::Charge) {
					total_[t] += step.charge_kw;
				} else if (action == BatteryAction::Discharge) {
					total_[t] -= step.discharge_kw;
				}
			}
		}
		cost_ = objective(total_, prices_.values);
	}

	const Instance &inst_;
	const Calendar &calendar_;
	const NetLoadSeries &forecast_;
	const PriceSeries &prices_;
	BatteryPolicy policy_;

	detail::RoomBook book_;
	std::vector<std::vector<int>> successors_;
	std::vector<Placement> placements_;
	BatteryPlan plan_;
	BatteryPlan saved_plan_;
	std::vector<Placement> undo_;

	std::vector<double> activities_;
	std::vector<double> net_;
	std::vector<double> total_;
	double cost_ = 0.0;
};

enum class MoveType { Shift, Swap, Rooms };

// Proposes one move and applies it. Returns false when the proposal was structurally infeasible.
bool propose(SearchState &state, const Instance &inst, const Calendar &calendar, const std::vector<Weekday> &weekdays,
             std::mt19937_64 &rng, MoveType &type) {
	const int nr = static_cast<int>(inst.num_recurring());
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	const double u = unit(rng);
	type = u < 0.6 ? MoveType::Shift : (u < 0.85 && nr > 1 ? MoveType::Swap : MoveType::Rooms);
	std::uniform_int_distribution<int> pick_activity(0, nr - 1);
	const int a = pick_activity(rng);

	switch (type) {
	case MoveType::Shift: {
		const auto &act = inst.recurring[a];
		std::uniform_int_distribution<std::size_t> pick_day(0, weekdays.size() - 1);
		std::uniform_int_distribution<int> pick_period(calendar.work_begin(), calendar.work_end() - act.duration);
		const Slot slot {weekdays[pick_day(rng)], pick_period(rng)};
		if (slot == state.placement(a).slot) {
			return false;
		}
		return state.relocate({{a, slot}}, rng);
	}
	case MoveType::Swap: {
		int b = pick_activity(rng);
		if (b == a) {
			return false;
		}
		const Slot sa = state.placement(a).slot;
		const Slot sb = state.placement(b).slot;
		if (sa == sb) {
			return false;
		}
		return state.relocate({{a, sb}, {b, sa}}, rng);
	}
	case MoveType::Rooms:
		if (inst.num_buildings() < 2) {
			return false;
		}
		return state.relocate({{a, state.placement(a).slot}}, rng);
	}
	return false;
}

} // namespace

OptimizeResult optimize(const Instance &inst, const Calendar &calendar, const NetLoadSeries &forecast,
                        const PriceSeries &prices, BatteryPolicy policy, const OptimizerConfig &config) {
	if (const auto violations = validate_instance(inst); !violations.empty()) {
		throw DomainError("invalid instance: " + violations.front().message);
	}
	const auto horizon = static_cast<std::size_t>(calendar.horizon());
	if (forecast.values.size() != horizon || prices.values.size() != horizon) {
		throw InputError("forecast and prices must cover the calendar horizon of " + std::to_string(horizon) +
		                 " periods");
	}
	if (config.num_warm_starts < 1) {
		throw InputError("num_warm_starts must be at least 1");
	}

	OptimizeResult result;
	std::vector<Schedule> starts;
	if (inst.num_recurring() == 0) {
		starts.push_back(idle_schedule(inst, calendar));
		result.warm_start_costs.push_back(total_cost(forecast, prices, inst, calendar, starts.front()));
	} else {
		starts = conservative_warm_starts(inst, calendar, config.num_warm_starts, config.seed);
		for (const auto &s : starts) {
			result.warm_start_costs.push_back(total_cost(forecast, prices, inst, calendar, s));
		}
	}
	result.best_warm_start = static_cast<int>(
	    std::min_element(result.warm_start_costs.begin(), result.warm_start_costs.end()) - result.warm_start_costs.begin());

	SearchState state(inst, calendar, forecast, prices, policy, starts[result.best_warm_start]);
	state.redispatch();
	Schedule best = state.schedule();
	double best_cost = state.cost();

	std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
	const auto weekdays = detail::schedulable_weekdays(calendar);
	const int iterations = inst.num_recurring() == 0 ? 0 : std::max(0, config.local_search_iterations);

	// Start temperature from the uphill deltas of a few random moves.
	double uphill = 0.0;
	int uphill_count = 0;
	for (int k = 0; k < kTemperatureSamples && iterations > 0; ++k) {
		MoveType type {};
		const double before = state.cost();
		if (!propose(state, inst, calendar, weekdays, rng, type)) {
			continue;
		}
		if (type != MoveType::Rooms) {
			state.redispatch();
		}
		const double delta = state.cost() - before;
		state.undo();
		if (delta > 0.0) {
			uphill += delta;
			++uphill_count;
		}
	}
	const double acceptance = std::clamp(config.initial_acceptance, 1e-6, 1.0 - 1e-6);
	const double t0 = uphill_count ? (uphill / uphill_count) / -std::log(acceptance) : 1e-9;
	result.initial_temperature = t0;
	const double ratio = std::clamp(config.final_temperature_ratio, 1e-12, 1.0);

	const auto clock_start = std::chrono::steady_clock::now();
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	int done = 0;
	for (; done < iterations; ++done) {
		if (config.time_limit_seconds && (done & 63) == 0) {
			const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - clock_start;
			if (elapsed.count() > *config.time_limit_seconds) {
				break;
			}
		}
		const double temperature = t0 * std::pow(ratio, static_cast<double>(done) / iterations);
		const double before = state.cost();
		MoveType type {};
		if (!propose(state, inst, calendar, weekdays, rng, type)) {
			continue;
		}
		// Candidates are priced with batteries re-dispatched for the new load, otherwise moves
		// that only pay off once the batteries follow them are never accepted.
		if (type != MoveType::Rooms) {
			state.redispatch();
		}
		const double delta = state.cost() - before;
		const double draw = unit(rng);
		if (delta <= 0.0 || draw < std::exp(-delta / temperature)) {
			++result.accepted_moves;
			if (state.cost() < best_cost - 1e-12 * std::max(1.0, std::abs(best_cost))) {
				best_cost = state.cost();
				best = state.schedule();
			}
		} else {
			state.undo();
		}
	}
	result.iterations = done;

	const auto violations = check_feasibility(inst, calendar, best, policy);
	if (!violations.empty()) {
		throw std::logic_error("optimizer produced an infeasible schedule: " + violations.front().message);
	}
	result.cost = total_cost(forecast, prices, inst, calendar, best);
	result.schedule = std::move(best);
	return result;
}

double evaluate_against_actual(const Schedule &schedule, const NetLoadSeries &actual, const PriceSeries &prices,
                               const Instance &inst, const Calendar &calendar) {
	return total_cost(actual, prices, inst, calendar, schedule);
}

} // namespace ppo
