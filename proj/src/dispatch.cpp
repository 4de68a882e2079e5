#include "ppo/error.hpp"
#include "ppo/scheduler.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>

namespace ppo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kCostEps = 1e-12;
constexpr std::size_t kPairCandidates = 64;
// Charges a single cycle move may add in front of one discharge.
constexpr std::size_t kMaxCycleCharges = 6;
constexpr std::size_t kTopLoads = kMaxCycleCharges + 2;

bool improves(double delta, double scale) {
	return delta < -kCostEps * std::max(1.0, std::abs(scale));
}

void check_input(const DispatchInput &in) {
	if (!in.calendar) {
		throw InputError("dispatch input needs a calendar");
	}
	const auto horizon = static_cast<std::size_t>(in.calendar->horizon());
	if (in.net.size() != horizon || in.prices.size() != horizon || in.recurring.size() != horizon) {
		throw InputError("dispatch series lengths must equal the calendar horizon " + std::to_string(horizon));
	}
}

double recurring_max(const DispatchInput &in) {
	return in.recurring.empty() ? 0.0 : *std::max_element(in.recurring.begin(), in.recurring.end());
}

bool charge_forbidden_at(BatteryPolicy policy, const Calendar &calendar, std::size_t t) {
	switch (policy) {
	case BatteryPolicy::Conservative:
		return true;
	case BatteryPolicy::ForcedDischarge:
	case BatteryPolicy::NoForcedDischarge:
		return calendar.is_working_period(static_cast<int>(t));
	case BatteryPolicy::Liberal:
	case BatteryPolicy::VeryLiberal:
		break;
	}
	return false;
}

// Sparse table for O(1) range min/max over a fixed array.
class RangeExtrema {
public:
	void build(const std::vector<double> &v) {
		const std::size_t n = v.size();
		levels_ = 1;
		while ((std::size_t {1} << levels_) <= n) {
			++levels_;
		}
		mins_.resize(levels_);
		maxs_.resize(levels_);
		for (std::size_t k = 0; k < levels_; ++k) {
			mins_[k].resize(n);
			maxs_[k].resize(n);
		}
		std::copy(v.begin(), v.end(), mins_[0].begin());
		std::copy(v.begin(), v.end(), maxs_[0].begin());
		for (std::size_t k = 1; k < levels_; ++k) {
			const std::size_t half = std::size_t {1} << (k - 1);
			for (std::size_t i = 0; i + (std::size_t {1} << k) <= n; ++i) {
				mins_[k][i] = std::min(mins_[k - 1][i], mins_[k - 1][i + half]);
				maxs_[k][i] = std::max(maxs_[k - 1][i], maxs_[k - 1][i + half]);
			}
		}
	}

	// Inclusive range [lo, hi].
	double min(std::size_t lo, std::size_t hi) const {
		const auto k = level(hi - lo + 1);
		return std::min(mins_[k][lo], mins_[k][hi + 1 - (std::size_t {1} << k)]);
	}
	double max(std::size_t lo, std::size_t hi) const {
		const auto k = level(hi - lo + 1);
		return std::max(maxs_[k][lo], maxs_[k][hi + 1 - (std::size_t {1} << k)]);
	}

private:
	static std::size_t level(std::size_t len) {
		return static_cast<std::size_t>(std::bit_width(len)) - 1;
	}

	std::size_t levels_ = 0;
	std::vector<std::vector<double>> mins_;
	std::vector<std::vector<double>> maxs_;
};

enum class MoveKind {
	AddCharge,
	AddDischarge,
	AddPair,
	AddCycle,
	RemoveCharge,
	RemoveDischarge,
	RemovePair,
	ShiftCharge,    // charge_at -> discharge_at holds the target
	ShiftDischarge, // charge_at holds the source, discharge_at the target
};

struct Move {
	MoveKind kind = MoveKind::AddCharge;
	std::size_t battery = 0;
	std::size_t charge_at = 0;
	std::size_t discharge_at = 0;
	double delta = 0.0;
	// AddCycle only: the charges placed before discharge_at
	std::array<std::size_t, kMaxCycleCharges> cycle {};
	std::size_t cycle_len = 0;
};

struct LoadChange {
	std::size_t period = 0;
	double delta_kw = 0.0;
};

// Incremental view of a plan: per-period load, SOC trajectories and the top of the load profile,
// enough to price any move touching fewer than kTopLoads periods without a rescan.
class DispatchState {
public:
	// With pin_working_discharges, discharges in working periods are never removed or moved.
	DispatchState(const DispatchInput &in, BatteryPlan plan, bool pin_working_discharges = false)
	    : in_(in), horizon_(in.net.size()), plan_(std::move(plan)), rec_max_(recurring_max(in)),
	      pin_(pin_working_discharges) {
		for (const auto &b : in.batteries) {
			steps_.push_back(battery_step(b));
		}
		price_weight_.resize(horizon_);
		working_.resize(horizon_);
		charge_blocked_.resize(horizon_);
		for (std::size_t t = 0; t < horizon_; ++t) {
			price_weight_[t] = kPeriodHours * in.prices[t] / 1000.0;
			working_[t] = in.calendar->is_working_period(static_cast<int>(t));
			charge_blocked_[t] = charge_forbidden_at(in.policy, *in.calendar, t);
		}
		rebuild();
	}

	const BatteryPlan &plan() const {
		return plan_;
	}

	double cost() const {
		return energy_ + 0.005 * top_[0].value * top_[0].value;
	}

	// Best improving move, if any.
	std::optional<Move> best_move() const {
		std::optional<Move> best;
		auto offer = [&](const Move &m) {
			if (improves(m.delta, cost()) && (!best || m.delta < best->delta)) {
				best = m;
			}
		};
		for (std::size_t b = 0; b < plan_.batteries(); ++b) {
			scan_battery(b, offer);
		}
		return best;
	}

	void apply(const Move &m) {
		const auto b = m.battery;
		switch (m.kind) {
		case MoveKind::AddCharge:
			set(b, m.charge_at, BatteryAction::Charge);
			break;
		case MoveKind::AddDischarge:
			set(b, m.discharge_at, BatteryAction::Discharge);
			break;
		case MoveKind::AddPair:
			set(b, m.charge_at, BatteryAction::Charge);
			set(b, m.discharge_at, BatteryAction::Discharge);
			break;
		case MoveKind::AddCycle:
			for (std::size_t k = 0; k < m.cycle_len; ++k) {
				set(b, m.cycle[k], BatteryAction::Charge);
			}
			set(b, m.discharge_at, BatteryAction::Discharge);
			break;
		case MoveKind::RemoveCharge:
			set(b, m.charge_at, BatteryAction::Idle);
			break;
		case MoveKind::RemoveDischarge:
			set(b, m.discharge_at, BatteryAction::Idle);
			break;
		case MoveKind::RemovePair:
			set(b, m.charge_at, BatteryAction::Idle);
			set(b, m.discharge_at, BatteryAction::Idle);
			break;
		case MoveKind::ShiftCharge:
			set(b, m.charge_at, BatteryAction::Idle);
			set(b, m.discharge_at, BatteryAction::Charge);
			break;
		case MoveKind::ShiftDischarge:
			set(b, m.charge_at, BatteryAction::Idle);
			set(b, m.discharge_at, BatteryAction::Discharge);
			break;
		}
		refresh_battery(b);
		refresh_totals();
	}

private:
	struct Top {
		double value = kNegInf;
		std::size_t index = std::numeric_limits<std::size_t>::max();
	};

	void rebuild() {
		const std::size_t nb = plan_.batteries();
		load_.assign(in_.net.begin(), in_.net.end());
		charge_kw_.assign(horizon_, 0.0);
		soc_.resize(nb);
		suffix_min_.resize(nb);
		suffix_max_.resize(nb);
		ranges_.resize(nb);
		for (std::size_t b = 0; b < nb; ++b) {
			const auto &s = steps_[b];
			for (std::size_t t = 0; t < horizon_; ++t) {
				switch (plan_.at(b, t)) {
				case BatteryAction::Charge:
					load_[t] += s.charge_kw;
					charge_kw_[t] += s.charge_kw;
					break;
				case BatteryAction::Discharge:
					load_[t] -= s.discharge_kw;
					break;
				case BatteryAction::Idle:
					break;
				}
			}
			refresh_battery(b);
		}
		refresh_totals();
	}

	// Changes one action and recomputes the load at that period from scratch, so repeated moves
	// never accumulate rounding drift.
	void set(std::size_t b, std::size_t t, BatteryAction a) {
		plan_.set(b, t, a);
		double load = in_.net[t];
		double charge = 0.0;
		for (std::size_t k = 0; k < plan_.batteries(); ++k) {
			switch (plan_.at(k, t)) {
			case BatteryAction::Charge:
				load += steps_[k].charge_kw;
				charge += steps_[k].charge_kw;
				break;
			case BatteryAction::Discharge:
				load -= steps_[k].discharge_kw;
				break;
			case BatteryAction::Idle:
				break;
			}
		}
		load_[t] = load;
		charge_kw_[t] = charge;
	}

	void refresh_battery(std::size_t b) {
		const auto &s = steps_[b];
		auto &soc = soc_[b];
		auto &smin = suffix_min_[b];
		auto &smax = suffix_max_[b];
		soc.resize(horizon_);
		smin.resize(horizon_ + 1);
		smax.resize(horizon_ + 1);
		double level = 0.0;
		for (std::size_t t = 0; t < horizon_; ++t) {
			switch (plan_.at(b, t)) {
			case BatteryAction::Charge:
				level += s.charge_kwh;
				break;
			case BatteryAction::Discharge:
				level -= s.discharge_kwh;
				break;
			case BatteryAction::Idle:
				break;
			}
			soc[t] = level;
		}
		smin[horizon_] = std::numeric_limits<double>::infinity();
		smax[horizon_] = kNegInf;
		for (std::size_t t = horizon_; t-- > 0;) {
			smin[t] = std::min(smin[t + 1], soc[t]);
			smax[t] = std::max(smax[t + 1], soc[t]);
		}
		ranges_[b].build(soc);
	}

	void refresh_totals() {
		energy_ = 0.0;
		for (std::size_t t = 0; t < horizon_; ++t) {
			energy_ += price_weight_[t] * load_[t];
		}
		top_ = {};
		for (std::size_t t = 0; t < horizon_; ++t) {
			Top cand {load_[t], t};
			for (auto &slot : top_) {
				if (cand.value > slot.value) {
					std::swap(cand, slot);
				}
			}
		}
	}

	// Cost change of shifting the load at a few distinct periods.
	double price_delta(std::span<const LoadChange> changes) const {
		double energy = 0.0;
		double peak = kNegInf;
		for (const auto &c : changes) {
			energy += price_weight_[c.period] * c.delta_kw;
			peak = std::max(peak, load_[c.period] + c.delta_kw);
		}
		for (const auto &slot : top_) {
			const bool touched = std::any_of(changes.begin(), changes.end(),
			                                 [&](const LoadChange &c) { return c.period == slot.index; });
			if (!touched) {
				peak = std::max(peak, slot.value);
				break;
			}
		}
		const double old_peak = top_[0].value;
		return energy + 0.005 * (peak * peak - old_peak * old_peak);
	}

	double price_delta(std::size_t p, double dv) const {
		const double rest = top_[0].index == p ? top_[1].value : top_[0].value;
		const double peak = std::max(rest, load_[p] + dv);
		const double old_peak = top_[0].value;
		return price_weight_[p] * dv + 0.005 * (peak * peak - old_peak * old_peak);
	}

	double price_delta(std::size_t p1, double dv1, std::size_t p2, double dv2) const {
		double peak = std::max(load_[p1] + dv1, load_[p2] + dv2);
		for (const auto &slot : top_) {
			if (slot.index != p1 && slot.index != p2) {
				peak = std::max(peak, slot.value);
				break;
			}
		}
		const double old_peak = top_[0].value;
		return price_weight_[p1] * dv1 + price_weight_[p2] * dv2 + 0.005 * (peak * peak - old_peak * old_peak);
	}

	bool may_charge(std::size_t b, std::size_t t) const {
		if (charge_blocked_[t]) {
			return false;
		}
		if (in_.policy == BatteryPolicy::Liberal) {
			return in_.recurring[t] + charge_kw_[t] + steps_[b].charge_kw <= rec_max_ + 1e-9;
		}
		return true;
	}

	struct Candidate {
		std::size_t t = 0;
		double delta = 0.0;
	};

	// Keeps the kPairCandidates cheapest, earliest first among equals.
	static void shortlist(std::vector<Candidate> &v) {
		const auto k = std::min(v.size(), kPairCandidates);
		std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end(),
		                  [](const Candidate &a, const Candidate &b) {
			                  return a.delta < b.delta || (a.delta == b.delta && a.t < b.t);
		                  });
		v.resize(k);
	}

	template <typename Offer>
	void scan_battery(std::size_t b, Offer &&offer) const {
		if (in_.policy == BatteryPolicy::Conservative) {
			return;
		}
		const auto &s = steps_[b];
		const double cap = in_.batteries[b].capacity;
		const auto &smin = suffix_min_[b];
		const auto &smax = suffix_max_[b];

		auto &charges = charges_;
		auto &discharges = discharges_;
		auto &held_charges = held_charges_;
		auto &held_discharges = held_discharges_;
		charges.clear();
		discharges.clear();
		held_charges.clear();
		held_discharges.clear();
		for (std::size_t t = 0; t < horizon_; ++t) {
			switch (plan_.at(b, t)) {
			case BatteryAction::Idle: {
				if (may_charge(b, t)) {
					const double d = price_delta(t, s.charge_kw);
					charges.push_back({t, d});
					if (smax[t] + s.charge_kwh <= cap + kSocTolerance) {
						offer(Move {MoveKind::AddCharge, b, t, 0, d});
					}
				}
				const double d = price_delta(t, -s.discharge_kw);
				discharges.push_back({t, d});
				if (smin[t] - s.discharge_kwh >= -kSocTolerance) {
					offer(Move {MoveKind::AddDischarge, b, 0, t, d});
				}
				break;
			}
			case BatteryAction::Charge: {
				const double d = price_delta(t, -s.charge_kw);
				held_charges.push_back({t, d});
				if (smin[t] - s.charge_kwh >= -kSocTolerance) {
					offer(Move {MoveKind::RemoveCharge, b, t, 0, d});
				}
				break;
			}
			case BatteryAction::Discharge: {
				if (pin_ && working_[t]) {
					break;
				}
				const double d = price_delta(t, s.discharge_kw);
				held_discharges.push_back({t, d});
				if (smax[t] + s.discharge_kwh <= cap + kSocTolerance) {
					offer(Move {MoveKind::RemoveDischarge, b, 0, t, d});
				}
				break;
			}
			}
		}

		shortlist(charges);
		shortlist(discharges);
		for (const auto &c : charges) {
			for (const auto &d : discharges) {
				if (c.t >= d.t) {
					continue;
				}
				const double shift = s.charge_kwh - s.discharge_kwh;
				if (ranges_[b].max(c.t, d.t - 1) + s.charge_kwh > cap + kSocTolerance ||
				    smin[d.t] + shift < -kSocTolerance || smax[d.t] + shift > cap + kSocTolerance) {
					continue;
				}
				offer(Move {MoveKind::AddPair, b, c.t, d.t, price_delta(c.t, s.charge_kw, d.t, -s.discharge_kw)});
			}
		}

		// One charge stores less than one discharge drains when efficiency is low, so a
		// discharge may need several charges in front of it before it becomes feasible.
		for (const auto &d : discharges) {
			const auto dt = d.t;
			const double deficit = s.discharge_kwh - smin[dt];
			if (deficit <= kSocTolerance) {
				continue;
			}
			const auto need = static_cast<std::size_t>(std::ceil(deficit / s.charge_kwh - 1e-12));
			if (need < 2 || need > kMaxCycleCharges) {
				continue;
			}
			Move m {MoveKind::AddCycle, b, 0, dt, 0.0};
			for (const auto &c : charges) {
				if (c.t < dt) {
					m.cycle[m.cycle_len++] = c.t;
					if (m.cycle_len == need) {
						break;
					}
				}
			}
			if (m.cycle_len < need) {
				continue;
			}
			std::sort(m.cycle.begin(), m.cycle.begin() + static_cast<std::ptrdiff_t>(need));
			bool ok = true;
			for (std::size_t k = 0; k < need && ok; ++k) {
				const std::size_t end = k + 1 < need ? m.cycle[k + 1] : dt;
				ok = ranges_[b].max(m.cycle[k], end - 1) + static_cast<double>(k + 1) * s.charge_kwh <=
				     cap + kSocTolerance;
			}
			const double shift = static_cast<double>(need) * s.charge_kwh - s.discharge_kwh;
			if (!ok || smin[dt] + shift < -kSocTolerance || smax[dt] + shift > cap + kSocTolerance) {
				continue;
			}
			std::array<LoadChange, kMaxCycleCharges + 1> changes {};
			for (std::size_t k = 0; k < need; ++k) {
				changes[k] = {m.cycle[k], s.charge_kw};
			}
			changes[need] = {dt, -s.discharge_kw};
			m.delta = price_delta(std::span<const LoadChange>(changes.data(), need + 1));
			offer(m);
		}

		shortlist(held_charges);
		shortlist(held_discharges);
		// Moving an action keeps the energy balance and only bends the SOC between source and target.
		auto shift_ok = [&](std::size_t from, std::size_t to, double soc_change) {
			const auto lo = std::min(from, to);
			const auto hi = std::max(from, to) - 1;
			const double v = from < to ? soc_change : -soc_change;
			return v >= 0.0 ? ranges_[b].max(lo, hi) + v <= cap + kSocTolerance
			                : ranges_[b].min(lo, hi) + v >= -kSocTolerance;
		};
		for (const auto &h : held_charges) {
			for (const auto &c : charges) {
				// leaving `from` lowers the SOC until `to` when to > from
				if (shift_ok(h.t, c.t, -s.charge_kwh)) {
					offer(Move {MoveKind::ShiftCharge, b, h.t, c.t, price_delta(h.t, -s.charge_kw, c.t, s.charge_kw)});
				}
			}
		}
		for (const auto &h : held_discharges) {
			for (const auto &d : discharges) {
				if (shift_ok(h.t, d.t, s.discharge_kwh)) {
					offer(Move {MoveKind::ShiftDischarge, b, h.t, d.t,
					            price_delta(h.t, s.discharge_kw, d.t, -s.discharge_kw)});
				}
			}
		}

		for (const auto &c : held_charges) {
			for (const auto &d : held_discharges) {
				if (c.t >= d.t) {
					continue;
				}
				const double shift = s.discharge_kwh - s.charge_kwh;
				if (ranges_[b].min(c.t, d.t - 1) - s.charge_kwh < -kSocTolerance ||
				    smin[d.t] + shift < -kSocTolerance || smax[d.t] + shift > cap + kSocTolerance) {
					continue;
				}
				offer(Move {MoveKind::RemovePair, b, c.t, d.t, price_delta(c.t, -s.charge_kw, d.t, s.discharge_kw)});
			}
		}
	}

	const DispatchInput &in_;
	std::size_t horizon_;
	BatteryPlan plan_;
	std::vector<BatteryStep> steps_;
	double rec_max_;
	bool pin_;

	std::vector<double> load_;
	std::vector<double> charge_kw_;
	std::vector<std::vector<double>> soc_;
	std::vector<std::vector<double>> suffix_min_;
	std::vector<std::vector<double>> suffix_max_;
	std::vector<RangeExtrema> ranges_;
	double energy_ = 0.0;
	std::array<Top, kTopLoads> top_ {};

	// fixed per input
	std::vector<double> price_weight_; // $ per kW held for one period
	std::vector<char> working_;
	std::vector<char> charge_blocked_;

	// scratch for scan_battery
	mutable std::vector<Candidate> charges_;
	mutable std::vector<Candidate> discharges_;
	mutable std::vector<Candidate> held_charges_;
	mutable std::vector<Candidate> held_discharges_;
};

BatteryPlan greedy(const DispatchInput &in, BatteryPlan start, bool pin_working_discharges = false) {
	DispatchState state(in, std::move(start), pin_working_discharges);
	const std::size_t max_moves = 8 * in.net.size() * std::max<std::size_t>(1, in.batteries.size()) + 16;
	for (std::size_t k = 0; k < max_moves; ++k) {
		auto move = state.best_move();
		if (!move) {
			break;
		}
		state.apply(*move);
	}
	return state.plan();
}

// Greedy moves are priced without forced discharges; under ForcedDischarge the greedy plan is
// relaxed to NoForcedDischarge, then repaired and kept only if it still pays off. Forced
// discharges already in the plan stay pinned, or the greedy would strip them only for the
// repair to put them back.
BatteryPlan improve_with_repair(const DispatchInput &in, BatteryPlan start) {
	BatteryPlan best = repair_battery_plan(in, std::move(start));
	double best_cost = dispatch_cost(in, best);
	if (in.policy == BatteryPolicy::Conservative) {
		return best;
	}
	DispatchInput relaxed = in;
	if (in.policy == BatteryPolicy::ForcedDischarge) {
		relaxed.policy = BatteryPolicy::NoForcedDischarge;
	}
	const bool pin = in.policy == BatteryPolicy::ForcedDischarge;
	BatteryPlan candidate = repair_battery_plan(in, greedy(relaxed, best, pin));
	const double cost = dispatch_cost(in, candidate);
	if (improves(cost - best_cost, best_cost)) {
		best = std::move(candidate);
	}
	return best;
}

} // namespace

double dispatch_cost(const DispatchInput &input, const BatteryPlan &plan) {
	std::vector<double> load(input.net.begin(), input.net.end());
	for (std::size_t b = 0; b < plan.batteries(); ++b) {
		const auto s = battery_step(input.batteries[b]);
		for (std::size_t t = 0; t < plan.horizon(); ++t) {
			const auto a = plan.at(b, t);
			if (a == BatteryAction::Charge) {
				load[t] += s.charge_kw;
			} else if (a == BatteryAction::Discharge) {
				load[t] -= s.discharge_kw;
			}
		}
	}
	return objective(load, input.prices);
}

BatteryPlan repair_battery_plan(const DispatchInput &in, BatteryPlan plan) {
	check_input(in);
	const std::size_t nb = in.batteries.size();
	const std::size_t horizon = in.net.size();
	if (plan.batteries() != nb || plan.horizon() != horizon) {
		plan = BatteryPlan(nb, horizon);
	}
	if (in.policy == BatteryPolicy::Conservative) {
		return BatteryPlan(nb, horizon);
	}
	std::vector<BatteryStep> steps;
	for (const auto &b : in.batteries) {
		steps.push_back(battery_step(b));
	}
	const double rec_max = recurring_max(in);
	std::vector<double> soc(nb, 0.0);
	for (std::size_t t = 0; t < horizon; ++t) {
		double charge_kw = 0.0;
		bool discharging = false;
		for (std::size_t b = 0; b < nb; ++b) {
			const auto &s = steps[b];
			switch (plan.at(b, t)) {
			case BatteryAction::Charge: {
				const bool policy_ok =
				    !charge_forbidden_at(in.policy, *in.calendar, t) &&
				    (in.policy != BatteryPolicy::Liberal || in.recurring[t] + charge_kw + s.charge_kw <= rec_max + 1e-9);
				if (policy_ok && soc[b] + s.charge_kwh <= in.batteries[b].capacity + kSocTolerance) {
					soc[b] += s.charge_kwh;
					charge_kw += s.charge_kw;
				} else {
					plan.set(b, t, BatteryAction::Idle);
				}
				break;
			}
			case BatteryAction::Discharge:
				if (soc[b] - s.discharge_kwh >= -kSocTolerance) {
					soc[b] -= s.discharge_kwh;
					discharging = true;
				} else {
					plan.set(b, t, BatteryAction::Idle);
				}
				break;
			case BatteryAction::Idle:
				break;
			}
		}
		if (in.policy == BatteryPolicy::ForcedDischarge && !discharging &&
		    in.calendar->is_working_period(static_cast<int>(t))) {
			// an idle battery still holds its entering charge
			std::size_t pick = nb;
			double best_soc = 0.0;
			for (std::size_t b = 0; b < nb; ++b) {
				if (plan.at(b, t) == BatteryAction::Idle && soc[b] >= steps[b].discharge_kwh - kSocTolerance &&
				    soc[b] > best_soc) {
					pick = b;
					best_soc = soc[b];
				}
			}
			if (pick < nb) {
				plan.set(pick, t, BatteryAction::Discharge);
				soc[pick] -= steps[pick].discharge_kwh;
			}
		}
	}
	return plan;
}

BatteryPlan improve_battery_plan(const DispatchInput &input, BatteryPlan start) {
	check_input(input);
	return improve_with_repair(input, std::move(start));
}

BatteryPlan dispatch_battery_heuristic(const DispatchInput &input) {
	check_input(input);
	const BatteryPlan idle(input.batteries.size(), input.net.size());
	BatteryPlan plan = improve_with_repair(input, idle);
	if (dispatch_cost(input, plan) > dispatch_cost(input, idle)) {
		return idle;
	}
	return plan;
}

BatteryPlan dispatch_battery_exact(const DispatchInput &in) {
	check_input(in);
	if (in.batteries.size() != 1) {
		throw InputError("exact dispatch handles exactly one battery");
	}
	const std::size_t horizon = in.net.size();
	if (horizon > static_cast<std::size_t>(kMaxExactHorizon)) {
		throw InputError("exact dispatch horizon " + std::to_string(horizon) + " exceeds " +
		                 std::to_string(kMaxExactHorizon));
	}
	const auto &bat = in.batteries[0];
	const auto s = battery_step(bat);
	const double rec_max = recurring_max(in);

	// Lower bounds on what the remaining periods can contribute.
	std::vector<double> energy_floor(horizon + 1, 0.0);
	std::vector<double> load_floor(horizon + 1, kNegInf);
	for (std::size_t t = horizon; t-- > 0;) {
		const double e = kPeriodHours * in.prices[t] / 1000.0;
		const double best = std::min({e * in.net[t], e * (in.net[t] + s.charge_kw), e * (in.net[t] - s.discharge_kw)});
		energy_floor[t] = energy_floor[t + 1] + best;
		load_floor[t] = std::max(load_floor[t + 1], in.net[t] - s.discharge_kw);
	}

	std::vector<BatteryAction> path(horizon, BatteryAction::Idle);
	std::vector<BatteryAction> best_path(horizon, BatteryAction::Idle);
	double best_cost = std::numeric_limits<double>::infinity();

	auto peak_floor = [](double m) { return m > 0.0 ? 0.005 * m * m : 0.0; };

	auto dfs = [&](auto &&self, std::size_t t, double soc, double energy, double run_max) -> void {
		if (t == horizon) {
			const double cost = energy + (horizon ? 0.005 * run_max * run_max : 0.0);
			if (cost < best_cost - kCostEps * std::max(1.0, std::abs(best_cost == std::numeric_limits<double>::infinity()
			                                                             ? cost
			                                                             : best_cost))) {
				best_cost = cost;
				best_path = path;
			}
			return;
		}
		const double bound = energy + energy_floor[t] + peak_floor(std::max(run_max, load_floor[t]));
		if (bound >= best_cost) {
			return;
		}
		const double e = kPeriodHours * in.prices[t] / 1000.0;
		const bool working = in.calendar->is_working_period(static_cast<int>(t));
		const bool can_discharge = in.policy != BatteryPolicy::Conservative && soc - s.discharge_kwh >= -kSocTolerance;
		const bool forced = in.policy == BatteryPolicy::ForcedDischarge && working && can_discharge;
		const bool can_charge = !charge_forbidden_at(in.policy, *in.calendar, t) &&
		                        soc + s.charge_kwh <= bat.capacity + kSocTolerance &&
		                        (in.policy != BatteryPolicy::Liberal || in.recurring[t] + s.charge_kw <= rec_max + 1e-9);

		if (!forced) {
			path[t] = BatteryAction::Idle;
			const double l = in.net[t];
			self(self, t + 1, soc, energy + e * l, t == 0 ? l : std::max(run_max, l));
			if (can_charge) {
				path[t] = BatteryAction::Charge;
				const double lc = in.net[t] + s.charge_kw;
				self(self, t + 1, soc + s.charge_kwh, energy + e * lc, t == 0 ? lc : std::max(run_max, lc));
			}
		}
		if (can_discharge) {
			path[t] = BatteryAction::Discharge;
			const double ld = in.net[t] - s.discharge_kw;
			self(self, t + 1, soc - s.discharge_kwh, energy + e * ld, t == 0 ? ld : std::max(run_max, ld));
		}
		path[t] = BatteryAction::Idle;
	};
	dfs(dfs, 0, 0.0, 0.0, kNegInf);

	BatteryPlan plan(1, horizon);
	for (std::size_t t = 0; t < horizon; ++t) {
		plan.set(0, t, best_path[t]);
	}
	return plan;
}

} // namespace ppo
