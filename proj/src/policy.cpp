#include "ppo/scheduler.hpp"

#include <algorithm>
#include <string>

namespace ppo {

std::vector<Violation> policy_check(BatteryPolicy policy, const Instance &inst, const Calendar &calendar,
                                    const Schedule &schedule) {
	std::vector<Violation> out;
	const auto &plan = schedule.battery_plan;
	if (plan.batteries() != inst.num_batteries()) {
		return out;
	}
	const auto horizon = plan.horizon();
	auto at = [&](std::size_t t) { return weekday_name(calendar.weekday_of_day(static_cast<int>(t) / calendar.periods_per_day())) +
	                                      std::string(" period ") + std::to_string(t); };

	switch (policy) {
	case BatteryPolicy::VeryLiberal:
		break;

	case BatteryPolicy::Conservative:
		if (!plan.all_idle()) {
			out.push_back({"policy_conservative", "conservative policy keeps every battery idle"});
		}
		break;

	case BatteryPolicy::ForcedDischarge:
	case BatteryPolicy::NoForcedDischarge: {
		for (std::size_t t = 0; t < horizon; ++t) {
			if (!calendar.is_working_period(static_cast<int>(t))) {
				continue;
			}
			for (std::size_t b = 0; b < plan.batteries(); ++b) {
				if (plan.at(b, t) == BatteryAction::Charge) {
					out.push_back({"policy_peak_charge", "battery " + std::to_string(b) + " charges in working hours at " + at(t)});
				}
			}
		}
		if (policy == BatteryPolicy::NoForcedDischarge) {
			break;
		}
		std::vector<BatteryStep> steps;
		for (const auto &b : inst.batteries) {
			steps.push_back(battery_step(b));
		}
		std::vector<double> soc(plan.batteries(), 0.0);
		for (std::size_t t = 0; t < horizon; ++t) {
			bool able = false;
			bool discharging = false;
			for (std::size_t b = 0; b < plan.batteries(); ++b) {
				able = able || soc[b] >= steps[b].discharge_kwh - kSocTolerance;
				switch (plan.at(b, t)) {
				case BatteryAction::Charge:
					soc[b] += steps[b].charge_kwh;
					break;
				case BatteryAction::Discharge:
					soc[b] -= steps[b].discharge_kwh;
					discharging = true;
					break;
				case BatteryAction::Idle:
					break;
				}
			}
			if (able && !discharging && calendar.is_working_period(static_cast<int>(t))) {
				out.push_back({"policy_forced_discharge", "no battery discharges at " + at(t) + " although one could"});
			}
		}
		break;
	}

	case BatteryPolicy::Liberal: {
		const auto recurring = activity_load_profile(inst, calendar, schedule);
		if (recurring.size() != horizon) {
			break;
		}
		const double rec_max = recurring.empty() ? 0.0 : *std::max_element(recurring.begin(), recurring.end());
		for (std::size_t t = 0; t < horizon; ++t) {
			double charge = 0.0;
			for (std::size_t b = 0; b < plan.batteries(); ++b) {
				if (plan.at(b, t) == BatteryAction::Charge) {
					charge += inst.batteries[b].max_power;
				}
			}
			if (charge > 0.0 && recurring[t] + charge > rec_max + 1e-9) {
				out.push_back({"policy_liberal_peak", "charging at " + at(t) + " lifts recurring load plus charge to " +
				                                          std::to_string(recurring[t] + charge) + " kW above the recurring peak " +
				                                          std::to_string(rec_max) + " kW"});
			}
		}
		break;
	}
	}
	return out;
}

} // namespace ppo
