#pragma once

#include <optional>
#include <string_view>

namespace ppo {

// Battery operating regimes, ordered from least to most trust in the forecast.
enum class BatteryPolicy {
	Conservative,      // batteries stay idle
	ForcedDischarge,   // no charging in working periods; discharge whenever a battery can
	NoForcedDischarge, // no charging in working periods
	Liberal,           // charging anywhere, but charge power never lifts the recurring-load peak
	VeryLiberal,       // unconstrained
};

inline constexpr BatteryPolicy kAllPolicies[] = {BatteryPolicy::Conservative, BatteryPolicy::ForcedDischarge,
                                                 BatteryPolicy::NoForcedDischarge, BatteryPolicy::Liberal,
                                                 BatteryPolicy::VeryLiberal};

// CLI spelling: conservative, forced-discharge, no-forced-discharge, liberal, very-liberal.
std::string_view policy_name(BatteryPolicy policy);
std::optional<BatteryPolicy> parse_policy(std::string_view name);

} // namespace ppo
