#pragma once

#include "ppo/evaluator.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace ppo {

// Schedule as JSON:
//   {"placements": [{"activity": 0, "weekday": 0, "period": 40, "rooms": [[1, "S"]]}, ...],
//    "battery_plan": [["I", "I", "C", "D", ...], ...]}
// weekday counts from Monday = 0; each battery row holds one action code per period. Reading
// also accepts a row written as a single string such as "IICD".
// Output is deterministic: placements sorted by activity, fixed key order.
std::string schedule_to_json(const Schedule &schedule);

// Throws InputError on malformed documents. Structural checks only; use check_feasibility
// for everything else.
Schedule schedule_from_json(std::string_view text);

Schedule read_schedule(const std::filesystem::path &path);
void write_schedule(const std::filesystem::path &path, const Schedule &schedule);

} // namespace ppo
