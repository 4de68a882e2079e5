#include "ppo/schedule_io.hpp"

#include "ppo/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ppo {

using nlohmann::json;

std::string schedule_to_json(const Schedule &schedule) {
	auto placements = schedule.placements;
	std::stable_sort(placements.begin(), placements.end(),
	                 [](const Placement &a, const Placement &b) { return a.activity < b.activity; });
	std::ostringstream out;
	out << "{\n  \"placements\": [";
	for (std::size_t i = 0; i < placements.size(); ++i) {
		const auto &p = placements[i];
		out << (i ? ",\n" : "\n") << "    {\"activity\": " << p.activity
		    << ", \"weekday\": " << static_cast<int>(p.slot.weekday) << ", \"period\": " << p.slot.period_of_day
		    << ", \"rooms\": [";
		for (std::size_t k = 0; k < p.rooms.size(); ++k) {
			out << (k ? ", " : "") << '[' << p.rooms[k].building << ", \"" << room_size_code(p.rooms[k].size) << "\"]";
		}
		out << "]}";
	}
	out << (placements.empty() ? "]" : "\n  ]") << ",\n  \"battery_plan\": [";
	const auto &plan = schedule.battery_plan;
	for (std::size_t b = 0; b < plan.batteries(); ++b) {
		out << (b ? ",\n" : "\n") << "    [";
		bool first = true;
		for (auto a : plan.row(b)) {
			out << (first ? "\"" : ", \"") << action_code(a) << '"';
			first = false;
		}
		out << ']';
	}
	out << (plan.batteries() ? "\n  ]" : "]") << "\n}\n";
	return out.str();
}

namespace {

int as_int(const json &j, const char *what) {
	if (!j.is_number_integer()) {
		throw InputError(std::string("schedule: ") + what + " must be an integer");
	}
	return j.get<int>();
}

BatteryAction parse_action(char c) {
	switch (c) {
	case 'I':
		return BatteryAction::Idle;
	case 'C':
		return BatteryAction::Charge;
	case 'D':
		return BatteryAction::Discharge;
	default:
		throw InputError(std::string("schedule: unknown battery action '") + c + "'");
	}
}

} // namespace

Schedule schedule_from_json(std::string_view text) {
	json doc;
	try {
		doc = json::parse(text);
	} catch (const json::parse_error &e) {
		throw InputError(std::string("schedule: ") + e.what());
	}
	if (!doc.is_object() || !doc.contains("placements") || !doc.contains("battery_plan") ||
	    !doc["placements"].is_array() || !doc["battery_plan"].is_array()) {
		throw InputError("schedule: expected an object with 'placements' and 'battery_plan' arrays");
	}
	Schedule s;
	for (const auto &p : doc["placements"]) {
		if (!p.is_object() || !p.contains("activity") || !p.contains("weekday") || !p.contains("period") ||
		    !p.contains("rooms") || !p["rooms"].is_array()) {
			throw InputError("schedule: placement needs activity, weekday, period and rooms");
		}
		Placement out;
		out.activity = as_int(p["activity"], "activity");
		const int wd = as_int(p["weekday"], "weekday");
		if (wd < 0 || wd > 6) {
			throw InputError("schedule: weekday must be in 0..6");
		}
		out.slot = Slot {static_cast<Weekday>(wd), as_int(p["period"], "period")};
		for (const auto &r : p["rooms"]) {
			if (!r.is_array() || r.size() != 2 || !r[1].is_string()) {
				throw InputError("schedule: a room is [building, \"S\"|\"L\"]");
			}
			const auto code = r[1].get<std::string>();
			if (code != "S" && code != "L") {
				throw InputError("schedule: room size must be S or L");
			}
			out.rooms.push_back({as_int(r[0], "building"), code == "S" ? RoomSize::Small : RoomSize::Large});
		}
		s.placements.push_back(std::move(out));
	}
	// Rows are arrays of one-letter codes; a plain string of codes is accepted as shorthand.
	std::vector<std::string> rows;
	for (const auto &row : doc["battery_plan"]) {
		std::string codes;
		if (row.is_string()) {
			codes = row.get<std::string>();
		} else if (row.is_array()) {
			for (const auto &c : row) {
				if (!c.is_string() || c.get_ref<const std::string &>().size() != 1) {
					throw InputError("schedule: battery actions are \"C\", \"D\" or \"I\"");
				}
				codes += c.get_ref<const std::string &>()[0];
			}
		} else {
			throw InputError("schedule: battery plan rows are arrays of action codes");
		}
		if (!rows.empty() && codes.size() != rows.front().size()) {
			throw InputError("schedule: battery plan rows differ in length");
		}
		rows.push_back(std::move(codes));
	}
	s.battery_plan = BatteryPlan(rows.size(), rows.empty() ? 0 : rows.front().size());
	for (std::size_t b = 0; b < rows.size(); ++b) {
		for (std::size_t t = 0; t < rows[b].size(); ++t) {
			s.battery_plan.set(b, t, parse_action(rows[b][t]));
		}
	}
	return s;
}

Schedule read_schedule(const std::filesystem::path &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw InputError("cannot open " + path.string());
	}
	std::ostringstream buf;
	buf << in.rdbuf();
	return schedule_from_json(buf.str());
}

void write_schedule(const std::filesystem::path &path, const Schedule &schedule) {
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw InputError("cannot write " + path.string());
	}
	out << schedule_to_json(schedule);
}

} // namespace ppo
