#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ppo {

enum class RoomSize { Small, Large };

char room_size_code(RoomSize size);

struct Building {
	int id = 0;
	int small_rooms = 0;
	int large_rooms = 0;

	int rooms(RoomSize size) const {
		return size == RoomSize::Small ? small_rooms : large_rooms;
	}

	bool operator==(const Building &) const = default;
};

struct SolarMapping {
	int solar_id = 0;
	int building_id = 0;

	bool operator==(const SolarMapping &) const = default;
};

struct Battery {
	int id = 0;
	double capacity = 0.0;   // kWh
	double max_power = 0.0;  // kW
	double efficiency = 1.0; // round trip, (0, 1]

	bool operator==(const Battery &) const = default;
};

// A class repeated every week at the same weekday and time. `load` is the total kW
// drawn while the activity runs, independent of rooms_required.
struct RecurringActivity {
	int id = 0;
	int rooms_required = 1;
	RoomSize room_size = RoomSize::Small;
	double load = 0.0;
	int duration = 1; // 15-minute periods
	std::vector<int> precedences;

	bool operator==(const RecurringActivity &) const = default;
};

// Parsed for completeness of the format; never scheduled.
struct OnceOffActivity {
	int id = 0;
	int rooms_required = 1;
	RoomSize room_size = RoomSize::Small;
	double load = 0.0;
	int duration = 1;
	double value = 0.0;
	double penalty = 0.0;
	std::vector<int> precedences;

	bool operator==(const OnceOffActivity &) const = default;
};

struct Instance {
	std::vector<Building> buildings;
	std::vector<SolarMapping> solar_maps;
	std::vector<Battery> batteries;
	std::vector<RecurringActivity> recurring;
	std::vector<OnceOffActivity> onceoff;

	std::size_t num_buildings() const {
		return buildings.size();
	}
	std::size_t num_solar() const {
		return solar_maps.size();
	}
	std::size_t num_batteries() const {
		return batteries.size();
	}
	std::size_t num_recurring() const {
		return recurring.size();
	}
	std::size_t num_onceoff() const {
		return onceoff.size();
	}

	int total_rooms(RoomSize size) const;

	bool operator==(const Instance &) const = default;
};

struct Violation {
	std::string kind; // stable machine-readable code, e.g. "precedence_cycle"
	std::string message;
};

// Parses the `ppoi` text format. Throws ParseError carrying the offending line number.
Instance parse_instance(std::string_view text);

// Canonical text: records grouped by type, ids ascending, single spaces, trailing newline.
std::string serialize_instance(const Instance &inst);

// Structural checks beyond parsing: index ranges, acyclic recurring precedences,
// room demand coverable by the total rooms of the required size.
std::vector<Violation> validate_instance(const Instance &inst);

// Recurring activity ids ordered so every predecessor comes first. Empty if cyclic.
std::vector<int> topological_order(const Instance &inst);

} // namespace ppo
