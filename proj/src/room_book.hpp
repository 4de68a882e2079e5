#pragma once

#include "ppo/evaluator.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace ppo::detail {

// Room occupancy per building, size, weekday and period of day.
class RoomBook {
public:
	RoomBook(const Instance &inst, const Calendar &calendar)
	    : inst_(&inst), ppd_(calendar.periods_per_day()), used_(inst.num_buildings() * 2 * 5 * ppd_, 0) {
	}

	int free_rooms(std::size_t building, RoomSize size, int weekday, int begin, int duration) const {
		int busiest = 0;
		for (int k = 0; k < duration; ++k) {
			busiest = std::max(busiest, cell(building, size, weekday, begin + k));
		}
		return inst_->buildings[building].rooms(size) - busiest;
	}

	// Takes rooms building by building in `order` until `count` rooms are found.
	std::optional<std::vector<RoomAssignment>> allocate(RoomSize size, int count, int weekday, int begin, int duration,
	                                                    std::span<const int> order) const {
		std::vector<RoomAssignment> rooms;
		for (int b : order) {
			const int take = std::min(count - static_cast<int>(rooms.size()),
			                          free_rooms(static_cast<std::size_t>(b), size, weekday, begin, duration));
			for (int k = 0; k < take; ++k) {
				rooms.push_back({b, size});
			}
			if (static_cast<int>(rooms.size()) == count) {
				return rooms;
			}
		}
		return std::nullopt;
	}

	void add(const Placement &p, int duration) {
		update(p, duration, 1);
	}
	void remove(const Placement &p, int duration) {
		update(p, duration, -1);
	}

private:
	int cell(std::size_t b, RoomSize size, int weekday, int pod) const {
		return used_[index(b, size, weekday, pod)];
	}
	std::size_t index(std::size_t b, RoomSize size, int weekday, int pod) const {
		return ((b * 2 + (size == RoomSize::Large)) * 5 + static_cast<std::size_t>(weekday)) * ppd_ +
		       static_cast<std::size_t>(pod);
	}
	void update(const Placement &p, int duration, int sign) {
		for (const auto &r : p.rooms) {
			for (int k = 0; k < duration; ++k) {
				used_[index(static_cast<std::size_t>(r.building), r.size, static_cast<int>(p.slot.weekday),
				            p.slot.period_of_day + k)] += sign;
			}
		}
	}

	const Instance *inst_;
	std::size_t ppd_;
	std::vector<int> used_;
};

// Weekdays (Mon..Fri) that occur in the calendar.
inline std::vector<Weekday> schedulable_weekdays(const Calendar &calendar) {
	std::vector<Weekday> out;
	for (int d = 0; d < 5; ++d) {
		if (calendar.contains_weekday(static_cast<Weekday>(d))) {
			out.push_back(static_cast<Weekday>(d));
		}
	}
	return out;
}

inline std::vector<int> shuffled_buildings(std::size_t n, std::mt19937_64 &rng) {
	std::vector<int> order(n);
	for (std::size_t i = 0; i < n; ++i) {
		order[i] = static_cast<int>(i);
	}
	std::shuffle(order.begin(), order.end(), rng);
	return order;
}

} // namespace ppo::detail
