#include "ppo/error.hpp"
#include "ppo/scheduler.hpp"
#include "room_book.hpp"

#include <algorithm>
#include <random>

namespace ppo {

namespace {

constexpr double kTieEps = 1e-9;
constexpr int kAttemptsPerStart = 25;

// One greedy peak-levelling pass. Activities are taken in precedence order, heaviest ready
// activity first; each goes to the slot that keeps the weekly recurring peak lowest.
std::optional<Schedule> level_once(const Instance &inst, const Calendar &calendar, std::mt19937_64 &rng) {
	const int nr = static_cast<int>(inst.num_recurring());
	const int ppd = calendar.periods_per_day();
	const auto weekdays = detail::schedulable_weekdays(calendar);
	detail::RoomBook book(inst, calendar);
	std::vector<double> week(5 * static_cast<std::size_t>(ppd), 0.0);
	double peak = 0.0;

	std::vector<int> indegree(nr, 0);
	std::vector<std::vector<int>> successors(nr);
	for (const auto &r : inst.recurring) {
		for (int p : r.precedences) {
			successors[p].push_back(r.id);
			++indegree[r.id];
		}
	}
	std::vector<int> ready;
	for (int a = 0; a < nr; ++a) {
		if (indegree[a] == 0) {
			ready.push_back(a);
		}
	}

	std::vector<std::optional<Placement>> placed(nr);
	std::uniform_real_distribution<double> coin(0.0, 1.0);
	while (!ready.empty()) {
		// heaviest ready activity, random among equals
		std::shuffle(ready.begin(), ready.end(), rng);
		auto pick = std::max_element(ready.begin(), ready.end(), [&](int x, int y) {
			return inst.recurring[x].load < inst.recurring[y].load;
		});
		const int a = *pick;
		ready.erase(pick);
		const auto &act = inst.recurring[a];

		int earliest = 0;
		for (int p : act.precedences) {
			earliest = std::max(earliest, week_position(placed[p]->slot, calendar) + inst.recurring[p].duration);
		}

		const auto order = detail::shuffled_buildings(inst.num_buildings(), rng);
		std::optional<Placement> best;
		double best_peak = 0.0;
		double best_local = 0.0;
		int ties = 0;
		for (auto wd : weekdays) {
			for (int pod = calendar.work_begin(); pod + act.duration <= calendar.work_end(); ++pod) {
				const Slot slot {wd, pod};
				if (week_position(slot, calendar) < earliest) {
					continue;
				}
				auto rooms = book.allocate(act.room_size, act.rooms_required, static_cast<int>(wd), pod, act.duration, order);
				if (!rooms) {
					continue;
				}
				double local = 0.0;
				for (int k = 0; k < act.duration; ++k) {
					local = std::max(local, week[static_cast<int>(wd) * ppd + pod + k] + act.load);
				}
				const double new_peak = std::max(peak, local);
				const bool better = !best || new_peak < best_peak - kTieEps ||
				                    (new_peak <= best_peak + kTieEps && local < best_local - kTieEps);
				const bool tie = best && !better && new_peak <= best_peak + kTieEps && local <= best_local + kTieEps;
				if (better) {
					best = Placement {a, slot, std::move(*rooms)};
					best_peak = new_peak;
					best_local = local;
					ties = 1;
				} else if (tie && coin(rng) * ++ties < 1.0) {
					best = Placement {a, slot, std::move(*rooms)};
				}
			}
		}
		if (!best) {
			return std::nullopt;
		}
		book.add(*best, act.duration);
		for (int k = 0; k < act.duration; ++k) {
			week[static_cast<int>(best->slot.weekday) * ppd + best->slot.period_of_day + k] += act.load;
		}
		peak = best_peak;
		placed[a] = std::move(best);
		for (int s : successors[a]) {
			if (--indegree[s] == 0) {
				ready.push_back(s);
			}
		}
	}

	Schedule schedule = idle_schedule(inst, calendar);
	for (auto &p : placed) {
		if (!p) {
			return std::nullopt; // cyclic precedences leave activities unplaced
		}
		schedule.placements.push_back(std::move(*p));
	}
	return schedule;
}

} // namespace

std::vector<Schedule> conservative_warm_starts(const Instance &inst, const Calendar &calendar, int n,
                                               std::uint64_t seed) {
	if (n < 1) {
		throw InputError("need at least one warm start");
	}
	if (const auto violations = validate_instance(inst); !violations.empty()) {
		throw DomainError("invalid instance: " + violations.front().message);
	}
	std::mt19937_64 rng(seed);
	std::vector<Schedule> out;
	for (int k = 0; k < n; ++k) {
		std::optional<Schedule> chosen;
		for (int attempt = 0; attempt < kAttemptsPerStart; ++attempt) {
			auto s = level_once(inst, calendar, rng);
			if (!s) {
				continue;
			}
			const bool duplicate = std::find(out.begin(), out.end(), *s) != out.end();
			if (!chosen || !duplicate) {
				chosen = std::move(s);
			}
			if (!duplicate) {
				break;
			}
		}
		if (!chosen) {
			throw DomainError("no feasible placement of the recurring activities was found");
		}
		out.push_back(std::move(*chosen));
	}
	return out;
}

} // namespace ppo
