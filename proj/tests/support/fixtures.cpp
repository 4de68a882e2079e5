#include "fixtures.hpp"

#include "ppo/correction.hpp"
#include "ppo/error.hpp"
#include "ppo/format.hpp"
#include "ppo/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ppo::fixtures {

const std::string kExampleInstance = "ppoi 3 2 1 4 2\n"
                                     "b 0 1 2\n"
                                     "b 1 1 0\n"
                                     "b 2 0 1\n"
                                     "s 0 0\n"
                                     "s 1 2\n"
                                     "c 0 5 2 0.87\n"
                                     "r 0 1 L 15 8 1 2\n"
                                     "r 1 2 S 8 12 0\n"
                                     "r 2 2 L 10 4 0\n"
                                     "r 3 1 S 4 4 0\n"
                                     "a 0 2 S 8 12 500 100 0\n"
                                     "a 1 2 L 8 16 2000 1500 1 0\n";

namespace {

int uniform_int(std::mt19937_64 &rng, int lo, int hi) {
	return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(std::mt19937_64 &rng, double lo, double hi) {
	return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Values with short and long decimal expansions so the text format is exercised.
double messy(std::mt19937_64 &rng, double lo, double hi) {
	const double v = uniform_real(rng, lo, hi);
	switch (uniform_int(rng, 0, 2)) {
	case 0:
		return std::round(v);
	case 1:
		return std::round(v * 100.0) / 100.0;
	default:
		return v;
	}
}

std::vector<int> random_predecessors(std::mt19937_64 &rng, int id, int count, bool acyclic) {
	std::vector<int> out;
	const int limit = acyclic ? id : count;
	if (limit == 0) {
		return out;
	}
	const int n = uniform_int(rng, 0, std::min(3, limit));
	for (int k = 0; k < n; ++k) {
		const int p = uniform_int(rng, 0, limit - 1);
		if (p != id && std::find(out.begin(), out.end(), p) == out.end()) {
			out.push_back(p);
		}
	}
	return out;
}

} // namespace

Instance random_instance(std::mt19937_64 &rng, int max_count) {
	Instance inst;
	const int nb = uniform_int(rng, 0, max_count);
	for (int i = 0; i < nb; ++i) {
		inst.buildings.push_back({i, uniform_int(rng, 0, 5), uniform_int(rng, 0, 5)});
	}
	const int ns = nb ? uniform_int(rng, 0, max_count) : 0;
	for (int i = 0; i < ns; ++i) {
		inst.solar_maps.push_back({i, uniform_int(rng, 0, nb - 1)});
	}
	const int nc = uniform_int(rng, 0, max_count);
	for (int i = 0; i < nc; ++i) {
		const double eff = uniform_int(rng, 0, 4) == 0 ? 1.0 : messy(rng, 0.5, 0.99);
		inst.batteries.push_back({i, messy(rng, 1, 500), messy(rng, 1, 200), std::clamp(eff, 0.01, 1.0)});
	}
	const int nr = uniform_int(rng, 0, max_count);
	const bool acyclic = uniform_int(rng, 0, 3) != 0;
	for (int i = 0; i < nr; ++i) {
		RecurringActivity r;
		r.id = i;
		r.rooms_required = uniform_int(rng, 1, 4);
		r.room_size = uniform_int(rng, 0, 1) ? RoomSize::Large : RoomSize::Small;
		r.load = messy(rng, 0, 100);
		r.duration = uniform_int(rng, 1, 16);
		r.precedences = random_predecessors(rng, i, nr, acyclic);
		inst.recurring.push_back(r);
	}
	const int na = uniform_int(rng, 0, max_count);
	for (int i = 0; i < na; ++i) {
		OnceOffActivity a;
		a.id = i;
		a.rooms_required = uniform_int(rng, 1, 4);
		a.room_size = uniform_int(rng, 0, 1) ? RoomSize::Large : RoomSize::Small;
		a.load = messy(rng, 0, 100);
		a.duration = uniform_int(rng, 1, 16);
		a.value = messy(rng, 0, 5000);
		a.penalty = messy(rng, 0, 5000);
		a.precedences = random_predecessors(rng, i, na, true);
		inst.onceoff.push_back(a);
	}
	return inst;
}

Instance random_schedulable_instance(std::mt19937_64 &rng, const Calendar &calendar, int recurring, int batteries,
                                     int buildings) {
	Instance inst;
	for (int i = 0; i < buildings; ++i) {
		inst.buildings.push_back({i, uniform_int(rng, 1, 3), uniform_int(rng, 1, 2)});
	}
	for (int i = 0; i < batteries; ++i) {
		const double power = std::round(uniform_real(rng, 20, 80));
		const double periods = uniform_int(rng, 2, 8);
		inst.batteries.push_back({i, power * 0.25 * periods, power, std::round(uniform_real(rng, 80, 97)) / 100.0});
	}
	const int window = calendar.work_periods_per_day();
	for (int i = 0; i < recurring; ++i) {
		RecurringActivity r;
		r.id = i;
		r.room_size = uniform_int(rng, 0, 2) == 0 ? RoomSize::Large : RoomSize::Small;
		r.rooms_required = 1;
		r.load = std::round(uniform_real(rng, 5, 60));
		r.duration = uniform_int(rng, 1, std::max(1, window / 3));
		if (i > 0 && uniform_int(rng, 0, 3) == 0) {
			r.precedences.push_back(uniform_int(rng, 0, i - 1));
		}
		inst.recurring.push_back(r);
	}
	return inst;
}

std::vector<double> uniform_series(std::mt19937_64 &rng, std::size_t n, double lo, double hi) {
	std::vector<double> out(n);
	for (auto &v : out) {
		v = uniform_real(rng, lo, hi);
	}
	return out;
}

NetLoadSeries synthetic_load(std::mt19937_64 &rng, const Calendar &calendar, double base, double hump) {
	NetLoadSeries out;
	const int ppd = calendar.periods_per_day();
	for (int t = 0; t < calendar.horizon(); ++t) {
		const double phase = static_cast<double>(t % ppd) / ppd;
		const double day = calendar.is_weekday(t / ppd) ? 1.0 : 0.6;
		out.values.push_back(base + day * hump * std::max(0.0, std::sin(3.14159265358979 * (phase * 1.6 - 0.3))) +
		                     uniform_real(rng, -10, 10));
	}
	return out;
}

PriceSeries synthetic_prices(std::mt19937_64 &rng, const Calendar &calendar) {
	PriceSeries out;
	const int ppd = calendar.periods_per_day();
	for (int t = 0; t < calendar.horizon(); ++t) {
		const double phase = static_cast<double>(t % ppd) / ppd;
		const double evening = phase > 0.7 && phase < 0.85 ? 60.0 : 0.0;
		out.values.push_back(40.0 + evening + uniform_real(rng, -15, 15));
	}
	return out;
}

namespace {

bool charge_allowed(BatteryPolicy policy, const Calendar &calendar, std::size_t t, double recurring, double power,
                    double rec_max) {
	switch (policy) {
	case BatteryPolicy::Conservative:
		return false;
	case BatteryPolicy::ForcedDischarge:
	case BatteryPolicy::NoForcedDischarge:
		return !calendar.is_working_period(static_cast<int>(t));
	case BatteryPolicy::Liberal:
		return recurring + power <= rec_max + 1e-9;
	case BatteryPolicy::VeryLiberal:
		return true;
	}
	return false;
}

} // namespace

double enumerate_single_battery(const Battery &battery, std::span<const double> net, std::span<const double> recurring,
                                std::span<const double> prices, BatteryPolicy policy, const Calendar &calendar) {
	const std::size_t h = net.size();
	const double root = std::sqrt(battery.efficiency);
	const double in_kwh = 0.25 * battery.max_power * root;
	const double out_kwh = 0.25 * battery.max_power;
	const double out_kw = root * battery.max_power;
	const double rec_max = recurring.empty() ? 0.0 : *std::max_element(recurring.begin(), recurring.end());
	std::size_t plans = 1;
	for (std::size_t t = 0; t < h; ++t) {
		plans *= 3;
	}
	double best = std::numeric_limits<double>::infinity();
	std::vector<double> load(h);
	for (std::size_t code = 0; code < plans; ++code) {
		std::size_t c = code;
		double soc = 0.0;
		bool ok = true;
		for (std::size_t t = 0; t < h && ok; ++t) {
			const int action = static_cast<int>(c % 3);
			c /= 3;
			const bool able = soc >= out_kwh - 1e-9;
			load[t] = net[t];
			if (action == 1) {
				ok = charge_allowed(policy, calendar, t, recurring[t], battery.max_power, rec_max);
				soc += in_kwh;
				load[t] += battery.max_power;
			} else if (action == 2) {
				ok = policy != BatteryPolicy::Conservative;
				soc -= out_kwh;
				load[t] -= out_kw;
			}
			if (policy == BatteryPolicy::ForcedDischarge && calendar.is_working_period(static_cast<int>(t)) && able &&
			    action != 2) {
				ok = false;
			}
			ok = ok && soc >= -1e-9 && soc <= battery.capacity + 1e-9;
		}
		if (!ok) {
			continue;
		}
		double energy = 0.0;
		for (std::size_t t = 0; t < h; ++t) {
			energy += 0.25 * load[t] * prices[t] / 1000.0;
		}
		const double peak = *std::max_element(load.begin(), load.end());
		best = std::min(best, energy + 0.005 * peak * peak);
	}
	return best;
}

bool plan_feasible(std::span<const Battery> batteries, const BatteryPlan &plan, std::span<const double> recurring,
                   BatteryPolicy policy, const Calendar &calendar) {
	if (plan.batteries() != batteries.size()) {
		return false;
	}
	const std::size_t h = plan.horizon();
	const double rec_max = recurring.empty() ? 0.0 : *std::max_element(recurring.begin(), recurring.end());
	std::vector<double> soc(batteries.size(), 0.0);
	for (std::size_t t = 0; t < h; ++t) {
		bool able = false;
		bool discharging = false;
		double charge_kw = 0.0;
		for (std::size_t b = 0; b < batteries.size(); ++b) {
			const double root = std::sqrt(batteries[b].efficiency);
			able = able || soc[b] >= 0.25 * batteries[b].max_power - 1e-9;
			switch (plan.at(b, t)) {
			case BatteryAction::Charge:
				if (policy == BatteryPolicy::Conservative || ((policy == BatteryPolicy::ForcedDischarge ||
				                                               policy == BatteryPolicy::NoForcedDischarge) &&
				                                              calendar.is_working_period(static_cast<int>(t)))) {
					return false;
				}
				soc[b] += 0.25 * batteries[b].max_power * root;
				charge_kw += batteries[b].max_power;
				break;
			case BatteryAction::Discharge:
				if (policy == BatteryPolicy::Conservative) {
					return false;
				}
				soc[b] -= 0.25 * batteries[b].max_power;
				discharging = true;
				break;
			case BatteryAction::Idle:
				break;
			}
			if (soc[b] < -1e-9 || soc[b] > batteries[b].capacity + 1e-9) {
				return false;
			}
		}
		if (policy == BatteryPolicy::Liberal && charge_kw > 0.0 && recurring[t] + charge_kw > rec_max + 1e-9) {
			return false;
		}
		if (policy == BatteryPolicy::ForcedDischarge && calendar.is_working_period(static_cast<int>(t)) && able &&
		    !discharging) {
			return false;
		}
	}
	return true;
}

double brute_force_optimum(const Instance &inst, const Calendar &calendar, const NetLoadSeries &forecast,
                           const PriceSeries &prices, BatteryPolicy policy) {
	if (inst.num_batteries() > 1) {
		throw std::invalid_argument("brute force handles at most one battery");
	}
	const int ppd = calendar.periods_per_day();
	const int nr = static_cast<int>(inst.num_recurring());
	std::vector<Slot> slots;
	for (int wd = 0; wd < 5; ++wd) {
		if (!calendar.contains_weekday(static_cast<Weekday>(wd))) {
			continue;
		}
		for (int p = calendar.work_begin(); p < calendar.work_end(); ++p) {
			slots.push_back({static_cast<Weekday>(wd), p});
		}
	}
	std::vector<std::size_t> choice(nr, 0);
	std::map<std::vector<double>, double> memo;
	double best = std::numeric_limits<double>::infinity();
	const std::size_t h = forecast.values.size();

	while (true) {
		bool ok = true;
		// working window
		for (int a = 0; a < nr && ok; ++a) {
			ok = slots[choice[a]].period_of_day + inst.recurring[a].duration <= calendar.work_end();
		}
		// precedence on week positions
		for (int a = 0; a < nr && ok; ++a) {
			const int start = static_cast<int>(slots[choice[a]].weekday) * ppd + slots[choice[a]].period_of_day;
			for (int p : inst.recurring[a].precedences) {
				const int pend = static_cast<int>(slots[choice[p]].weekday) * ppd + slots[choice[p]].period_of_day +
				                 inst.recurring[p].duration;
				ok = ok && pend <= start;
			}
		}
		// room counts per weekday period and size
		for (int wd = 0; wd < 5 && ok; ++wd) {
			for (int pod = 0; pod < ppd && ok; ++pod) {
				int small = 0, large = 0;
				for (int a = 0; a < nr; ++a) {
					const auto &s = slots[choice[a]];
					if (static_cast<int>(s.weekday) == wd && pod >= s.period_of_day &&
					    pod < s.period_of_day + inst.recurring[a].duration) {
						(inst.recurring[a].room_size == RoomSize::Small ? small : large) += inst.recurring[a].rooms_required;
					}
				}
				ok = small <= inst.total_rooms(RoomSize::Small) && large <= inst.total_rooms(RoomSize::Large);
			}
		}
		if (ok) {
			std::vector<double> rec(h, 0.0);
			for (int a = 0; a < nr; ++a) {
				const auto &s = slots[choice[a]];
				for (int d = 0; d < calendar.days(); ++d) {
					if (calendar.weekday_of_day(d) != s.weekday) {
						continue;
					}
					for (int k = 0; k < inst.recurring[a].duration; ++k) {
						rec[d * ppd + s.period_of_day + k] += inst.recurring[a].load;
					}
				}
			}
			auto it = memo.find(rec);
			if (it == memo.end()) {
				std::vector<double> net(h);
				for (std::size_t t = 0; t < h; ++t) {
					net[t] = forecast.values[t] + rec[t];
				}
				double cost = 0.0;
				if (inst.num_batteries() == 0 || policy == BatteryPolicy::Conservative) {
					cost = objective(net, prices.values);
				} else {
					DispatchInput in {net, rec, prices.values, inst.batteries, policy, &calendar};
					cost = dispatch_cost(in, dispatch_battery_exact(in));
				}
				it = memo.emplace(rec, cost).first;
			}
			best = std::min(best, it->second);
		}
		int a = 0;
		while (a < nr && ++choice[a] == slots.size()) {
			choice[a++] = 0;
		}
		if (a == nr) {
			break;
		}
	}
	return best;
}

std::vector<ForecastOutcome> planted_outcomes(std::mt19937_64 &rng, CostModelParams truth, int count, double noise) {
	std::vector<ForecastOutcome> out;
	const auto actual = uniform_series(rng, 200, 100, 300);
	for (int k = 0; k < count; ++k) {
		ForecastOutcome o;
		o.actual = actual;
		const double bias = std::uniform_real_distribution<double>(-60, 60)(rng);
		const double slope = std::uniform_real_distribution<double>(0.7, 1.3)(rng);
		const double spread = std::uniform_real_distribution<double>(0, 40)(rng);
		const auto jitter = uniform_series(rng, actual.size(), -spread, spread);
		for (std::size_t i = 0; i < actual.size(); ++i) {
			o.predicted.push_back(bias + slope * actual[i] + jitter[i]);
		}
		const auto z = Standardizer::of(o.actual);
		o.observed_cost = v_cost(z.apply(o.actual), z.apply(o.predicted), truth);
		out.push_back(std::move(o));
	}
	double mean = 0.0, ss = 0.0;
	for (const auto &o : out) {
		mean += o.observed_cost;
	}
	mean /= out.size();
	for (const auto &o : out) {
		ss += (o.observed_cost - mean) * (o.observed_cost - mean);
	}
	const double sd = std::sqrt(ss / (out.size() - 1));
	std::normal_distribution<double> gauss(0.0, noise * sd);
	for (auto &o : out) {
		o.observed_cost += gauss(rng);
	}
	return out;
}

DispatchCase random_dispatch_case(std::mt19937_64 &rng, int horizon, int batteries, BatteryPolicy policy) {
	const int work_begin = std::uniform_int_distribution<int>(0, horizon / 2)(rng);
	const int work_end = std::uniform_int_distribution<int>(work_begin, horizon)(rng);
	DispatchCase c {Calendar(Weekday::Mon, 1, horizon, work_begin, work_end), {}, {}, {}, {}, policy};
	for (int b = 0; b < batteries; ++b) {
		const double power = std::uniform_real_distribution<double>(5, 60)(rng);
		const double periods = std::uniform_int_distribution<int>(1, 5)(rng);
		const double eff = std::uniform_real_distribution<double>(0.7, 1.0)(rng);
		c.batteries.push_back({b, 0.25 * power * periods, power, eff});
	}
	c.recurring = uniform_series(rng, horizon, 0, 40);
	for (auto &v : c.recurring) {
		if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
			v = 0.0;
		}
	}
	c.net = uniform_series(rng, horizon, 50, 250);
	for (int t = 0; t < horizon; ++t) {
		c.net[t] += c.recurring[t];
	}
	c.prices = uniform_series(rng, horizon, -10, 200);
	return c;
}

TempDir::TempDir(const std::string &tag) {
	static std::atomic<int> counter {0};
	const auto base = std::filesystem::temp_directory_path();
	for (;;) {
		auto candidate = base / ("ppo_" + tag + "_" + std::to_string(std::random_device {}()) + "_" +
		                         std::to_string(counter++));
		if (std::filesystem::create_directories(candidate)) {
			path_ = candidate;
			return;
		}
	}
}

TempDir::~TempDir() {
	std::error_code ec;
	std::filesystem::remove_all(path_, ec);
}

void write_file(const std::filesystem::path &path, const std::string &text) {
	if (path.has_parent_path()) {
		std::filesystem::create_directories(path.parent_path());
	}
	std::ofstream out(path, std::ios::binary);
	out << text;
	if (!out) {
		throw std::runtime_error("cannot write " + path.string());
	}
}

std::string read_file(const std::filesystem::path &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw std::runtime_error("cannot read " + path.string());
	}
	std::ostringstream buf;
	buf << in.rdbuf();
	return buf.str();
}

void write_month_csv(const std::filesystem::path &path, const Calendar &calendar, std::span<const double> values) {
	std::ostringstream out;
	write_series_csv(out, calendar, values);
	write_file(path, out.str());
}

void write_price_csv(const std::filesystem::path &path, const Calendar &calendar, const PriceSeries &prices) {
	const auto &start = calendar.start_date();
	if (!start || calendar.periods_per_day() != Calendar::kPeriodsPerDay) {
		throw std::invalid_argument("price CSVs need a standard calendar month");
	}
	std::ostringstream out;
	out << "timestamp,price\n";
	for (int day = 0; day < calendar.days(); ++day) {
		for (int half = 0; half < 48; ++half) {
			const Timestamp ts {int(start->year()), unsigned(start->month()), unsigned(day + 1), half / 2,
			                    (half % 2) * 30, 0};
			out << format_timestamp(ts) << ',' << format_number(prices.values[std::size_t(day * 96 + half * 2)])
			    << '\n';
		}
	}
	write_file(path, out.str());
}

} // namespace ppo::fixtures
