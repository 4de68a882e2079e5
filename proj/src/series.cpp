#include "ppo/series.hpp"

#include "ppo/error.hpp"
#include "ppo/format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace ppo {

namespace chr = std::chrono;

const char *weekday_name(Weekday day) {
	static constexpr const char *names[] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
	return names[static_cast<int>(day)];
}

Calendar::Calendar(Weekday first_weekday, int days, int periods_per_day, int work_begin, int work_end)
    : first_weekday_(first_weekday), days_(days), periods_per_day_(periods_per_day), work_begin_(work_begin),
      work_end_(work_end) {
	if (days < 1) {
		throw InputError("calendar needs at least one day");
	}
	if (periods_per_day < 1 || work_begin < 0 || work_begin > work_end || work_end > periods_per_day) {
		throw InputError("calendar working window must lie inside the day");
	}
}

Calendar Calendar::for_month(int year, unsigned month) {
	const chr::year_month_day first {chr::year {year}, chr::month {month}, chr::day {1}};
	if (!first.ok()) {
		throw InputError("invalid calendar month " + std::to_string(year) + "-" + std::to_string(month));
	}
	const chr::year_month_day_last last {chr::year {year}, chr::month_day_last {chr::month {month}}};
	const chr::weekday wd {chr::sys_days {first}};
	Calendar cal(static_cast<Weekday>(wd.iso_encoding() - 1), static_cast<int>(static_cast<unsigned>(last.day())));
	cal.start_ = first;
	return cal;
}

Calendar Calendar::for_month(std::string_view year_month) {
	int year = 0;
	unsigned month = 0;
	char tail = 0;
	const std::string text(year_month);
	if (std::sscanf(text.c_str(), "%d-%u%c", &year, &month, &tail) != 2) {
		throw InputError("expected month as YYYY-MM, got '" + text + "'");
	}
	return for_month(year, month);
}

Weekday Calendar::weekday_of_day(int day) const {
	return static_cast<Weekday>((static_cast<int>(first_weekday_) + day) % 7);
}

bool Calendar::is_weekday(int day) const {
	return static_cast<int>(weekday_of_day(day)) < 5;
}

bool Calendar::is_working_period(int period) const {
	if (period < 0 || period >= horizon()) {
		return false;
	}
	const int pod = period % periods_per_day_;
	return is_weekday(period / periods_per_day_) && pod >= work_begin_ && pod < work_end_;
}

bool Calendar::contains_weekday(Weekday day) const {
	if (days_ >= 7) {
		return true;
	}
	const int offset = (static_cast<int>(day) - static_cast<int>(first_weekday_) + 7) % 7;
	return offset < days_;
}

std::size_t RawSeries::missing() const {
	return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::nullopt));
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
	const std::string s(text);
	Timestamp ts;
	char sep = 0;
	char tail = 0;
	int n = std::sscanf(s.c_str(), "%d-%u-%u%c%d:%d:%d%c", &ts.year, &ts.month, &ts.day, &sep, &ts.hour, &ts.minute,
	                    &ts.second, &tail);
	if (n == 5 || n == 6) {
		// "HH:MM" without seconds; sscanf stops at the missing ':'
		ts.second = 0;
		int consumed = 0;
		if (std::sscanf(s.c_str(), "%*d-%*u-%*u%*c%*d:%*d%n", &consumed) != 0 || consumed != static_cast<int>(s.size())) {
			return std::nullopt;
		}
	} else if (n != 7) {
		return std::nullopt;
	}
	if (sep != ' ' && sep != 'T') {
		return std::nullopt;
	}
	const chr::year_month_day ymd {chr::year {ts.year}, chr::month {ts.month}, chr::day {ts.day}};
	if (!ymd.ok() || ts.hour < 0 || ts.hour > 23 || ts.minute < 0 || ts.minute > 59 || ts.second < 0 ||
	    ts.second > 59) {
		return std::nullopt;
	}
	return ts;
}

std::string format_timestamp(const Timestamp &ts) {
	char buf[32];
	std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", ts.year, ts.month, ts.day, ts.hour, ts.minute,
	              ts.second);
	return buf;
}

namespace {

std::string trim(std::string_view s) {
	const auto b = s.find_first_not_of(" \t\r\n");
	if (b == std::string_view::npos) {
		return {};
	}
	const auto e = s.find_last_not_of(" \t\r\n");
	return std::string(s.substr(b, e - b + 1));
}

// Seconds since epoch for ordering and alignment.
long long seconds_of(const Timestamp &ts) {
	const chr::sys_days d {chr::year_month_day {chr::year {ts.year}, chr::month {ts.month}, chr::day {ts.day}}};
	return static_cast<long long>(d.time_since_epoch().count()) * 86400LL + ts.hour * 3600LL + ts.minute * 60LL +
	       ts.second;
}

long long start_seconds(const Calendar &calendar, const std::string &source) {
	if (!calendar.start_date() || calendar.periods_per_day() != Calendar::kPeriodsPerDay) {
		throw InputError(source + ": aligning timestamps needs a dated 15-minute calendar");
	}
	return static_cast<long long>(chr::sys_days {*calendar.start_date()}.time_since_epoch().count()) * 86400LL;
}

Timestamp timestamp_at(long long seconds) {
	const auto days = seconds / 86400;
	const auto rest = seconds % 86400;
	const chr::year_month_day ymd {chr::sys_days {chr::days {days}}};
	Timestamp ts;
	ts.year = static_cast<int>(ymd.year());
	ts.month = static_cast<unsigned>(ymd.month());
	ts.day = static_cast<unsigned>(ymd.day());
	ts.hour = static_cast<int>(rest / 3600);
	ts.minute = static_cast<int>((rest % 3600) / 60);
	ts.second = static_cast<int>(rest % 60);
	return ts;
}

} // namespace

std::vector<CsvRow> read_timestamped_csv(std::istream &in, const std::string &source) {
	std::string line;
	std::size_t line_no = 0;
	bool header_seen = false;
	std::vector<CsvRow> rows;
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty()) {
			continue;
		}
		const auto comma = line.find(',');
		if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
			throw InputError(source + ":" + std::to_string(line_no) + ": expected exactly two columns");
		}
		const auto first = trim(std::string_view(line).substr(0, comma));
		const auto second = trim(std::string_view(line).substr(comma + 1));
		if (!header_seen) {
			if (first != "timestamp") {
				throw InputError(source + ":" + std::to_string(line_no) + ": header must start with 'timestamp'");
			}
			header_seen = true;
			continue;
		}
		CsvRow row;
		row.line = line_no;
		auto ts = parse_timestamp(first);
		if (!ts) {
			throw InputError(source + ":" + std::to_string(line_no) + ": bad timestamp '" + first + "'");
		}
		row.timestamp = *ts;
		if (!second.empty()) {
			row.value = parse_double(second);
			if (!row.value) {
				throw InputError(source + ":" + std::to_string(line_no) + ": non-numeric value '" + second + "'");
			}
		}
		if (!rows.empty()) {
			const auto prev = seconds_of(rows.back().timestamp);
			const auto cur = seconds_of(row.timestamp);
			if (cur == prev) {
				throw InputError(source + ":" + std::to_string(line_no) + ": duplicate timestamp " + first);
			}
			if (cur < prev) {
				throw InputError(source + ":" + std::to_string(line_no) + ": timestamps not increasing at " + first);
			}
		}
		rows.push_back(row);
	}
	if (!header_seen) {
		throw InputError(source + ": empty CSV, missing header");
	}
	return rows;
}

std::vector<CsvRow> read_timestamped_csv(const std::filesystem::path &path) {
	std::ifstream in(path);
	if (!in) {
		throw InputError("cannot open " + path.string());
	}
	return read_timestamped_csv(in, path.string());
}

RawSeries align_series(const std::vector<CsvRow> &rows, const Calendar &calendar, const std::string &source) {
	const auto origin = start_seconds(calendar, source);
	RawSeries out;
	out.values.assign(calendar.horizon(), std::nullopt);
	for (const auto &row : rows) {
		const auto offset = seconds_of(row.timestamp) - origin;
		if (offset % 900 != 0) {
			throw InputError(source + ":" + std::to_string(row.line) + ": timestamp not on a 15-minute boundary");
		}
		const auto period = offset / 900;
		if (period < 0 || period >= calendar.horizon()) {
			throw InputError(source + ":" + std::to_string(row.line) + ": timestamp " +
			                 format_timestamp(row.timestamp) + " outside the calendar horizon");
		}
		out.values[period] = row.value;
	}
	return out;
}

RawSeries load_series_csv(const std::filesystem::path &path, const Calendar &calendar) {
	return align_series(read_timestamped_csv(path), calendar, path.string());
}

std::vector<double> load_price_csv(const std::filesystem::path &path, const Calendar &calendar) {
	const auto rows = read_timestamped_csv(path);
	const auto source = path.string();
	const auto origin = start_seconds(calendar, source);
	const int slots = calendar.horizon() / 2;
	std::vector<std::optional<double>> prices(slots);
	for (const auto &row : rows) {
		const auto offset = seconds_of(row.timestamp) - origin;
		if (offset % 1800 != 0) {
			throw InputError(source + ":" + std::to_string(row.line) + ": price timestamp not on a half hour");
		}
		const auto slot = offset / 1800;
		if (slot < 0 || slot >= slots) {
			throw InputError(source + ":" + std::to_string(row.line) + ": timestamp outside the calendar horizon");
		}
		if (!row.value) {
			throw InputError(source + ":" + std::to_string(row.line) + ": missing price");
		}
		prices[slot] = row.value;
	}
	std::vector<double> out;
	out.reserve(slots);
	for (int k = 0; k < slots; ++k) {
		if (!prices[k]) {
			throw InputError(source + ": no price for half hour " + std::to_string(k));
		}
		out.push_back(*prices[k]);
	}
	return out;
}

void write_series_csv(std::ostream &out, const Calendar &calendar, std::span<const std::optional<double>> values,
                      std::string_view column) {
	const auto origin = start_seconds(calendar, "series output");
	out << "timestamp," << column << '\n';
	for (std::size_t t = 0; t < values.size(); ++t) {
		out << format_timestamp(timestamp_at(origin + static_cast<long long>(t) * 900)) << ',';
		if (values[t]) {
			out << format_number(*values[t]);
		}
		out << '\n';
	}
}

void write_series_csv(std::ostream &out, const Calendar &calendar, std::span<const double> values,
                      std::string_view column) {
	std::vector<std::optional<double>> present(values.begin(), values.end());
	write_series_csv(out, calendar, present, column);
}

NetLoadSeries net_load(std::span<const RawSeries> buildings, std::span<const RawSeries> solars,
                       const Calendar &calendar) {
	const auto horizon = static_cast<std::size_t>(calendar.horizon());
	NetLoadSeries out;
	out.values.assign(horizon, 0.0);
	auto accumulate = [&](std::span<const RawSeries> group, double sign) {
		for (const auto &s : group) {
			if (s.size() != horizon) {
				throw InputError("series length " + std::to_string(s.size()) + " does not match horizon " +
				                 std::to_string(horizon));
			}
			for (std::size_t t = 0; t < horizon; ++t) {
				if (s.values[t]) {
					out.values[t] += sign * *s.values[t];
				}
			}
		}
	};
	accumulate(buildings, 1.0);
	accumulate(solars, -1.0);
	return out;
}

PriceSeries expand_prices(std::span<const double> halfhourly, const Calendar &calendar) {
	if (calendar.horizon() % 2 != 0 || halfhourly.size() * 2 != static_cast<std::size_t>(calendar.horizon())) {
		throw InputError("expected " + std::to_string(calendar.horizon() / 2) + " half-hourly prices, got " +
		                 std::to_string(halfhourly.size()));
	}
	PriceSeries out;
	out.values.reserve(calendar.horizon());
	for (double p : halfhourly) {
		out.values.push_back(p);
		out.values.push_back(p);
	}
	return out;
}

std::vector<int> working_periods(const Calendar &calendar) {
	std::vector<int> out;
	for (int d = 0; d < calendar.days(); ++d) {
		if (!calendar.is_weekday(d)) {
			continue;
		}
		for (int p = calendar.work_begin(); p < calendar.work_end(); ++p) {
			out.push_back(d * calendar.periods_per_day() + p);
		}
	}
	return out;
}

namespace {

double quantile_sorted(const std::vector<double> &sorted, double q) {
	const double pos = q * static_cast<double>(sorted.size() - 1);
	const auto lo = static_cast<std::size_t>(std::floor(pos));
	const auto hi = std::min(lo + 1, sorted.size() - 1);
	return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace

DescriptiveStats descriptive_stats(std::span<const double> values) {
	if (values.empty()) {
		throw DomainError("descriptive statistics need at least one present value");
	}
	DescriptiveStats s;
	s.count = values.size();
	double sum = 0.0;
	for (double v : values) {
		sum += v;
	}
	s.mean = sum / static_cast<double>(s.count);
	double ss = 0.0;
	for (double v : values) {
		ss += (v - s.mean) * (v - s.mean);
	}
	s.std = s.count > 1 ? std::sqrt(ss / static_cast<double>(s.count - 1)) : 0.0;
	std::vector<double> sorted(values.begin(), values.end());
	std::sort(sorted.begin(), sorted.end());
	s.min = sorted.front();
	s.max = sorted.back();
	s.iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
	return s;
}

DescriptiveStats descriptive_stats(const RawSeries &series) {
	std::vector<double> present;
	present.reserve(series.size());
	for (const auto &v : series.values) {
		if (v) {
			present.push_back(*v);
		}
	}
	return descriptive_stats(present);
}

} // namespace ppo
