#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppo {

enum class Weekday { Mon = 0, Tue, Wed, Thu, Fri, Sat, Sun };

const char *weekday_name(Weekday day);

// Period geometry of one scheduling month. Periods are 15 minutes in the standard layout
// (96 per day, working window 9:00-17:00 = periods [36, 68)). Compact layouts with fewer
// periods per day exist for exhaustive tests; they cannot be tied to CSV timestamps.
class Calendar {
public:
	static constexpr int kPeriodsPerDay = 96;
	static constexpr int kWorkBegin = 36;
	static constexpr int kWorkEnd = 68;

	Calendar(Weekday first_weekday, int days, int periods_per_day = kPeriodsPerDay, int work_begin = kWorkBegin,
	         int work_end = kWorkEnd);

	// Whole calendar month in the standard layout, anchored to its first date.
	static Calendar for_month(int year, unsigned month);
	// Parses "YYYY-MM".
	static Calendar for_month(std::string_view year_month);

	Weekday first_weekday() const {
		return first_weekday_;
	}
	int days() const {
		return days_;
	}
	int periods_per_day() const {
		return periods_per_day_;
	}
	int horizon() const {
		return days_ * periods_per_day_;
	}
	int work_begin() const {
		return work_begin_;
	}
	int work_end() const {
		return work_end_;
	}
	int work_periods_per_day() const {
		return work_end_ - work_begin_;
	}
	const std::optional<std::chrono::year_month_day> &start_date() const {
		return start_;
	}

	Weekday weekday_of_day(int day) const;
	bool is_weekday(int day) const;
	bool is_working_period(int period) const;
	// True when at least one day of the month falls on `day`.
	bool contains_weekday(Weekday day) const;

	bool operator==(const Calendar &) const = default;

private:
	Weekday first_weekday_;
	int days_;
	int periods_per_day_;
	int work_begin_;
	int work_end_;
	std::optional<std::chrono::year_month_day> start_;
};

// Per-period observations over a calendar horizon; nullopt marks a missing value.
struct RawSeries {
	std::vector<std::optional<double>> values;

	std::size_t size() const {
		return values.size();
	}
	std::size_t missing() const;
};

// Net base load (kW) per period: building demand minus solar generation.
struct NetLoadSeries {
	std::vector<double> values;
};

// Wholesale price ($/MWh) per period.
struct PriceSeries {
	std::vector<double> values;
};

struct Timestamp {
	int year = 0;
	unsigned month = 1;
	unsigned day = 1;
	int hour = 0;
	int minute = 0;
	int second = 0;
};

// Accepts "YYYY-MM-DD HH:MM[:SS]" and "YYYY-MM-DDTHH:MM[:SS]".
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(const Timestamp &ts);

struct CsvRow {
	Timestamp timestamp;
	std::optional<double> value;
	std::size_t line = 0;
};

// Two-column CSV with a header whose first column is `timestamp`. An empty value field is a
// missing value; rows must be strictly increasing in time.
std::vector<CsvRow> read_timestamped_csv(std::istream &in, const std::string &source = "<stream>");
std::vector<CsvRow> read_timestamped_csv(const std::filesystem::path &path);

// Aligns a 15-minute `timestamp,value` CSV onto the calendar; absent rows are missing.
RawSeries load_series_csv(const std::filesystem::path &path, const Calendar &calendar);
RawSeries align_series(const std::vector<CsvRow> &rows, const Calendar &calendar, const std::string &source);

// Half-hourly `timestamp,price` CSV; every half hour of the month must be present.
std::vector<double> load_price_csv(const std::filesystem::path &path, const Calendar &calendar);

// Writes `timestamp,<column>` rows for each period; missing values become empty fields.
void write_series_csv(std::ostream &out, const Calendar &calendar, std::span<const std::optional<double>> values,
                      std::string_view column = "value");
void write_series_csv(std::ostream &out, const Calendar &calendar, std::span<const double> values,
                      std::string_view column = "value");

// Sum of building series minus sum of solar series; missing entries count as zero.
NetLoadSeries net_load(std::span<const RawSeries> buildings, std::span<const RawSeries> solars,
                       const Calendar &calendar);

// Repeats each half-hourly price over its two 15-minute periods.
PriceSeries expand_prices(std::span<const double> halfhourly, const Calendar &calendar);

// Weekday periods inside the working window, ascending.
std::vector<int> working_periods(const Calendar &calendar);

struct DescriptiveStats {
	double mean = 0.0;
	double std = 0.0; // sample (n - 1); 0 for a single value
	double iqr = 0.0; // linear-interpolation quartiles
	double min = 0.0;
	double max = 0.0;
	std::size_t count = 0;
};

DescriptiveStats descriptive_stats(std::span<const double> values);
// Statistics over present values only.
DescriptiveStats descriptive_stats(const RawSeries &series);

} // namespace ppo
