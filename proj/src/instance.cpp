#include "ppo/instance.hpp"

#include "ppo/error.hpp"
#include "ppo/format.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <sstream>

namespace ppo {

char room_size_code(RoomSize size) {
	return size == RoomSize::Small ? 'S' : 'L';
}

int Instance::total_rooms(RoomSize size) const {
	int total = 0;
	for (const auto &b : buildings) {
		total += b.rooms(size);
	}
	return total;
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
	std::vector<std::string_view> tokens;
	std::size_t i = 0;
	while (i < line.size()) {
		while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == '\v' ||
		                           line[i] == '\f')) {
			++i;
		}
		std::size_t start = i;
		while (i < line.size() && !(line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == '\v' ||
		                            line[i] == '\f')) {
			++i;
		}
		if (i > start) {
			tokens.push_back(line.substr(start, i - start));
		}
	}
	return tokens;
}

// Cursor over one record's tokens; every accessor reports failures against the record's line.
class Record {
public:
	Record(std::size_t line, std::vector<std::string_view> tokens) : line_(line), tokens_(std::move(tokens)) {
	}

	std::size_t line() const {
		return line_;
	}
	std::size_t size() const {
		return tokens_.size();
	}
	std::string_view prefix() const {
		return tokens_.front();
	}

	[[noreturn]] void fail(const std::string &what) const {
		throw ParseError(line_, what);
	}

	void expect_size(std::size_t n) const {
		if (tokens_.size() != n) {
			fail("'" + std::string(prefix()) + "' record expects " + std::to_string(n - 1) + " fields, found " +
			     std::to_string(tokens_.size() - 1));
		}
	}

	long long integer(std::size_t i, const char *field) const {
		need(i, field);
		auto v = parse_integer(tokens_[i]);
		if (!v) {
			fail(std::string("non-numeric ") + field + " '" + std::string(tokens_[i]) + "'");
		}
		return *v;
	}

	int count(std::size_t i, const char *field) const {
		auto v = integer(i, field);
		if (v < 0 || v > 100'000) {
			fail(std::string(field) + " out of range: " + std::to_string(v));
		}
		return static_cast<int>(v);
	}

	int index(std::size_t i, const char *field, std::size_t bound) const {
		auto v = integer(i, field);
		if (v < 0 || static_cast<unsigned long long>(v) >= bound) {
			fail(std::string(field) + " " + std::to_string(v) + " out of range [0, " + std::to_string(bound) + ")");
		}
		return static_cast<int>(v);
	}

	double number(std::size_t i, const char *field) const {
		need(i, field);
		auto v = parse_double(tokens_[i]);
		if (!v) {
			fail(std::string("non-numeric ") + field + " '" + std::string(tokens_[i]) + "'");
		}
		return *v;
	}

	RoomSize room_size(std::size_t i) const {
		need(i, "room size");
		if (tokens_[i] == "S") {
			return RoomSize::Small;
		}
		if (tokens_[i] == "L") {
			return RoomSize::Large;
		}
		fail("room size must be S or L, found '" + std::string(tokens_[i]) + "'");
	}

	// `n` precedence ids starting at token `first`; the record must end right after them.
	std::vector<int> precedences(std::size_t first, int n, std::size_t bound) const {
		if (tokens_.size() != first + static_cast<std::size_t>(n)) {
			fail("precedence count " + std::to_string(n) + " does not match " +
			     std::to_string(static_cast<long long>(tokens_.size()) - static_cast<long long>(first)) +
			     " listed ids");
		}
		std::vector<int> ids;
		ids.reserve(n);
		for (int k = 0; k < n; ++k) {
			ids.push_back(index(first + k, "precedence id", bound));
		}
		return ids;
	}

private:
	void need(std::size_t i, const char *field) const {
		if (i >= tokens_.size()) {
			fail(std::string("missing ") + field);
		}
	}

	std::size_t line_;
	std::vector<std::string_view> tokens_;
};

template <typename T>
void place(std::vector<std::optional<T>> &slots, int id, T value, const Record &rec, const char *what) {
	if (slots[id]) {
		rec.fail(std::string("duplicate ") + what + " id " + std::to_string(id));
	}
	slots[id] = std::move(value);
}

template <typename T>
std::vector<T> collect(std::vector<std::optional<T>> &slots, const char *what, std::size_t header_line) {
	std::vector<T> out;
	out.reserve(slots.size());
	std::size_t found = 0;
	for (auto &s : slots) {
		found += s.has_value();
	}
	if (found != slots.size()) {
		throw ParseError(header_line, std::string("count mismatch: header declares ") + std::to_string(slots.size()) +
		                                  " " + what + ", found " + std::to_string(found));
	}
	for (auto &s : slots) {
		out.push_back(std::move(*s));
	}
	return out;
}

} // namespace

Instance parse_instance(std::string_view text) {
	std::vector<Record> records;
	std::size_t line_no = 0;
	std::size_t pos = 0;
	while (pos <= text.size()) {
		std::size_t end = text.find('\n', pos);
		if (end == std::string_view::npos) {
			end = text.size();
		}
		++line_no;
		auto tokens = tokenize(text.substr(pos, end - pos));
		if (!tokens.empty()) {
			records.emplace_back(line_no, std::move(tokens));
		}
		pos = end + 1;
	}

	if (records.empty() || records.front().prefix() != "ppoi") {
		throw ParseError(records.empty() ? 0 : records.front().line(), "missing header: expected 'ppoi' record first");
	}
	const Record &header = records.front();
	header.expect_size(6);
	const int nb = header.count(1, "building count");
	const int ns = header.count(2, "solar count");
	const int nc = header.count(3, "battery count");
	const int nr = header.count(4, "recurring activity count");
	const int na = header.count(5, "once-off activity count");

	std::vector<std::optional<Building>> buildings(nb);
	std::vector<std::optional<SolarMapping>> solars(ns);
	std::vector<std::optional<Battery>> batteries(nc);
	std::vector<std::optional<RecurringActivity>> recurring(nr);
	std::vector<std::optional<OnceOffActivity>> onceoff(na);

	for (std::size_t k = 1; k < records.size(); ++k) {
		const Record &rec = records[k];
		const auto p = rec.prefix();
		if (p == "b") {
			rec.expect_size(4);
			Building b;
			b.id = rec.index(1, "building id", nb);
			b.small_rooms = rec.count(2, "small room count");
			b.large_rooms = rec.count(3, "large room count");
			place(buildings, b.id, b, rec, "building");
		} else if (p == "s") {
			rec.expect_size(3);
			SolarMapping s;
			s.solar_id = rec.index(1, "solar id", ns);
			s.building_id = rec.index(2, "building id", nb);
			place(solars, s.solar_id, s, rec, "solar");
		} else if (p == "c") {
			rec.expect_size(5);
			Battery c;
			c.id = rec.index(1, "battery id", nc);
			c.capacity = rec.number(2, "capacity");
			c.max_power = rec.number(3, "max power");
			c.efficiency = rec.number(4, "efficiency");
			if (c.capacity <= 0.0) {
				rec.fail("battery capacity must be positive");
			}
			if (c.max_power <= 0.0) {
				rec.fail("battery max power must be positive");
			}
			if (!(c.efficiency > 0.0 && c.efficiency <= 1.0)) {
				rec.fail("battery efficiency must lie in (0, 1]");
			}
			place(batteries, c.id, c, rec, "battery");
		} else if (p == "r") {
			RecurringActivity r;
			r.id = rec.index(1, "activity id", nr);
			r.rooms_required = rec.count(2, "rooms required");
			r.room_size = rec.room_size(3);
			r.load = rec.number(4, "load");
			r.duration = rec.count(5, "duration");
			const int nprec = rec.count(6, "precedence count");
			r.precedences = rec.precedences(7, nprec, nr);
			if (r.rooms_required < 1) {
				rec.fail("rooms required must be at least 1");
			}
			if (r.duration < 1) {
				rec.fail("duration must be at least 1");
			}
			if (r.load < 0.0) {
				rec.fail("load must be non-negative");
			}
			place(recurring, r.id, std::move(r), rec, "recurring activity");
		} else if (p == "a") {
			OnceOffActivity a;
			a.id = rec.index(1, "activity id", na);
			a.rooms_required = rec.count(2, "rooms required");
			a.room_size = rec.room_size(3);
			a.load = rec.number(4, "load");
			a.duration = rec.count(5, "duration");
			a.value = rec.number(6, "value");
			a.penalty = rec.number(7, "penalty");
			const int nprec = rec.count(8, "precedence count");
			a.precedences = rec.precedences(9, nprec, na);
			if (a.rooms_required < 1) {
				rec.fail("rooms required must be at least 1");
			}
			if (a.duration < 1) {
				rec.fail("duration must be at least 1");
			}
			if (a.load < 0.0) {
				rec.fail("load must be non-negative");
			}
			place(onceoff, a.id, std::move(a), rec, "once-off activity");
		} else if (p == "ppoi") {
			rec.fail("duplicate header");
		} else {
			rec.fail("unknown record prefix '" + std::string(p) + "'");
		}
	}

	Instance inst;
	inst.buildings = collect(buildings, "buildings", header.line());
	inst.solar_maps = collect(solars, "solar installations", header.line());
	inst.batteries = collect(batteries, "batteries", header.line());
	inst.recurring = collect(recurring, "recurring activities", header.line());
	inst.onceoff = collect(onceoff, "once-off activities", header.line());
	return inst;
}

std::string serialize_instance(const Instance &inst) {
	std::ostringstream out;
	out << "ppoi " << inst.num_buildings() << ' ' << inst.num_solar() << ' ' << inst.num_batteries() << ' '
	    << inst.num_recurring() << ' ' << inst.num_onceoff() << '\n';
	for (const auto &b : inst.buildings) {
		out << "b " << b.id << ' ' << b.small_rooms << ' ' << b.large_rooms << '\n';
	}
	for (const auto &s : inst.solar_maps) {
		out << "s " << s.solar_id << ' ' << s.building_id << '\n';
	}
	for (const auto &c : inst.batteries) {
		out << "c " << c.id << ' ' << format_number(c.capacity) << ' ' << format_number(c.max_power) << ' '
		    << format_number(c.efficiency) << '\n';
	}
	for (const auto &r : inst.recurring) {
		out << "r " << r.id << ' ' << r.rooms_required << ' ' << room_size_code(r.room_size) << ' '
		    << format_number(r.load) << ' ' << r.duration << ' ' << r.precedences.size();
		for (int p : r.precedences) {
			out << ' ' << p;
		}
		out << '\n';
	}
	for (const auto &a : inst.onceoff) {
		out << "a " << a.id << ' ' << a.rooms_required << ' ' << room_size_code(a.room_size) << ' '
		    << format_number(a.load) << ' ' << a.duration << ' ' << format_number(a.value) << ' '
		    << format_number(a.penalty) << ' ' << a.precedences.size();
		for (int p : a.precedences) {
			out << ' ' << p;
		}
		out << '\n';
	}
	return out.str();
}

std::vector<int> topological_order(const Instance &inst) {
	const int n = static_cast<int>(inst.num_recurring());
	std::vector<int> indegree(n, 0);
	std::vector<std::vector<int>> successors(n);
	for (const auto &r : inst.recurring) {
		for (int p : r.precedences) {
			if (p < 0 || p >= n) {
				continue;
			}
			successors[p].push_back(r.id);
			++indegree[r.id];
		}
	}
	std::priority_queue<int, std::vector<int>, std::greater<>> ready;
	for (int i = 0; i < n; ++i) {
		if (indegree[i] == 0) {
			ready.push(i);
		}
	}
	std::vector<int> order;
	order.reserve(n);
	while (!ready.empty()) {
		int v = ready.top();
		ready.pop();
		order.push_back(v);
		for (int s : successors[v]) {
			if (--indegree[s] == 0) {
				ready.push(s);
			}
		}
	}
	if (static_cast<int>(order.size()) != n) {
		order.clear();
	}
	return order;
}

std::vector<Violation> validate_instance(const Instance &inst) {
	std::vector<Violation> out;
	auto report = [&](std::string kind, std::string message) {
		out.push_back({std::move(kind), std::move(message)});
	};

	const auto nb = inst.num_buildings();
	for (std::size_t i = 0; i < nb; ++i) {
		const auto &b = inst.buildings[i];
		if (b.id != static_cast<int>(i)) {
			report("index_out_of_range", "building at position " + std::to_string(i) + " has id " + std::to_string(b.id));
		}
		if (b.small_rooms < 0 || b.large_rooms < 0) {
			report("invalid_value", "building " + std::to_string(b.id) + " has a negative room count");
		}
	}
	for (std::size_t i = 0; i < inst.num_solar(); ++i) {
		const auto &s = inst.solar_maps[i];
		if (s.solar_id != static_cast<int>(i)) {
			report("index_out_of_range", "solar at position " + std::to_string(i) + " has id " + std::to_string(s.solar_id));
		}
		if (s.building_id < 0 || static_cast<std::size_t>(s.building_id) >= nb) {
			report("index_out_of_range",
			       "solar " + std::to_string(s.solar_id) + " maps to unknown building " + std::to_string(s.building_id));
		}
	}
	for (std::size_t i = 0; i < inst.num_batteries(); ++i) {
		const auto &c = inst.batteries[i];
		if (c.id != static_cast<int>(i)) {
			report("index_out_of_range", "battery at position " + std::to_string(i) + " has id " + std::to_string(c.id));
		}
		if (!(c.capacity > 0.0) || !(c.max_power > 0.0) || !(c.efficiency > 0.0 && c.efficiency <= 1.0)) {
			report("invalid_value", "battery " + std::to_string(c.id) + " has out-of-range parameters");
		}
	}

	const auto nr = static_cast<int>(inst.num_recurring());
	bool indices_ok = true;
	for (int i = 0; i < nr; ++i) {
		const auto &r = inst.recurring[i];
		const auto name = "recurring activity " + std::to_string(r.id);
		if (r.id != i) {
			report("index_out_of_range", "recurring activity at position " + std::to_string(i) + " has id " +
			                                 std::to_string(r.id));
			indices_ok = false;
		}
		for (int p : r.precedences) {
			if (p < 0 || p >= nr) {
				report("index_out_of_range", name + " lists unknown predecessor " + std::to_string(p));
				indices_ok = false;
			}
		}
		if (r.rooms_required < 1 || r.duration < 1 || r.load < 0.0) {
			report("invalid_value", name + " has out-of-range parameters");
		}
		const int available = inst.total_rooms(r.room_size);
		if (r.rooms_required > available) {
			report("insufficient_rooms", name + " needs " + std::to_string(r.rooms_required) + " " +
			                                 (r.room_size == RoomSize::Small ? "small" : "large") +
			                                 " rooms but only " + std::to_string(available) + " exist");
		}
	}
	const auto na = static_cast<int>(inst.num_onceoff());
	for (int i = 0; i < na; ++i) {
		const auto &a = inst.onceoff[i];
		if (a.id != i) {
			report("index_out_of_range", "once-off activity at position " + std::to_string(i) + " has id " +
			                                 std::to_string(a.id));
		}
		for (int p : a.precedences) {
			if (p < 0 || p >= na) {
				report("index_out_of_range",
				       "once-off activity " + std::to_string(a.id) + " lists unknown predecessor " + std::to_string(p));
			}
		}
	}

	if (indices_ok && nr > 0 && topological_order(inst).empty()) {
		report("precedence_cycle", "recurring activity precedences contain a cycle");
	}
	return out;
}

} // namespace ppo
