#include "sirhawkes/cascades.hpp"

#include "sirhawkes/csv.hpp"
#include "sirhawkes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_map>

namespace sirhawkes {

namespace {

constexpr double kTieSpacing = 1e-9;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Rebases to zero and breaks ties; `times` must already be sorted.
void normalize_times(std::vector<double>& times, double& origin) {
    if (times.empty()) return;
    origin = times.front();
    for (double& t : times) t -= origin;
    std::size_t run = 0;
    double raw_prev = times.front();
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double raw = times[k];
        run = raw == raw_prev ? run + 1 : 0;
        raw_prev = raw;
        double t = raw + static_cast<double>(run) * kTieSpacing;
        if (!(t > times[k - 1])) t = std::nextafter(times[k - 1], kInfinity);
        times[k] = t;
    }
}

struct RawRow {
    double time;
    double recovery;
    double mark;
};

struct Grouped {
    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<RawRow>> rows;
};

Grouped group_rows(const csv::Table& table, bool with_recovery) {
    const int id_col = table.column("cascade_id");
    const int time_col = table.column("time");
    const int rec_col = table.column("recovery_time");
    const int mark_col = table.column("mark");
    if (id_col < 0 || time_col < 0) throw ParseError(1, "header must contain cascade_id and time");
    if (with_recovery && rec_col < 0) throw ParseError(1, "header must contain recovery_time");

    Grouped grouped;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.line_numbers[r];
        RawRow raw{0.0, kInfinity, 1.0};
        if (!csv::parse_number(row[time_col], raw.time) || !std::isfinite(raw.time)) {
            throw ParseError(line, "invalid time '" + row[time_col] + "'");
        }
        if (raw.time < 0.0) throw ParseError(line, "negative time " + row[time_col]);
        if (mark_col >= 0) {
            if (!csv::parse_number(row[mark_col], raw.mark) || !std::isfinite(raw.mark)) {
                throw ParseError(line, "invalid mark '" + row[mark_col] + "'");
            }
            if (raw.mark < 1.0) throw ParseError(line, "mark must be >= 1, got " + row[mark_col]);
        }
        if (with_recovery) {
            if (!csv::parse_number(row[rec_col], raw.recovery) || std::isnan(raw.recovery)) {
                throw ParseError(line, "invalid recovery_time '" + row[rec_col] + "'");
            }
            if (!(raw.recovery > raw.time)) throw ParseError(line, "recovery_time must exceed time");
        }
        const std::string& id = row[id_col];
        auto [it, inserted] = grouped.rows.try_emplace(id);
        if (inserted) grouped.order.push_back(id);
        it->second.push_back(raw);
    }
    return grouped;
}

void sort_rows(std::vector<RawRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) { return a.time < b.time; });
}

}  // namespace

Eigen::ArrayXd Cascade::times() const {
    Eigen::ArrayXd out(static_cast<Eigen::Index>(events.size()));
    for (std::size_t i = 0; i < events.size(); ++i) out[static_cast<Eigen::Index>(i)] = events[i].time;
    return out;
}

Eigen::ArrayXd Cascade::marks() const {
    Eigen::ArrayXd out(static_cast<Eigen::Index>(events.size()));
    for (std::size_t i = 0; i < events.size(); ++i) out[static_cast<Eigen::Index>(i)] = events[i].mark;
    return out;
}

Cascade Cascade::observed_until(double t) const {
    Cascade out{id, {}};
    for (const auto& e : events) {
        if (e.time > t) break;
        out.events.push_back(e);
    }
    return out;
}

Cascade Cascade::first_events(std::size_t count) const {
    Cascade out{id, {}};
    out.events.assign(events.begin(), events.begin() + static_cast<std::ptrdiff_t>(std::min(count, events.size())));
    return out;
}

void Cascade::validate() const {
    if (events.empty()) throw PreconditionError("cascade '" + id + "' is empty");
    if (events.front().time != 0.0) throw PreconditionError("cascade '" + id + "' must start at time 0");
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (!(events[i].mark >= 1.0)) throw PreconditionError("cascade '" + id + "': mark < 1");
        if (i > 0 && !(events[i].time > events[i - 1].time)) {
            throw PreconditionError("cascade '" + id + "': times not strictly increasing");
        }
    }
}

Cascade make_cascade(std::string id, std::vector<Event> events) {
    if (events.empty()) throw PreconditionError("cascade '" + id + "' is empty");
    for (const auto& e : events) {
        if (!(std::isfinite(e.time) && e.time >= 0.0)) throw PreconditionError("cascade '" + id + "': bad time");
        if (!(e.mark >= 1.0)) throw PreconditionError("cascade '" + id + "': mark < 1");
    }
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
    std::vector<double> times(events.size());
    std::transform(events.begin(), events.end(), times.begin(), [](const Event& e) { return e.time; });
    double origin = 0.0;
    normalize_times(times, origin);
    for (std::size_t i = 0; i < events.size(); ++i) events[i].time = times[i];
    return Cascade{std::move(id), std::move(events)};
}

Cascade SirRealization::infection_cascade() const { return Cascade{id, infections}; }

void SirRealization::validate() const {
    if (infections.empty()) throw PreconditionError("realization '" + id + "' has no infections");
    if (recoveries.size() != infections.size()) {
        throw PreconditionError("realization '" + id + "': recoveries and infections differ in length");
    }
    infection_cascade().validate();
    for (std::size_t i = 0; i < infections.size(); ++i) {
        if (!(recoveries[i] > infections[i].time)) {
            throw PreconditionError("realization '" + id + "': recovery " + std::to_string(i) +
                                    " does not follow its infection");
        }
    }
}

CountingState counting_state(const SirRealization& realization, std::int64_t N, double t) {
    const auto total = static_cast<std::int64_t>(realization.infections.size());
    if (N < total) throw PreconditionError("population N is smaller than the number of infections");
    CountingState state;
    state.t = t;
    state.C = std::count_if(realization.infections.begin(), realization.infections.end(),
                            [t](const Event& e) { return e.time < t; });
    state.R = std::count_if(realization.recoveries.begin(), realization.recoveries.end(),
                            [t](double r) { return r < t; });
    state.I = state.C - state.R;
    state.S = N - state.C;
    return state;
}

std::vector<Cascade> read_cascades(std::istream& in) {
    const csv::Table table = csv::read_table(in);
    if (table.header.empty()) return {};
    Grouped grouped = group_rows(table, false);
    std::vector<Cascade> cascades;
    cascades.reserve(grouped.order.size());
    for (const auto& id : grouped.order) {
        auto& rows = grouped.rows[id];
        std::vector<Event> events;
        events.reserve(rows.size());
        for (const auto& r : rows) events.push_back({r.time, r.mark});
        cascades.push_back(make_cascade(id, std::move(events)));
    }
    return cascades;
}

std::vector<Cascade> load_cascades(const std::filesystem::path& path) {
    auto in = csv::open_input(path);
    return read_cascades(in);
}

void write_cascades(std::ostream& out, const std::vector<Cascade>& cascades) {
    out << "cascade_id,time,mark\n";
    for (const auto& c : cascades) {
        const std::string id = csv::quote(c.id);
        for (const auto& e : c.events) out << id << ',' << csv::format(e.time) << ',' << csv::format(e.mark) << '\n';
    }
}

void save_cascades(const std::filesystem::path& path, const std::vector<Cascade>& cascades) {
    auto out = csv::open_output(path);
    write_cascades(out, cascades);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<SirRealization> read_realizations(std::istream& in) {
    const csv::Table table = csv::read_table(in);
    if (table.header.empty()) return {};
    Grouped grouped = group_rows(table, true);
    std::vector<SirRealization> out;
    out.reserve(grouped.order.size());
    for (const auto& id : grouped.order) {
        auto& rows = grouped.rows[id];
        sort_rows(rows);
        std::vector<double> times(rows.size());
        std::transform(rows.begin(), rows.end(), times.begin(), [](const RawRow& r) { return r.time; });
        double origin = 0.0;
        normalize_times(times, origin);
        SirRealization real{id, {}, {}};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            real.infections.push_back({times[i], rows[i].mark});
            real.recoveries.push_back(std::max(rows[i].recovery - origin, std::nextafter(times[i], kInfinity)));
        }
        out.push_back(std::move(real));
    }
    return out;
}

std::vector<SirRealization> load_realizations(const std::filesystem::path& path) {
    auto in = csv::open_input(path);
    return read_realizations(in);
}

void write_realizations(std::ostream& out, const std::vector<SirRealization>& realizations) {
    out << "cascade_id,time,recovery_time,mark\n";
    for (const auto& r : realizations) {
        const std::string id = csv::quote(r.id);
        for (std::size_t i = 0; i < r.infections.size(); ++i) {
            out << id << ',' << csv::format(r.infections[i].time) << ',' << csv::format(r.recoveries[i]) << ','
                << csv::format(r.infections[i].mark) << '\n';
        }
    }
}

void save_realizations(const std::filesystem::path& path, const std::vector<SirRealization>& realizations) {
    auto out = csv::open_output(path);
    write_realizations(out, realizations);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace sirhawkes
