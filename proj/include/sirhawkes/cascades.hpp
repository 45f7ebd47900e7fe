#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sirhawkes {

struct Event {
    double time = 0.0;  // seconds since cascade start
    double mark = 1.0;  // e.g. follower count; 1 when unmarked

    friend bool operator==(const Event&, const Event&) = default;
};

/// Event history of one cascade. Times are strictly increasing and the first
/// event is at 0; use make_cascade to build one from raw data.
struct Cascade {
    std::string id;
    std::vector<Event> events;

    [[nodiscard]] std::size_t size() const { return events.size(); }
    [[nodiscard]] double last_time() const { return events.back().time; }
    [[nodiscard]] Eigen::ArrayXd times() const;
    [[nodiscard]] Eigen::ArrayXd marks() const;
    // Prefix holding events with time <= t.
    [[nodiscard]] Cascade observed_until(double t) const;
    [[nodiscard]] Cascade first_events(std::size_t count) const;

    // Throws PreconditionError if the invariants do not hold.
    void validate() const;

    friend bool operator==(const Cascade&, const Cascade&) = default;
};

// Sorts, rebases so the first event is at 0 and separates tied timestamps by
// adding i * 1e-9 to the i-th duplicate.
[[nodiscard]] Cascade make_cascade(std::string id, std::vector<Event> events);

/// Paired infection and recovery times of one simulated epidemic. A recovery
/// time of +inf means the individual never recovers (SI limit) or that the
/// recovery lies beyond what was simulated.
struct SirRealization {
    std::string id;
    std::vector<Event> infections;
    std::vector<double> recoveries;

    [[nodiscard]] std::size_t size() const { return infections.size(); }
    [[nodiscard]] Cascade infection_cascade() const;
    void validate() const;

    friend bool operator==(const SirRealization&, const SirRealization&) = default;
};

struct CountingState {
    double t = 0.0;
    std::int64_t C = 0;
    std::int64_t I = 0;
    std::int64_t R = 0;
    std::int64_t S = 0;
};

// Counts events strictly before t.
[[nodiscard]] CountingState counting_state(const SirRealization& realization, std::int64_t N, double t);

// CSV with header `cascade_id,time[,mark]`. Rows of one cascade need not be
// contiguous or sorted. An empty file yields an empty list.
[[nodiscard]] std::vector<Cascade> read_cascades(std::istream& in);
[[nodiscard]] std::vector<Cascade> load_cascades(const std::filesystem::path& path);
void write_cascades(std::ostream& out, const std::vector<Cascade>& cascades);
void save_cascades(const std::filesystem::path& path, const std::vector<Cascade>& cascades);

// CSV with header `cascade_id,time,recovery_time[,mark]`.
[[nodiscard]] std::vector<SirRealization> read_realizations(std::istream& in);
[[nodiscard]] std::vector<SirRealization> load_realizations(const std::filesystem::path& path);
void write_realizations(std::ostream& out, const std::vector<SirRealization>& realizations);
void save_realizations(const std::filesystem::path& path, const std::vector<SirRealization>& realizations);

}  // namespace sirhawkes
