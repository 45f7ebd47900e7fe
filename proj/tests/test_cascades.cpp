#include "sirhawkes/cascades.hpp"
#include "sirhawkes/csv.hpp"
#include "sirhawkes/errors.hpp"
#include "sirhawkes/serialize.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sirhawkes;

namespace {

std::vector<Cascade> parse(const std::string& text) {
    std::istringstream in(text);
    return read_cascades(in);
}

}  // namespace

TEST_CASE("two-row cascade with a mark") {
    const auto cs = parse("cascade_id,time,mark\na,0,50\na,3.2,1\n");
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].id == "a");
    REQUIRE(cs[0].size() == 2);
    CHECK(cs[0].events[0].mark == 50);
    CHECK(cs[0].events[1].time == 3.2);
}

TEST_CASE("empty input gives no cascades") {
    CHECK(parse("").empty());
    CHECK(parse("cascade_id,time,mark\n").empty());
}

TEST_CASE("negative time is rejected with its row") {
    try {
        (void)parse("cascade_id,time,mark\na,0,1\na,-1,1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
    CHECK_THROWS_AS((void)parse("cascade_id,time,mark\na,0,0.5\n"), ParseError);
    CHECK_THROWS_AS((void)parse("cascade_id,time,mark\na,zero,1\n"), ParseError);
}

TEST_CASE("marks default to one; unsorted rows are sorted and rebased") {
    const auto cs = parse("cascade_id,time\nx,12\nx,10\ny,5\nx,11\n");
    REQUIRE(cs.size() == 2);
    CHECK(cs[0].id == "x");
    REQUIRE(cs[0].size() == 3);
    CHECK(cs[0].events[0].time == 0.0);
    CHECK(cs[0].events[1].time == 1.0);
    CHECK(cs[0].events[2].time == 2.0);
    for (const auto& e : cs[0].events) CHECK(e.mark == 1.0);
    CHECK(cs[1].events[0].time == 0.0);
}

TEST_CASE("tied timestamps are separated") {
    const Cascade c = make_cascade("t", {{0, 1}, {5, 1}, {5, 1}, {5, 1}, {6, 1}});
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c.events[i].time > c.events[i - 1].time);
    CHECK(c.events[2].time - c.events[1].time == doctest::Approx(1e-9).epsilon(1e-3));
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("save then load is the identity at 9 significant digits") {
    std::vector<Cascade> cs{make_cascade("a", {{0, 3}, {0.123456789, 1}, {7.5, 12.25}}),
                            make_cascade("b,quoted", {{0, 1}, {1e-3, 1}})};
    std::ostringstream out;
    write_cascades(out, cs);
    std::istringstream in(out.str());
    CHECK(read_cascades(in) == cs);

    const auto dir = std::filesystem::temp_directory_path() / "sirhawkes_cascades_test";
    save_cascades(dir / "c.csv", cs);
    CHECK(load_cascades(dir / "c.csv") == cs);
    std::filesystem::remove_all(dir);
}

TEST_CASE("missing file is an IO error") {
    CHECK_THROWS_AS((void)load_cascades("/nonexistent/x.csv"), IoError);
}

TEST_CASE("cascade JSON mirror") {
    const Cascade c = make_cascade("q", {{0, 2}, {1.5, 1}});
    CHECK(cascade_from_json(to_json(c)) == c);
    CHECK(to_json(c).at("events").size() == 2);
}

TEST_CASE("prefixes") {
    const Cascade c = make_cascade("p", {{0, 1}, {1, 1}, {2, 1}, {3, 1}});
    CHECK(c.observed_until(2).size() == 3);
    CHECK(c.observed_until(2.5).size() == 3);
    CHECK(c.first_events(2).size() == 2);
    CHECK(c.first_events(10).size() == 4);
}

// Fig. 1 walkthrough: four infections, three of them recovered before t.
TEST_CASE("counting state") {
    SirRealization r;
    r.id = "fig1";
    r.infections = {{0, 1}, {1, 1}, {2, 1}, {4, 1}};
    r.recoveries = {3.5, 2.5, 4.5, 9};
    const CountingState s = counting_state(r, 10, 5);
    CHECK(s.C == 4);
    CHECK(s.R == 3);
    CHECK(s.I == 1);
    CHECK(s.S == 6);

    const CountingState start = counting_state(r, 10, 1e-12);
    CHECK(start.C == 1);
    CHECK(start.R == 0);
    CHECK(start.I == 1);
    CHECK(start.S == 9);

    // Strict "<": an infection exactly at t is not yet counted.
    CHECK(counting_state(r, 10, 1).C == 1);

    const CountingState end = counting_state(r, 4, 100);
    CHECK(end.C == 4);
    CHECK(end.R == 4);
    CHECK(end.I == 0);
    CHECK(end.S == 0);
    CHECK_THROWS((void)counting_state(r, 3, 1));

    for (double t : {0.5, 2.0, 3.0, 4.2, 8.0}) {
        const CountingState q = counting_state(r, 10, t);
        CHECK(q.C == q.R + q.I);
        CHECK(q.S + q.I + q.R == 10);
    }
}

TEST_CASE("realizations CSV") {
    SirRealization r;
    r.id = "r0";
    r.infections = {{0, 1}, {0.5, 2}};
    r.recoveries = {1.25, 3};
    std::ostringstream out;
    write_realizations(out, {r});
    CHECK(out.str().rfind("cascade_id,time,recovery_time,mark\n", 0) == 0);
    std::istringstream in(out.str());
    const auto back = read_realizations(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == r);

    std::istringstream bad("cascade_id,time,recovery_time,mark\nz,0,0,1\n");
    CHECK_THROWS((void)read_realizations(bad));
}

TEST_CASE("number formatting") {
    CHECK(csv::format(0.1234567891234) == "0.123456789");
    CHECK(csv::format(3.0) == "3");
    CHECK(csv::format(kInf) == "inf");
}
