#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "imr/dfg.hpp"

using namespace imr;
using imr::testing::l2_log;
using imr::testing::l5_log;
using imr::testing::make_log;
using imr::testing::random_log;

TEST_CASE("single-variant counts") {
    Dfg dfg = extract_dfg(make_log({{{"a", "b"}, 1}}));
    CHECK(dfg.size() == 2);
    CHECK(dfg.edge("a", "b") == 1);
    CHECK(dfg.edge("b", "a") == 0);
    CHECK(dfg.start_freq("a") == 1);
    CHECK(dfg.end_freq("b") == 1);
    CHECK(dfg.activity_freq("a") == 1);
    CHECK(dfg.activity_freq("b") == 1);
    CHECK(dfg.trace_count() == 1);
}

TEST_CASE("repeating trace counts consecutive pairs") {
    Dfg dfg = extract_dfg(l2_log());
    CHECK(dfg.edge("c", "a") == 1);
    CHECK(dfg.edge("a", "c") == 1);
    CHECK(dfg.edge("c", "b") == 1);
    CHECK(dfg.edge("b", "c") == 1);
    CHECK(dfg.edge("c", "c") == 0);
    CHECK(dfg.start_freq("c") == 1);
    CHECK(dfg.end_freq("c") == 1);
    CHECK(dfg.activity_freq("c") == 3);
    CHECK(dfg.activity_freq("a") == 1);
    CHECK(dfg.activity_freq("b") == 1);
}

TEST_CASE("multiplicities scale the counts") {
    Dfg dfg = extract_dfg(l5_log());
    CHECK(dfg.edge("a", "c") == 50);
    CHECK(dfg.edge("c", "b") == 50);
    CHECK(dfg.edge("d", "c") == 50);
    CHECK(dfg.edge("c", "d") == 0);
    CHECK(dfg.start_freq("a") == 50);
    CHECK(dfg.start_freq("d") == 50);
    CHECK(dfg.end_freq("b") == 50);
    CHECK(dfg.end_freq("c") == 50);
    CHECK(dfg.trace_count() == 100);
}

TEST_CASE("aggregate masses over activity sets") {
    Dfg dfg = extract_dfg(l5_log());
    CHECK(dfg.edge_mass({"a", "d"}, {"c", "b"}) == 100);
    CHECK(dfg.edge_mass({"c", "b"}, {"a", "d"}) == 0);
    CHECK(dfg.start_mass({}) == 0);
    CHECK(dfg.start_mass({"a", "d"}) == 100);
    CHECK(dfg.end_mass({"b", "c"}) == 100);
}

TEST_CASE("mask aggregates agree with set aggregates") {
    Dfg dfg = extract_dfg(l5_log());
    Mask x = dfg.mask_of({"a", "d"});
    Mask y = dfg.mask_of({"b", "c"});
    CHECK(dfg.edge_mass(x, y) == dfg.edge_mass({"a", "d"}, {"b", "c"}));
    CHECK(dfg.start_mass(x) == dfg.start_mass({"a", "d"}));
    CHECK(dfg.end_mass(y) == dfg.end_mass({"b", "c"}));
    CHECK(dfg.set_of(x) == std::set<Activity>{"a", "d"});
    CHECK(dfg.set_of(dfg.full_mask()) == std::set<Activity>{"a", "b", "c", "d"});
    CHECK_THROWS_AS(dfg.mask_of({"z"}), Error);
}

TEST_CASE("empty traces count toward n only") {
    Dfg dfg = extract_dfg(make_log({{{"a"}, 2}, {{}, 3}}));
    CHECK(dfg.trace_count() == 5);
    CHECK(dfg.nonempty_trace_count() == 2);
    CHECK(dfg.start_freq("a") == 2);
    CHECK(dfg.end_freq("a") == 2);
}

TEST_CASE("edge sum equals events minus non-empty traces") {
    std::mt19937 rng(11);
    for (int i = 0; i < 40; ++i) {
        EventLog log = random_log(rng, 6, 30, 10);
        Dfg dfg = extract_dfg(log);
        std::uint64_t edge_sum = 0;
        for (std::size_t x = 0; x < dfg.size(); ++x)
            for (std::size_t y = 0; y < dfg.size(); ++y)
                edge_sum += dfg.edge(x, y);
        CHECK(edge_sum == log.total_events() - dfg.nonempty_trace_count());
        std::uint64_t starts = 0, ends = 0;
        for (std::size_t x = 0; x < dfg.size(); ++x) {
            starts += dfg.start(x);
            ends += dfg.end(x);
        }
        CHECK(starts == dfg.nonempty_trace_count());
        CHECK(ends == dfg.nonempty_trace_count());
    }
}

TEST_CASE("counts are linear in the multiplicities") {
    std::mt19937 rng(13);
    EventLog log = random_log(rng, 5, 20, 8);
    EventLog doubled;
    for (const auto& [trace, count] : log.variants())
        doubled.add_trace(trace, count * 2);
    Dfg one = extract_dfg(log);
    Dfg two = extract_dfg(doubled);
    REQUIRE(one.size() == two.size());
    for (std::size_t x = 0; x < one.size(); ++x) {
        CHECK(two.start(x) == 2 * one.start(x));
        CHECK(two.end(x) == 2 * one.end(x));
        CHECK(two.freq(x) == 2 * one.freq(x));
        for (std::size_t y = 0; y < one.size(); ++y)
            CHECK(two.edge(x, y) == 2 * one.edge(x, y));
    }
    CHECK(two.trace_count() == 2 * one.trace_count());
}

TEST_CASE("parallel extraction equals the serial reference") {
    std::mt19937 rng(17);
    for (int i = 0; i < 20; ++i) {
        EventLog log = random_log(rng, 8, 50, 12);
        Dfg serial = extract_dfg_serial(log);
        Dfg parallel = extract_dfg(log, 3);
        REQUIRE(serial.activities() == parallel.activities());
        CHECK(serial.trace_count() == parallel.trace_count());
        CHECK(serial.total_events() == parallel.total_events());
        for (std::size_t x = 0; x < serial.size(); ++x) {
            CHECK(serial.start(x) == parallel.start(x));
            CHECK(serial.end(x) == parallel.end(x));
            CHECK(serial.freq(x) == parallel.freq(x));
            for (std::size_t y = 0; y < serial.size(); ++y)
                CHECK(serial.edge(x, y) == parallel.edge(x, y));
        }
    }
}

TEST_CASE("index_of and missing activities") {
    Dfg dfg = extract_dfg(make_log({{{"b", "a"}, 1}}));
    CHECK(dfg.index_of("a") == 0);
    CHECK(dfg.index_of("b") == 1);
    CHECK(dfg.index_of("z") == -1);
    CHECK(dfg.edge("z", "a") == 0);
    CHECK(dfg.start_freq("z") == 0);
}

TEST_CASE("dot export shows weighted edges and virtual endpoints") {
    Dfg dfg = extract_dfg(l5_log());
    std::string dot = dfg.to_dot();
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("label=\"50\"") != std::string::npos);
    CHECK(dot.find("__start") != std::string::npos);
    CHECK(dot.find("__end") != std::string::npos);
}
