#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "imr/conformance.hpp"
#include "imr/discovery.hpp"

using namespace imr;
using imr::testing::l5_log;
using imr::testing::make_log;
using imr::testing::r3_rules;
using imr::testing::random_log;
using imr::testing::random_tree;

TEST_CASE("fitness of the worked model over its own log is perfect") {
    TreePtr tree = parse_tree("->(x(a,d),->(c,x(b,tau)))");
    FitnessReport report = fitness(l5_log(), *tree);
    CHECK(report.accepted_fraction() == 1.0);
    CHECK(report.accepted_weight == 100);
    CHECK(report.total_weight == 100);
    REQUIRE(report.variants.size() == 2);
    for (const auto& entry : report.variants)
        CHECK(entry.accepted);
}

TEST_CASE("fitness counts rejecting variants by weight") {
    FitnessReport report = fitness(make_log({{{"b", "a"}, 1}}), *parse_tree("->(a,b)"));
    CHECK(report.accepted_fraction() == 0.0);
    REQUIRE(report.variants.size() == 1);
    CHECK_FALSE(report.variants[0].accepted);

    FitnessReport mixed =
        fitness(make_log({{{"a", "b"}, 3}, {{"b", "a"}, 1}}), *parse_tree("->(a,b)"));
    CHECK(mixed.accepted_weight == 3);
    CHECK(mixed.total_weight == 4);
    CHECK(mixed.accepted_fraction() == doctest::Approx(0.75));
}

TEST_CASE("empty traces against the silent tree") {
    FitnessReport report = fitness(make_log({{{}, 4}}), *ProcessTree::silent());
    CHECK(report.accepted_fraction() == 1.0);
    CHECK(fitness(EventLog{}, *ProcessTree::silent()).accepted_fraction() == 1.0);
}

TEST_CASE("sampled bounded language always fits its own tree") {
    std::mt19937 rng(71);
    for (int i = 0; i < 30; ++i) {
        TreePtr tree = random_tree(rng, 3, 4);
        std::vector<Trace> traces;
        try {
            traces = bounded_language(*tree, 6, 2, 20'000);
        } catch (const LanguageOverflowError&) {
            continue;
        }
        if (traces.empty())
            continue;
        EventLog log;
        std::uniform_int_distribution<std::size_t> pick(0, traces.size() - 1);
        for (int k = 0; k < 10; ++k)
            log.add_trace(traces[pick(rng)]);
        CHECK(fitness(log, *tree).accepted_fraction() == 1.0);
    }
}

TEST_CASE("removing rejected variants can only raise fitness") {
    TreePtr tree = parse_tree("->(a,b)");
    EventLog log = make_log({{{"a", "b"}, 2}, {{"b", "a"}, 1}, {{"a"}, 1}});
    FitnessReport before = fitness(log, *tree);
    EventLog cleaned;
    for (const auto& entry : before.variants)
        if (entry.accepted)
            cleaned.add_trace(entry.variant, entry.count);
    if (!cleaned.empty()) {
        FitnessReport after = fitness(cleaned, *tree);
        CHECK(after.accepted_fraction() >= before.accepted_fraction());
        CHECK(after.accepted_fraction() == 1.0);
    }
}

TEST_CASE("parallel fitness equals the serial reference") {
    std::mt19937 rng(73);
    for (int i = 0; i < 15; ++i) {
        EventLog log = random_log(rng, 4, 30, 6);
        TreePtr tree = random_tree(rng, 2, 4);
        FitnessReport par = fitness(log, *tree, 3);
        FitnessReport ser = fitness_serial(log, *tree);
        CHECK(par.accepted_weight == ser.accepted_weight);
        CHECK(par.total_weight == ser.total_weight);
        REQUIRE(par.variants.size() == ser.variants.size());
        for (std::size_t v = 0; v < par.variants.size(); ++v) {
            CHECK(par.variants[v].variant == ser.variants[v].variant);
            CHECK(par.variants[v].accepted == ser.variants[v].accepted);
        }
    }
}

TEST_CASE("rule conformance tabulates per-rule confidence") {
    auto rows = rule_conformance(l5_log(), r3_rules());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].satisfied == 100);
    CHECK(rows[0].total == 100);
    CHECK(rows[0].perfect());
    CHECK(rows[0].value() == 1.0);

    EventLog extra = l5_log();
    extra.add_trace({"b"});
    auto rows2 = rule_conformance(extra, r3_rules());
    REQUIRE(rows2.size() == 1);
    CHECK(rows2[0].satisfied == 100);
    CHECK(rows2[0].total == 101);
    CHECK_FALSE(rows2[0].perfect());

    CHECK(rule_conformance(l5_log(), {}).empty());
}

TEST_CASE("text and csv reports") {
    FitnessReport report =
        fitness(make_log({{{"a", "b"}, 3}, {{"b", "a"}, 1}}), *parse_tree("->(a,b)"));
    std::string text = fitness_to_text(report);
    CHECK(text.find("3/4") != std::string::npos);
    CHECK(text.find("0.750") != std::string::npos);
    CHECK(text.find("b,a") != std::string::npos);
    std::string csv = fitness_to_csv(report);
    CHECK(csv.find("variant,count,accepted") == 0);
    CHECK(csv.find("\"a,b\",3,1") != std::string::npos);
    CHECK(csv.find("\"b,a\",1,0") != std::string::npos);

    EventLog extra = l5_log();
    extra.add_trace({"b"});
    auto rows = rule_conformance(extra, r3_rules());
    std::string rtext = conformance_to_text(rows);
    CHECK(rtext.find("precedence(a,b)") != std::string::npos);
    CHECK(rtext.find("100/101") != std::string::npos);
    CHECK(rtext.find("[violated]") != std::string::npos);
    std::string rcsv = conformance_to_csv(rows);
    CHECK(rcsv.find("rule,satisfied,total,confidence") == 0);
}
