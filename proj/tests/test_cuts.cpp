#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "imr/cuts.hpp"
#include "imr/dfg.hpp"

using namespace imr;
using imr::testing::l2_log;
using imr::testing::l4_log;
using imr::testing::l5_log;
using imr::testing::make_log;
using imr::testing::random_log;

namespace {

Cut cut(Op op, std::set<Activity> s1, std::set<Activity> s2) {
    return Cut{op, std::move(s1), std::move(s2)};
}

bool contains(const std::vector<Cut>& cuts, const Cut& c) {
    return std::find(cuts.begin(), cuts.end(), c) != cuts.end();
}

CutSearchParams params(Ratio sup) {
    CutSearchParams p;
    p.sup = sup;
    return p;
}

} // namespace

TEST_CASE("two disconnected activities admit exactly the exclusive-choice cut") {
    auto cuts = explore(extract_dfg(l4_log()));
    REQUIRE(cuts.size() == 1);
    CHECK(cuts[0] == cut(Op::Xor, {"a"}, {"b"}));
}

TEST_CASE("feasibility over the single-loop-trace graph") {
    auto cuts = explore(extract_dfg(l2_log()));
    CHECK(contains(cuts, cut(Op::Seq, {"c"}, {"a", "b"})));
    CHECK(contains(cuts, cut(Op::Par, {"a", "b"}, {"c"})));
    CHECK(contains(cuts, cut(Op::Loop, {"c"}, {"a", "b"})));
    CHECK(contains(cuts, cut(Op::Loop, {"a", "c"}, {"b"})));
    CHECK(contains(cuts, cut(Op::Loop, {"b", "c"}, {"a"})));
    // No start/end activity on the body side: infeasible loops.
    CHECK_FALSE(contains(cuts, cut(Op::Loop, {"a", "b"}, {"c"})));
    CHECK_FALSE(contains(cuts, cut(Op::Loop, {"a"}, {"b", "c"})));
    // Every bipartition has cross edges, so no exclusive choice anywhere.
    for (const Cut& c : cuts)
        CHECK(c.op != Op::Xor);
}

TEST_CASE("feasibility over the two-variant sequence graph") {
    auto cuts = explore(extract_dfg(l5_log()));
    CHECK(contains(cuts, cut(Op::Seq, {"a", "d"}, {"b", "c"})));
    CHECK(contains(cuts, cut(Op::Seq, {"a"}, {"b", "c", "d"})));
    for (const Cut& c : cuts)
        CHECK(c.op != Op::Xor);
}

TEST_CASE("explore rejects tiny alphabets and oversized ones") {
    CHECK_THROWS_AS(explore(extract_dfg(make_log({{{"a"}, 1}}))), Error);
    CutSearchParams tight;
    tight.enumeration_cap = 3;
    CHECK_THROWS_AS(explore(extract_dfg(l5_log()), tight), CapExceededError);
    tight.enumeration_cap = 4;
    CHECK_FALSE(explore(extract_dfg(l5_log()), tight).empty());
}

TEST_CASE("xor slack admits nearly split graphs") {
    // one stray cross edge in 10 traces
    EventLog log = make_log({{{"a"}, 5}, {{"b"}, 4}, {{"a", "b"}, 1}});
    auto strict = explore(extract_dfg(log));
    CHECK_FALSE(contains(strict, cut(Op::Xor, {"a"}, {"b"})));
    CutSearchParams relaxed;
    relaxed.xor_slack = Ratio(1, 10);
    auto slack = explore(extract_dfg(log), relaxed);
    CHECK(contains(slack, cut(Op::Xor, {"a"}, {"b"})));
}

TEST_CASE("rejection table spot checks") {
    CHECK(reject(cut(Op::Seq, {"b"}, {"a"}), DeclareRule(Template::Response, "a", "b")));
    CHECK_FALSE(reject(cut(Op::Seq, {"a"}, {"b"}), DeclareRule(Template::Response, "a", "b")));
    CHECK(reject(cut(Op::Loop, {"a", "b"}, {"c"}),
                 DeclareRule(Template::NotSuccession, "a", "b")));
    CHECK_FALSE(reject(cut(Op::Par, {"a"}, {"b"}),
                       DeclareRule(Template::RespondedExistence, "a", "b")));
    CHECK(reject(cut(Op::Xor, {"a"}, {"b"}), DeclareRule(Template::Response, "a", "b")));
    CHECK(reject(cut(Op::Loop, {"a"}, {"b"}), DeclareRule(Template::AtMost, "a")));
    CHECK(reject(cut(Op::Loop, {"b"}, {"a"}), DeclareRule(Template::AtMost, "a")));
    CHECK_FALSE(reject(cut(Op::Seq, {"a"}, {"b"}), DeclareRule(Template::AtMost, "a")));
    CHECK(reject(cut(Op::Xor, {"a"}, {"b"}), DeclareRule(Template::Existence, "a")));
    CHECK(reject(cut(Op::Loop, {"b"}, {"a"}), DeclareRule(Template::Existence, "a")));
    CHECK_FALSE(reject(cut(Op::Loop, {"a"}, {"b"}), DeclareRule(Template::Existence, "a")));
}

TEST_CASE("rejection requires the rule to be scoped") {
    CHECK_THROWS_AS(reject(cut(Op::Seq, {"a"}, {"b"}),
                           DeclareRule(Template::Response, "a", "z")),
                    Error);
}

TEST_CASE("rules prune cuts and fall back when nothing survives") {
    std::vector<Cut> cuts{cut(Op::Xor, {"a"}, {"b"})};
    RuleSet response{DeclareRule(Template::Response, "a", "b")};
    auto [kept, fallback] = apply_rules(cuts, response);
    CHECK(fallback);
    CHECK(kept == cuts);

    RuleSet unscoped{DeclareRule(Template::Response, "a", "z")};
    auto [kept2, fallback2] = apply_rules(cuts, unscoped);
    CHECK_FALSE(fallback2);
    CHECK(kept2 == cuts);

    std::vector<Cut> two{cut(Op::Xor, {"a"}, {"b"}), cut(Op::Seq, {"a"}, {"b"})};
    auto [kept3, fallback3] = apply_rules(two, response);
    CHECK_FALSE(fallback3);
    REQUIRE(kept3.size() == 1);
    CHECK(kept3[0] == cut(Op::Seq, {"a"}, {"b"}));
}

TEST_CASE("pruning is monotone in the rule set") {
    std::mt19937 rng(43);
    for (int i = 0; i < 20; ++i) {
        EventLog log = random_log(rng, 5, 20, 6, /*allow_empty=*/false);
        if (log.alphabet().size() < 2)
            continue;
        auto cuts = explore(extract_dfg(log));
        RuleSet small = mine_rules(log, Ratio(9, 10));
        RuleSet big = small;
        big.insert(DeclareRule(Template::AtMost, *log.alphabet().begin()));
        auto [kept_small, fb1] = apply_rules(cuts, small);
        auto [kept_big, fb2] = apply_rules(cuts, big);
        if (fb1 || fb2)
            continue;
        for (const Cut& c : kept_big)
            CHECK(contains(kept_small, c));
    }
}

TEST_CASE("cut costs on the worked graphs") {
    Dfg l5 = extract_dfg(l5_log());
    CHECK(cut_cost(cut(Op::Seq, {"a", "d"}, {"b", "c"}), l5, Ratio(1, 5)) == 0);

    Dfg l2 = extract_dfg(l2_log());
    CHECK(cut_cost(cut(Op::Loop, {"c"}, {"a", "b"}), l2, Ratio(1, 5)) == 0);
    CHECK(cut_cost(cut(Op::Par, {"a", "b"}, {"c"}), l2, Ratio(1, 5)) == 2);

    // With sup = 0 the missing terms vanish; only deviating mass remains.
    Dfg noisy = extract_dfg(make_log({{{"a", "b"}, 3}, {{"b", "a"}, 1}}));
    CHECK(cut_cost(cut(Op::Seq, {"a"}, {"b"}), noisy, Ratio(0, 1)) == 1);
    CHECK(cut_cost(cut(Op::Seq, {"a"}, {"b"}), noisy, Ratio(1, 1)) ==
          1 + 1); // q=4, forward mass 3
}

TEST_CASE("selection breaks ties by balance, operator and side size") {
    Dfg l5 = extract_dfg(l5_log());
    std::vector<Cut> seqs{cut(Op::Seq, {"a"}, {"b", "c", "d"}),
                          cut(Op::Seq, {"a", "d"}, {"b", "c"})};
    ScoredCut best = select_cut(seqs, l5, Ratio(1, 5));
    CHECK(best.cut == cut(Op::Seq, {"a", "d"}, {"b", "c"}));
    CHECK(best.cost == 0);

    // Equal cost and balance: the operator order prefers exclusive choice.
    Dfg l4 = extract_dfg(l4_log());
    std::vector<Cut> ops{cut(Op::Seq, {"a"}, {"b"}), cut(Op::Xor, {"a"}, {"b"})};
    CHECK(select_cut(ops, l4, Ratio(0, 1)).cut.op == Op::Xor);

    // Equal cost, balance and operator: the smaller body wins.
    Dfg l2 = extract_dfg(l2_log());
    std::vector<Cut> loops{cut(Op::Loop, {"b", "c"}, {"a"}), cut(Op::Loop, {"c"}, {"a", "b"})};
    CHECK(cut_cost(loops[0], l2, Ratio(1, 5)) == 0);
    CHECK(cut_cost(loops[1], l2, Ratio(1, 5)) == 0);
    CHECK(select_cut(loops, l2, Ratio(1, 5)).cut == cut(Op::Loop, {"c"}, {"a", "b"}));

    CHECK(select_cut({cut(Op::Par, {"a", "b"}, {"c"})}, l2, Ratio(1, 5)).cut.op == Op::Par);
    CHECK_THROWS_AS(select_cut({}, l2, Ratio(1, 5)), Error);
}

TEST_CASE("selection is invariant under uniform scaling") {
    std::mt19937 rng(47);
    for (int i = 0; i < 15; ++i) {
        EventLog base = random_log(rng, 5, 15, 6, /*allow_empty=*/false);
        if (base.alphabet().size() < 2)
            continue;
        EventLog five, fifteen;
        for (const auto& [trace, count] : base.variants()) {
            five.add_trace(trace, count * 5);
            fifteen.add_trace(trace, count * 15);
        }
        // sup * n integral for both logs, so no ceiling effects.
        auto small = find_best_cut(extract_dfg(five), {}, params(Ratio(1, 5)));
        auto large = find_best_cut(extract_dfg(fifteen), {}, params(Ratio(1, 5)));
        REQUIRE(small.best.has_value());
        REQUIRE(large.best.has_value());
        CHECK(small.best->cut == large.best->cut);
        CHECK(3 * small.best->cost == large.best->cost);
    }
}

TEST_CASE("fused search equals the composed reference") {
    std::mt19937 rng(53);
    for (int i = 0; i < 40; ++i) {
        EventLog log = random_log(rng, 6, 25, 7);
        if (log.alphabet().size() < 2)
            continue;
        RuleSet rules;
        switch (i % 3) {
        case 0: break;
        case 1: rules = mine_rules(log, Ratio(1, 1)); break;
        default: rules = mine_rules(log, Ratio(7, 10)); break;
        }
        CutSearchParams p = params(i % 2 ? Ratio(1, 5) : Ratio(0, 1));
        p.workers = 1 + static_cast<int>(i % 3);
        auto fused = find_best_cut(extract_dfg(log), rules, p);
        auto composed = find_best_cut_serial(extract_dfg(log), rules, p);
        CHECK(fused.fallback == composed.fallback);
        CHECK(fused.feasible_count == composed.feasible_count);
        CHECK(fused.kept_count == composed.kept_count);
        REQUIRE(fused.best.has_value() == composed.best.has_value());
        if (fused.best) {
            CHECK(fused.best->cut == composed.best->cut);
            CHECK(fused.best->cost == composed.best->cost);
            CHECK(fused.best->rejected_by == composed.best->rejected_by);
        }
    }
}

TEST_CASE("fallback surfaces the rejecting rules") {
    auto result = find_best_cut(extract_dfg(l4_log()),
                                {DeclareRule(Template::Response, "a", "b")},
                                params(Ratio(1, 5)));
    CHECK(result.fallback);
    CHECK(result.feasible_count == 1);
    CHECK(result.kept_count == 0);
    REQUIRE(result.best.has_value());
    CHECK(result.best->cut == cut(Op::Xor, {"a"}, {"b"}));
    REQUIRE(result.best->rejected_by.size() == 1);
    CHECK(result.best->rejected_by[0] == DeclareRule(Template::Response, "a", "b"));
}

TEST_CASE("candidate enumeration lists every feasible cut with its cost") {
    Dfg l2 = extract_dfg(l2_log());
    CutSearchParams p = params(Ratio(1, 5));
    auto rows = enumerate_candidates(l2, {DeclareRule(Template::Response, "a", "b")}, p);
    auto cuts = explore(l2, p);
    REQUIRE(rows.size() == cuts.size());
    for (const auto& row : rows) {
        CHECK(contains(cuts, row.cut));
        CHECK(row.cost == cut_cost(row.cut, l2, p.sup));
        for (const auto& r : row.rejected_by)
            CHECK(reject(row.cut, r));
    }
    std::string csv = candidates_to_csv(rows);
    CHECK(csv.find("op,sigma1,sigma2,cost,rejected_by") == 0);
    CHECK(csv.find("loop,\"c\",\"a b\"") != std::string::npos);
}

TEST_CASE("cut text form") {
    CHECK(cut(Op::Seq, {"a", "d"}, {"b", "c"}).str() == "->({a,d},{b,c})");
    CHECK(cut(Op::Xor, {"a"}, {"b"}).str() == "x({a},{b})");
}
