#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "imr/declare.hpp"
#include "imr/event_log.hpp"
#include "imr/process_tree.hpp"

namespace imr::testing {

inline EventLog make_log(std::initializer_list<std::pair<Trace, std::uint64_t>> rows) {
    EventLog log;
    for (const auto& [trace, count] : rows)
        log.add_trace(trace, count);
    return log;
}

// Worked examples used across the suite.
inline EventLog l1_log() {
    return make_log({{{"a", "c", "d"}, 1}, {{"b", "c", "e"}, 1}});
}

inline EventLog l2_log() { return make_log({{{"c", "a", "c", "b", "c"}, 1}}); }

inline EventLog l4_log() { return make_log({{{"a"}, 1}, {{"b"}, 1}}); }

inline EventLog l5_log() {
    return make_log({{{"a", "c", "b"}, 50}, {{"d", "c"}, 50}});
}

inline RuleSet r1_rules() {
    return {DeclareRule(Template::NotCoExistence, "a", "e"),
            DeclareRule(Template::NotCoExistence, "b", "d")};
}

inline RuleSet r2_rules() { return {DeclareRule(Template::Response, "a", "b")}; }

inline RuleSet r3_rules() { return {DeclareRule(Template::Precedence, "a", "b")}; }

inline EventLog random_log(std::mt19937& rng, std::size_t max_activities,
                           std::size_t max_traces, std::size_t max_len,
                           bool allow_empty = true) {
    std::uniform_int_distribution<std::size_t> n_act(1, max_activities);
    std::size_t acts = n_act(rng);
    std::uniform_int_distribution<std::size_t> n_tr(1, max_traces);
    std::size_t traces = n_tr(rng);
    std::uniform_int_distribution<std::size_t> len(allow_empty ? 0 : 1, max_len);
    std::uniform_int_distribution<std::size_t> act(0, acts - 1);
    EventLog log;
    for (std::size_t i = 0; i < traces; ++i) {
        Trace t;
        std::size_t l = len(rng);
        for (std::size_t k = 0; k < l; ++k)
            t.push_back(std::string(1, static_cast<char>('a' + act(rng))));
        log.add_trace(std::move(t));
    }
    return log;
}

inline TreePtr random_tree(std::mt19937& rng, int depth, std::size_t activities) {
    std::uniform_int_distribution<int> kind(0, depth <= 0 ? 1 : 5);
    std::uniform_int_distribution<std::size_t> act(0, activities - 1);
    int k = kind(rng);
    if (k == 0)
        return ProcessTree::silent();
    if (k == 1)
        return ProcessTree::leaf(std::string(1, static_cast<char>('a' + act(rng))));
    Op op = static_cast<Op>(k - 2);
    std::uniform_int_distribution<int> width(2, 3);
    std::vector<TreePtr> children;
    int w = width(rng);
    for (int i = 0; i < w; ++i)
        children.push_back(random_tree(rng, depth - 1, activities));
    return ProcessTree::node(op, std::move(children));
}

} // namespace imr::testing
