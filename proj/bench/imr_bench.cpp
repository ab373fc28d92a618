// Wall-clock comparison of the parallel kernels against their serial
// reference implementations on a synthetic log. Numbers are indicative;
// correctness equivalence is covered by the unit tests.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "imr/conformance.hpp"
#include "imr/cuts.hpp"
#include "imr/declare.hpp"
#include "imr/dfg.hpp"
#include "imr/discovery.hpp"
#include "imr/event_log.hpp"

using namespace imr;

namespace {

double seconds(const std::chrono::steady_clock::time_point& t0) {
    std::chrono::duration<double> d = std::chrono::steady_clock::now() - t0;
    return d.count();
}

template <typename F> double timed(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return seconds(t0);
}

EventLog synthetic_log(std::size_t traces, std::size_t activities, std::size_t variants,
                       unsigned seed) {
    std::mt19937 rng(seed);
    std::vector<Activity> names;
    for (std::size_t i = 0; i < activities; ++i)
        names.push_back("act" + std::to_string(i));

    std::vector<Trace> shapes;
    std::uniform_int_distribution<std::size_t> len_dist(1, 2 * activities);
    std::uniform_int_distribution<std::size_t> act_dist(0, activities - 1);
    for (std::size_t v = 0; v < variants; ++v) {
        Trace t;
        std::size_t len = len_dist(rng);
        for (std::size_t i = 0; i < len; ++i)
            t.push_back(names[act_dist(rng)]);
        shapes.push_back(std::move(t));
    }

    EventLog log;
    std::uniform_int_distribution<std::size_t> pick(0, variants - 1);
    for (std::size_t i = 0; i < traces; ++i)
        log.add_trace(shapes[pick(rng)]);
    return log;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-16s %10.3fs %10.3fs %8.2fx\n", name, serial, parallel,
                parallel > 0 ? serial / parallel : 0.0);
}

} // namespace

int main() {
    const int threads = omp_get_max_threads();
    std::printf("threads: %d\n", threads);
    std::printf("%-16s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    {
        EventLog log = synthetic_log(200000, 16, 400, 7);
        Dfg ref;
        double s = timed([&] { ref = extract_dfg_serial(log); });
        Dfg par;
        double p = timed([&] { par = extract_dfg(log, 0); });
        report("extract_dfg", s, p);
    }
    {
        EventLog log = synthetic_log(20000, 12, 300, 11);
        RuleSet ref, par;
        double s = timed([&] { ref = mine_rules_serial(log); });
        double p = timed([&] { par = mine_rules(log, Ratio(1, 1), 1, 0); });
        report("mine_rules", s, p);
    }
    {
        EventLog log = synthetic_log(5000, 14, 200, 13);
        Dfg dfg = extract_dfg(log, 0);
        CutSearchParams params;
        params.sup = Ratio(1, 5);
        RuleSet rules = mine_rules(log, Ratio(1, 1), 1, 0);
        CutSearchResult ref, par;
        double s = timed([&] { ref = find_best_cut_serial(dfg, rules, params); });
        double p = timed([&] { par = find_best_cut(dfg, rules, params); });
        report("find_best_cut", s, p);
    }
    {
        EventLog log = synthetic_log(50000, 10, 500, 17);
        ImrConfig config;
        config.sup = Ratio(1, 5);
        TreePtr tree = discover(log, config).tree;
        FitnessReport ref, par;
        double s = timed([&] { ref = fitness_serial(log, *tree); });
        double p = timed([&] { par = fitness(log, *tree, 0); });
        report("fitness", s, p);
    }
    return 0;
}
