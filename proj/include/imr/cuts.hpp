#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "imr/declare.hpp"
#include "imr/dfg.hpp"
#include "imr/process_tree.hpp"
#include "imr/ratio.hpp"

namespace imr {

/// Binary cut of an alphabet. For the symmetric operators x and "and" the
/// sides are stored canonically with the lexicographically smallest side
/// first; -> and loop are ordered (loop: sigma1 = body).
struct Cut {
    Op op = Op::Xor;
    std::set<Activity> sigma1;
    std::set<Activity> sigma2;

    friend bool operator==(const Cut& a, const Cut& b) {
        return a.op == b.op && a.sigma1 == b.sigma1 && a.sigma2 == b.sigma2;
    }
    friend bool operator<(const Cut& a, const Cut& b) {
        if (a.op != b.op) return a.op < b.op;
        if (a.sigma1 != b.sigma1) return a.sigma1 < b.sigma1;
        return a.sigma2 < b.sigma2;
    }
    std::string str() const;
};

struct ScoredCut {
    Cut cut;
    std::uint64_t cost = 0;
    std::vector<DeclareRule> rejected_by; // non-empty iff some rule rejects the cut
};

struct CutSearchParams {
    Ratio sup;                 // missing-behavior weight, in [0, 1]
    Ratio xor_slack;           // admit x-cuts with cross mass <= slack * n
    int enumeration_cap = 24;  // max alphabet size for bipartition enumeration
    int workers = 0;           // <= 0: all available threads
};

/// Every feasible candidate cut of the graph per the frequency-based
/// feasibility rules. Desk-scale: materializes the whole candidate set.
std::vector<Cut> explore(const Dfg& dfg, const CutSearchParams& params = {});

/// Table-driven rejection of a cut by a scoped rule. Precondition: every
/// activity of the rule occurs in the cut (throws otherwise).
bool reject(const Cut& cut, const DeclareRule& rule);

/// Drops every cut rejected by a scoped rule. Rules with activities
/// outside the cut alphabet are inert. When everything is rejected the
/// original set is returned with fallback = true.
std::pair<std::vector<Cut>, bool> apply_rules(const std::vector<Cut>& cuts,
                                              const RuleSet& rules);

/// Cost of a single cut under the deviation-plus-missing formulas.
/// Always an integer because every term is a count or a ceiling.
std::uint64_t cut_cost(const Cut& cut, const Dfg& dfg, Ratio sup);

/// Minimum-cost cut; ties prefer the more balanced cut, then the operator
/// order x < -> < and < loop, then the smaller sigma1 (minimal loop
/// bodies), then the lexicographically smallest sigma1.
ScoredCut select_cut(const std::vector<Cut>& cuts, const Dfg& dfg, Ratio sup);

struct CutSearchResult {
    std::optional<ScoredCut> best; // empty only when no cut is feasible
    bool fallback = false;         // rules rejected every feasible cut
    std::uint64_t feasible_count = 0;
    std::uint64_t kept_count = 0;
};

/// Fused enumerate-reject-score-select kernel, OpenMP-parallel over the
/// bipartition space. Agrees exactly with
/// select_cut(apply_rules(explore(dfg), rules)) including tie-breaks.
CutSearchResult find_best_cut(const Dfg& dfg, const RuleSet& rules,
                              const CutSearchParams& params);

/// Composed single-threaded reference used by the tests and the benchmark.
CutSearchResult find_best_cut_serial(const Dfg& dfg, const RuleSet& rules,
                                     const CutSearchParams& params);

struct CandidateRow {
    Cut cut;
    std::uint64_t cost = 0;
    std::vector<DeclareRule> rejected_by;
};

/// Every feasible candidate with cost and rejecting rules, in enumeration
/// order. Desk-scale diagnostic surface (strict-mode dumps, --dump-candidates).
std::vector<CandidateRow> enumerate_candidates(const Dfg& dfg, const RuleSet& rules,
                                               const CutSearchParams& params);

std::string candidates_to_csv(const std::vector<CandidateRow>& rows);

} // namespace imr
