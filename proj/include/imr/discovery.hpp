#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "imr/cuts.hpp"
#include "imr/event_log.hpp"
#include "imr/process_tree.hpp"

namespace imr {

struct ImrConfig {
    Ratio sup;                 // in [0, 1]
    RuleSet rules;
    bool strict = false;       // fail instead of falling back to unpruned cuts
    Ratio xor_slack;           // x-cut cross-mass relaxation, default 0
    int enumeration_cap = 24;
    int workers = 0;
    bool collect_candidates = false; // keep full per-recursion candidate tables
};

/// One recursion node: either a selected cut or a base case.
struct RecursionStep {
    std::set<Activity> alphabet;
    std::optional<ScoredCut> cut; // empty for base cases
    std::string base;             // canonical text of the base-case subtree
    bool fallback = false;        // rules rejected every cut at this node
    std::vector<CandidateRow> candidates; // only with collect_candidates
};

struct DiscoveryReport {
    TreePtr tree;
    std::vector<RecursionStep> steps; // pre-order over the recursion
    bool any_fallback() const;
};

/// Raised in strict mode when rules reject every feasible cut somewhere.
class StrictModeError : public Error {
public:
    StrictModeError(std::set<Activity> alphabet, std::vector<ScoredCut> candidates);
    const std::set<Activity>& alphabet() const { return alphabet_; }
    const std::vector<ScoredCut>& candidates() const { return candidates_; }

private:
    std::set<Activity> alphabet_;
    std::vector<ScoredCut> candidates_;
};

/// Base cases over alphabets of size <= 1; empty otherwise. sup is
/// accepted for signature stability but does not weight the base cases.
std::optional<TreePtr> check_base_case(const EventLog& log, Ratio sup);

/// Splits the log per the cut operator. Precondition: the cut bipartitions
/// exactly the log alphabet.
std::pair<EventLog, EventLog> split_log(const EventLog& log, const Cut& cut);

/// Recursive discovery. Every internal node of the result corresponds to
/// one recorded cut step; base cases are recorded too.
DiscoveryReport discover(const EventLog& log, const ImrConfig& config);

enum class GuaranteeStatus { SatisfiedInBound, Violated };

struct GuaranteeEntry {
    DeclareRule rule;
    GuaranteeStatus status = GuaranteeStatus::SatisfiedInBound;
    std::optional<Trace> witness; // first violating trace found
    bool hard = false;            // construction-certified template in strict mode
};

/// Checks every rule against the bounded language of the tree. Only
/// not-co-existence, not-succession and at-most are certified by
/// strict-mode construction; the other templates are possibility-form.
std::vector<GuaranteeEntry> guarantee_report(const ProcessTree& tree, const RuleSet& rules,
                                             std::size_t max_len, std::size_t max_loop,
                                             std::size_t cap = 1'000'000);

std::string guarantees_to_text(const std::vector<GuaranteeEntry>& entries);

} // namespace imr
