#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imr/declare.hpp"
#include "imr/event_log.hpp"
#include "imr/process_tree.hpp"

namespace imr {

/// Trace-level acceptance of a log against a tree, weighted by variant
/// multiplicity.
struct FitnessReport {
    struct Entry {
        Trace variant;
        std::uint64_t count = 0;
        bool accepted = false;
    };
    std::vector<Entry> variants; // canonical variant order
    std::uint64_t accepted_weight = 0;
    std::uint64_t total_weight = 0;
    double accepted_fraction() const {
        return total_weight == 0 ? 1.0
                                 : static_cast<double>(accepted_weight) /
                                       static_cast<double>(total_weight);
    }
};

FitnessReport fitness(const EventLog& log, const ProcessTree& tree, int workers = 0);
FitnessReport fitness_serial(const EventLog& log, const ProcessTree& tree);

struct RuleConformance {
    DeclareRule rule;
    std::uint64_t satisfied = 0;
    std::uint64_t total = 0;
    bool perfect() const { return satisfied == total; }
    double value() const {
        return total == 0 ? 1.0
                          : static_cast<double>(satisfied) / static_cast<double>(total);
    }
};

/// Per-rule confidence of the log, flagging rules that do not hold on
/// every trace.
std::vector<RuleConformance> rule_conformance(const EventLog& log, const RuleSet& rules);

std::string fitness_to_text(const FitnessReport& report);
std::string fitness_to_csv(const FitnessReport& report);
std::string conformance_to_text(const std::vector<RuleConformance>& rows);
std::string conformance_to_csv(const std::vector<RuleConformance>& rows);

} // namespace imr
