#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "imr/event_log.hpp"

namespace imr {

/// Bit mask over the indices of a Dfg's sorted alphabet.
using Mask = std::uint32_t;

/// Directly-follows graph with edge, start, end and activity frequencies.
/// Activities are indexed in sorted name order; all aggregate queries are
/// available both on activity sets and on index masks.
class Dfg {
public:
    Dfg() = default;

    const std::vector<Activity>& activities() const { return acts_; }
    std::size_t size() const { return acts_.size(); }
    /// -1 when the activity does not occur.
    int index_of(const Activity& a) const;

    std::uint64_t trace_count() const { return traces_; }
    std::uint64_t nonempty_trace_count() const { return nonempty_; }
    std::uint64_t total_events() const { return events_; }

    std::uint64_t edge(std::size_t from, std::size_t to) const { return edges_[from * acts_.size() + to]; }
    std::uint64_t start(std::size_t i) const { return starts_[i]; }
    std::uint64_t end(std::size_t i) const { return ends_[i]; }
    std::uint64_t freq(std::size_t i) const { return freqs_[i]; }

    std::uint64_t edge(const Activity& from, const Activity& to) const;
    std::uint64_t start_freq(const Activity& a) const;
    std::uint64_t end_freq(const Activity& a) const;
    std::uint64_t activity_freq(const Activity& a) const;

    /// Aggregate cross mass M(X, Y) = sum of edge(a, b) over a in X, b in Y.
    std::uint64_t edge_mass(Mask x, Mask y) const;
    std::uint64_t start_mass(Mask x) const;
    std::uint64_t end_mass(Mask x) const;

    std::uint64_t edge_mass(const std::set<Activity>& x, const std::set<Activity>& y) const;
    std::uint64_t start_mass(const std::set<Activity>& x) const;
    std::uint64_t end_mass(const std::set<Activity>& x) const;

    /// Throws when an activity is not part of this graph.
    Mask mask_of(const std::set<Activity>& x) const;
    std::set<Activity> set_of(Mask m) const;
    Mask full_mask() const;

    /// Weighted DOT rendering with artificial start/end nodes.
    std::string to_dot() const;

    friend Dfg extract_dfg(const EventLog&, int);
    friend Dfg extract_dfg_serial(const EventLog&);

private:
    static Dfg assemble(std::vector<Activity> acts, std::vector<std::uint64_t> edges,
                        std::vector<std::uint64_t> starts, std::vector<std::uint64_t> ends,
                        std::vector<std::uint64_t> freqs, std::uint64_t traces,
                        std::uint64_t nonempty, std::uint64_t events);

    std::vector<Activity> acts_;
    std::map<Activity, int> index_;
    std::vector<std::uint64_t> edges_;   // dense |A| x |A|
    std::vector<std::uint64_t> starts_;
    std::vector<std::uint64_t> ends_;
    std::vector<std::uint64_t> freqs_;
    std::uint64_t traces_ = 0;
    std::uint64_t nonempty_ = 0;
    std::uint64_t events_ = 0;
};

/// Parallel extraction over variants; workers <= 0 uses all available
/// threads. Counts are integers, so the result never depends on the
/// worker count.
Dfg extract_dfg(const EventLog& log, int workers = 0);

/// Plain single-pass reference used by the tests and the benchmark.
Dfg extract_dfg_serial(const EventLog& log);

} // namespace imr
