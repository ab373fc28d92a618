#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "imr/errors.hpp"

namespace imr {

using Activity = std::string;
using Trace = std::vector<Activity>;

/// Throws if the label is empty or contains a newline.
void validate_activity(const Activity& a);

/// Multiset of traces, stored variant-compressed. Variant order is the
/// canonical map order, which keeps every downstream computation
/// deterministic.
class EventLog {
public:
    using VariantMap = std::map<Trace, std::uint64_t>;

    EventLog() = default;

    void add_trace(Trace t, std::uint64_t count = 1);

    const VariantMap& variants() const { return variants_; }
    std::uint64_t total_traces() const { return total_; }
    std::uint64_t total_events() const;
    std::size_t variant_count() const { return variants_.size(); }
    bool empty() const { return total_ == 0; }

    std::set<Activity> alphabet() const;

    /// Filters every trace to the given activities; multiplicities of
    /// colliding variants merge.
    EventLog project(const std::set<Activity>& keep) const;

    friend bool operator==(const EventLog& a, const EventLog& b) {
        return a.variants_ == b.variants_;
    }

private:
    VariantMap variants_;
    std::uint64_t total_ = 0;
};

/// XES ingestion. Only concept:name event attributes are interpreted; a
/// gzip container is detected from the magic bytes.
EventLog load_xes(std::istream& in);
EventLog load_xes_file(const std::string& path);

/// CSV ingestion. Rows are grouped by case column; events are ordered by
/// the numeric order column when given, otherwise by file order. Ties in
/// the order column keep file order.
EventLog load_csv(std::istream& in, const std::string& case_column,
                  const std::string& activity_column,
                  const std::string& order_column = "");
EventLog load_csv_file(const std::string& path, const std::string& case_column,
                       const std::string& activity_column,
                       const std::string& order_column = "");

/// Writes one row per event with columns case,activity. Expands variants,
/// so intended for desk-scale logs.
void save_csv(const EventLog& log, std::ostream& out);

/// RFC 4180 field quoting; returns the input unchanged when no quoting is
/// needed.
std::string csv_quote(const std::string& s);

/// Canonical one-line rendering of a trace: labels joined by ",",
/// quoted with single quotes when they contain delimiter characters.
std::string render_trace(const Trace& t);

} // namespace imr
