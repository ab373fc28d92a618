#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "imr/event_log.hpp"
#include "imr/ratio.hpp"

namespace imr {

enum class Template {
    AtMost = 0,
    Existence,
    Response,
    Precedence,
    CoExistence,
    NotCoExistence,
    NotSuccession,
    RespondedExistence,
};

std::string_view template_name(Template t); // "at-most", "response", ...
std::optional<Template> template_from_name(std::string_view name);
bool template_is_unary(Template t);
bool template_is_symmetric(Template t); // co-existence, not-co-existence

/// A single instantiated rule. Symmetric templates store their arguments
/// in sorted order, so equal rules compare equal.
class DeclareRule {
public:
    DeclareRule(Template t, Activity a);
    DeclareRule(Template t, Activity a, Activity b);

    Template tmpl() const { return tmpl_; }
    const Activity& first() const { return a_; }
    const Activity& second() const { return b_; }
    bool unary() const { return template_is_unary(tmpl_); }

    std::set<Activity> activities() const;
    std::string str() const;

    friend bool operator<(const DeclareRule& x, const DeclareRule& y) {
        if (x.tmpl_ != y.tmpl_) return x.tmpl_ < y.tmpl_;
        if (x.a_ != y.a_) return x.a_ < y.a_;
        return x.b_ < y.b_;
    }
    friend bool operator==(const DeclareRule& x, const DeclareRule& y) {
        return x.tmpl_ == y.tmpl_ && x.a_ == y.a_ && x.b_ == y.b_;
    }

private:
    Template tmpl_;
    Activity a_;
    Activity b_; // empty for unary templates
};

using RuleSet = std::set<DeclareRule>;

/// Single-trace satisfaction. The empty trace satisfies every template
/// except existence.
bool check_trace(const DeclareRule& rule, const Trace& trace);

/// Fraction of traces (weighted by multiplicity) satisfying the rule.
/// Exact; throws on an empty log.
Ratio confidence(const DeclareRule& rule, const EventLog& log);

/// Enumerates every instantiation of the eight templates over the log
/// alphabet (a != b) and keeps those with confidence >= min_confidence
/// and activation support >= min_support. Deterministic sorted output.
RuleSet mine_rules(const EventLog& log, Ratio min_confidence = Ratio(1, 1),
                   std::uint64_t min_support = 1, int workers = 0);
RuleSet mine_rules_serial(const EventLog& log, Ratio min_confidence = Ratio(1, 1),
                          std::uint64_t min_support = 1);

/// Rule file: one rule per line, template(args), # comments. Arguments
/// are single-quoted when they contain parentheses, commas or spaces.
RuleSet parse_rules(std::istream& in);
RuleSet parse_rules_text(std::string_view text);
RuleSet parse_rules_file(const std::string& path);
std::string render_rules(const RuleSet& rules);

/// JSON alternative: array of {"template": name, "args": [...]}.
RuleSet rules_from_json(const std::string& text);
std::string rules_to_json(const RuleSet& rules);

} // namespace imr
