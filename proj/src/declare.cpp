#include "imr/declare.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

namespace imr {

namespace {

constexpr std::array<std::string_view, 8> kTemplateNames = {
    "at-most",      "existence",        "response",       "precedence",
    "co-existence", "not-co-existence", "not-succession", "responded-existence",
};

} // namespace

std::string_view template_name(Template t) {
    return kTemplateNames[static_cast<std::size_t>(t)];
}

std::optional<Template> template_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kTemplateNames.size(); ++i)
        if (kTemplateNames[i] == name)
            return static_cast<Template>(i);
    return std::nullopt;
}

bool template_is_unary(Template t) {
    return t == Template::AtMost || t == Template::Existence;
}

bool template_is_symmetric(Template t) {
    return t == Template::CoExistence || t == Template::NotCoExistence;
}

DeclareRule::DeclareRule(Template t, Activity a) : tmpl_(t), a_(std::move(a)) {
    if (!template_is_unary(t))
        throw Error(std::string("rule ") + std::string(template_name(t)) +
                    " needs two activities");
    validate_activity(a_);
}

DeclareRule::DeclareRule(Template t, Activity a, Activity b)
    : tmpl_(t), a_(std::move(a)), b_(std::move(b)) {
    if (template_is_unary(t))
        throw Error(std::string("rule ") + std::string(template_name(t)) +
                    " takes one activity");
    validate_activity(a_);
    validate_activity(b_);
    if (a_ == b_)
        throw Error(std::string("rule ") + std::string(template_name(t)) +
                    " needs two distinct activities");
    if (template_is_symmetric(t) && b_ < a_)
        std::swap(a_, b_);
}

std::set<Activity> DeclareRule::activities() const {
    std::set<Activity> out{a_};
    if (!unary())
        out.insert(b_);
    return out;
}

namespace {

bool arg_bare(const std::string& s) {
    for (char c : s)
        if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '_')
            return false;
    return !s.empty();
}

std::string quote_arg(const std::string& s) {
    if (arg_bare(s))
        return s;
    std::string out = "'";
    for (char c : s) {
        out.push_back(c);
        if (c == '\'')
            out.push_back('\'');
    }
    out += "'";
    return out;
}

} // namespace

std::string DeclareRule::str() const {
    std::string out(template_name(tmpl_));
    out += "(" + quote_arg(a_);
    if (!unary())
        out += "," + quote_arg(b_);
    out += ")";
    return out;
}

bool check_trace(const DeclareRule& rule, const Trace& trace) {
    const Activity& a = rule.first();
    const Activity& b = rule.second();
    switch (rule.tmpl()) {
    case Template::AtMost: {
        std::size_t n = 0;
        for (const auto& e : trace)
            if (e == a && ++n > 1)
                return false;
        return true;
    }
    case Template::Existence:
        return std::find(trace.begin(), trace.end(), a) != trace.end();
    case Template::Response: {
        // every a is followed by a later b
        for (std::size_t i = trace.size(); i-- > 0;) {
            if (trace[i] == b)
                break;
            if (trace[i] == a)
                return false;
        }
        return true;
    }
    case Template::Precedence: {
        // every b is preceded by an earlier a
        for (std::size_t i = 0; i < trace.size(); ++i) {
            if (trace[i] == a)
                break;
            if (trace[i] == b)
                return false;
        }
        return true;
    }
    case Template::CoExistence: {
        bool ha = std::find(trace.begin(), trace.end(), a) != trace.end();
        bool hb = std::find(trace.begin(), trace.end(), b) != trace.end();
        return ha == hb;
    }
    case Template::NotCoExistence: {
        bool ha = std::find(trace.begin(), trace.end(), a) != trace.end();
        bool hb = std::find(trace.begin(), trace.end(), b) != trace.end();
        return !(ha && hb);
    }
    case Template::NotSuccession: {
        // no b may occur after any a
        bool seen_a = false;
        for (const auto& e : trace) {
            if (e == a)
                seen_a = true;
            else if (e == b && seen_a)
                return false;
        }
        return true;
    }
    case Template::RespondedExistence: {
        bool ha = std::find(trace.begin(), trace.end(), a) != trace.end();
        if (!ha)
            return true;
        return std::find(trace.begin(), trace.end(), b) != trace.end();
    }
    }
    return true;
}

Ratio confidence(const DeclareRule& rule, const EventLog& log) {
    if (log.empty())
        throw Error("confidence: empty log");
    std::uint64_t sat = 0;
    for (const auto& [trace, count] : log.variants())
        if (check_trace(rule, trace))
            sat += count;
    return Ratio(static_cast<std::int64_t>(sat), static_cast<std::int64_t>(log.total_traces()));
}

namespace {

// A rule is activated in a trace when its trigger activity occurs; unary
// templates are always triggered.
bool activated(const DeclareRule& rule, const Trace& trace) {
    switch (rule.tmpl()) {
    case Template::AtMost:
    case Template::Existence:
        return true;
    case Template::Response:
    case Template::NotSuccession:
    case Template::RespondedExistence:
        return std::find(trace.begin(), trace.end(), rule.first()) != trace.end();
    case Template::Precedence:
        return std::find(trace.begin(), trace.end(), rule.second()) != trace.end();
    case Template::CoExistence:
    case Template::NotCoExistence:
        return std::find(trace.begin(), trace.end(), rule.first()) != trace.end() ||
               std::find(trace.begin(), trace.end(), rule.second()) != trace.end();
    }
    return true;
}

std::vector<DeclareRule> all_instantiations(const std::set<Activity>& alphabet) {
    std::vector<Activity> acts(alphabet.begin(), alphabet.end());
    std::vector<DeclareRule> out;
    constexpr std::array<Template, 2> unary = {Template::AtMost, Template::Existence};
    constexpr std::array<Template, 4> directional = {
        Template::Response, Template::Precedence, Template::NotSuccession,
        Template::RespondedExistence};
    constexpr std::array<Template, 2> symmetric = {Template::CoExistence,
                                                   Template::NotCoExistence};
    for (auto t : unary)
        for (const auto& a : acts)
            out.emplace_back(t, a);
    for (auto t : directional)
        for (const auto& a : acts)
            for (const auto& b : acts)
                if (a != b)
                    out.emplace_back(t, a, b);
    for (auto t : symmetric)
        for (std::size_t i = 0; i < acts.size(); ++i)
            for (std::size_t j = i + 1; j < acts.size(); ++j)
                out.emplace_back(t, acts[i], acts[j]);
    return out;
}

struct RuleStats {
    std::uint64_t satisfied = 0;
    std::uint64_t support = 0;
};

RuleStats rule_stats(const DeclareRule& rule, const EventLog& log) {
    RuleStats s;
    for (const auto& [trace, count] : log.variants()) {
        if (check_trace(rule, trace))
            s.satisfied += count;
        if (activated(rule, trace))
            s.support += count;
    }
    return s;
}

} // namespace

RuleSet mine_rules_serial(const EventLog& log, Ratio min_confidence,
                          std::uint64_t min_support) {
    if (log.empty())
        throw Error("mine_rules: empty log");
    RuleSet out;
    for (const auto& rule : all_instantiations(log.alphabet())) {
        RuleStats s = rule_stats(rule, log);
        if (s.support < min_support)
            continue;
        // keep when satisfied / n >= min_confidence, exactly
        unsigned __int128 lhs =
            static_cast<unsigned __int128>(s.satisfied) * min_confidence.den;
        unsigned __int128 rhs =
            static_cast<unsigned __int128>(min_confidence.num) * log.total_traces();
        if (lhs >= rhs)
            out.insert(rule);
    }
    return out;
}

RuleSet mine_rules(const EventLog& log, Ratio min_confidence, std::uint64_t min_support,
                   int workers) {
    if (log.empty())
        throw Error("mine_rules: empty log");
    auto rules = all_instantiations(log.alphabet());
    std::vector<char> keep(rules.size(), 0);
    int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(rules.size()); ++i) {
        RuleStats s = rule_stats(rules[i], log);
        if (s.support < min_support)
            continue;
        unsigned __int128 lhs =
            static_cast<unsigned __int128>(s.satisfied) * min_confidence.den;
        unsigned __int128 rhs =
            static_cast<unsigned __int128>(min_confidence.num) * log.total_traces();
        keep[i] = lhs >= rhs ? 1 : 0;
    }
    RuleSet out;
    for (std::size_t i = 0; i < rules.size(); ++i)
        if (keep[i])
            out.insert(rules[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Rule file format.

namespace {

struct ArgScanner {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line;

    [[noreturn]] void fail(const std::string& what) {
        throw ParseError("rules line " + std::to_string(line) + ": " + what);
    }

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t'))
            ++pos;
    }

    std::string arg() {
        skip_ws();
        if (pos >= text.size())
            fail("expected an argument");
        if (text[pos] == '\'') {
            ++pos;
            std::string out;
            while (true) {
                if (pos >= text.size())
                    fail("unterminated quoted argument");
                char c = text[pos++];
                if (c == '\'') {
                    if (pos < text.size() && text[pos] == '\'') {
                        out.push_back('\'');
                        ++pos;
                    } else {
                        return out;
                    }
                } else {
                    out.push_back(c);
                }
            }
        }
        std::size_t begin = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != ')')
            ++pos;
        std::size_t end = pos;
        while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t'))
            --end;
        if (end == begin)
            fail("empty argument");
        return std::string(text.substr(begin, end - begin));
    }
};

DeclareRule parse_rule_line(std::string_view line, std::size_t line_no) {
    ArgScanner s{line, 0, line_no};
    s.skip_ws();
    std::size_t begin = s.pos;
    while (s.pos < line.size() && line[s.pos] != '(')
        ++s.pos;
    if (s.pos >= line.size())
        s.fail("expected '('");
    std::size_t end = s.pos;
    while (end > begin && (line[end - 1] == ' ' || line[end - 1] == '\t'))
        --end;
    std::string name(line.substr(begin, end - begin));
    auto tmpl = template_from_name(name);
    if (!tmpl)
        s.fail("unknown template '" + name + "'");
    ++s.pos; // '('
    std::string a = s.arg();
    s.skip_ws();
    std::string b;
    bool binary = false;
    if (s.pos < line.size() && line[s.pos] == ',') {
        ++s.pos;
        b = s.arg();
        binary = true;
        s.skip_ws();
    }
    if (s.pos >= line.size() || line[s.pos] != ')')
        s.fail("expected ')'");
    ++s.pos;
    s.skip_ws();
    if (s.pos != line.size())
        s.fail("trailing characters");
    try {
        if (binary)
            return DeclareRule(*tmpl, std::move(a), std::move(b));
        return DeclareRule(*tmpl, std::move(a));
    } catch (const Error& e) {
        s.fail(e.what());
    }
}

} // namespace

RuleSet parse_rules_text(std::string_view text) {
    RuleSet out;
    std::size_t line_no = 0;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t nl = text.find('\n', begin);
        std::string_view line = text.substr(
            begin, nl == std::string_view::npos ? text.size() - begin : nl - begin);
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        std::size_t content = line.find_first_not_of(" \t");
        if (content != std::string_view::npos && line[content] != '#')
            out.insert(parse_rule_line(line, line_no));
        if (nl == std::string_view::npos)
            break;
        begin = nl + 1;
    }
    return out;
}

RuleSet parse_rules(std::istream& in) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_rules_text(text);
}

RuleSet parse_rules_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open file: " + path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        return rules_from_json(text);
    }
    return parse_rules(in);
}

std::string render_rules(const RuleSet& rules) {
    std::string out;
    for (const auto& r : rules) {
        out += r.str();
        out += "\n";
    }
    return out;
}

RuleSet rules_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("rules JSON: ") + e.what());
    }
    if (!doc.is_array())
        throw ParseError("rules JSON: expected an array");
    RuleSet out;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("template") || !item.contains("args"))
            throw ParseError("rules JSON: each entry needs 'template' and 'args'");
        auto tmpl = template_from_name(item["template"].get<std::string>());
        if (!tmpl)
            throw ParseError("rules JSON: unknown template '" +
                             item["template"].get<std::string>() + "'");
        const auto& args = item["args"];
        if (!args.is_array())
            throw ParseError("rules JSON: 'args' must be an array");
        if (template_is_unary(*tmpl)) {
            if (args.size() != 1)
                throw ParseError("rules JSON: " + std::string(template_name(*tmpl)) +
                                 " takes one argument");
            out.insert(DeclareRule(*tmpl, args[0].get<std::string>()));
        } else {
            if (args.size() != 2)
                throw ParseError("rules JSON: " + std::string(template_name(*tmpl)) +
                                 " takes two arguments");
            out.insert(DeclareRule(*tmpl, args[0].get<std::string>(), args[1].get<std::string>()));
        }
    }
    return out;
}

std::string rules_to_json(const RuleSet& rules) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rules) {
        nlohmann::json item;
        item["template"] = std::string(template_name(r.tmpl()));
        item["args"] = r.unary() ? nlohmann::json::array({r.first()})
                                 : nlohmann::json::array({r.first(), r.second()});
        arr.push_back(item);
    }
    return arr.dump(2) + "\n";
}

} // namespace imr
