#include "imr/discovery.hpp"

#include <algorithm>
#include <sstream>

namespace imr {

bool DiscoveryReport::any_fallback() const {
    return std::any_of(steps.begin(), steps.end(),
                       [](const RecursionStep& s) { return s.fallback; });
}

namespace {

std::string strict_message(const std::set<Activity>& alphabet,
                           const std::vector<ScoredCut>& candidates) {
    std::ostringstream out;
    out << "strict mode: every candidate cut rejected over alphabet {";
    bool first = true;
    for (const auto& a : alphabet) {
        if (!first)
            out << ",";
        out << a;
        first = false;
    }
    out << "}";
    for (const auto& c : candidates) {
        out << "\n  " << c.cut.str() << " cost=" << c.cost << " rejected by";
        for (const auto& r : c.rejected_by)
            out << " " << r.str();
    }
    return out.str();
}

} // namespace

StrictModeError::StrictModeError(std::set<Activity> alphabet, std::vector<ScoredCut> candidates)
    : Error(strict_message(alphabet, candidates)), alphabet_(std::move(alphabet)),
      candidates_(std::move(candidates)) {}

std::optional<TreePtr> check_base_case(const EventLog& log, [[maybe_unused]] Ratio sup) {
    auto alphabet = log.alphabet();
    if (alphabet.empty())
        return ProcessTree::silent();
    if (alphabet.size() > 1)
        return std::nullopt;
    const Activity& a = *alphabet.begin();
    bool has_empty = false;
    bool has_multi = false;
    for (const auto& [trace, count] : log.variants()) {
        if (trace.empty())
            has_empty = true;
        if (trace.size() >= 2)
            has_multi = true;
    }
    TreePtr leaf = ProcessTree::leaf(a);
    TreePtr tau = ProcessTree::silent();
    if (!has_empty && !has_multi)
        return leaf;
    if (has_empty && !has_multi)
        return ProcessTree::node(Op::Xor, {leaf, tau});
    if (!has_empty && has_multi)
        return ProcessTree::node(Op::Loop, {leaf, tau});
    return ProcessTree::node(Op::Loop, {tau, leaf});
}

namespace {

// Leftmost split index with the fewest misplaced events.
std::size_t best_seq_split(const Trace& trace, const std::set<Activity>& sigma2) {
    std::size_t len = trace.size();
    std::vector<std::size_t> suffix_s1(len + 1, 0);
    for (std::size_t i = len; i-- > 0;)
        suffix_s1[i] = suffix_s1[i + 1] + (sigma2.count(trace[i]) ? 0 : 1);
    std::size_t best_k = 0, best_cost = suffix_s1[0];
    std::size_t prefix_s2 = 0;
    for (std::size_t k = 1; k <= len; ++k) {
        prefix_s2 += sigma2.count(trace[k - 1]) ? 1 : 0;
        std::size_t cost = prefix_s2 + suffix_s1[k];
        if (cost < best_cost) {
            best_cost = cost;
            best_k = k;
        }
    }
    return best_k;
}

Trace project_trace(const Trace& trace, const std::set<Activity>& keep) {
    Trace out;
    out.reserve(trace.size());
    for (const auto& a : trace)
        if (keep.count(a))
            out.push_back(a);
    return out;
}

} // namespace

std::pair<EventLog, EventLog> split_log(const EventLog& log, const Cut& cut) {
    std::set<Activity> alphabet = log.alphabet();
    std::set<Activity> cut_alphabet = cut.sigma1;
    cut_alphabet.insert(cut.sigma2.begin(), cut.sigma2.end());
    if (alphabet != cut_alphabet)
        throw Error("split_log: cut does not bipartition the log alphabet");

    EventLog l1, l2;
    for (const auto& [trace, count] : log.variants()) {
        switch (cut.op) {
        case Op::Xor: {
            std::size_t n1 = 0, n2 = 0;
            for (const auto& a : trace)
                (cut.sigma1.count(a) ? n1 : n2) += 1;
            if (n2 > n1)
                l2.add_trace(project_trace(trace, cut.sigma2), count);
            else
                l1.add_trace(project_trace(trace, cut.sigma1), count);
            break;
        }
        case Op::Seq: {
            std::size_t k = best_seq_split(trace, cut.sigma2);
            Trace left(trace.begin(), trace.begin() + k);
            Trace right(trace.begin() + k, trace.end());
            l1.add_trace(project_trace(left, cut.sigma1), count);
            l2.add_trace(project_trace(right, cut.sigma2), count);
            break;
        }
        case Op::Par: {
            l1.add_trace(project_trace(trace, cut.sigma1), count);
            l2.add_trace(project_trace(trace, cut.sigma2), count);
            break;
        }
        case Op::Loop: {
            // Maximal same-side runs alternate; body runs go to L1, redo
            // runs to L2, with empty body traces at redo boundaries.
            if (trace.empty()) {
                l1.add_trace({}, count);
                break;
            }
            std::vector<std::pair<bool, Trace>> runs; // (is_sigma1, run)
            for (const auto& a : trace) {
                bool side1 = cut.sigma1.count(a) > 0;
                if (runs.empty() || runs.back().first != side1)
                    runs.push_back({side1, {}});
                runs.back().second.push_back(a);
            }
            if (!runs.front().first)
                l1.add_trace({}, count);
            for (auto& [side1, run] : runs)
                (side1 ? l1 : l2).add_trace(std::move(run), count);
            if (!runs.back().first)
                l1.add_trace({}, count);
            break;
        }
        }
    }
    return {std::move(l1), std::move(l2)};
}

namespace {

class Discoverer {
public:
    Discoverer(const ImrConfig& config) : config_(config) {
        params_.sup = config.sup;
        params_.xor_slack = config.xor_slack;
        params_.enumeration_cap = config.enumeration_cap;
        params_.workers = config.workers;
    }

    DiscoveryReport run(const EventLog& log) {
        DiscoveryReport report;
        report.tree = recurse(log, report.steps);
        return report;
    }

private:
    TreePtr recurse(const EventLog& log, std::vector<RecursionStep>& steps) {
        auto alphabet = log.alphabet();
        if (auto base = check_base_case(log, config_.sup)) {
            RecursionStep step;
            step.alphabet = std::move(alphabet);
            step.base = render_tree(**base);
            steps.push_back(std::move(step));
            return *base;
        }
        Dfg dfg = extract_dfg(log, config_.workers);
        CutSearchResult found = find_best_cut(dfg, config_.rules, params_);
        if (!found.best)
            throw Error("discover: no feasible cut over a multi-activity alphabet");
        if (found.fallback && config_.strict)
            throw StrictModeError(alphabet,
                                  [&] {
                                      auto rows = enumerate_candidates(dfg, config_.rules,
                                                                       params_);
                                      std::vector<ScoredCut> cands;
                                      cands.reserve(rows.size());
                                      for (auto& row : rows)
                                          cands.push_back({std::move(row.cut), row.cost,
                                                           std::move(row.rejected_by)});
                                      return cands;
                                  }());

        RecursionStep step;
        step.alphabet = std::move(alphabet);
        step.cut = *found.best;
        step.fallback = found.fallback;
        if (config_.collect_candidates)
            step.candidates = enumerate_candidates(dfg, config_.rules, params_);
        steps.push_back(std::move(step));

        auto [l1, l2] = split_log(log, found.best->cut);
        TreePtr left = recurse(l1, steps);
        TreePtr right = recurse(l2, steps);
        return ProcessTree::node(found.best->cut.op, {left, right});
    }

    const ImrConfig& config_;
    CutSearchParams params_;
};

} // namespace

DiscoveryReport discover(const EventLog& log, const ImrConfig& config) {
    if (config.sup.num > config.sup.den)
        throw Error("discover: sup must lie in [0, 1]");
    Discoverer d(config);
    return d.run(log);
}

std::vector<GuaranteeEntry> guarantee_report(const ProcessTree& tree, const RuleSet& rules,
                                             std::size_t max_len, std::size_t max_loop,
                                             std::size_t cap) {
    std::vector<GuaranteeEntry> entries;
    for (const auto& rule : rules) {
        bool hard = rule.tmpl() == Template::NotCoExistence ||
                    rule.tmpl() == Template::NotSuccession || rule.tmpl() == Template::AtMost;
        entries.push_back({rule, GuaranteeStatus::SatisfiedInBound, std::nullopt, hard});
    }
    std::size_t open = entries.size();
    if (open == 0)
        return entries;
    visit_bounded_language(tree, max_len, max_loop, cap, [&](const Trace& t) {
        if (open == 0)
            return;
        for (auto& e : entries) {
            if (e.status == GuaranteeStatus::Violated)
                continue;
            if (!check_trace(e.rule, t)) {
                e.status = GuaranteeStatus::Violated;
                e.witness = t;
                --open;
            }
        }
    });
    return entries;
}

std::string guarantees_to_text(const std::vector<GuaranteeEntry>& entries) {
    std::ostringstream out;
    for (const auto& e : entries) {
        out << e.rule.str() << ": ";
        if (e.status == GuaranteeStatus::Violated)
            out << "VIOLATED witness=" << render_trace(*e.witness);
        else
            out << "satisfied-in-bound";
        out << (e.hard ? " [hard]" : " [possibility]") << "\n";
    }
    return out.str();
}

} // namespace imr
