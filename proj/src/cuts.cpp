#include "imr/cuts.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <sstream>

namespace imr {

std::string Cut::str() const {
    std::string out(op_token(op));
    out += "({";
    bool first = true;
    for (const auto& a : sigma1) {
        if (!first)
            out += ",";
        out += a;
        first = false;
    }
    out += "},{";
    first = true;
    for (const auto& a : sigma2) {
        if (!first)
            out += ",";
        out += a;
        first = false;
    }
    out += "})";
    return out;
}

namespace {

// Shared red-cell table. a1/b1 say whether the rule activities lie in
// sigma1; for unary templates only a1 matters.
bool reject_placement(Template t, Op op, bool unary, bool a1, bool b1) {
    if (unary) {
        switch (t) {
        case Template::AtMost:
            return op == Op::Loop;
        case Template::Existence:
            return op == Op::Xor || (op == Op::Loop && !a1);
        default:
            return false;
        }
    }
    const bool cross = a1 != b1;
    switch (t) {
    case Template::Response:
        return (op == Op::Seq && b1 && !a1) || (op == Op::Xor && cross) ||
               (op == Op::Par && cross) || (op == Op::Loop && a1 && !b1);
    case Template::Precedence:
        return (op == Op::Seq && b1 && !a1) || (op == Op::Xor && cross) ||
               (op == Op::Par && cross) || (op == Op::Loop && !a1 && b1);
    case Template::CoExistence:
        return (op == Op::Xor && cross) || (op == Op::Loop && cross);
    case Template::NotCoExistence:
        return (op == Op::Seq && cross) || (op == Op::Par && cross) || op == Op::Loop;
    case Template::NotSuccession:
        return (op == Op::Seq && a1 && !b1) || (op == Op::Par && cross) || op == Op::Loop;
    case Template::RespondedExistence:
        return (op == Op::Xor && cross) || (op == Op::Loop && a1 && !b1);
    default:
        return false;
    }
}

std::uint64_t max0(std::uint64_t threshold, std::uint64_t have) {
    return have >= threshold ? 0 : threshold - have;
}

// Precomputed per-graph data for the bipartition sweep.
struct EvalContext {
    const Dfg& dfg;
    std::size_t n;
    Mask full;
    std::uint64_t q; // ceil(sup * trace_count)
    Ratio sup;
    Ratio slack;
    std::uint64_t total_start = 0;
    std::uint64_t total_end = 0;
    std::vector<std::uint64_t> pair_term; // symmetric "and" cost contributions

    EvalContext(const Dfg& g, const CutSearchParams& params)
        : dfg(g), n(g.size()), full(g.full_mask()), q(params.sup.ceil_mul(g.trace_count())),
          sup(params.sup), slack(params.xor_slack), pair_term(n * n, 0) {
        for (std::size_t i = 0; i < n; ++i) {
            total_start += g.start(i);
            total_end += g.end(i);
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                std::uint64_t req = sup.ceil_mul(std::min(g.freq(i), g.freq(j)));
                std::uint64_t term = max0(req, g.edge(i, j)) + max0(req, g.edge(j, i));
                pair_term[i * n + j] = term;
                pair_term[j * n + i] = term;
            }
    }
};

struct Candidate {
    Op op;
    Mask m1 = 0, m2 = 0;
    bool feasible = false;
    std::uint64_t cost = 0;
};

// Evaluates the six candidates of one bipartition (A keeps bit 0, so A is
// the lexicographically smaller side). Order: x, ->, <-, and, loop, pool.
void evaluate_mask(const EvalContext& ctx, Mask a, std::array<Candidate, 6>& out) {
    const Mask b = ctx.full ^ a;
    std::uint64_t c12 = 0, c21 = 0, par_cost = 0;
    const std::size_t n = ctx.n;
    for (Mask ra = a; ra;) {
        unsigned i = static_cast<unsigned>(std::countr_zero(ra));
        ra &= ra - 1;
        for (Mask rb = b; rb;) {
            unsigned j = static_cast<unsigned>(std::countr_zero(rb));
            rb &= rb - 1;
            c12 += ctx.dfg.edge(i, j);
            c21 += ctx.dfg.edge(j, i);
            par_cost += ctx.pair_term[i * n + j];
        }
    }
    const std::uint64_t s1 = ctx.dfg.start_mass(a);
    const std::uint64_t s2 = ctx.total_start - s1;
    const std::uint64_t e1 = ctx.dfg.end_mass(a);
    const std::uint64_t e2 = ctx.total_end - e1;
    const std::uint64_t cross = c12 + c21;

    out[0] = {Op::Xor, a, b, false, 0};
    if (ctx.slack.zero() ? cross == 0 : ctx.slack.scaled_geq(ctx.dfg.trace_count(), cross)) {
        out[0].feasible = true;
        out[0].cost = cross + max0(ctx.q, s1) + max0(ctx.q, s2);
    }
    out[1] = {Op::Seq, a, b, c12 >= 1, c21 + max0(ctx.q, c12)};
    out[2] = {Op::Seq, b, a, c21 >= 1, c12 + max0(ctx.q, c21)};
    out[3] = {Op::Par, a, b, c12 >= 1 && c21 >= 1,
              par_cost + max0(ctx.q, s1) + max0(ctx.q, s2) + max0(ctx.q, e1) + max0(ctx.q, e2)};
    out[4] = {Op::Loop, a, b, c12 >= 1 && c21 >= 1 && s1 >= 1 && e1 >= 1,
              s2 + e2 + max0(ctx.sup.ceil_mul(c12), c21)};
    out[5] = {Op::Loop, b, a, c12 >= 1 && c21 >= 1 && s2 >= 1 && e2 >= 1,
              s1 + e1 + max0(ctx.sup.ceil_mul(c21), c12)};
}

// True when the sorted index sequence of x precedes the one of y.
bool mask_lex_less(Mask x, Mask y) {
    while (x && y) {
        unsigned i = static_cast<unsigned>(std::countr_zero(x));
        unsigned j = static_cast<unsigned>(std::countr_zero(y));
        if (i != j)
            return i < j;
        x &= x - 1;
        y &= y - 1;
    }
    return x == 0 && y != 0;
}

int balance_of(Mask m1, Mask m2) {
    return std::min(std::popcount(m1), std::popcount(m2));
}

// Total order over candidates: lower cost, then better balance, then the
// operator order x < -> < and < loop, then smaller sigma1 (keeps loop
// bodies minimal around the start/end activities), then lexicographically
// smaller sigma1.
bool candidate_better(const Candidate& x, const Candidate& y) {
    if (x.cost != y.cost)
        return x.cost < y.cost;
    int bx = balance_of(x.m1, x.m2), by = balance_of(y.m1, y.m2);
    if (bx != by)
        return bx > by;
    if (x.op != y.op)
        return x.op < y.op;
    int px = std::popcount(x.m1), py = std::popcount(y.m1);
    if (px != py)
        return px < py;
    if (x.m1 != y.m1)
        return mask_lex_less(x.m1, y.m1);
    return false;
}

struct RuleBits {
    Template tmpl;
    bool unary;
    Mask a, b;
    DeclareRule rule;
};

std::vector<RuleBits> scoped_rule_bits(const Dfg& dfg, const RuleSet& rules) {
    std::vector<RuleBits> out;
    for (const auto& r : rules) {
        int ia = dfg.index_of(r.first());
        if (ia < 0)
            continue;
        Mask mb = 0;
        if (!r.unary()) {
            int ib = dfg.index_of(r.second());
            if (ib < 0)
                continue;
            mb = Mask{1} << ib;
        }
        out.push_back({r.tmpl(), r.unary(), Mask{1} << ia, mb, r});
    }
    return out;
}

bool rejected_by_any(const std::vector<RuleBits>& rules, Op op, Mask m1) {
    for (const auto& r : rules)
        if (reject_placement(r.tmpl, op, r.unary, (r.a & m1) != 0, (r.b & m1) != 0))
            return true;
    return false;
}

void check_enumerable(const Dfg& dfg, const CutSearchParams& params) {
    if (dfg.size() < 2)
        throw Error("cut search: needs at least two activities");
    int cap = std::min(params.enumeration_cap, 30);
    if (static_cast<int>(dfg.size()) > cap)
        throw CapExceededError(
            "cut search: alphabet of " + std::to_string(dfg.size()) +
            " activities exceeds the enumeration cap of " + std::to_string(cap) +
            "; raise --enumeration-cap if this is intended");
}

} // namespace

std::vector<Cut> explore(const Dfg& dfg, const CutSearchParams& params) {
    check_enumerable(dfg, params);
    EvalContext ctx(dfg, params);
    std::vector<Cut> out;
    std::array<Candidate, 6> cands;
    for (Mask a = 1; a < ctx.full; a += 2) {
        evaluate_mask(ctx, a, cands);
        for (const auto& c : cands)
            if (c.feasible)
                out.push_back({c.op, dfg.set_of(c.m1), dfg.set_of(c.m2)});
    }
    return out;
}

bool reject(const Cut& cut, const DeclareRule& rule) {
    bool a1 = cut.sigma1.count(rule.first()) > 0;
    bool a2 = cut.sigma2.count(rule.first()) > 0;
    if (!a1 && !a2)
        throw Error("reject: rule " + rule.str() + " is not scoped to the cut alphabet");
    bool b1 = false;
    if (!rule.unary()) {
        b1 = cut.sigma1.count(rule.second()) > 0;
        bool b2 = cut.sigma2.count(rule.second()) > 0;
        if (!b1 && !b2)
            throw Error("reject: rule " + rule.str() + " is not scoped to the cut alphabet");
    }
    return reject_placement(rule.tmpl(), cut.op, rule.unary(), a1, b1);
}

std::pair<std::vector<Cut>, bool> apply_rules(const std::vector<Cut>& cuts,
                                              const RuleSet& rules) {
    std::vector<Cut> kept;
    for (const auto& cut : cuts) {
        bool dropped = false;
        for (const auto& rule : rules) {
            bool scoped = true;
            for (const auto& act : rule.activities())
                if (!cut.sigma1.count(act) && !cut.sigma2.count(act)) {
                    scoped = false;
                    break;
                }
            if (scoped && reject(cut, rule)) {
                dropped = true;
                break;
            }
        }
        if (!dropped)
            kept.push_back(cut);
    }
    if (kept.empty() && !cuts.empty())
        return {cuts, true};
    return {std::move(kept), false};
}

std::uint64_t cut_cost(const Cut& cut, const Dfg& dfg, Ratio sup) {
    const std::uint64_t q = sup.ceil_mul(dfg.trace_count());
    const auto& s1 = cut.sigma1;
    const auto& s2 = cut.sigma2;
    switch (cut.op) {
    case Op::Xor:
        return dfg.edge_mass(s1, s2) + dfg.edge_mass(s2, s1) +
               max0(q, dfg.start_mass(s1)) + max0(q, dfg.start_mass(s2));
    case Op::Seq:
        return dfg.edge_mass(s2, s1) + max0(q, dfg.edge_mass(s1, s2));
    case Op::Par: {
        std::uint64_t sum = 0;
        for (const auto& a : s1)
            for (const auto& b : s2) {
                std::uint64_t req =
                    sup.ceil_mul(std::min(dfg.activity_freq(a), dfg.activity_freq(b)));
                sum += max0(req, dfg.edge(a, b)) + max0(req, dfg.edge(b, a));
            }
        return sum + max0(q, dfg.start_mass(s1)) + max0(q, dfg.start_mass(s2)) +
               max0(q, dfg.end_mass(s1)) + max0(q, dfg.end_mass(s2));
    }
    case Op::Loop:
        return dfg.start_mass(s2) + dfg.end_mass(s2) +
               max0(sup.ceil_mul(dfg.edge_mass(s1, s2)), dfg.edge_mass(s2, s1));
    }
    return 0;
}

ScoredCut select_cut(const std::vector<Cut>& cuts, const Dfg& dfg, Ratio sup) {
    if (cuts.empty())
        throw Error("select_cut: empty candidate set");
    const Cut* best = nullptr;
    std::uint64_t best_cost = 0;
    for (const auto& cut : cuts) {
        std::uint64_t cost = cut_cost(cut, dfg, sup);
        if (!best) {
            best = &cut;
            best_cost = cost;
            continue;
        }
        bool better = false;
        if (cost != best_cost) {
            better = cost < best_cost;
        } else {
            auto balance = [](const Cut& c) {
                return std::min(c.sigma1.size(), c.sigma2.size());
            };
            std::size_t bx = balance(cut), by = balance(*best);
            if (bx != by)
                better = bx > by;
            else if (cut.op != best->op)
                better = cut.op < best->op;
            else if (cut.sigma1.size() != best->sigma1.size())
                better = cut.sigma1.size() < best->sigma1.size();
            else if (cut.sigma1 != best->sigma1)
                better = std::lexicographical_compare(cut.sigma1.begin(), cut.sigma1.end(),
                                                      best->sigma1.begin(), best->sigma1.end());
        }
        if (better) {
            best = &cut;
            best_cost = cost;
        }
    }
    return ScoredCut{*best, best_cost, {}};
}

namespace {

std::vector<DeclareRule> rejecting_rules(const Cut& cut, const RuleSet& rules) {
    std::vector<DeclareRule> out;
    for (const auto& rule : rules) {
        bool scoped = true;
        for (const auto& act : rule.activities())
            if (!cut.sigma1.count(act) && !cut.sigma2.count(act)) {
                scoped = false;
                break;
            }
        if (scoped && reject(cut, rule))
            out.push_back(rule);
    }
    return out;
}

} // namespace

CutSearchResult find_best_cut(const Dfg& dfg, const RuleSet& rules,
                              const CutSearchParams& params) {
    check_enumerable(dfg, params);
    EvalContext ctx(dfg, params);
    auto rule_bits = scoped_rule_bits(dfg, rules);

    const std::int64_t count = static_cast<std::int64_t>(ctx.full >> 1); // odd masks below full
    int threads = params.workers > 0 ? params.workers : omp_get_max_threads();

    struct Local {
        Candidate best_feasible{};
        Candidate best_kept{};
        bool any_feasible = false;
        bool any_kept = false;
        std::uint64_t feasible = 0;
        std::uint64_t kept = 0;
    };
    std::vector<Local> locals(threads);

#pragma omp parallel num_threads(threads)
    {
        Local& local = locals[omp_get_thread_num()];
        std::array<Candidate, 6> cands;
#pragma omp for schedule(static)
        for (std::int64_t idx = 0; idx < count; ++idx) {
            Mask a = static_cast<Mask>(2 * idx + 1);
            evaluate_mask(ctx, a, cands);
            for (const auto& c : cands) {
                if (!c.feasible)
                    continue;
                ++local.feasible;
                if (!local.any_feasible || candidate_better(c, local.best_feasible)) {
                    local.best_feasible = c;
                    local.any_feasible = true;
                }
                if (rejected_by_any(rule_bits, c.op, c.m1))
                    continue;
                ++local.kept;
                if (!local.any_kept || candidate_better(c, local.best_kept)) {
                    local.best_kept = c;
                    local.any_kept = true;
                }
            }
        }
    }

    CutSearchResult result;
    Candidate best_feasible{}, best_kept{};
    bool any_feasible = false, any_kept = false;
    for (const auto& local : locals) {
        result.feasible_count += local.feasible;
        result.kept_count += local.kept;
        if (local.any_feasible &&
            (!any_feasible || candidate_better(local.best_feasible, best_feasible))) {
            best_feasible = local.best_feasible;
            any_feasible = true;
        }
        if (local.any_kept && (!any_kept || candidate_better(local.best_kept, best_kept))) {
            best_kept = local.best_kept;
            any_kept = true;
        }
    }

    if (!any_feasible)
        return result;
    const Candidate& chosen = any_kept ? best_kept : best_feasible;
    result.fallback = !any_kept;
    Cut cut{chosen.op, dfg.set_of(chosen.m1), dfg.set_of(chosen.m2)};
    auto rejected = rejecting_rules(cut, rules);
    result.best = ScoredCut{std::move(cut), chosen.cost, std::move(rejected)};
    return result;
}

CutSearchResult find_best_cut_serial(const Dfg& dfg, const RuleSet& rules,
                                     const CutSearchParams& params) {
    CutSearchResult result;
    auto cuts = explore(dfg, params);
    result.feasible_count = cuts.size();
    if (cuts.empty())
        return result;
    auto [kept, fallback] = apply_rules(cuts, rules);
    result.kept_count = fallback ? 0 : kept.size();
    result.fallback = fallback;
    ScoredCut best = select_cut(kept, dfg, params.sup);
    best.rejected_by = rejecting_rules(best.cut, rules);
    result.best = std::move(best);
    return result;
}

std::vector<CandidateRow> enumerate_candidates(const Dfg& dfg, const RuleSet& rules,
                                               const CutSearchParams& params) {
    check_enumerable(dfg, params);
    EvalContext ctx(dfg, params);
    std::vector<CandidateRow> out;
    std::array<Candidate, 6> cands;
    for (Mask a = 1; a < ctx.full; a += 2) {
        evaluate_mask(ctx, a, cands);
        for (const auto& c : cands) {
            if (!c.feasible)
                continue;
            CandidateRow row;
            row.cut = Cut{c.op, dfg.set_of(c.m1), dfg.set_of(c.m2)};
            row.cost = c.cost;
            row.rejected_by = rejecting_rules(row.cut, rules);
            out.push_back(std::move(row));
        }
    }
    return out;
}

std::string candidates_to_csv(const std::vector<CandidateRow>& rows) {
    std::ostringstream out;
    out << "op,sigma1,sigma2,cost,rejected_by\n";
    for (const auto& row : rows) {
        out << op_token(row.cut.op) << ",\"";
        bool first = true;
        for (const auto& a : row.cut.sigma1) {
            if (!first)
                out << " ";
            out << a;
            first = false;
        }
        out << "\",\"";
        first = true;
        for (const auto& a : row.cut.sigma2) {
            if (!first)
                out << " ";
            out << a;
            first = false;
        }
        out << "\"," << row.cost << ",\"";
        first = true;
        for (const auto& r : row.rejected_by) {
            if (!first)
                out << "; ";
            out << r.str();
            first = false;
        }
        out << "\"\n";
    }
    return out.str();
}

} // namespace imr
