#include "imr/dfg.hpp"

#include <omp.h>

#include <sstream>

namespace imr {

int Dfg::index_of(const Activity& a) const {
    auto it = index_.find(a);
    return it == index_.end() ? -1 : it->second;
}

std::uint64_t Dfg::edge(const Activity& from, const Activity& to) const {
    int i = index_of(from), j = index_of(to);
    if (i < 0 || j < 0)
        return 0;
    return edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
}

std::uint64_t Dfg::start_freq(const Activity& a) const {
    int i = index_of(a);
    return i < 0 ? 0 : starts_[i];
}

std::uint64_t Dfg::end_freq(const Activity& a) const {
    int i = index_of(a);
    return i < 0 ? 0 : ends_[i];
}

std::uint64_t Dfg::activity_freq(const Activity& a) const {
    int i = index_of(a);
    return i < 0 ? 0 : freqs_[i];
}

std::uint64_t Dfg::edge_mass(Mask x, Mask y) const {
    std::uint64_t sum = 0;
    const std::size_t n = acts_.size();
    for (Mask rest = x; rest;) {
        unsigned i = static_cast<unsigned>(__builtin_ctz(rest));
        rest &= rest - 1;
        const std::uint64_t* row = edges_.data() + static_cast<std::size_t>(i) * n;
        for (Mask r2 = y; r2;) {
            unsigned j = static_cast<unsigned>(__builtin_ctz(r2));
            r2 &= r2 - 1;
            sum += row[j];
        }
    }
    return sum;
}

std::uint64_t Dfg::start_mass(Mask x) const {
    std::uint64_t sum = 0;
    for (Mask rest = x; rest;) {
        unsigned i = static_cast<unsigned>(__builtin_ctz(rest));
        rest &= rest - 1;
        sum += starts_[i];
    }
    return sum;
}

std::uint64_t Dfg::end_mass(Mask x) const {
    std::uint64_t sum = 0;
    for (Mask rest = x; rest;) {
        unsigned i = static_cast<unsigned>(__builtin_ctz(rest));
        rest &= rest - 1;
        sum += ends_[i];
    }
    return sum;
}

std::uint64_t Dfg::edge_mass(const std::set<Activity>& x, const std::set<Activity>& y) const {
    std::uint64_t sum = 0;
    for (const auto& a : x) {
        int i = index_of(a);
        if (i < 0)
            continue;
        for (const auto& b : y) {
            int j = index_of(b);
            if (j >= 0)
                sum += edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
    }
    return sum;
}

std::uint64_t Dfg::start_mass(const std::set<Activity>& x) const {
    std::uint64_t sum = 0;
    for (const auto& a : x)
        sum += start_freq(a);
    return sum;
}

std::uint64_t Dfg::end_mass(const std::set<Activity>& x) const {
    std::uint64_t sum = 0;
    for (const auto& a : x)
        sum += end_freq(a);
    return sum;
}

Mask Dfg::mask_of(const std::set<Activity>& x) const {
    Mask m = 0;
    for (const auto& a : x) {
        int i = index_of(a);
        if (i < 0)
            throw Error("dfg: activity '" + a + "' not in graph");
        if (i >= 32)
            throw Error("dfg: alphabet too large for mask aggregates");
        m |= Mask{1} << i;
    }
    return m;
}

std::set<Activity> Dfg::set_of(Mask m) const {
    std::set<Activity> out;
    for (Mask rest = m; rest;) {
        unsigned i = static_cast<unsigned>(__builtin_ctz(rest));
        rest &= rest - 1;
        out.insert(acts_[i]);
    }
    return out;
}

Mask Dfg::full_mask() const {
    return acts_.empty() ? 0 : static_cast<Mask>((std::uint64_t{1} << acts_.size()) - 1);
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

struct Accum {
    std::vector<std::uint64_t> edges, starts, ends, freqs;
    std::uint64_t nonempty = 0;
    explicit Accum(std::size_t n) : edges(n * n, 0), starts(n, 0), ends(n, 0), freqs(n, 0) {}
    void merge(const Accum& o) {
        for (std::size_t i = 0; i < edges.size(); ++i) edges[i] += o.edges[i];
        for (std::size_t i = 0; i < starts.size(); ++i) starts[i] += o.starts[i];
        for (std::size_t i = 0; i < ends.size(); ++i) ends[i] += o.ends[i];
        for (std::size_t i = 0; i < freqs.size(); ++i) freqs[i] += o.freqs[i];
        nonempty += o.nonempty;
    }
};

void count_variant(const Trace& trace, std::uint64_t count, const std::map<Activity, int>& index,
                   std::size_t n, Accum& acc) {
    if (trace.empty())
        return;
    acc.nonempty += count;
    int prev = -1;
    for (const auto& a : trace) {
        int i = index.at(a);
        acc.freqs[i] += count;
        if (prev < 0)
            acc.starts[i] += count;
        else
            acc.edges[static_cast<std::size_t>(prev) * n + i] += count;
        prev = i;
    }
    acc.ends[prev] += count;
}

} // namespace

Dfg Dfg::assemble(std::vector<Activity> acts, std::vector<std::uint64_t> edges,
                  std::vector<std::uint64_t> starts, std::vector<std::uint64_t> ends,
                  std::vector<std::uint64_t> freqs, std::uint64_t traces,
                  std::uint64_t nonempty, std::uint64_t events) {
    Dfg g;
    g.acts_ = std::move(acts);
    int k = 0;
    for (const auto& a : g.acts_)
        g.index_[a] = k++;
    g.edges_ = std::move(edges);
    g.starts_ = std::move(starts);
    g.ends_ = std::move(ends);
    g.freqs_ = std::move(freqs);
    g.traces_ = traces;
    g.nonempty_ = nonempty;
    g.events_ = events;
    return g;
}

Dfg extract_dfg_serial(const EventLog& log) {
    auto alphabet = log.alphabet();
    const std::size_t n = alphabet.size();
    std::map<Activity, int> index;
    int k = 0;
    for (const auto& a : alphabet)
        index[a] = k++;
    Accum acc(n);
    for (const auto& [trace, count] : log.variants())
        count_variant(trace, count, index, n, acc);
    return Dfg::assemble({alphabet.begin(), alphabet.end()}, std::move(acc.edges),
                         std::move(acc.starts), std::move(acc.ends), std::move(acc.freqs),
                         log.total_traces(), acc.nonempty, log.total_events());
}

Dfg extract_dfg(const EventLog& log, int workers) {
    auto alphabet = log.alphabet();
    const std::size_t n = alphabet.size();
    std::map<Activity, int> index;
    int k = 0;
    for (const auto& a : alphabet)
        index[a] = k++;

    std::vector<std::pair<const Trace*, std::uint64_t>> variants;
    variants.reserve(log.variant_count());
    for (const auto& [trace, count] : log.variants())
        variants.emplace_back(&trace, count);

    int threads = workers > 0 ? workers : omp_get_max_threads();
    std::vector<Accum> locals(threads, Accum(n));
#pragma omp parallel num_threads(threads)
    {
        Accum& acc = locals[omp_get_thread_num()];
#pragma omp for schedule(static)
        for (std::int64_t v = 0; v < static_cast<std::int64_t>(variants.size()); ++v)
            count_variant(*variants[v].first, variants[v].second, index, n, acc);
    }
    Accum total(n);
    for (const auto& acc : locals)
        total.merge(acc);
    return Dfg::assemble({alphabet.begin(), alphabet.end()}, std::move(total.edges),
                         std::move(total.starts), std::move(total.ends),
                         std::move(total.freqs), log.total_traces(), total.nonempty,
                         log.total_events());
}

std::string Dfg::to_dot() const {
    std::ostringstream out;
    out << "digraph dfg {\n  rankdir=LR;\n";
    out << "  \"__start\" [shape=triangle,label=\"▷\"];\n";
    out << "  \"__end\" [shape=square,label=\"□\"];\n";
    for (std::size_t i = 0; i < acts_.size(); ++i)
        out << "  \"" << dot_escape(acts_[i]) << "\" [shape=box,label=\""
            << dot_escape(acts_[i]) << " (" << freqs_[i] << ")\"];\n";
    for (std::size_t i = 0; i < acts_.size(); ++i)
        if (starts_[i])
            out << "  \"__start\" -> \"" << dot_escape(acts_[i]) << "\" [label=\""
                << starts_[i] << "\"];\n";
    for (std::size_t i = 0; i < acts_.size(); ++i)
        for (std::size_t j = 0; j < acts_.size(); ++j)
            if (edge(i, j))
                out << "  \"" << dot_escape(acts_[i]) << "\" -> \"" << dot_escape(acts_[j])
                    << "\" [label=\"" << edge(i, j) << "\"];\n";
    for (std::size_t i = 0; i < acts_.size(); ++i)
        if (ends_[i])
            out << "  \"" << dot_escape(acts_[i]) << "\" -> \"__end\" [label=\"" << ends_[i]
                << "\"];\n";
    out << "}\n";
    return out.str();
}

} // namespace imr
