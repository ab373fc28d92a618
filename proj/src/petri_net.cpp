#include "imr/petri_net.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "imr/errors.hpp"
#include "imr/version.hpp"

namespace imr {

namespace {

class NetBuilder {
public:
    std::size_t add_place() { return net_.place_count++; }

    std::size_t add_transition(Activity label) {
        net_.transitions.push_back({std::move(label)});
        return net_.transitions.size() - 1;
    }

    void arc_pt(std::size_t place, std::size_t transition) {
        net_.arcs.push_back({true, place, transition});
    }
    void arc_tp(std::size_t transition, std::size_t place) {
        net_.arcs.push_back({false, transition, place});
    }

    void build(const ProcessTree& t, std::size_t p_in, std::size_t p_out) {
        switch (t.kind()) {
        case ProcessTree::Kind::Activity: {
            std::size_t tr = add_transition(t.label());
            arc_pt(p_in, tr);
            arc_tp(tr, p_out);
            return;
        }
        case ProcessTree::Kind::Silent: {
            std::size_t tr = add_transition("");
            arc_pt(p_in, tr);
            arc_tp(tr, p_out);
            return;
        }
        case ProcessTree::Kind::Operator:
            break;
        }
        const auto& children = t.children();
        switch (t.op()) {
        case Op::Seq: {
            std::size_t prev = p_in;
            for (std::size_t i = 0; i < children.size(); ++i) {
                std::size_t next = (i + 1 == children.size()) ? p_out : add_place();
                build(*children[i], prev, next);
                prev = next;
            }
            return;
        }
        case Op::Xor: {
            for (const auto& c : children)
                build(*c, p_in, p_out);
            return;
        }
        case Op::Par: {
            std::size_t split = add_transition("");
            std::size_t join = add_transition("");
            arc_pt(p_in, split);
            arc_tp(join, p_out);
            for (const auto& c : children) {
                std::size_t cin = add_place();
                std::size_t cout = add_place();
                arc_tp(split, cin);
                build(*c, cin, cout);
                arc_pt(cout, join);
            }
            return;
        }
        case Op::Loop: {
            std::size_t entry = add_place();
            std::size_t exit = add_place();
            std::size_t t_enter = add_transition("");
            std::size_t t_exit = add_transition("");
            arc_pt(p_in, t_enter);
            arc_tp(t_enter, entry);
            arc_pt(exit, t_exit);
            arc_tp(t_exit, p_out);
            build(*children[0], entry, exit);
            for (std::size_t i = 1; i < children.size(); ++i)
                build(*children[i], exit, entry);
            return;
        }
        }
    }

    PetriNet take(std::size_t source, std::size_t sink) {
        net_.source = source;
        net_.sink = sink;
        return std::move(net_);
    }

private:
    PetriNet net_;
};

} // namespace

PetriNet to_petri_net(const ProcessTree& tree) {
    NetBuilder b;
    std::size_t source = b.add_place();
    std::size_t sink = b.add_place();
    b.build(tree, source, sink);
    return b.take(source, sink);
}

namespace {

struct Flow {
    // inputs/outputs by transition, and by place
    std::vector<std::vector<std::size_t>> t_in, t_out;   // transition -> places
    std::vector<std::vector<std::size_t>> p_in, p_out;   // place -> transitions
    explicit Flow(const PetriNet& net)
        : t_in(net.transitions.size()), t_out(net.transitions.size()),
          p_in(net.place_count), p_out(net.place_count) {
        for (const auto& arc : net.arcs) {
            if (arc.from_place) {
                p_out[arc.from].push_back(arc.to);
                t_in[arc.to].push_back(arc.from);
            } else {
                t_out[arc.from].push_back(arc.to);
                p_in[arc.to].push_back(arc.from);
            }
        }
    }
};

} // namespace

void validate_workflow_net(const PetriNet& net) {
    Flow flow(net);
    for (std::size_t p = 0; p < net.place_count; ++p) {
        if (flow.p_in[p].empty() && p != net.source)
            throw Error("workflow net: place p" + std::to_string(p) + " has no input");
        if (flow.p_out[p].empty() && p != net.sink)
            throw Error("workflow net: place p" + std::to_string(p) + " has no output");
    }
    if (!flow.p_in[net.source].empty())
        throw Error("workflow net: source has incoming arcs");
    if (!flow.p_out[net.sink].empty())
        throw Error("workflow net: sink has outgoing arcs");

    // Every node must lie on a path from source to sink.
    auto reach = [&](std::size_t seed, bool forward) {
        std::vector<char> place_seen(net.place_count, 0), trans_seen(net.transitions.size(), 0);
        std::queue<std::pair<bool, std::size_t>> q; // (is_place, index)
        place_seen[seed] = 1;
        q.push({true, seed});
        while (!q.empty()) {
            auto [is_place, i] = q.front();
            q.pop();
            if (is_place) {
                const auto& nexts = forward ? flow.p_out[i] : flow.p_in[i];
                for (std::size_t t : nexts)
                    if (!trans_seen[t]) {
                        trans_seen[t] = 1;
                        q.push({false, t});
                    }
            } else {
                const auto& nexts = forward ? flow.t_out[i] : flow.t_in[i];
                for (std::size_t p : nexts)
                    if (!place_seen[p]) {
                        place_seen[p] = 1;
                        q.push({true, p});
                    }
            }
        }
        return std::make_pair(place_seen, trans_seen);
    };
    auto [fwd_p, fwd_t] = reach(net.source, true);
    auto [bwd_p, bwd_t] = reach(net.sink, false);
    for (std::size_t p = 0; p < net.place_count; ++p)
        if (!fwd_p[p] || !bwd_p[p])
            throw Error("workflow net: place p" + std::to_string(p) + " off the path");
    for (std::size_t t = 0; t < net.transitions.size(); ++t)
        if (!fwd_t[t] || !bwd_t[t])
            throw Error("workflow net: transition t" + std::to_string(t) + " off the path");
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

} // namespace

std::string petri_to_pnml(const PetriNet& net) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<pnml>\n  <net id=\"net0\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n";
    out << "    <page id=\"page0\">\n";
    for (std::size_t p = 0; p < net.place_count; ++p) {
        out << "      <place id=\"p" << p << "\">\n";
        if (p == net.source)
            out << "        <initialMarking><text>1</text></initialMarking>\n";
        out << "      </place>\n";
    }
    for (std::size_t t = 0; t < net.transitions.size(); ++t) {
        const auto& tr = net.transitions[t];
        out << "      <transition id=\"t" << t << "\">\n";
        out << "        <name><text>" << (tr.silent() ? "tau" : xml_escape(tr.label))
            << "</text></name>\n";
        if (tr.silent())
            out << "        <toolspecific tool=\"" << kToolName << "\" version=\"" << kVersion
                << "\"><invisible>true</invisible></toolspecific>\n";
        out << "      </transition>\n";
    }
    for (std::size_t i = 0; i < net.arcs.size(); ++i) {
        const auto& arc = net.arcs[i];
        std::string src = arc.from_place ? "p" + std::to_string(arc.from)
                                         : "t" + std::to_string(arc.from);
        std::string dst = arc.from_place ? "t" + std::to_string(arc.to)
                                         : "p" + std::to_string(arc.to);
        out << "      <arc id=\"a" << i << "\" source=\"" << src << "\" target=\"" << dst
            << "\"/>\n";
    }
    out << "    </page>\n  </net>\n</pnml>\n";
    return out.str();
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

} // namespace

std::string petri_to_dot(const PetriNet& net) {
    std::ostringstream out;
    out << "digraph net {\n  rankdir=LR;\n";
    for (std::size_t p = 0; p < net.place_count; ++p) {
        out << "  p" << p << " [shape=circle,label=\"\"";
        if (p == net.source)
            out << ",xlabel=\"source\"";
        else if (p == net.sink)
            out << ",xlabel=\"sink\"";
        out << "];\n";
    }
    for (std::size_t t = 0; t < net.transitions.size(); ++t) {
        const auto& tr = net.transitions[t];
        if (tr.silent())
            out << "  t" << t << " [shape=box,style=filled,fillcolor=black,label=\"\"];\n";
        else
            out << "  t" << t << " [shape=box,label=\"" << dot_escape(tr.label) << "\"];\n";
    }
    for (const auto& arc : net.arcs) {
        std::string src = (arc.from_place ? "p" : "t") + std::to_string(arc.from);
        std::string dst = (arc.from_place ? "t" : "p") + std::to_string(arc.to);
        out << "  " << src << " -> " << dst << ";\n";
    }
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Token-game semantics.

namespace {

using Marking = std::vector<std::uint32_t>;

struct TokenGame {
    const PetriNet& net;
    Flow flow;
    Marking initial;
    Marking final_marking;

    explicit TokenGame(const PetriNet& n) : net(n), flow(n) {
        initial.assign(net.place_count, 0);
        initial[net.source] = 1;
        final_marking.assign(net.place_count, 0);
        final_marking[net.sink] = 1;
    }

    bool enabled(const Marking& m, std::size_t t) const {
        for (std::size_t p : flow.t_in[t])
            if (m[p] == 0)
                return false;
        // A transition consuming the same place twice needs two tokens.
        if (flow.t_in[t].size() > 1) {
            Marking need(net.place_count, 0);
            for (std::size_t p : flow.t_in[t])
                if (++need[p] > m[p])
                    return false;
        }
        return true;
    }

    Marking fire(const Marking& m, std::size_t t) const {
        Marking next = m;
        for (std::size_t p : flow.t_in[t])
            --next[p];
        for (std::size_t p : flow.t_out[t])
            ++next[p];
        return next;
    }
};

} // namespace

bool petri_accepts(const PetriNet& net, const Trace& trace) {
    TokenGame game(net);
    std::set<std::pair<Marking, std::size_t>> seen;
    std::vector<std::pair<Marking, std::size_t>> stack;
    stack.emplace_back(game.initial, 0);
    seen.insert(stack.back());
    while (!stack.empty()) {
        auto [m, pos] = std::move(stack.back());
        stack.pop_back();
        if (pos == trace.size() && m == game.final_marking)
            return true;
        for (std::size_t t = 0; t < net.transitions.size(); ++t) {
            if (!game.enabled(m, t))
                continue;
            const auto& label = net.transitions[t].label;
            std::size_t next_pos = pos;
            if (!label.empty()) {
                if (pos >= trace.size() || trace[pos] != label)
                    continue;
                next_pos = pos + 1;
            }
            auto state = std::make_pair(game.fire(m, t), next_pos);
            if (seen.insert(state).second)
                stack.push_back(std::move(state));
        }
    }
    return false;
}

std::vector<Trace> petri_bounded_language(const PetriNet& net, std::size_t max_len,
                                          std::size_t cap) {
    TokenGame game(net);
    std::set<Trace> result;
    std::set<std::pair<Marking, Trace>> seen;
    std::queue<std::pair<Marking, Trace>> q;
    q.push({game.initial, {}});
    seen.insert(q.front());
    std::size_t explored = 0;
    while (!q.empty()) {
        auto [m, word] = std::move(q.front());
        q.pop();
        if (++explored > cap)
            throw LanguageOverflowError("petri bounded language: cap exceeded");
        if (m == game.final_marking)
            result.insert(word);
        for (std::size_t t = 0; t < net.transitions.size(); ++t) {
            if (!game.enabled(m, t))
                continue;
            const auto& label = net.transitions[t].label;
            Trace next_word = word;
            if (!label.empty()) {
                if (word.size() == max_len)
                    continue;
                next_word.push_back(label);
            }
            auto state = std::make_pair(game.fire(m, t), std::move(next_word));
            if (seen.insert(state).second)
                q.push(std::move(state));
        }
    }
    std::vector<Trace> out(result.begin(), result.end());
    std::sort(out.begin(), out.end(), [](const Trace& a, const Trace& b) {
        if (a.size() != b.size())
            return a.size() < b.size();
        return a < b;
    });
    return out;
}

} // namespace imr
