#include "imr/process_tree.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "imr/errors.hpp"

namespace imr {

std::string_view op_token(Op op) {
    switch (op) {
    case Op::Xor: return "x";
    case Op::Seq: return "->";
    case Op::Par: return "and";
    case Op::Loop: return "loop";
    }
    return "?";
}

TreePtr ProcessTree::leaf(Activity label) {
    validate_activity(label);
    auto t = std::shared_ptr<ProcessTree>(new ProcessTree());
    t->kind_ = Kind::Activity;
    t->label_ = std::move(label);
    return t;
}

TreePtr ProcessTree::silent() {
    return std::shared_ptr<ProcessTree>(new ProcessTree());
}

TreePtr ProcessTree::node(Op op, std::vector<TreePtr> children) {
    if (children.size() < 2)
        throw Error("process tree: operator nodes need at least two children");
    for (const auto& c : children)
        if (!c)
            throw Error("process tree: null child");
    auto t = std::shared_ptr<ProcessTree>(new ProcessTree());
    t->kind_ = Kind::Operator;
    t->op_ = op;
    t->children_ = std::move(children);
    return t;
}

namespace {

void collect_alphabet(const ProcessTree& t, std::set<Activity>& out) {
    switch (t.kind()) {
    case ProcessTree::Kind::Activity:
        out.insert(t.label());
        break;
    case ProcessTree::Kind::Silent:
        break;
    case ProcessTree::Kind::Operator:
        for (const auto& c : t.children())
            collect_alphabet(*c, out);
        break;
    }
}

} // namespace

std::set<Activity> ProcessTree::alphabet() const {
    std::set<Activity> out;
    collect_alphabet(*this, out);
    return out;
}

// ---------------------------------------------------------------------------
// Semantics. Trees denote regular languages (shuffle of regular languages is
// regular), so both membership and bounded enumeration run on an epsilon-NFA
// compiled from the tree: leaves become two-state automata, -> concatenates,
// x unions, "and" builds the shuffle product of its children, and loop either
// cycles through the redo parts (membership) or is unrolled to the requested
// bound (enumeration).

struct Nfa {
    struct State {
        std::vector<std::pair<int, int>> sym; // (activity id, target)
        std::vector<int> eps;
    };
    std::vector<State> states;
    int start = 0;
    int accept = 0;
    std::vector<Activity> alphabet; // sorted, ids are indices
};

namespace {

struct Frag {
    int start;
    int accept;
};

class NfaBuilder {
public:
    explicit NfaBuilder(const std::vector<Activity>& alphabet) {
        int id = 0;
        for (const auto& a : alphabet)
            ids_[a] = id++;
        nfa_.alphabet = alphabet;
    }

    // max_loop empty: loops become cycles (exact membership semantics).
    // max_loop set: body runs at most *max_loop + 1 times (bounded language).
    Frag build(const ProcessTree& t, const std::optional<std::size_t>& max_loop) {
        switch (t.kind()) {
        case ProcessTree::Kind::Activity: {
            Frag f{new_state(), new_state()};
            nfa_.states[f.start].sym.emplace_back(ids_.at(t.label()), f.accept);
            return f;
        }
        case ProcessTree::Kind::Silent: {
            Frag f{new_state(), new_state()};
            nfa_.states[f.start].eps.push_back(f.accept);
            return f;
        }
        case ProcessTree::Kind::Operator:
            break;
        }
        const auto& children = t.children();
        switch (t.op()) {
        case Op::Seq: {
            Frag f = build(*children[0], max_loop);
            for (std::size_t i = 1; i < children.size(); ++i) {
                Frag g = build(*children[i], max_loop);
                nfa_.states[f.accept].eps.push_back(g.start);
                f.accept = g.accept;
            }
            return f;
        }
        case Op::Xor: {
            Frag f{new_state(), new_state()};
            for (const auto& c : children) {
                Frag g = build(*c, max_loop);
                nfa_.states[f.start].eps.push_back(g.start);
                nfa_.states[g.accept].eps.push_back(f.accept);
            }
            return f;
        }
        case Op::Par: {
            Frag f = build(*children[0], max_loop);
            for (std::size_t i = 1; i < children.size(); ++i)
                f = shuffle(f, build(*children[i], max_loop));
            return f;
        }
        case Op::Loop: {
            if (!max_loop) {
                Frag body = build(*children[0], max_loop);
                Frag f{new_state(), new_state()};
                nfa_.states[f.start].eps.push_back(body.start);
                nfa_.states[body.accept].eps.push_back(f.accept);
                for (std::size_t i = 1; i < children.size(); ++i) {
                    Frag redo = build(*children[i], max_loop);
                    nfa_.states[f.accept].eps.push_back(redo.start);
                    nfa_.states[redo.accept].eps.push_back(body.start);
                }
                return f;
            }
            // Unrolled: body (redo body)^{0..max_loop}.
            Frag f = build(*children[0], max_loop);
            int out = new_state();
            nfa_.states[f.accept].eps.push_back(out);
            int tail = f.accept;
            for (std::size_t k = 0; k < *max_loop; ++k) {
                int redo_start = new_state();
                int redo_accept = new_state();
                for (std::size_t i = 1; i < children.size(); ++i) {
                    Frag r = build(*children[i], max_loop);
                    nfa_.states[redo_start].eps.push_back(r.start);
                    nfa_.states[r.accept].eps.push_back(redo_accept);
                }
                Frag b = build(*children[0], max_loop);
                nfa_.states[tail].eps.push_back(redo_start);
                nfa_.states[redo_accept].eps.push_back(b.start);
                nfa_.states[b.accept].eps.push_back(out);
                tail = b.accept;
            }
            return Frag{f.start, out};
        }
        }
        throw Error("process tree: unknown operator");
    }

    Nfa take(Frag f) {
        nfa_.start = f.start;
        nfa_.accept = f.accept;
        return std::move(nfa_);
    }

private:
    int new_state() {
        nfa_.states.emplace_back();
        return static_cast<int>(nfa_.states.size()) - 1;
    }

    // Shuffle product: states are pairs, either side may move.
    Frag shuffle(Frag a, Frag b) {
        // Snapshot both fragments' full state vector; indices are global, so
        // the product works over the whole current automaton but only pairs
        // reachable from (a.start, b.start) matter. To keep the automaton
        // small we rebuild the pairs compactly.
        const auto states_snapshot = nfa_.states;
        const int n = static_cast<int>(states_snapshot.size());
        std::map<std::pair<int, int>, int> pair_id;
        std::vector<std::pair<int, int>> todo;
        auto intern = [&](int x, int y) {
            auto [it, fresh] = pair_id.try_emplace({x, y}, 0);
            if (fresh) {
                it->second = new_state();
                todo.emplace_back(x, y);
            }
            return it->second;
        };
        (void)n;
        int start = intern(a.start, b.start);
        while (!todo.empty()) {
            auto [x, y] = todo.back();
            todo.pop_back();
            int id = pair_id.at({x, y});
            // intern() may grow the state vector, so resolve the target id
            // before touching nfa_.states[id].
            for (const auto& [sym, tgt] : states_snapshot[x].sym) {
                int to = intern(tgt, y);
                nfa_.states[id].sym.emplace_back(sym, to);
            }
            for (int tgt : states_snapshot[x].eps) {
                int to = intern(tgt, y);
                nfa_.states[id].eps.push_back(to);
            }
            for (const auto& [sym, tgt] : states_snapshot[y].sym) {
                int to = intern(x, tgt);
                nfa_.states[id].sym.emplace_back(sym, to);
            }
            for (int tgt : states_snapshot[y].eps) {
                int to = intern(x, tgt);
                nfa_.states[id].eps.push_back(to);
            }
        }
        return Frag{start, intern(a.accept, b.accept)};
    }

    Nfa nfa_;
    std::map<Activity, int> ids_;
};

Nfa compile(const ProcessTree& tree, const std::optional<std::size_t>& max_loop) {
    auto alpha_set = tree.alphabet();
    std::vector<Activity> alphabet(alpha_set.begin(), alpha_set.end());
    NfaBuilder b(alphabet);
    Frag f = b.build(tree, max_loop);
    return b.take(f);
}

void closure(const Nfa& nfa, std::vector<int>& set, std::vector<char>& mark) {
    std::fill(mark.begin(), mark.end(), 0);
    std::vector<int> stack;
    for (int s : set) {
        if (!mark[s]) {
            mark[s] = 1;
            stack.push_back(s);
        }
    }
    set.clear();
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        set.push_back(s);
        for (int t : nfa.states[s].eps)
            if (!mark[t]) {
                mark[t] = 1;
                stack.push_back(t);
            }
    }
    std::sort(set.begin(), set.end());
}

bool step(const Nfa& nfa, const std::vector<int>& from, int sym, std::vector<int>& to,
          std::vector<char>& mark) {
    to.clear();
    for (int s : from)
        for (const auto& [a, tgt] : nfa.states[s].sym)
            if (a == sym)
                to.push_back(tgt);
    if (to.empty())
        return false;
    closure(nfa, to, mark);
    return true;
}

bool is_accepting(const Nfa& nfa, const std::vector<int>& set) {
    return std::binary_search(set.begin(), set.end(), nfa.accept);
}

} // namespace

struct TreeAcceptor::Impl {
    Nfa nfa;
    std::map<Activity, int> ids;
    std::vector<int> initial;
};

TreeAcceptor::TreeAcceptor(const ProcessTree& tree) : impl_(std::make_unique<Impl>()) {
    impl_->nfa = compile(tree, std::nullopt);
    for (std::size_t i = 0; i < impl_->nfa.alphabet.size(); ++i)
        impl_->ids[impl_->nfa.alphabet[i]] = static_cast<int>(i);
    std::vector<char> mark(impl_->nfa.states.size(), 0);
    impl_->initial = {impl_->nfa.start};
    closure(impl_->nfa, impl_->initial, mark);
}

TreeAcceptor::~TreeAcceptor() = default;
TreeAcceptor::TreeAcceptor(TreeAcceptor&&) noexcept = default;
TreeAcceptor& TreeAcceptor::operator=(TreeAcceptor&&) noexcept = default;

bool TreeAcceptor::accepts(const Trace& trace) const {
    const Nfa& nfa = impl_->nfa;
    std::vector<int> cur = impl_->initial;
    std::vector<int> next;
    std::vector<char> mark(nfa.states.size(), 0);
    for (const auto& a : trace) {
        auto it = impl_->ids.find(a);
        if (it == impl_->ids.end())
            return false;
        if (!step(nfa, cur, it->second, next, mark))
            return false;
        cur.swap(next);
    }
    return is_accepting(nfa, cur);
}

bool accepts(const ProcessTree& tree, const Trace& trace) {
    return TreeAcceptor(tree).accepts(trace);
}

void visit_bounded_language(const ProcessTree& tree, std::size_t max_len,
                            std::size_t max_loop, std::size_t cap,
                            const std::function<void(const Trace&)>& fn) {
    Nfa nfa = compile(tree, max_loop);
    std::vector<char> mark(nfa.states.size(), 0);
    std::vector<int> initial{nfa.start};
    closure(nfa, initial, mark);

    std::size_t explored = 0;
    Trace prefix;
    // Depth-first over prefixes with live NFA state sets; each prefix is
    // visited exactly once, so no dedup is needed.
    std::function<void(const std::vector<int>&)> walk = [&](const std::vector<int>& cur) {
        if (++explored > cap)
            throw LanguageOverflowError("bounded language: more than " +
                                        std::to_string(cap) + " prefixes explored");
        if (is_accepting(nfa, cur))
            fn(prefix);
        if (prefix.size() == max_len)
            return;
        std::vector<int> next;
        for (std::size_t sym = 0; sym < nfa.alphabet.size(); ++sym) {
            if (!step(nfa, cur, static_cast<int>(sym), next, mark))
                continue;
            prefix.push_back(nfa.alphabet[sym]);
            walk(next);
            prefix.pop_back();
        }
    };
    walk(initial);
}

std::vector<Trace> bounded_language(const ProcessTree& tree, std::size_t max_len,
                                    std::size_t max_loop, std::size_t cap) {
    std::vector<Trace> out;
    visit_bounded_language(tree, max_len, max_loop, cap, [&](const Trace& t) {
        if (out.size() >= cap)
            throw LanguageOverflowError("bounded language: more than " +
                                        std::to_string(cap) + " traces");
        out.push_back(t);
    });
    std::sort(out.begin(), out.end(), [](const Trace& a, const Trace& b) {
        if (a.size() != b.size())
            return a.size() < b.size();
        return a < b;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Text format.

namespace {

bool bare_safe(const std::string& s) {
    if (s.empty() || s == "tau")
        return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
            return false;
    return true;
}

std::string quote_label(const std::string& s) {
    if (bare_safe(s))
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

class TreeParser {
public:
    explicit TreeParser(std::string_view text) : text_(text) {}

    TreePtr parse() {
        TreePtr t = parse_node();
        skip_ws();
        if (pos_ != text_.size())
            fail("trailing characters");
        return t;
    }

private:
    [[noreturn]] void fail(const std::string& what) {
        throw ParseError("tree parse error at position " + std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool lookahead_paren() {
        std::size_t p = pos_;
        while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p])))
            ++p;
        return p < text_.size() && text_[p] == '(';
    }

    std::string parse_quoted() {
        ++pos_; // opening quote
        std::string out;
        while (true) {
            if (pos_ >= text_.size())
                fail("unterminated quoted label");
            char c = text_[pos_++];
            if (c == '\'') {
                if (pos_ < text_.size() && text_[pos_] == '\'') {
                    out.push_back('\'');
                    ++pos_;
                } else {
                    return out;
                }
            } else {
                out.push_back(c);
            }
        }
    }

    std::string parse_bare() {
        std::size_t begin = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
                ++pos_;
            else
                break;
        }
        if (pos_ == begin)
            fail("expected a node");
        return std::string(text_.substr(begin, pos_ - begin));
    }

    TreePtr parse_node() {
        skip_ws();
        if (pos_ >= text_.size())
            fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '\'')
            return ProcessTree::leaf(parse_quoted());
        if (c == '-') {
            if (text_.substr(pos_, 2) != "->")
                fail("expected '->'");
            pos_ += 2;
            return parse_children(Op::Seq);
        }
        std::string word = parse_bare();
        if (lookahead_paren()) {
            if (word == "x")
                return parse_children(Op::Xor);
            if (word == "and")
                return parse_children(Op::Par);
            if (word == "loop")
                return parse_children(Op::Loop);
            fail("unknown operator '" + word + "'");
        }
        if (word == "tau")
            return ProcessTree::silent();
        return ProcessTree::leaf(word);
    }

    TreePtr parse_children(Op op) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '(')
            fail("expected '('");
        ++pos_;
        std::vector<TreePtr> children;
        children.push_back(parse_node());
        skip_ws();
        while (pos_ < text_.size() && text_[pos_] == ',') {
            ++pos_;
            children.push_back(parse_node());
            skip_ws();
        }
        if (pos_ >= text_.size() || text_[pos_] != ')')
            fail("expected ')' or ','");
        ++pos_;
        if (children.size() < 2)
            fail("operator needs at least two children");
        return ProcessTree::node(op, std::move(children));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

void render_rec(const ProcessTree& t, std::string& out) {
    switch (t.kind()) {
    case ProcessTree::Kind::Activity:
        out += quote_label(t.label());
        return;
    case ProcessTree::Kind::Silent:
        out += "tau";
        return;
    case ProcessTree::Kind::Operator:
        out += op_token(t.op());
        out += "(";
        for (std::size_t i = 0; i < t.children().size(); ++i) {
            if (i)
                out += ",";
            render_rec(*t.children()[i], out);
        }
        out += ")";
        return;
    }
}

} // namespace

TreePtr parse_tree(std::string_view text) {
    return TreeParser(text).parse();
}

std::string render_tree(const ProcessTree& tree) {
    std::string out;
    render_rec(tree, out);
    return out;
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

int dot_rec(const ProcessTree& t, std::ostringstream& out, int& next_id) {
    int id = next_id++;
    std::string label;
    std::string shape = "ellipse";
    switch (t.kind()) {
    case ProcessTree::Kind::Activity:
        label = t.label();
        shape = "box";
        break;
    case ProcessTree::Kind::Silent:
        label = "tau";
        break;
    case ProcessTree::Kind::Operator:
        label = std::string(op_token(t.op()));
        break;
    }
    out << "  n" << id << " [shape=" << shape << ",label=\"" << dot_escape(label) << "\"];\n";
    if (t.kind() == ProcessTree::Kind::Operator)
        for (const auto& c : t.children()) {
            int cid = dot_rec(*c, out, next_id);
            out << "  n" << id << " -> n" << cid << ";\n";
        }
    return id;
}

} // namespace

std::string tree_to_dot(const ProcessTree& tree) {
    std::ostringstream out;
    out << "digraph tree {\n";
    int next_id = 0;
    dot_rec(tree, out, next_id);
    out << "}\n";
    return out.str();
}

} // namespace imr
