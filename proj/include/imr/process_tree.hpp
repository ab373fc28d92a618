#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "imr/event_log.hpp"

namespace imr {

/// Tree operators. Enum order doubles as the selection tie-break order.
enum class Op { Xor = 0, Seq = 1, Par = 2, Loop = 3 };

std::string_view op_token(Op op); // "x", "->", "and", "loop"

class ProcessTree;
using TreePtr = std::shared_ptr<const ProcessTree>;

/// Immutable block-structured process tree. Leaves are activities or the
/// silent tau; operator nodes have at least two children. The first child
/// of a loop is the body, the remaining children are redo parts.
class ProcessTree {
public:
    enum class Kind { Activity, Silent, Operator };

    static TreePtr leaf(Activity label);
    static TreePtr silent();
    static TreePtr node(Op op, std::vector<TreePtr> children);

    Kind kind() const { return kind_; }
    const Activity& label() const { return label_; }
    Op op() const { return op_; }
    const std::vector<TreePtr>& children() const { return children_; }

    std::set<Activity> alphabet() const;

private:
    ProcessTree() = default;
    Kind kind_ = Kind::Silent;
    Activity label_;
    Op op_ = Op::Xor;
    std::vector<TreePtr> children_;
};

/// Language membership. Exact semantics, including arbitrary loop nesting
/// and interleaving; terminates on every input.
bool accepts(const ProcessTree& tree, const Trace& trace);

/// Compiled form of a tree for repeated membership queries.
class TreeAcceptor {
public:
    explicit TreeAcceptor(const ProcessTree& tree);
    ~TreeAcceptor();
    TreeAcceptor(TreeAcceptor&&) noexcept;
    TreeAcceptor& operator=(TreeAcceptor&&) noexcept;
    bool accepts(const Trace& trace) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// All traces of length <= max_len where every loop node executes its body
/// at most max_loop + 1 times. Result is in length-lexicographic order.
/// Throws LanguageOverflowError when more than cap prefixes are explored.
std::vector<Trace> bounded_language(const ProcessTree& tree, std::size_t max_len,
                                    std::size_t max_loop,
                                    std::size_t cap = 1'000'000);

/// Streaming variant: calls fn for every accepted trace, in depth-first
/// lexicographic order, without materializing the language.
void visit_bounded_language(const ProcessTree& tree, std::size_t max_len,
                            std::size_t max_loop, std::size_t cap,
                            const std::function<void(const Trace&)>& fn);

/// Text format: T := activity | "tau" | OP "(" T ("," T)+ ")" with
/// OP one of ->, x, and, loop. Labels that are not plain identifiers are
/// single-quoted; parse and render are mutually inverse on canonical text.
TreePtr parse_tree(std::string_view text);
std::string render_tree(const ProcessTree& tree);

std::string tree_to_dot(const ProcessTree& tree);

} // namespace imr
