#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imr/process_tree.hpp"

namespace imr {

/// Workflow-shaped Petri net: one source place, one sink place, every node
/// on a path between them. Transitions with an empty label are silent.
struct PetriNet {
    struct Transition {
        Activity label; // empty = silent
        bool silent() const { return label.empty(); }
    };
    struct Arc {
        bool from_place = true;
        std::size_t from = 0; // place index or transition index
        std::size_t to = 0;
    };

    std::size_t place_count = 0;
    std::vector<Transition> transitions;
    std::vector<Arc> arcs;
    std::size_t source = 0;
    std::size_t sink = 0;
};

PetriNet to_petri_net(const ProcessTree& tree);

/// Throws Error when the workflow-net shape is violated.
void validate_workflow_net(const PetriNet& net);

/// Deterministic PNML with ids p0.., t0.., a0.. in construction order;
/// silent transitions carry a toolspecific invisible=true tag.
std::string petri_to_pnml(const PetriNet& net);

std::string petri_to_dot(const PetriNet& net);

/// Token-game semantics, independent of the tree acceptor: membership in
/// the marking-graph language from the initial marking (one token on
/// source) to the final marking (one token on sink).
bool petri_accepts(const PetriNet& net, const Trace& trace);

/// All visible firing words of length <= max_len reaching the final
/// marking, in length-lexicographic order.
std::vector<Trace> petri_bounded_language(const PetriNet& net, std::size_t max_len,
                                          std::size_t cap = 1'000'000);

} // namespace imr
