#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gcs/graph.hpp"
#include "gcs/planner.hpp"

namespace gcs {

using VertexPair = std::pair<int, int>;

struct Completion {
    enum class Mode { Free, Conditional };
    Mode mode = Mode::Free;
    std::vector<VertexPair> added;
    int required = 0;      // total label weight needed to reach deficit 3
    bool partial = false;  // conditional only: pool could not supply every edge
    DecompositionTree tree;  // decomposition of the input with relaxed leaves
};

// Graph plus unit-weight edges standing for the added constraints.
ConstraintGraph with_edges(const ConstraintGraph& g, const std::vector<VertexPair>& extra);

Completion free_completion(const ConstraintGraph& g);
// Pool edges already in the graph are dropped first. Subsets are tried in lexicographic
// order of pool position; the first full completion wins, else the largest valid partial one.
Completion conditional_completion(const ConstraintGraph& g, const std::vector<VertexPair>& pool);

struct CompletionCheck {
    bool well_constrained = false;
    bool decomposable = false;
    std::string diagnostic;
};

// Diagnoses an externally supplied completion: over/under-constrained or well-constrained
// but not triangle-decomposable.
CompletionCheck check_completion(const ConstraintGraph& g, const std::vector<VertexPair>& added);

struct ValuedConstraint {
    Constraint constraint;
    bool symbolic = false;
};

// Kind-appropriate constraint per pair, valued from the sketch when every element has one.
std::vector<ValuedConstraint> constraint_values_for(const GcsProblem& problem,
                                                    const std::vector<std::pair<std::string, std::string>>& pairs);

}  // namespace gcs
