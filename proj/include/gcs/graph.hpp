#pragma once

#include <string>
#include <vector>

#include "gcs/model.hpp"

namespace gcs {

struct GraphEdge {
    int u = -1;
    int v = -1;
    int label = 0;
    std::vector<int> constraints;  // indices into the source problem
};

struct ConstraintGraph {
    std::vector<std::string> ids;
    std::vector<ElementKind> kinds;
    std::vector<int> labels;
    std::vector<GraphEdge> edges;
    // Copy of the source constraints so planners can inspect kinds and values.
    std::vector<Constraint> constraints;

    int vertex_count() const { return static_cast<int>(ids.size()); }
    int vertex(const std::string& id) const;
    int edge_between(int a, int b) const;
    std::vector<std::vector<int>> components() const;
};

enum class Verdict { WellConstrained, UnderConstrained, OverConstrained, Symmetric };

const char* verdict_name(Verdict v);

struct Classification {
    Verdict verdict = Verdict::WellConstrained;
    std::vector<int> witness;
    int deficit = 0;
    // Mixed-label graphs above the scan cap are only certified "not over-constrained up to budget".
    bool budget_limited = false;
};

ConstraintGraph build_graph(const GcsProblem& problem);
// Graph over a vertex/edge list; labels default to 2 and 1.
ConstraintGraph unit_graph(int n, const std::vector<std::pair<int, int>>& edges);

int deficit(const ConstraintGraph& g);
int deficit(const ConstraintGraph& g, const std::vector<int>& subset);

Classification classify(const ConstraintGraph& g);

// Exact (2,3)-sparsity check for unit-labeled graphs; returns an over-constrained vertex set or empty.
std::vector<int> pebble_game_witness(const ConstraintGraph& g);
// Exhaustive induced-subgraph scan; empty if none found. Sets limited when the graph exceeds the cap.
std::vector<int> scan_over_constrained(const ConstraintGraph& g, bool& limited, int cap = 20);

std::vector<Violation> check_vradius_sharing(const GcsProblem& problem,
                                             const std::vector<std::vector<std::string>>& clusters);

}  // namespace gcs
