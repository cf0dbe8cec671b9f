#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "gcs/construct.hpp"
#include "gcs/graph.hpp"

namespace gcs {

// Edges usable as a seed: two elements and one constraint fixing a local frame.
std::vector<int> find_minimal(const ConstraintGraph& g);
bool is_minimal_edge(const ConstraintGraph& g, int edge);

struct SerialOrder {
    bool complete = false;
    std::vector<int> order;  // placement order, starting with the seed pair
};

SerialOrder serialize(const ConstraintGraph& g, int start_edge);

struct TreeNode {
    enum class Kind { Leaf, RelaxedLeaf, Triangle, VCSequential, VCMerge };
    Kind kind = Kind::Leaf;
    std::vector<int> vertices;  // sorted
    std::vector<int> edges;     // sorted graph edge indices; virtual edges are negative (-1 - k)
    std::vector<int> children;
    // Triangle: u = c0∩c1, v = c1∩c2, w = c2∩c0. VCMerge: shared[0] is the common element.
    std::array<int, 3> shared{-1, -1, -1};
    int vc = -1;
    std::vector<int> vc_edges;  // VCMerge: two into children[0] then two into children[1]
};

struct DecompositionTree {
    std::vector<TreeNode> nodes;
    int root = -1;
    // Pairs added by the relaxed leaf rule, indexed by virtual edge number.
    std::vector<std::pair<int, int>> virtual_edges;

    std::vector<int> leaves() const;
    std::string serialize() const;
};

struct DecomposeOptions {
    unsigned seed = 0;  // 0 keeps constraint order; otherwise permutes edge priorities
    bool relaxed = false;
};

struct DecomposeResult {
    bool ok = false;
    DecompositionTree tree;
    std::vector<std::vector<int>> clusters;  // remaining clusters on failure
    std::string diagnostic;
};

DecomposeResult triangle_decompose(const ConstraintGraph& g, const DecomposeOptions& opt = {});

// Structural check of partition, cover and sharing rules; empty string when valid.
std::string check_tree(const DecompositionTree& t, const ConstraintGraph& g);

ConstructionPlan emit_plan(const DecompositionTree& t, const ConstraintGraph& g, const GcsProblem& problem);

// Convenience: graph, decomposition and plan; throws NotDecomposable with the diagnostic.
ConstructionPlan make_plan(const GcsProblem& problem, unsigned seed = 0);

// Primitive ruler-and-compass operations per step (origin, distPP, line2P, circleCR, intLC, ...).
std::vector<std::vector<std::string>> describe(const ConstructionPlan& plan, const GcsProblem& problem);

// Inputs of every step are produced by earlier steps; empty string when valid.
std::string check_topological(const ConstructionPlan& plan);

}  // namespace gcs
