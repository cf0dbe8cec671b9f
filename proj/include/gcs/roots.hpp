#pragma once

#include <limits>
#include <string>
#include <vector>

#include "gcs/construct.hpp"

namespace gcs {

// '+'/'-' for two-root steps, letters a.. for wider steps, {N} for any index.
SignVector parse_signs(const std::string& text, const ConstructionPlan& plan);
std::string format_signs(const SignVector& signs, const ConstructionPlan& plan);

// Result of a predicate on a placement: true, false; "on" uses a 1e-9 * scale^2 band.
bool evaluate(const OrientationPredicate& pred, const Placement& placement, const GcsProblem& problem);
bool satisfies_all(const std::vector<OrientationPredicate>& preds, const Placement& placement, const GcsProblem& problem);

struct EnumerateResult {
    std::vector<SignVector> signs;
    std::vector<Placement> placements;
    bool exhausted = false;                // whole solution tree visited
    std::vector<long> step_executions;     // apply_step calls per plan step
    long infeasible_branches = 0;
    long filtered = 0;                     // feasible leaves rejected by predicates
};

EnumerateResult enumerate(const ConstructionPlan& plan, const GcsProblem& problem,
                          size_t limit = std::numeric_limits<size_t>::max(),
                          const std::vector<OrientationPredicate>& predicates = {});

struct HeuristicResult {
    SignVector signs;
    std::vector<int> fallback_steps;  // plan step indices decided by the default choice
};

HeuristicResult heuristic_signs(const ConstructionPlan& plan, const GcsProblem& problem);

struct FlipResult {
    SignVector signs;
    bool feasible = true;
    int failed_step = -1;
    std::string message;
    Placement placement;
    std::vector<std::string> changed;  // elements whose pose differs from before the flip
    int reexecuted = 0;                // steps run by the incremental rebuild
};

// Cached per-step states of one sign vector; flips rebuild only the plan suffix.
class Navigator {
public:
    Navigator(const ConstructionPlan& plan, const GcsProblem& problem, const SignVector& signs);

    FlipResult flip(int step);
    FlipResult set_signs(const SignVector& signs);
    SignVector signs() const;
    bool feasible() const { return failed_ < 0; }
    int failed_step() const { return failed_; }
    const std::string& message() const { return message_; }
    Placement placement() const;

private:
    int rebuild(size_t from);

    const ConstructionPlan* plan_;
    const GcsProblem* problem_;
    std::vector<int> choices_;
    std::vector<ExecState> states_;  // states_[k] is the state before step k
    int failed_ = -1;
    std::string message_;
};

}  // namespace gcs
