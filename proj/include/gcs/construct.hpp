#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gcs/model.hpp"
#include "gcs/varcircle.hpp"

namespace gcs {

using Placement = std::map<std::string, Pose>;

enum class ThirdCase { PPtoP, PLtoP, LLtoP, PPtoL, PLtoL };
const char* third_case_name(ThirdCase c);

// How a placed input constrains the element being constructed: a distance, or the directed
// angle from the input line to the new line.
struct Relation {
    bool angle = false;
    double value = 0.0;
};

struct Input {
    ElementKind kind = ElementKind::Point;
    Pose pose;
    Relation rel;
};

ThirdCase third_case(ElementKind a, ElementKind b, ElementKind target);
// Slot count; a zero distance collapses its offset pair.
int third_multiplicity(ThirdCase c, ElementKind ka, const Relation& ra, ElementKind kb, const Relation& rb);

Placement place_minimal(const std::string& a, ElementKind ka, const std::string& b, ElementKind kb, const Relation& rel);

// Slot-ordered roots; nullopt where the slot has no real root.
//   pp->p: [left of a->b, right]
//   pL->p: [t+, t-] along the line when incident, else [(+,+), (+,-), (-,+), (-,-)] as (side, t)
//   LL->p: offset sides over the lines with nonzero distance, + first
//   pp->L: tags over the nonzero distances in (+,+), (+,-), (-,+), (-,-) order; + = input left of the line
//   pL->L: [point left of the line, right]
std::vector<std::optional<Pose>> construct_third_roots(ThirdCase c, const Input& a, const Input& b);
Pose construct_third(ThirdCase c, const Input& a, const Input& b, int choice);

// Rigid motions carrying moving's pair onto fixed's pair. Two for line pairs and incident
// point/line pairs (a half-turn apart), one otherwise; empty when incongruent.
std::vector<Rigid> rigid_matches(ElementKind ka, const Pose& fa, const Pose& ma, ElementKind kb, const Pose& fb,
                                 const Pose& mb, double tol);
int match_arity(ElementKind ka, ElementKind kb, bool incident);

Placement merge_clusters(const GcsProblem& problem, const Placement& fixed, const Placement& moving,
                         const std::array<std::string, 2>& shared, int flip = 0);
Placement transform(const GcsProblem& problem, const Placement& p, const Rigid& m);
// Element-wise pose distance; lines compare up to orientation. Infinite when the element sets differ.
double placement_gap(const GcsProblem& problem, const Placement& a, const Placement& b);
// Least-squares proper rigid motion carrying a onto b over point-like features.
Rigid best_alignment(const GcsProblem& problem, const Placement& a, const Placement& b);
// placement_gap after aligning a onto b.
double congruence_gap(const GcsProblem& problem, const Placement& a, const Placement& b);

// ---- plans -----------------------------------------------------------------------------------

enum class StepKind { PlaceMinimal, ConstructThird, MergeClusters, VarCircleSequential, VarCircleMerge };
const char* step_kind_name(StepKind k);

// One constraining object of a variable-radius circle step.
struct CycloSpec {
    std::string element;
    int constraint = -1;
    bool line = false;
    double rho = 0.0;
    Constraint::Tangency tangency = Constraint::Tangency::Any;
};

struct PlanStep {
    StepKind kind = StepKind::PlaceMinimal;
    ThirdCase tcase = ThirdCase::PPtoP;
    int cluster = 0;           // slot receiving the result
    std::vector<int> sources;  // merged-in slots
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<int> constraints;
    int multiplicity = 1;
    Relation rel[2];  // PlaceMinimal uses rel[0]; ConstructThird relates inputs[i] to the output
    // Variable-radius circle whose placed radius is added to rel[i] at execution.
    std::string rel_radius[2];

    // MergeClusters: shared u (cluster & sources[0]), v (sources[0] & sources[1]),
    // w (sources[1] & cluster); v is rebuilt in the fixed frame from u and w.
    std::array<std::string, 3> shared;
    bool shared_incident[2]{false, false};  // u-v and v-w relations forced to zero
    int construct_mult = 1;
    int flip_arity[2]{1, 1};

    // Variable-radius circle steps. Sequential: 3 objects. Merge: E1,E2 from the fixed
    // cluster then E3,E4 from the source slot, shared element in shared[0].
    std::vector<CycloSpec> cyclo;
};

struct ConstructionPlan {
    std::vector<PlanStep> steps;
    int cluster_count = 0;
    int final_cluster = 0;

    std::vector<int> multi_root_steps() const;
    long double solution_bound() const;
};

using SignVector = std::vector<int>;

struct ExecState {
    std::vector<Placement> clusters;
};

struct ExecResult {
    bool ok = true;
    int failed_step = -1;
    std::string message;
    Placement placement;
};

// Executes one step in place; false when the chosen slot has no real root.
bool apply_step(const GcsProblem& problem, const ConstructionPlan& plan, size_t k, int choice, ExecState& st,
                std::string* why = nullptr);
ExecResult execute_plan(const ConstructionPlan& plan, const GcsProblem& problem, const SignVector& signs);
// Full-length per-step choices (0 for single-root steps) from a sign vector.
std::vector<int> step_choices(const ConstructionPlan& plan, const SignVector& signs);
Placement collect(const ConstructionPlan& plan, const ExecState& st);

struct Residual {
    std::string constraint;
    double value = 0.0;
};

double diameter(const GcsProblem& problem, const Placement& placement);
// Lengths normalized by the diameter, angles in radians.
std::vector<Residual> residuals(const GcsProblem& problem, const Placement& placement);
double max_residual(const GcsProblem& problem, const Placement& placement);
double constraint_residual(const GcsProblem& problem, const Constraint& c, const Placement& placement);

}  // namespace gcs
