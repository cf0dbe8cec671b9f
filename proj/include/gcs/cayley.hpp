#pragma once

#include <string>
#include <vector>

#include "gcs/construct.hpp"
#include "gcs/graph.hpp"
#include "gcs/planner.hpp"

namespace gcs {

// Well-constrained problem with one constraint whose value is the free parameter.
struct Linkage {
    GcsProblem problem;
    int free = -1;       // index into problem.constraints
    bool angle = false;  // angle parameters live on the circle [0, pi)
    ConstraintGraph graph;
    DecompositionTree tree;
    ConstructionPlan plan;  // plan at the problem's own value; orientations index its multi-root steps
    double domain_lo = 0.0;
    double domain_hi = 0.0;
};

Linkage make_linkage(const GcsProblem& problem);
// Runs the plan with the free constraint set to value.
ExecResult execute_at(const Linkage& lk, const SignVector& signs, double value);

struct CayleyInterval {
    double lo = 0.0;
    double hi = 0.0;  // circular intervals that wrap past pi keep hi > pi
    bool lo_domain = false;  // endpoint is a domain bound, not a feasibility boundary
    bool hi_domain = false;
    int lo_step = -1;  // plan step that fails just outside the endpoint
    int hi_step = -1;
    bool full = false;  // the whole circle
};

struct OrientationSpace {
    SignVector signs;
    std::vector<CayleyInterval> intervals;
};

struct CayleySpace {
    std::string free_id;
    bool angle = false;
    double domain_lo = 0.0;
    double domain_hi = 0.0;
    int resolution = 0;
    std::vector<OrientationSpace> orientations;
    std::vector<std::string> warnings;
};

CayleySpace cayley_space(const Linkage& lk, int resolution = 256);

// Index of the interval of an orientation holding value, or -1.
int interval_of(const CayleySpace& cs, size_t orientation, double value, double tol = 0.0);

struct ReachEndpoint {
    SignVector signs;
    double value = 0.0;
};

// Parameter value and orientation of a placement of the base problem.
ReachEndpoint locate(const Linkage& lk, const Placement& placement);

struct ReachSegment {
    SignVector signs;
    int interval = -1;
    double from = 0.0;
    double to = 0.0;
};

struct ReachPath {
    std::vector<ReachSegment> segments;
    std::vector<double> transitions;  // parameter values where consecutive segments meet
    double length = 0.0;
};

// Minimal-arc-length path; BadEndpoint for infeasible endpoints, Unreachable otherwise.
ReachPath reachable(const Linkage& lk, const CayleySpace& cs, const ReachEndpoint& start, const ReachEndpoint& end);
ReachPath reachable(const Linkage& lk, const CayleySpace& cs, const Placement& start, const Placement& end);

}  // namespace gcs
