#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "gcs/construct.hpp"
#include "gcs/graph.hpp"
#include "gcs/model.hpp"

namespace gcs {

// Line-oriented .gcs document, compound arcs kept as written.
GcsProblem parse_document(const std::string& text);
// parse_document + arc expansion + validation.
GcsProblem parse_problem(const std::string& text);
GcsProblem load_problem(const std::string& path);
// Lines of a predicates section checked against the problem's elements; error lines count from 1.
std::vector<OrientationPredicate> parse_predicates(const std::string& text, const GcsProblem& problem);
std::string read_file(const std::string& path);

// Canonical text form of an unexpanded document.
std::string serialize_problem(const GcsProblem& problem);

std::string format_double(double v);

nlohmann::json to_json(const GcsProblem& problem);
nlohmann::json to_json(const Placement& placement, const GcsProblem& problem);
nlohmann::json to_json(const ConstructionPlan& plan, const GcsProblem& problem);
nlohmann::json to_json(const Classification& c, const ConstraintGraph& g);
nlohmann::json error_json(const Error& e);

struct SvgOptions {
    double tol = 1e-8;
    int width = 480;
    int height = 480;
};

std::string render_svg(const Placement& placement, const GcsProblem& problem, const SvgOptions& opt = {});

}  // namespace gcs
