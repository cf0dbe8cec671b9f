#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gcs/geometry.hpp"
#include "gcs/polynomial.hpp"

namespace gcs {

// A placed object constraining a variable-radius circle: a line (mapped to a plane) or a
// circle of radius rho about c (mapped to a normal cone; rho = 0 for points).
struct Cyclo {
    bool line = false;
    Line2 l{};
    Vec2 c{};
    double rho = 0.0;

    static Cyclo of_line(const Line2& l) { return {true, l, {}, 0.0}; }
    static Cyclo of_circle(Vec2 c, double rho) { return {false, {}, c, rho}; }
    bool is_point() const { return !line && rho == 0.0; }
    bool is_cone() const { return !line; }
};

struct Circle {
    Vec2 c{};
    double r = 0.0;
    // Signed radius of the oriented solution (apex height).
    double z = 0.0;
    bool zero_radius = false;
};

// Number of non-redundant orientation assignments: the first non-point object is fixed.
int orientation_combos(const std::vector<Cyclo>& objs);
// Orientation sign of object i under combo index k (points always +1).
int orientation_sign(const std::vector<Cyclo>& objs, int combo, size_t i);

int vcircle_sequential_slot_count(const std::array<Cyclo, 3>& in);
// Slot order: orientation combo, then quadratic root by ascending line parameter.
std::vector<std::optional<Circle>> vcircle_sequential_slots(const std::array<Cyclo, 3>& in);
// All distinct solution circles over every orientation (dedup by center and radius).
std::vector<Circle> vcircle_sequential(const std::array<Cyclo, 3>& in);

// Cyclographic residual of a solution against one oriented object.
double cyclo_residual(const Cyclo& o, int sigma, const Circle& s);
// Geometric tangency residual ignoring orientation: min over tangency types.
double tangency_residual(const Cyclo& o, const Circle& s);

enum class MergeParam { Translation, Rotation };

struct MergePolynomial {
    std::string case_tag;
    MergeParam kind = MergeParam::Translation;
    int sheet = 0;
    int combo = 0;
    Poly poly;      // in t (translation) or u = tan(theta/2) (rotation)
    TrigPoly trig;  // rotation only
    int degree = 0;  // degree in t, or trigonometric degree in theta
    int bound = 0;
};

struct MergeSolution {
    int sheet = 0;
    int combo = 0;
    double param = 0.0;
    Rigid motion;  // moving-cluster frame -> fixed-cluster frame
    Circle circle;
};

struct MergeResult {
    std::string case_tag;
    MergeParam kind = MergeParam::Translation;
    std::vector<MergePolynomial> polys;
    std::vector<std::optional<MergeSolution>> slots;
    std::vector<MergeSolution> solutions;
};

// Case tag E(..,..) and its (translation, rotation) degree bound.
std::string merge_case_tag(bool shared_line, const std::array<Cyclo, 2>& s1, const std::array<Cyclo, 2>& s2);
std::pair<int, int> merge_degree_bound(const std::string& tag);
int vcircle_merge_slot_count(bool shared_line, const std::array<Cyclo, 2>& s1, const std::array<Cyclo, 2>& s2);

// s1 objects and e0_fixed in the fixed cluster's frame; s2 objects and e0_moving in the moving
// cluster's frame. The shared element is a line (translation) or a circle/point (rotation).
MergeResult vcircle_merge(const std::array<Cyclo, 2>& s1, const std::array<Cyclo, 2>& s2, const Cyclo& e0_fixed,
                          const Cyclo& e0_moving);

}  // namespace gcs
