#pragma once

#include <string>

#include "gcs/io.hpp"
#include "gcs/model.hpp"

inline gcs::GcsProblem corpus(const std::string& name) {
    return gcs::load_problem(std::string(GCS_CORPUS_DIR) + "/" + name);
}

inline std::string corpus_path(const std::string& name) { return std::string(GCS_CORPUS_DIR) + "/" + name; }

inline gcs::Element point(const std::string& id, double x, double y) {
    gcs::Element e;
    e.id = id;
    gcs::Pose p;
    p.p = {x, y};
    e.sketch = p;
    return e;
}

inline gcs::Constraint distance(const std::string& id, const std::string& a, const std::string& b, double v) {
    gcs::Constraint c;
    c.id = id;
    c.a = a;
    c.b = b;
    c.value = v;
    return c;
}
