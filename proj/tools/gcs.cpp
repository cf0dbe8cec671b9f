// Command-line front end: analyze, plan, solve, enumerate, complete, cayley, reach, serve.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gcs/cayley.hpp"
#include "gcs/graph.hpp"
#include "gcs/io.hpp"
#include "gcs/planner.hpp"
#include "gcs/roots.hpp"
#include "gcs/service.hpp"
#include "gcs/undercon.hpp"

using namespace gcs;
using nlohmann::json;

namespace {

enum Exit {
    kOk = 0,
    kIo = 1,
    kUnder = 2,
    kOver = 3,
    kNotDecomposable = 4,
    kInfeasible = 5,
    kUnreachable = 6,
    kFailure = 7,
};

bool g_json = false;

int exit_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::ParseError:
        case ErrorCode::EmptyProblem:
        case ErrorCode::UnknownKind:
        case ErrorCode::DuplicateId:
        case ErrorCode::IoError: return kIo;
        case ErrorCode::NotDecomposable:
        case ErrorCode::NotCompletableByDecomposition: return kNotDecomposable;
        case ErrorCode::Infeasible: return kInfeasible;
        case ErrorCode::Unreachable: return kUnreachable;
        default: return kFailure;
    }
}

int report(const Error& e) {
    if (g_json) {
        std::cerr << error_json(e).dump() << "\n";
    } else {
        std::cerr << "error: " << error_code_name(e.code);
        if (e.line > 0) std::cerr << " at " << e.line << ":" << e.column;
        std::cerr << ": " << e.what() << "\n";
    }
    return exit_for(e.code);
}

std::string f(double v) { return format_double(v); }

void print_placement(const Placement& pl, const GcsProblem& p) {
    for (const Element& e : p.elements) {
        auto it = pl.find(e.id);
        if (it == pl.end()) continue;
        const Pose& q = it->second;
        std::cout << "  " << e.id << " " << kind_name(e.kind);
        if (e.kind == ElementKind::Line) std::cout << " normal " << f(q.line.n.x) << " " << f(q.line.n.y) << " " << f(q.line.d);
        else std::cout << " at " << f(q.p.x) << " " << f(q.p.y);
        if (e.kind == ElementKind::VariableCircle) std::cout << " r " << f(q.r);
        std::cout << "\n";
    }
}

int cmd_analyze(const std::string& file) {
    GcsProblem p = load_problem(file);
    ConstraintGraph g = build_graph(p);
    Classification c = classify(g);
    int code = c.verdict == Verdict::UnderConstrained ? kUnder : c.verdict == Verdict::OverConstrained ? kOver : kOk;
    if (g_json) {
        std::cout << to_json(c, g).dump(2) << "\n";
        return code;
    }
    std::cout << verdict_name(c.verdict) << ", deficit " << c.deficit << "\n";
    if (!c.witness.empty()) {
        std::cout << "witness:";
        for (int v : c.witness) std::cout << " " << g.ids[static_cast<size_t>(v)];
        std::cout << " (deficit " << deficit(g, c.witness) << ")\n";
    }
    if (c.budget_limited) std::cout << "note: not over-constrained up to the scan budget\n";
    return code;
}

int cmd_plan(const std::string& file) {
    GcsProblem p = load_problem(file);
    ConstructionPlan plan;
    try {
        plan = make_plan(p);
    } catch (const Error& e) {
        if (e.code != ErrorCode::NotDecomposable) throw;
        if (g_json) std::cout << error_json(e).dump(2) << "\n";
        else std::cout << e.what() << "\n";
        return kNotDecomposable;
    }
    if (g_json) {
        std::cout << to_json(plan, p).dump(2) << "\n";
        return kOk;
    }
    auto ops = describe(plan, p);
    std::cout << plan.steps.size() << " steps, " << plan.multi_root_steps().size() << " multi-root, at most "
              << static_cast<double>(plan.solution_bound()) << " solutions\n";
    for (size_t i = 0; i < plan.steps.size(); ++i) {
        const PlanStep& s = plan.steps[i];
        std::cout << "  " << i << " " << step_kind_name(s.kind) << " x" << s.multiplicity << " ->";
        for (const auto& o : s.outputs) std::cout << " " << o;
        std::cout << " |";
        for (const auto& o : ops[i]) std::cout << " " << o;
        std::cout << " |";
        for (int c : s.constraints) std::cout << " " << p.constraints[static_cast<size_t>(c)].id;
        std::cout << "\n";
    }
    return kOk;
}

int cmd_solve(const std::string& file, const std::string& signs_text, bool have_signs, bool heuristic,
              const std::string& svg_out) {
    GcsProblem p = load_problem(file);
    ConstructionPlan plan = make_plan(p);
    SignVector signs(plan.multi_root_steps().size(), 0);
    std::vector<int> fallbacks;
    if (have_signs) {
        signs = parse_signs(signs_text, plan);
    } else if (heuristic) {
        HeuristicResult h = heuristic_signs(plan, p);
        signs = h.signs;
        fallbacks = h.fallback_steps;
    }
    ExecResult r = execute_plan(plan, p, signs);
    if (!r.ok) {
        Error e(ErrorCode::Infeasible, r.message, r.failed_step);
        if (!g_json) std::cout << "signs " << format_signs(signs, plan) << "\ninfeasible at step " << r.failed_step << ": " << r.message << "\n";
        return report(e);
    }
    if (!svg_out.empty()) {
        std::ofstream out(svg_out, std::ios::binary);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + svg_out);
        out << render_svg(r.placement, p);
    }
    auto res = residuals(p, r.placement);
    if (g_json) {
        json j{{"signs", format_signs(signs, plan)}, {"placement", to_json(r.placement, p)}};
        json jr = json::object();
        for (const Residual& x : res) jr[x.constraint] = x.value;
        j["residuals"] = jr;
        j["max_residual"] = max_residual(p, r.placement);
        if (heuristic) j["fallback_steps"] = fallbacks;
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    std::cout << "signs " << format_signs(signs, plan) << "\n";
    if (!fallbacks.empty()) {
        std::cout << "default choice at steps:";
        for (int k : fallbacks) std::cout << " " << k;
        std::cout << "\n";
    }
    print_placement(r.placement, p);
    std::cout << "residuals\n";
    for (const Residual& x : res) std::cout << "  " << x.constraint << " " << f(x.value) << "\n";
    std::cout << "max residual " << f(max_residual(p, r.placement)) << "\n";
    return kOk;
}

int cmd_enumerate(const std::string& file, long limit, bool use_predicates) {
    GcsProblem p = load_problem(file);
    ConstructionPlan plan = make_plan(p);
    size_t lim = limit < 0 ? std::numeric_limits<size_t>::max() : static_cast<size_t>(limit);
    EnumerateResult r = enumerate(plan, p, lim, use_predicates ? p.predicates : std::vector<OrientationPredicate>{});
    if (g_json) {
        json sols = json::array();
        for (size_t i = 0; i < r.signs.size(); ++i)
            sols.push_back({{"signs", format_signs(r.signs[i], plan)}, {"placement", to_json(r.placements[i], p)}});
        std::cout << json{{"count", r.signs.size()}, {"exhausted", r.exhausted}, {"filtered", r.filtered},
                          {"infeasible_branches", r.infeasible_branches}, {"solutions", sols}}
                         .dump(2)
                  << "\n";
        return kOk;
    }
    for (size_t i = 0; i < r.signs.size(); ++i) {
        std::cout << "solution " << i << " signs " << format_signs(r.signs[i], plan) << "\n";
        print_placement(r.placements[i], p);
    }
    std::cout << "count " << r.signs.size() << ", exhausted " << (r.exhausted ? "yes" : "no") << ", infeasible branches "
              << r.infeasible_branches;
    if (use_predicates) std::cout << ", filtered " << r.filtered;
    std::cout << "\n";
    return kOk;
}

std::vector<VertexPair> load_pool(const std::string& path, const ConstraintGraph& g) {
    std::istringstream in(read_file(path));
    std::vector<VertexPair> pool;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a)) continue;
        if (!(ls >> b) || (ls >> extra)) {
            Error e(ErrorCode::ParseError, "pool lines hold two element ids");
            e.line = n;
            e.column = 1;
            throw e;
        }
        int va = g.vertex(a), vb = g.vertex(b);
        if (va < 0 || vb < 0) {
            Error e(ErrorCode::ParseError, "unknown element in pool: " + (va < 0 ? a : b));
            e.line = n;
            e.column = 1;
            throw e;
        }
        pool.push_back({va, vb});
    }
    return pool;
}

int cmd_complete(const std::string& file, const std::string& pool_file) {
    GcsProblem p = load_problem(file);
    ConstraintGraph g = build_graph(p);
    Completion c = pool_file.empty() ? free_completion(g) : conditional_completion(g, load_pool(pool_file, g));
    std::vector<std::pair<std::string, std::string>> pairs;
    for (auto [a, b] : c.added) pairs.push_back({g.ids[static_cast<size_t>(a)], g.ids[static_cast<size_t>(b)]});
    auto valued = constraint_values_for(p, pairs);
    GcsProblem done = p;
    for (const auto& v : valued) {
        Constraint k = v.constraint;
        if (v.symbolic) k.value = 0.0;
        done.constraints.push_back(k);
    }
    std::string doc = serialize_problem(done);
    for (const auto& v : valued)
        if (v.symbolic) {
            std::regex line("(^|\n)(" + v.constraint.id + " \\S+ \\S+ \\S+) \\S+");
            doc = std::regex_replace(doc, line, "$1$2 $$" + v.constraint.id);
        }
    if (g_json) {
        json added = json::array();
        for (const auto& v : valued)
            added.push_back({{"id", v.constraint.id}, {"a", v.constraint.a}, {"b", v.constraint.b},
                             {"kind", kind_name(v.constraint.kind)},
                             {"value", v.symbolic ? json(nullptr) : json(v.constraint.value)}});
        std::cout << json{{"mode", c.mode == Completion::Mode::Free ? "free" : "conditional"},
                          {"required", c.required}, {"partial", c.partial}, {"added", added}, {"document", doc}}
                         .dump(2)
                  << "\n";
        return kOk;
    }
    std::cout << (c.mode == Completion::Mode::Free ? "free" : "conditional") << " completion, " << c.added.size()
              << " of " << c.required << " edges" << (c.partial ? " (partial)" : "") << ":";
    for (const auto& [a, b] : pairs) std::cout << " " << a << "-" << b;
    std::cout << "\n" << doc;
    return kOk;
}

int cmd_cayley(const std::string& file, int resolution) {
    GcsProblem p = load_problem(file);
    Linkage lk = make_linkage(p);
    CayleySpace cs = cayley_space(lk, resolution);
    if (g_json) {
        json os = json::array();
        for (const auto& o : cs.orientations) {
            json ivs = json::array();
            for (const auto& iv : o.intervals)
                ivs.push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"lo_step", iv.lo_step}, {"hi_step", iv.hi_step}, {"full", iv.full}});
            os.push_back({{"signs", format_signs(o.signs, lk.plan)}, {"intervals", ivs}});
        }
        std::cout << json{{"free", cs.free_id}, {"angle", cs.angle}, {"domain", {cs.domain_lo, cs.domain_hi}},
                          {"orientations", os}, {"warnings", cs.warnings}}
                         .dump(2)
                  << "\n";
        return kOk;
    }
    std::cout << "free " << cs.free_id << " (" << (cs.angle ? "angle" : "distance") << "), domain [" << f(cs.domain_lo)
              << ", " << f(cs.domain_hi) << "]\n";
    for (const auto& o : cs.orientations) {
        std::cout << "  " << (o.signs.empty() ? "(none)" : format_signs(o.signs, lk.plan)) << ":";
        if (o.intervals.empty()) std::cout << " empty";
        for (const auto& iv : o.intervals) {
            if (iv.full) std::cout << " full circle";
            else std::cout << " [" << f(iv.lo) << ", " << f(iv.hi) << "]";
        }
        std::cout << "\n";
    }
    for (const auto& w : cs.warnings) std::cout << "warning: " << w << "\n";
    return kOk;
}

ReachEndpoint parse_endpoint(const std::string& text, const Linkage& lk) {
    auto at = text.find('@');
    if (at == std::string::npos) throw Error(ErrorCode::ParseError, "endpoint must be SIGNS@VALUE: " + text);
    ReachEndpoint e;
    e.signs = parse_signs(text.substr(0, at), lk.plan);
    std::string v = text.substr(at + 1);
    double scale = 1.0;
    if (v.size() > 3 && v.compare(v.size() - 3, 3, "deg") == 0) {
        scale = std::numbers::pi / 180.0;
        v.resize(v.size() - 3);
    } else if (v.size() > 3 && v.compare(v.size() - 3, 3, "rad") == 0) {
        v.resize(v.size() - 3);
    }
    try {
        size_t used = 0;
        e.value = std::stod(v, &used) * scale;
        if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "bad parameter value in " + text);
    }
    return e;
}

int cmd_reach(const std::string& file, const std::string& start, const std::string& end, int resolution) {
    GcsProblem p = load_problem(file);
    Linkage lk = make_linkage(p);
    ReachEndpoint s = parse_endpoint(start, lk), e = parse_endpoint(end, lk);
    CayleySpace cs = cayley_space(lk, resolution);
    ReachPath path = reachable(lk, cs, s, e);
    if (g_json) {
        json segs = json::array();
        for (const auto& sg : path.segments)
            segs.push_back({{"signs", format_signs(sg.signs, lk.plan)}, {"interval", sg.interval}, {"from", sg.from}, {"to", sg.to}});
        std::cout << json{{"segments", segs}, {"transitions", path.transitions}, {"length", path.length}}.dump(2) << "\n";
        return kOk;
    }
    for (const auto& sg : path.segments)
        std::cout << "  " << format_signs(sg.signs, lk.plan) << " interval " << sg.interval << ": " << f(sg.from) << " -> "
                  << f(sg.to) << "\n";
    std::cout << "length " << f(path.length) << "\n";
    return kOk;
}

int cmd_serve(const std::string& host, int port, int idle) {
    ServiceOptions opt;
    opt.idle_timeout = std::chrono::seconds(idle);
    NavService svc(opt);
    int bound = svc.bind(host, port);
    if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
    std::cerr << "listening on " << host << ":" << bound << "\n";
    svc.listen_after_bind();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric constraint solver"};
    app.require_subcommand(1);
    app.add_flag("--json", g_json, "JSON output; machine-readable errors on stderr");

    std::string file, signs, svg, pool, start, end, host = "127.0.0.1";
    bool heuristic = false, use_predicates = false;
    long limit = -1;
    int resolution = 256, port = 8080, idle = 1800;

    auto* analyze = app.add_subcommand("analyze", "Classify the constraint graph");
    auto* plan = app.add_subcommand("plan", "Print the construction plan");
    auto* solve = app.add_subcommand("solve", "Place one solution instance");
    auto* enumerate_cmd = app.add_subcommand("enumerate", "List every solution instance");
    auto* complete = app.add_subcommand("complete", "Complete an under-constrained problem");
    auto* cayley = app.add_subcommand("cayley", "Cayley configuration space of a linkage");
    auto* reach = app.add_subcommand("reach", "Path between two configurations of a linkage");
    auto* serve = app.add_subcommand("serve", "Run the navigation service");
    for (auto* sc : {analyze, plan, solve, enumerate_cmd, complete, cayley, reach})
        sc->add_option("file", file, "problem document (.gcs)")->required();
    auto* signs_opt = solve->add_option("--signs", signs, "sign string, e.g. +-a");
    solve->add_flag("--heuristic", heuristic, "pick roots that resemble the sketch");
    solve->add_option("--svg", svg, "write an SVG rendering");
    enumerate_cmd->add_option("--limit", limit, "stop after N placements");
    enumerate_cmd->add_flag("--predicates", use_predicates, "keep only placements satisfying the document's predicates");
    complete->add_option("--pool", pool, "candidate pairs, one 'A B' per line");
    cayley->add_option("--resolution", resolution, "initial samples per orientation (>= 64)");
    reach->add_option("--start", start, "SIGNS@VALUE")->required();
    reach->add_option("--end", end, "SIGNS@VALUE")->required();
    reach->add_option("--resolution", resolution, "initial samples per orientation (>= 64)");
    serve->add_option("--port", port, "TCP port (0 picks one)");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--idle", idle, "idle session timeout in seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kIo;
    }

    try {
        if (*analyze) return cmd_analyze(file);
        if (*plan) return cmd_plan(file);
        if (*solve) return cmd_solve(file, signs, signs_opt->count() > 0, heuristic, svg);
        if (*enumerate_cmd) return cmd_enumerate(file, limit, use_predicates);
        if (*complete) return cmd_complete(file, pool);
        if (*cayley) return cmd_cayley(file, resolution);
        if (*reach) return cmd_reach(file, start, end, resolution);
        if (*serve) return cmd_serve(host, port, idle);
    } catch (const Error& e) {
        return report(e);
    }
    return kOk;
}
