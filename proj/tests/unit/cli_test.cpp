#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>

#include "common.hpp"
#include "doctest.h"
#include "gcs/graph.hpp"
#include "gcs/planner.hpp"
#include "json.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(GCS_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f);
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) r.out.append(buf.data(), n);
    int st = pclose(f);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string c(const std::string& name) { return corpus_path(name); }

}  // namespace

TEST_CASE("cli exit codes") {
    Run k = run("analyze " + c("k33.gcs"));
    CHECK(k.code == 0);
    CHECK(k.out.find("well-constrained, deficit 3") != std::string::npos);
    CHECK(run("plan " + c("k33.gcs")).code == 4);
    CHECK(run("solve " + c("truss.gcs") + " --signs ++").code == 0);
    CHECK(run("analyze " + c("fig2.gcs")).code == 3);
    CHECK(run("analyze " + c("truss_minus_edge.gcs")).code == 2);
    CHECK(run("solve " + c("truss_infeasible.gcs")).code == 5);
    CHECK(run("analyze /nonexistent/file.gcs").code == 1);
    CHECK(run("complete " + c("fig16a.gcs")).code == 0);
    CHECK(run("complete " + c("fig16a.gcs") + " --pool " + c("fig17b.pool")).code == 0);
    CHECK(run("reach " + c("crank_slider.gcs") + " --start ++@10deg --end --@10deg").code == 6);
    CHECK(run("reach " + c("triangle_linkage.gcs") + " --start +@3 --end -@3").code == 0);
}

TEST_CASE("cli json output") {
    Run r = run("--json solve " + c("truss.gcs") + " --signs ++");
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["signs"] == "++");
    CHECK(j["max_residual"].get<double>() < 1e-12);
    for (const auto& e : j["placement"])
        if (e["id"] == "D") {
            CHECK(e["x"].get<double>() == doctest::Approx(1.5).epsilon(1e-15));
            CHECK(e["y"].get<double>() == doctest::Approx(-std::sqrt(3.0) / 2).epsilon(1e-15));
        }

    Run en = run("--json enumerate " + c("three_trusses.gcs") + " --limit 5");
    REQUIRE(en.code == 0);
    auto je = nlohmann::json::parse(en.out);
    CHECK(je["count"] == 5);
    CHECK(je["solutions"].size() == 5);
    CHECK_FALSE(je["exhausted"].get<bool>());
}

TEST_CASE("cli exit codes follow the library over the corpus") {
    int n = 0;
    for (const auto& f : std::filesystem::directory_iterator(GCS_CORPUS_DIR)) {
        if (f.path().extension() != ".gcs") continue;
        std::string path = f.path().string();
        INFO(path);
        gcs::GcsProblem p = gcs::load_problem(path);
        gcs::ConstraintGraph g = gcs::build_graph(p);
        gcs::Verdict v = gcs::classify(g).verdict;
        int want = v == gcs::Verdict::UnderConstrained ? 2 : v == gcs::Verdict::OverConstrained ? 3 : 0;
        Run a = run("analyze " + path);
        CHECK(a.code == want);
        CHECK(run("analyze " + path).out == a.out);

        bool plannable = true;
        try {
            gcs::make_plan(p);
        } catch (const gcs::Error&) {
            plannable = false;
        }
        Run pl = run("plan " + path);
        CHECK((pl.code == 0) == plannable);
        if (!plannable) CHECK(pl.code == 4);
        if (plannable) {
            Run e = run("enumerate " + path + " --limit 16");
            CHECK(run("enumerate " + path + " --limit 16").out == e.out);
        }
        ++n;
    }
    CHECK(n >= 20);
}
