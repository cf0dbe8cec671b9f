#include "gcs/service.hpp"

#include <mutex>
#include <random>
#include <regex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "gcs/io.hpp"
#include "gcs/planner.hpp"
#include "gcs/roots.hpp"

namespace gcs {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Session {
    std::mutex m;
    GcsProblem problem;
    ConstructionPlan plan;
    std::unique_ptr<Navigator> nav;
    std::vector<OrientationPredicate> predicates;
    Clock::time_point last = Clock::now();
};

HttpReply reply(int status, const json& j) { return {status, "application/json", j.dump()}; }

HttpReply error_reply(int status, const std::string& code, const std::string& message, int step = -1) {
    json j{{"code", code}, {"message", message}};
    if (step >= 0) j["step"] = step;
    return reply(status, j);
}

HttpReply error_reply(int status, const Error& e) { return reply(status, error_json(e)); }

int status_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::ParseError:
        case ErrorCode::EmptyProblem:
        case ErrorCode::UnknownKind:
        case ErrorCode::DuplicateId:
        case ErrorCode::BadStep: return 400;
        case ErrorCode::NotDecomposable: return 422;
        case ErrorCode::NotMultiRoot:
        case ErrorCode::Infeasible: return 409;
        default: return 422;
    }
}

json step_list(const Session& s) {
    json out = json::array();
    std::vector<int> choices = step_choices(s.plan, s.nav->signs());
    auto ops = describe(s.plan, s.problem);
    for (int k : s.plan.multi_root_steps()) {
        const PlanStep& st = s.plan.steps[static_cast<size_t>(k)];
        out.push_back({{"step", k},
                       {"multiplicity", st.multiplicity},
                       {"choice", choices[static_cast<size_t>(k)]},
                       {"outputs", st.outputs},
                       {"ops", ops[static_cast<size_t>(k)]}});
    }
    return out;
}

json state_json(Session& s) {
    json j{{"signs", format_signs(s.nav->signs(), s.plan)}, {"feasible", s.nav->feasible()}};
    if (!s.nav->feasible()) {
        j["failed_step"] = s.nav->failed_step();
        j["message"] = s.nav->message();
    }
    return j;
}

}  // namespace

struct NavService::Impl {
    ServiceOptions opt;
    std::mutex m;
    std::map<std::string, std::shared_ptr<Session>> sessions;
    std::mt19937_64 rng{std::random_device{}()};
    httplib::Server server;

    std::string new_id() {
        std::ostringstream os;
        os << std::hex << rng();
        return os.str();
    }

    std::shared_ptr<Session> find(const std::string& id) {
        std::lock_guard<std::mutex> lk(m);
        auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }

    size_t evict() {
        std::lock_guard<std::mutex> lk(m);
        auto now = Clock::now();
        size_t n = 0;
        for (auto it = sessions.begin(); it != sessions.end();) {
            std::unique_lock<std::mutex> sl(it->second->m, std::try_to_lock);
            if (sl.owns_lock() && now - it->second->last > opt.idle_timeout) {
                sl.unlock();
                it = sessions.erase(it);
                ++n;
            } else {
                ++it;
            }
        }
        return n;
    }

    HttpReply create(const std::string& body) {
        std::string doc;
        if (body.empty()) return error_reply(400, "EmptyProblem", "request body is empty");
        json req = json::parse(body, nullptr, false);
        if (req.is_discarded() || !req.is_object() || !req.contains("document") || !req["document"].is_string())
            return error_reply(400, "ParseError", "expected a JSON object with a \"document\" string");
        doc = req["document"].get<std::string>();
        auto s = std::make_shared<Session>();
        try {
            s->problem = parse_problem(doc);
        } catch (const Error& e) {
            return error_reply(400, e);
        }
        try {
            s->plan = make_plan(s->problem);
        } catch (const Error& e) {
            return error_reply(status_for(e.code), e);
        }
        SignVector signs(s->plan.multi_root_steps().size(), 0);
        try {
            if (req.contains("signs")) signs = parse_signs(req["signs"].get<std::string>(), s->plan);
            else if (req.value("heuristic", false)) signs = heuristic_signs(s->plan, s->problem).signs;
        } catch (const Error& e) {
            return error_reply(400, e);
        } catch (const json::exception& e) {
            return error_reply(400, "ParseError", e.what());
        }
        s->predicates = s->problem.predicates;
        s->nav = std::make_unique<Navigator>(s->plan, s->problem, signs);
        std::string id;
        {
            std::lock_guard<std::mutex> lk(m);
            do id = new_id();
            while (sessions.count(id));
            sessions[id] = s;
        }
        json j = state_json(*s);
        j["id"] = id;
        j["plan"] = to_json(s->plan, s->problem);
        j["multi_root_steps"] = step_list(*s);
        return reply(201, j);
    }

    HttpReply get(Session& s, const std::string& id) {
        json j = state_json(s);
        j["id"] = id;
        j["plan"] = to_json(s.plan, s.problem);
        j["multi_root_steps"] = step_list(s);
        j["predicates"] = s.predicates.size();
        return reply(200, j);
    }

    HttpReply flip(Session& s, const std::string& body, bool full) {
        json req = json::parse(body, nullptr, false);
        if (req.is_discarded() || !req.is_object() || !req.contains("step") || !req["step"].is_number_integer())
            return error_reply(400, "ParseError", "expected a JSON object with an integer \"step\"");
        FlipResult r;
        try {
            r = s.nav->flip(req["step"].get<int>());
        } catch (const Error& e) {
            return error_reply(status_for(e.code), e);
        }
        json j = state_json(s);
        Placement delta;
        for (const std::string& id : r.changed) {
            auto it = r.placement.find(id);
            if (it != r.placement.end()) delta[id] = it->second;
        }
        j["changed"] = to_json(delta, s.problem);
        j["removed"] = json::array();
        for (const std::string& id : r.changed)
            if (!r.placement.count(id)) j["removed"].push_back(id);
        j["reexecuted"] = r.reexecuted;
        j["full"] = full;
        if (full) j["placement"] = to_json(r.placement, s.problem);
        return reply(200, j);
    }

    HttpReply solution(Session& s, const std::string& format) {
        Placement pl = s.nav->placement();
        if (!s.nav->feasible()) {
            json j{{"code", "Infeasible"},
                   {"message", s.nav->message()},
                   {"step", s.nav->failed_step()},
                   {"signs", format_signs(s.nav->signs(), s.plan)},
                   {"placement", to_json(pl, s.problem)}};
            return reply(409, j);
        }
        if (format == "svg") return {200, "image/svg+xml", render_svg(pl, s.problem)};
        if (format != "json") return error_reply(400, "ParseError", "format must be json or svg");
        json j{{"signs", format_signs(s.nav->signs(), s.plan)},
               {"placement", to_json(pl, s.problem)},
               {"max_residual", max_residual(s.problem, pl)},
               {"predicates_hold", satisfies_all(s.predicates, pl, s.problem)}};
        return reply(200, j);
    }

    HttpReply predicates(Session& s, const std::string& body) {
        json req = json::parse(body, nullptr, false);
        if (req.is_discarded() || !req.is_object() || !req.contains("predicates") || !req["predicates"].is_array())
            return error_reply(400, "ParseError", "expected a JSON object with a \"predicates\" array of strings");
        std::string text;
        for (const json& p : req["predicates"]) {
            if (!p.is_string()) return error_reply(400, "ParseError", "predicates must be strings");
            text += p.get<std::string>() + "\n";
        }
        std::vector<OrientationPredicate> preds;
        try {
            preds = parse_predicates(text, s.problem);
        } catch (const Error& e) {
            return error_reply(400, e);
        }
        if (req.value("append", false)) s.predicates.insert(s.predicates.end(), preds.begin(), preds.end());
        else s.predicates = preds;
        json j{{"predicates", s.predicates.size()}};
        if (s.nav->feasible()) j["current_holds"] = satisfies_all(s.predicates, s.nav->placement(), s.problem);
        return reply(200, j);
    }

    HttpReply enumerate_all(Session& s, const std::map<std::string, std::string>& query) {
        size_t limit = 1000;
        auto it = query.find("limit");
        if (it != query.end()) {
            try {
                long v = std::stol(it->second);
                if (v < 0) throw std::invalid_argument("negative");
                limit = static_cast<size_t>(v);
            } catch (const std::exception&) {
                return error_reply(400, "ParseError", "limit must be a non-negative integer");
            }
        }
        EnumerateResult r = enumerate(s.plan, s.problem, limit, s.predicates);
        json sols = json::array();
        for (size_t i = 0; i < r.signs.size(); ++i)
            sols.push_back({{"signs", format_signs(r.signs[i], s.plan)}, {"placement", to_json(r.placements[i], s.problem)}});
        return reply(200, {{"count", r.signs.size()}, {"exhausted", r.exhausted}, {"filtered", r.filtered}, {"solutions", sols}});
    }

    HttpReply route(const std::string& method, const std::string& path, const std::map<std::string, std::string>& query,
                    const std::string& body) {
        evict();
        if (path == "/sessions" || path == "/sessions/") {
            if (method != "POST") return error_reply(405, "MethodNotAllowed", method + " " + path);
            return create(body);
        }
        static const std::regex re("^/sessions/([0-9a-zA-Z]+)(/(flip|solution|predicates|enumerate))?/?$");
        std::smatch mt;
        if (!std::regex_match(path, mt, re)) return error_reply(404, "NotFound", "no route for " + path);
        std::string id = mt[1];
        std::string action = mt[3];
        auto s = find(id);
        if (!s) return error_reply(404, "UnknownSession", "no session " + id);
        std::lock_guard<std::mutex> lk(s->m);
        s->last = Clock::now();
        auto want = [&](const char* m) { return method == m; };
        if (action.empty() && want("GET")) return get(*s, id);
        if (action == "flip" && want("POST")) {
            auto f = query.find("full");
            return flip(*s, body, f != query.end() && (f->second == "1" || f->second == "true"));
        }
        if (action == "solution" && want("GET")) {
            auto f = query.find("format");
            return solution(*s, f == query.end() ? "json" : f->second);
        }
        if (action == "predicates" && want("POST")) return predicates(*s, body);
        if (action == "enumerate" && want("GET")) return enumerate_all(*s, query);
        return error_reply(405, "MethodNotAllowed", method + " " + path);
    }
};

NavService::NavService(ServiceOptions opt) : impl_(std::make_unique<Impl>()) {
    impl_->opt = opt;
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> q;
        for (const auto& [k, v] : req.params) q[k] = v;
        HttpReply r = handle(req.method, req.path, q, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    impl_->server.Get(".*", forward);
    impl_->server.Post(".*", forward);
    impl_->server.Put(".*", forward);
    impl_->server.Delete(".*", forward);
}

NavService::~NavService() { stop(); }

HttpReply NavService::handle(const std::string& method, const std::string& path,
                             const std::map<std::string, std::string>& query, const std::string& body) {
    try {
        return impl_->route(method, path, query, body);
    } catch (const Error& e) {
        return error_reply(500, e);
    } catch (const std::exception& e) {
        return error_reply(500, "Internal", e.what());
    }
}

int NavService::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool NavService::listen_after_bind() { return impl_->server.listen_after_bind(); }

bool NavService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

void NavService::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

void NavService::wait_until_ready() { impl_->server.wait_until_ready(); }

size_t NavService::session_count() {
    std::lock_guard<std::mutex> lk(impl_->m);
    return impl_->sessions.size();
}

size_t NavService::evict_idle() { return impl_->evict(); }

}  // namespace gcs
