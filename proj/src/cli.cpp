#include "xworld/cli.hpp"

#include "xworld/dot.hpp"
#include "xworld/fixtures.hpp"
#include "xworld/genrand.hpp"
#include "xworld/inference.hpp"
#include "xworld/model_io.hpp"
#include "xworld/world.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace xworld::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<std::string> split_all(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& r : raw)
        for (auto& p : split_list(r)) out.push_back(std::move(p));
    return out;
}

// Splits "name=value" at the last '=' so counterfactual ids like Y_do_X=1=0 work.
std::pair<std::string, std::string> split_assignment(const std::string& s) {
    auto eq = s.rfind('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
        throw UsageError("expected NAME=VALUE, got '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot read model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A path on disk, or the name of a built-in fixture.
std::string model_text(const std::string& arg) {
    if (std::filesystem::exists(arg)) return read_file(arg);
    for (const auto& f : fixture_names())
        if (arg == f) return fixture_text(f);
    throw ModelError("no such model file or fixture: " + arg);
}

Model load(const std::string& arg) {
    return parse_model(model_text(arg));
}

ojson path_json(const std::optional<Path>& p) {
    if (!p) return nullptr;
    ojson j;
    j["nodes"] = p->nodes;
    auto& e = j["edges"] = ojson::array();
    for (auto d : p->edges) e.push_back(d == EdgeDir::forward ? "->" : "<-");
    j["text"] = p->to_string();
    return j;
}

std::string set_text(const std::vector<std::string>& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + s[i];
    return out + "}";
}

struct WorldChoice {
    std::string world;
    std::optional<Intervention> iv;
};

// Graph plus a token resolver for the chosen world.
struct ResolvedWorld {
    CausalGraph graph;
    std::optional<CrossWorldGraph> cross;
    std::function<std::string(const std::string&)> node;
};

ResolvedWorld resolve_world(const Model& model, const WorldChoice& w) {
    ResolvedWorld r;
    if (w.world == "real") {
        r.graph = graph_of(model);
        r.node = [&model](const std::string& t) { return model.name(model.index_of(t)); };
        return r;
    }
    if (!w.iv) throw UsageError("--world " + w.world + " requires --do X=x");
    if (w.world == "mutilated") {
        auto m = intervene(model, *w.iv);
        r.graph = graph_of(m);
        r.node = [&model](const std::string& t) { return model.name(model.index_of(t)); };
        return r;
    }
    r.cross = w.world == "twin" ? build_twin(model, *w.iv) : build_teleporter(model, *w.iv);
    r.graph = r.cross->graph;
    r.node = [&model, cw = *r.cross](const std::string& t) { return resolve_node(model, cw, t); };
    return r;
}

int cmd_validate(const std::string& file, bool json, std::ostream& out) {
    const auto spec = parse_model_spec(model_text(file));
    const auto report = validate(spec);
    if (json) {
        ojson j;
        j["valid"] = report.ok();
        j["violations"] = report.violations;
        out << j.dump(2) << "\n";
    } else if (report.ok()) {
        out << "valid: " << spec.exogenous.size() << " exogenous, " << spec.endogenous.size() << " endogenous\n";
    } else {
        for (const auto& v : report.violations) out << "violation: " << v << "\n";
    }
    return report.ok() ? 0 : 1;
}

int cmd_dsep(const std::string& file, const WorldChoice& w, const std::string& a, const std::string& b,
             const std::vector<std::string>& given, bool json, std::ostream& out) {
    const Model model = load(file);
    const auto world = resolve_world(model, w);
    const auto na = world.node(a);
    const auto nb = world.node(b);
    std::vector<std::string> cond;
    for (const auto& g : given) {
        auto n = world.node(g);
        if (n == na || n == nb) throw UsageError("--given contains an endpoint: " + g);
        cond.push_back(n);
    }
    if (na == nb) throw UsageError("endpoints resolve to the same node: " + na);
    const auto v = d_separated(world.graph, na, nb, cond);
    if (json) {
        ojson j;
        j["world"] = w.world;
        j["intervention"] = w.iv ? ojson(w.iv->to_string()) : ojson(nullptr);
        j["a"] = na;
        j["b"] = nb;
        j["given"] = cond;
        j["separated"] = v.separated;
        j["witness"] = path_json(v.witness);
        out << j.dump(2) << "\n";
    } else {
        out << (v.separated ? "SEPARATED" : "CONNECTED") << ": " << na << " , " << nb << " | " << set_text(cond)
            << " in the " << w.world << " graph\n";
        if (v.witness) out << "witness: " << v.witness->to_string() << "\n";
    }
    return 0;
}

ojson graph_json(const ResolvedWorld& world, const WorldChoice& w) {
    ojson j;
    j["world"] = w.world;
    j["intervention"] = w.iv ? ojson(w.iv->to_string()) : ojson(nullptr);
    auto& nodes = j["nodes"] = ojson::array();
    for (const auto& n : world.graph.nodes()) {
        ojson node;
        node["name"] = n.name;
        node["kind"] = std::string(to_string(n.kind));
        if (world.cross) {
            const auto& info = world.cross->roles.at(n.name);
            node["role"] = std::string(to_string(info.role));
            node["base"] = info.base;
        }
        nodes.push_back(std::move(node));
    }
    auto& edges = j["edges"] = ojson::array();
    for (const auto& [f, t] : world.graph.edges())
        edges.push_back(ojson::array({world.graph.node(f).name, world.graph.node(t).name}));
    if (world.cross) {
        j["removed_exogenous"] = world.cross->removed_exogenous;
        j["counterfactual_trivial"] = world.cross->counterfactual_trivial;
    }
    return j;
}

int cmd_build(const std::string& file, const WorldChoice& w, const std::string& emit,
              const std::vector<std::string>& given, const std::string& out_path, std::ostream& out) {
    const Model model = load(file);
    const auto world = resolve_world(model, w);
    std::vector<std::string> cond;
    for (const auto& g : given) cond.push_back(world.node(g));
    std::string text;
    if (emit == "dot") {
        const std::string name = w.world + (w.iv ? "_do_" + w.iv->to_string() : "");
        text = world.cross ? export_dot(*world.cross, cond, name) : export_dot(world.graph, cond, name);
    } else if (emit == "json") {
        text = graph_json(world, w).dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << w.world << " graph: " << world.graph.size() << " nodes, " << world.graph.edge_count() << " edges\n";
        if (world.cross) {
            std::vector<std::string> tele, dup;
            for (const auto& n : world.graph.nodes()) {
                auto r = world.cross->roles.at(n.name).role;
                if (r == NodeRole::teleporter) tele.push_back(n.name);
                if (r == NodeRole::counterfactual_duplicate) dup.push_back(n.name);
            }
            os << "duplicates: " << set_text(dup) << "\n";
            if (world.cross->method == WorldMethod::teleporter) {
                os << "teleporters: " << set_text(tele) << "\n";
                os << "removed exogenous: " << set_text(world.cross->removed_exogenous) << "\n";
            }
        }
        for (const auto& [f, t] : world.graph.edges())
            os << "  " << world.graph.node(f).name << " -> " << world.graph.node(t).name << "\n";
        text = os.str();
    }
    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream f(out_path);
        if (!f) throw Error("cannot write " + out_path);
        f << text;
    }
    return 0;
}

std::string decimal(const Rational& r) {
    std::ostringstream os;
    os << std::setprecision(10) << to_double(r);
    return os.str();
}

int cmd_query(const std::string& file, const Intervention& iv, const std::string& target_arg,
              const std::vector<std::string>& evidence_args, const std::string& method, bool check, bool json,
              std::ostream& out) {
    const Model model = load(file);
    auto [tvar, tval] = split_assignment(target_arg);
    const Target target{tvar, tval};
    Assignment evidence;
    for (const auto& e : evidence_args) {
        auto [k, v] = split_assignment(e);
        evidence[k] = v;
    }

    std::optional<std::vector<std::string>> adjust;
    if (method.rfind("adjust:", 0) == 0) {
        std::string rest = method.substr(7);
        if (rest == "∅" || rest == "{}" || rest == "-") rest.clear();
        adjust = split_list(rest);
    } else if (method != "enumerate" && method != "abduction") {
        throw UsageError("unknown --method '" + method + "', expected enumerate|abduction|adjust:Z,...");
    }

    auto enumerate = [&] {
        std::vector<std::string> cols{target.variable};
        for (const auto& [k, _] : evidence) cols.push_back(k);
        const auto joint = crossworld_joint(model, iv, cols);
        Assignment given;
        for (std::size_t i = 0; i < evidence.size(); ++i)
            given[joint.variables()[i + 1]] = std::next(evidence.begin(), static_cast<std::ptrdiff_t>(i))->second;
        return conditional(joint, {{joint.variables()[0], target.value}}, given);
    };
    auto abduction = [&] { return abduction_action_prediction(model, iv, target, evidence); };
    auto adjustment = [&] { return adjustment_estimate(model, iv, target, evidence, *adjust); };

    Rational result = adjust ? adjustment() : (method == "abduction" ? abduction() : enumerate());

    std::vector<std::pair<std::string, Rational>> checks;
    bool agree = true;
    if (check) {
        checks.emplace_back("enumerate", enumerate());
        checks.emplace_back("abduction", abduction());
        if (adjust) checks.emplace_back(method, adjustment());
        for (const auto& [_, v] : checks) agree = agree && v == result;
    }

    const auto y = resolve_crossworld(model, iv, target.variable);
    const std::string label = crossworld_label(model, iv, y);
    std::string given_text;
    for (const auto& [k, v] : evidence) given_text += (given_text.empty() ? "" : ", ") + k + "=" + v;
    if (json) {
        ojson j;
        j["intervention"] = iv.to_string();
        j["target"] = label;
        j["value"] = target.value;
        j["evidence"] = ojson::object();
        for (const auto& [k, v] : evidence) j["evidence"][k] = v;
        j["method"] = method;
        j["probability"] = to_string(result);
        j["decimal"] = to_double(result);
        if (check) {
            auto& c = j["check"] = ojson::object();
            for (const auto& [m, v] : checks) c[m] = to_string(v);
            j["agree"] = agree;
        }
        out << j.dump(2) << "\n";
    } else {
        out << "P(" << label << " = " << target.value << (given_text.empty() ? "" : " | " + given_text)
            << ") = " << to_string(result) << " ~ " << decimal(result) << "  [" << method << "]\n";
        for (const auto& [m, v] : checks) out << "  " << m << ": " << to_string(v) << "\n";
        if (check) out << (agree ? "all methods agree\n" : "METHODS DISAGREE\n");
    }
    return agree ? 0 : 1;
}

int cmd_compare(const std::string& file, const Intervention& iv, const std::vector<std::string>& endpoints,
                const std::vector<std::string>& given, bool json, std::ostream& out) {
    const Model model = load(file);
    const auto twin = build_twin(model, iv);
    const auto tele = build_teleporter(model, iv);

    std::vector<TrialQuery> queries;
    if (!endpoints.empty()) {
        if (endpoints.size() != 2) throw UsageError("compare takes zero or two endpoints");
        queries.push_back({endpoints[0], endpoints[1], given, std::nullopt});
    } else {
        const auto [x, _] = check_intervention(model, iv);
        for (auto d : model_descendants(model, x)) {
            const auto b = counterfactual_name(model.name(d), iv);
            queries.push_back({iv.target, b, {}, std::nullopt});
            for (VarIndex v = model.exogenous_count(); v < model.size(); ++v)
                if (v != x && v != d) queries.push_back({iv.target, b, {model.name(v)}, std::nullopt});
        }
    }
    for (const auto& q : queries)
        for (const auto& g : q.cond)
            if (g == q.a || g == q.b) throw UsageError("--given contains an endpoint: " + g);
    const auto rep = run_trial(model, iv, queries);

    auto verdict = [](bool s) { return s ? "separated" : "connected"; };
    if (json) {
        ojson j = ojson::array();
        for (const auto& r : rep.records) {
            ojson row;
            row["a"] = r.query.a;
            row["b"] = r.query.b;
            row["given"] = r.query.cond;
            row["twin"] = verdict(r.twin_separated);
            row["teleporter"] = verdict(r.teleporter_separated);
            row["oracle_ci"] = r.oracle_ci;
            j.push_back(std::move(row));
        }
        out << j.dump(2) << "\n";
    } else {
        out << std::left << std::setw(44) << "query" << std::setw(12) << "twin" << std::setw(12) << "teleporter"
            << "oracle\n";
        for (const auto& r : rep.records) {
            const std::string q = r.query.a + " , " + r.query.b + " | " + set_text(r.query.cond);
            out << std::left << std::setw(44) << q << std::setw(12) << verdict(r.twin_separated) << std::setw(12)
                << verdict(r.teleporter_separated) << (r.oracle_ci ? "independent" : "dependent") << "\n";
        }
    }
    return rep.summary.teleporter_unsound == 0 ? 0 : 1;
}

int cmd_trials(GenConfig cfg, std::size_t count, std::size_t queries, unsigned threads, const std::string& out_path,
               bool summary_only, std::ostream& out) {
    const auto batch = run_trials(cfg, count, queries, threads);
    std::string text = batch.to_jsonl();
    if (summary_only) text = text.substr(text.rfind('\n', text.size() - 2) + 1);
    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream f(out_path);
        if (!f) throw Error("cannot write " + out_path);
        f << text;
    }
    const auto& t = batch.total;
    const bool clean = t.teleporter_unsound == 0 && t.dominance_violations == 0 && t.adjustment_mismatches == 0 &&
                       t.duplicate_set_failures == 0 && t.semantic_failures == 0 && t.consistency_failures == 0;
    return clean ? 0 : 1;
}

int cmd_examples(const std::string& emit_dir, std::ostream& out) {
    if (!emit_dir.empty()) {
        std::filesystem::create_directories(emit_dir);
        for (const auto& f : fixture_names()) {
            const auto path = (std::filesystem::path(emit_dir) / (f + ".json")).string();
            std::ofstream o(path);
            if (!o) throw Error("cannot write " + path);
            o << fixture_text(f);
            out << "wrote " << path << "\n";
        }
        return 0;
    }
    return run_examples(out) ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact cross-world counterfactual graphs and queries over discrete SCMs", "xworld"};
    app.require_subcommand(1);

    std::string file, world = "teleporter", do_arg, emit = "text", out_path, target, method = "enumerate",
                                  emit_dir;
    std::vector<std::string> given_raw, evidence_raw, endpoints;
    bool json = false, check = false, summary_only = false;
    std::string a, b;

    auto* validate_cmd = app.add_subcommand("validate", "Check a model file against every structural invariant");
    validate_cmd->add_option("model", file, "Model file or fixture name")->required();
    validate_cmd->add_flag("--json", json, "Machine-readable output");

    auto* dsep_cmd = app.add_subcommand("dsep", "d-separation query in the real, twin or teleporter graph");
    dsep_cmd->add_option("model", file, "Model file or fixture name")->required();
    dsep_cmd->add_option("a", a, "First endpoint")->required();
    dsep_cmd->add_option("b", b, "Second endpoint")->required();
    dsep_cmd->add_option("--world", world, "real|mutilated|twin|teleporter")
        ->check(CLI::IsMember({"real", "mutilated", "twin", "teleporter"}));
    dsep_cmd->add_option("--do", do_arg, "Intervention X=x");
    dsep_cmd->add_option("--given", given_raw, "Conditioning set, comma separated");
    dsep_cmd->add_flag("--json", json, "Machine-readable output");

    auto* build_cmd = app.add_subcommand("build", "Construct a graph and print it");
    build_cmd->add_option("model", file, "Model file or fixture name")->required();
    build_cmd->add_option("--world", world, "real|mutilated|twin|teleporter")
        ->check(CLI::IsMember({"real", "mutilated", "twin", "teleporter"}));
    build_cmd->add_option("--do", do_arg, "Intervention X=x");
    build_cmd->add_option("--emit", emit, "text|dot|json")->check(CLI::IsMember({"text", "dot", "json"}));
    build_cmd->add_option("--given", given_raw, "Nodes to draw as conditioned (grey)");
    build_cmd->add_option("--out", out_path, "Write to a file instead of stdout");

    auto* query_cmd = app.add_subcommand("query", "Exact counterfactual probability P(Y_x = y | e)");
    query_cmd->add_option("model", file, "Model file or fixture name")->required();
    query_cmd->add_option("--do", do_arg, "Intervention X=x")->required();
    query_cmd->add_option("--target", target, "Counterfactual target, e.g. Y@do(X=1)=0")->required();
    query_cmd->add_option("--evidence", evidence_raw, "Real-world evidence E=e, comma separated");
    query_cmd->add_option("--method", method, "enumerate|abduction|adjust:Z1,Z2");
    query_cmd->add_flag("--check", check, "Run every applicable method and require agreement");
    query_cmd->add_flag("--json", json, "Machine-readable output");

    auto* compare_cmd = app.add_subcommand("compare", "Twin vs teleporter verdicts against the enumeration oracle");
    compare_cmd->add_option("model", file, "Model file or fixture name")->required();
    compare_cmd->add_option("endpoints", endpoints, "Optional endpoints A B");
    compare_cmd->add_option("--do", do_arg, "Intervention X=x")->required();
    compare_cmd->add_option("--given", given_raw, "Conditioning set, comma separated");
    compare_cmd->add_flag("--json", json, "Machine-readable output");

    GenConfig cfg;
    cfg.seed = 42;
    std::size_t count = 100, queries = 3;
    unsigned threads = 1;
    auto* trials_cmd = app.add_subcommand("trials", "Seeded soundness trials on random models (JSON lines)");
    trials_cmd->add_option("--seed", cfg.seed, "Base seed");
    trials_cmd->add_option("--count", count, "Number of random models");
    trials_cmd->add_option("--queries", queries, "Queries per model");
    trials_cmd->add_option("--n", cfg.n_endogenous, "Endogenous variables per model (2..6)");
    trials_cmd->add_option("--max-parents", cfg.max_parents, "Endogenous parents per node (1..3)");
    trials_cmd->add_option("--confounder-prob", cfg.confounder_probability, "Shared-exogenous probability per pair");
    trials_cmd->add_option("--threads", threads, "Worker threads");
    trials_cmd->add_option("--out", out_path, "Write the report to a file");
    trials_cmd->add_flag("--summary-only", summary_only, "Print only the summary line");

    auto* examples_cmd = app.add_subcommand("examples", "Reproduce every built-in scenario");
    examples_cmd->add_option("--emit-fixtures", emit_dir, "Write fixture model files to this directory");

    std::vector<const char*> argv{"xworld"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        WorldChoice w{world, std::nullopt};
        if (!do_arg.empty()) {
            try {
                w.iv = parse_intervention(do_arg);
            } catch (const QueryError& e) {
                throw UsageError(e.what());
            }
        }
        const auto given = split_all(given_raw);
        if (*validate_cmd) return cmd_validate(file, json, out);
        if (*dsep_cmd) return cmd_dsep(file, w, a, b, given, json, out);
        if (*build_cmd) return cmd_build(file, w, emit, given, out_path, out);
        if (*query_cmd) return cmd_query(file, *w.iv, target, split_all(evidence_raw), method, check, json, out);
        if (*compare_cmd) return cmd_compare(file, *w.iv, endpoints, given, json, out);
        if (*trials_cmd) {
            try {
                check_config(cfg);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            return cmd_trials(cfg, count, queries, threads, out_path, summary_only, out);
        }
        if (*examples_cmd) return cmd_examples(emit_dir, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace xworld::cli
