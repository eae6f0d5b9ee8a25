#include "xworld/cli.hpp"

#include "xworld/fixtures.hpp"
#include "xworld/genrand.hpp"
#include "xworld/inference.hpp"

#include <functional>
#include <iomanip>

namespace xworld::cli {

namespace {

struct Row {
    std::string scenario;
    std::string check;
    std::string expected;
    std::string actual;
};

std::string verdict(bool separated) { return separated ? "SEPARATED" : "CONNECTED"; }

std::string join(const std::vector<std::string>& v) {
    std::string out = "{";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out + "}";
}

class Runner {
 public:
    void add(std::string scenario, std::string check, std::string expected, const std::function<std::string()>& fn) {
        std::string actual;
        try {
            actual = fn();
        } catch (const std::exception& e) {
            actual = std::string("error: ") + e.what();
        }
        rows_.push_back({std::move(scenario), std::move(check), std::move(expected), std::move(actual)});
    }

    bool print(std::ostream& out) const {
        std::size_t w_check = 5, w_exp = 8;
        for (const auto& r : rows_) {
            w_check = std::max(w_check, r.check.size());
            w_exp = std::max(w_exp, r.expected.size());
        }
        out << std::left << std::setw(9) << "scenario" << std::setw(static_cast<int>(w_check) + 2) << "check"
            << std::setw(static_cast<int>(w_exp) + 2) << "expected" << "actual\n";
        std::size_t failed = 0;
        for (const auto& r : rows_) {
            const bool ok = r.expected == r.actual;
            failed += ok ? 0 : 1;
            out << std::left << std::setw(9) << r.scenario << std::setw(static_cast<int>(w_check) + 2) << r.check
                << std::setw(static_cast<int>(w_exp) + 2) << r.expected << r.actual << (ok ? "" : "  MISMATCH")
                << "\n";
        }
        out << rows_.size() - failed << "/" << rows_.size() << " scenario checks reproduced\n";
        return failed == 0;
    }

 private:
    std::vector<Row> rows_;
};

std::string dsep(const Model& m, const CrossWorldGraph& g, const std::string& a, const std::string& b,
                 const std::vector<std::string>& cond) {
    std::vector<std::string> nodes;
    for (const auto& c : cond) nodes.push_back(resolve_node(m, g, c));
    return verdict(d_separated(g.graph, resolve_node(m, g, a), resolve_node(m, g, b), nodes).separated);
}

std::string oracle_ci(const Model& m, const Intervention& iv, const std::string& a, const std::string& b,
                      const std::vector<std::string>& cond) {
    std::vector<std::string> cols{a, b};
    cols.insert(cols.end(), cond.begin(), cond.end());
    const auto joint = crossworld_joint(m, iv, cols);
    std::vector<std::string> labels(joint.variables().begin() + 2, joint.variables().end());
    return check_ci_numeric(joint, joint.variables()[0], joint.variables()[1], labels) ? "independent" : "dependent";
}

std::vector<std::string> with_role(const CrossWorldGraph& g, NodeRole role, bool exogenous) {
    std::vector<std::string> out;
    for (const auto& n : g.graph.nodes()) {
        const bool exo = n.kind == NodeKind::exogenous;
        if (exo == exogenous && g.roles.at(n.name).role == role) out.push_back(n.name);
    }
    return out;
}

// P(Y_x = 1 | e) by adjustment, abduction and enumeration; "a = b = c" when all agree.
std::string three_way(const Model& m, const Intervention& iv, const Assignment& ev,
                      const std::vector<std::string>& z) {
    const Target t{"Y_x", "1"};
    const auto adj = adjustment_estimate(m, iv, t, ev, z);
    const auto abd = abduction_action_prediction(m, iv, t, ev);
    std::vector<std::string> cols{"Y_x"};
    Assignment given;
    for (const auto& [k, v] : ev) cols.push_back(k);
    const auto joint = crossworld_joint(m, iv, cols);
    for (std::size_t i = 1; i < cols.size(); ++i) given[joint.variables()[i]] = ev.at(cols[i]);
    const auto orc = conditional(joint, {{joint.variables()[0], "1"}}, given);
    if (adj == abd && abd == orc) return "equal " + to_string(orc);
    return "adjust " + to_string(adj) + " abduction " + to_string(abd) + " oracle " + to_string(orc);
}

std::string criterion(const Model& m, const Intervention& iv, const std::vector<std::string>& ev,
                      const std::vector<std::string>& z) {
    const auto v = counterfactual_criterion(m, iv, "Y_x", ev, z);
    return v.satisfied ? "satisfied" : "unsatisfied";
}

}  // namespace

bool run_examples(std::ostream& out) {
    Runner run;

    {
        const Model m = fixture("fig1");
        const auto iv = fixture_intervention("fig1");
        const auto tele = build_teleporter(m, iv);
        run.add("fig1", "teleporters", "{Z}", [&] { return join(with_role(tele, NodeRole::teleporter, false)); });
        run.add("fig1", "removed exogenous", "{U_Z}", [&] { return join(tele.removed_exogenous); });
        run.add("fig1", "shared exogenous", "{U_Y}",
                [&] { return join(with_role(tele, NodeRole::shared_exogenous, true)); });
        run.add("fig1", "duplicates", "{Y_do_X=1}", [&] { return join(tele.duplicates()); });
        run.add("fig1", "consistency", "holds", [&] { return consistency_check(m, iv) ? "holds" : "fails"; });
    }

    {
        const Model m = fixture("fig2");
        const auto iv = fixture_intervention("fig2");
        const auto twin = build_twin(m, iv);
        const auto tele = build_teleporter(m, iv);
        run.add("fig2", "twin A,D_a|{B}", "CONNECTED", [&] { return dsep(m, twin, "A", "D_a", {"B"}); });
        run.add("fig2", "twin witness", "A <- C <- U -> C_do_A=1 -> B_do_A=1 -> D_do_A=1", [&] {
            const auto v = d_separated(twin.graph, "A", "D_do_A=1", {std::string("B")});
            return v.witness ? v.witness->to_string() : std::string("none");
        });
        run.add("fig2", "twin A,D_a|{C}", "SEPARATED", [&] { return dsep(m, twin, "A", "D_a", {"C"}); });
        run.add("fig2", "teleporter A,D_a|{B}", "SEPARATED", [&] { return dsep(m, tele, "A", "D_a", {"B"}); });
        run.add("fig2", "teleporter A,D_a|{C}", "SEPARATED", [&] { return dsep(m, tele, "A", "D_a", {"C"}); });
        run.add("fig2", "oracle A,D_a|{B}", "independent", [&] { return oracle_ci(m, iv, "A", "D_a", {"B"}); });
        run.add("fig2", "oracle A,D_a|{C}", "independent", [&] { return oracle_ci(m, iv, "A", "D_a", {"C"}); });
        run.add("fig2", "teleporter A,D_a|{D,C}", "CONNECTED",
                [&] { return dsep(m, tele, "A", "D_a", {"D", "C"}); });
        run.add("fig2", "teleporter A,D_a|{D,B}", "SEPARATED",
                [&] { return dsep(m, tele, "A", "D_a", {"D", "B"}); });
        run.add("fig2", "removed exogenous", "{U}", [&] { return join(tele.removed_exogenous); });
        run.add("fig2", "consistency", "holds", [&] { return consistency_check(m, iv) ? "holds" : "fails"; });
    }

    {
        const Model m = fixture("fig3");
        const auto iv = fixture_intervention("fig3");
        for (const std::string z : {"C", "Z", "T"}) {
            run.add("fig3", "criterion Z={" + z + "}", "satisfied", [&] { return criterion(m, iv, {}, {z}); });
            run.add("fig3", "P(Y_x=1) via {" + z + "}", "equal " + to_string(interventional(m, iv, {"Y", "1"})),
                    [&] { return three_way(m, iv, {}, {z}); });
        }
        run.add("fig3", "criterion Z={}", "unsatisfied", [&] { return criterion(m, iv, {}, {}); });
        run.add("fig3", "consistency", "holds", [&] { return consistency_check(m, iv) ? "holds" : "fails"; });
    }

    {
        const Model m = fixture("fig4");
        const auto iv = fixture_intervention("fig4");
        for (const std::string w : {"0", "1"}) {
            const Assignment ev{{"W", w}};
            for (const std::string z : {"T", "Z"}) {
                run.add("fig4", "W=" + w + " criterion Z={" + z + "}", "satisfied",
                        [&] { return criterion(m, iv, {"W"}, {z}); });
                run.add("fig4", "W=" + w + " adjust {" + z + "}", "equal", [&] {
                    const auto r = three_way(m, iv, ev, {z});
                    return r.rfind("equal ", 0) == 0 ? std::string("equal") : r;
                });
            }
            run.add("fig4", "W=" + w + " criterion Z={}", "unsatisfied", [&] { return criterion(m, iv, {"W"}, {}); });
            run.add("fig4", "W=" + w + " adjust {}", "inadmissible", [&] {
                try {
                    adjustment_estimate(m, iv, {"Y_x", "1"}, ev, {});
                    return std::string("estimated");
                } catch (const InferenceError& e) {
                    return std::string(e.what()).rfind("adjustment set not admissible", 0) == 0
                               ? std::string("inadmissible")
                               : std::string(e.what());
                }
            });
        }
        run.add("fig4", "consistency", "holds", [&] { return consistency_check(m, iv) ? "holds" : "fails"; });
    }

    {
        const Model m = fixture("fig5");
        const auto iv = fixture_intervention("fig5");
        const auto tele = build_teleporter(m, iv);
        run.add("fig5", "teleporter X,Y_x|{E}", "SEPARATED", [&] { return dsep(m, tele, "X", "Y_x", {"E"}); });
        run.add("fig5", "oracle X,Y_x|{E}", "independent", [&] { return oracle_ci(m, iv, "X", "Y_x", {"E"}); });
        for (const std::string xp : {"0", "1"}) {
            run.add("fig5", "environment sum X'=" + xp, "matches oracle", [&] {
                const auto r = environment_sum(m, iv, {{"X", xp}});
                return std::string(r.matches && r.certificate.separated ? "matches oracle" : "differs");
            });
        }
        run.add("fig5", "consistency", "holds", [&] { return consistency_check(m, iv) ? "holds" : "fails"; });
    }

    {
        // The firing-squad model injected as a soundness trial.
        const Model m = fixture("fig2");
        const auto iv = fixture_intervention("fig2");
        const std::vector<TrialQuery> q{{"A", "D_a", {"B"}, std::nullopt}};
        const auto rep = run_trial(m, iv, q);
        run.add("trial", "fig2 twin/teleporter/oracle", "CONNECTED/SEPARATED/independent", [&] {
            const auto& r = rep.records.at(0);
            return verdict(r.twin_separated) + "/" + verdict(r.teleporter_separated) + "/" +
                   (r.oracle_ci ? "independent" : "dependent");
        });
    }

    return run.print(out);
}

}  // namespace xworld::cli
