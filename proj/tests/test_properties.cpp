#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "xworld/genrand.hpp"
#include "xworld/inference.hpp"

using namespace xworld;

namespace {

GenConfig config(std::uint64_t seed, std::size_t n) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.n_endogenous = n;
    cfg.max_parents = 1 + seed % 3;
    return cfg;
}

std::vector<std::string> endogenous_names(const Model& m) {
    std::vector<std::string> out;
    for (VarIndex v = m.exogenous_count(); v < m.size(); ++v) out.push_back(m.name(v));
    return out;
}

}  // namespace

TEST_CASE("d-separation is symmetric") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 3 + t % 6;
        const auto g = oracle::random_dag(rng, n, 0.4);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        const auto a = pick(rng);
        const auto b = (a + 1 + pick(rng) % (n - 1)) % n;
        std::vector<std::string> cond;
        for (std::size_t v = 0; v < n; ++v)
            if (v != a && v != b && rng() % 3 == 0) cond.push_back(g.node(v).name);
        CHECK(d_separated(g, g.node(a).name, g.node(b).name, cond).separated ==
              d_separated(g, g.node(b).name, g.node(a).name, cond).separated);
    }
}

TEST_CASE("removing an edge never connects a separated pair") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 3 + t % 6;
        auto g = oracle::random_dag(rng, n, 0.4);
        if (g.edge_count() == 0) continue;
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        const auto a = pick(rng);
        const auto b = (a + 1 + pick(rng) % (n - 1)) % n;
        std::vector<std::string> cond;
        for (std::size_t v = 0; v < n; ++v)
            if (v != a && v != b && rng() % 3 == 0) cond.push_back(g.node(v).name);
        const bool before = d_separated(g, g.node(a).name, g.node(b).name, cond).separated;
        const auto [f, to] = g.edges()[rng() % g.edge_count()];
        g.remove_edge(f, to);
        const bool after = d_separated(g, g.node(a).name, g.node(b).name, cond).separated;
        if (before) CHECK(after);
    }
}

TEST_CASE("back-door admissible sets separate X from Y_x in the teleporter graph") {
    std::size_t admissible = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Model m = random_scm(config(seed, 2 + seed % 4));
        const auto base = graph_of(m);
        const auto names = endogenous_names(m);
        for (const auto& x : names) {
            const auto xi = m.index_of(x);
            const auto desc = model_descendants(m, xi);
            if (desc.empty()) continue;
            const Intervention iv{x, "1"};
            const auto tele = build_teleporter(m, iv);
            for (auto yi : desc) {
                const auto& y = m.name(yi);
                std::vector<std::string> pool;
                for (const auto& n : names)
                    if (n != x && n != y) pool.push_back(n);
                for (unsigned mask = 0; mask < (1u << pool.size()); ++mask) {
                    std::vector<std::string> z;
                    for (std::size_t i = 0; i < pool.size(); ++i)
                        if (mask & (1u << i)) z.push_back(pool[i]);
                    if (!backdoor_admissible(base, x, y, z)) continue;
                    ++admissible;
                    CHECK(d_separated(tele.graph, x, counterfactual_name(y, iv), z).separated);
                }
            }
        }
    }
    CHECK(admissible > 100);
}

TEST_CASE("teleporter duplicates are exactly the descendants of the target") {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const Model m = random_scm(config(seed, 2 + seed % 5));
        for (const auto& x : endogenous_names(m)) {
            const Intervention iv{x, "0"};
            const auto tele = build_teleporter(m, iv);
            std::set<std::string> expected;
            for (const auto& d : descendants(graph_of(m), x)) expected.insert(counterfactual_name(d, iv));
            const auto dups = tele.duplicates();
            CHECK(std::set<std::string>(dups.begin(), dups.end()) == expected);
            const auto tp = find_teleporters(m, iv);
            for (const auto& t : tp.endogenous) CHECK_FALSE(expected.count(counterfactual_name(t, iv)));
        }
    }
}

TEST_CASE("twin and teleporter executions agree with intervene plus solve") {
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        const Model m = random_scm(config(seed, 2 + seed % 4));
        const auto names = endogenous_names(m);
        const Intervention iv{names[seed % names.size()], "1"};
        const Model mx = intervene(m, iv);
        for (const auto& g : {build_twin(m, iv), build_teleporter(m, iv)}) {
            const CrossWorldModel cw(m, g);
            for_each_exogenous_state(m, [&](std::span<const ValueIndex> u, const Rational&) {
                const auto real = m.solve(u);
                const auto cf = mx.solve(u);
                const auto vals = cw.evaluate(u);
                for (NodeIndex i = 0; i < g.graph.size(); ++i) {
                    const auto& info = g.roles.at(g.graph.node(i).name);
                    const auto b = m.index_of(info.base);
                    const auto expected = info.role == NodeRole::counterfactual_duplicate ? cf[b] : real[b];
                    CHECK(vals[i] == expected);
                }
            });
        }
    }
}

TEST_CASE("twin separation implies teleporter separation, and both imply independence") {
    std::size_t queries = 0, gaps = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        GenConfig cfg = config(seed, 2 + seed % 4);
        const auto rep = soundness_trial(cfg, 3);
        queries += rep.summary.queries;
        gaps += rep.summary.teleporter_only;
        CHECK(rep.summary.dominance_violations == 0);
        CHECK(rep.summary.teleporter_unsound == 0);
        CHECK(rep.summary.twin_unsound == 0);
        CHECK(rep.summary.adjustment_mismatches == 0);
        CHECK(rep.duplicates_exact);
        CHECK(rep.semantic_agreement);
        CHECK(rep.consistency);
    }
    CHECK(queries == 600);
    CHECK(gaps > 0);
}

TEST_CASE("abduction equals the cross-world conditional on random models") {
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        const Model m = random_scm(config(seed, 3 + seed % 3));
        const auto names = endogenous_names(m);
        const Intervention iv{names[0], "1"};
        const auto& y = names.back();
        const auto& e = names[names.size() / 2];
        if (e == y) continue;
        const std::string yt = y + "@do(" + iv.to_string() + ")";
        const auto joint = crossworld_joint(m, iv, std::vector<std::string>{yt, e});
        for (const std::string ev : {"0", "1"}) {
            const Assignment evidence{{e, ev}};
            if (joint.probability(evidence) == 0) {
                CHECK_THROWS_AS(abduction_action_prediction(m, iv, {yt, "1"}, evidence), InferenceError);
                continue;
            }
            CHECK(abduction_action_prediction(m, iv, {yt, "1"}, evidence) ==
                  conditional(joint, {{joint.variables()[0], "1"}}, evidence));
        }
    }
}

TEST_CASE("consistency holds on random models") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Model m = random_scm(config(seed, 2 + seed % 5));
        for (const auto& x : endogenous_names(m))
            for (const std::string v : {"0", "1"}) CHECK(consistency_check(m, {x, v}));
    }
}

TEST_CASE("ten thousand seeds yield valid models") {
    std::size_t invalid = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        GenConfig cfg = config(seed, 2 + seed % 5);
        cfg.confounder_probability = (seed % 4) / 3.0;
        if (!validate(random_scm(cfg).spec()).ok()) ++invalid;
    }
    CHECK(invalid == 0);
}
