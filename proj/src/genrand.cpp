#include "xworld/genrand.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

namespace xworld {

namespace {

using Rng = std::mt19937_64;

// Library distributions are implementation-defined; these are not, so reports
// stay byte-identical across standard libraries.
std::size_t pick(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

bool coin(Rng& rng, double p) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

template <typename T>
std::vector<T> sample_subset(Rng& rng, const std::vector<T>& from, double p) {
    std::vector<T> out;
    for (const auto& x : from)
        if (coin(rng, p)) out.push_back(x);
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Domain numeric_domain(std::size_t n) {
    Domain d;
    for (std::size_t i = 0; i < n; ++i) d.values.push_back(std::to_string(i));
    return d;
}

std::vector<Rational> random_marginal(Rng& rng, std::size_t n, std::uint32_t max_weight) {
    std::vector<std::uint32_t> w(n);
    for (auto& x : w) x = 1 + static_cast<std::uint32_t>(pick(rng, max_weight));
    const std::uint32_t total = std::accumulate(w.begin(), w.end(), 0u);
    std::vector<Rational> out;
    for (auto x : w) out.emplace_back(x, total);
    return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index));
}

void check_config(const GenConfig& cfg) {
    if (cfg.n_endogenous < 2 || cfg.n_endogenous > 6) throw std::invalid_argument("infeasible config: n_endogenous must be in 2..6");
    if (cfg.max_parents < 1 || cfg.max_parents > 3) throw std::invalid_argument("infeasible config: max_parents must be in 1..3");
    if (cfg.domain_size < 2) throw std::invalid_argument("infeasible config: domain_size must be at least 2");
    if (cfg.max_weight < 1) throw std::invalid_argument("infeasible config: max_weight must be at least 1");
    if (!(cfg.confounder_probability >= 0.0 && cfg.confounder_probability <= 1.0))
        throw std::invalid_argument("infeasible config: confounder_probability must be in [0, 1]");
    // Dedicated exogenous parents alone must fit under the cap.
    long double states = 1;
    for (std::size_t i = 0; i < cfg.n_endogenous; ++i) states *= static_cast<long double>(cfg.domain_size);
    if (states > static_cast<long double>(cfg.cap))
        throw std::invalid_argument("infeasible config: exogenous state space exceeds the enumeration cap");
}

Model random_scm(const GenConfig& cfg) {
    check_config(cfg);
    Rng rng(cfg.seed);
    const std::size_t n = cfg.n_endogenous;
    const Domain dom = numeric_domain(cfg.domain_size);
    auto vname = [](std::size_t i) { return "V" + std::to_string(i + 1); };

    ModelSpec spec;
    std::vector<std::vector<std::string>> parents(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = pick(rng, std::min(cfg.max_parents, j) + 1);
        std::vector<std::size_t> pool(j);
        std::iota(pool.begin(), pool.end(), 0);
        std::vector<std::size_t> chosen;
        for (std::size_t c = 0; c < k; ++c) {
            auto at = pick(rng, pool.size());
            chosen.push_back(pool[at]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at));
        }
        std::sort(chosen.begin(), chosen.end());
        for (auto p : chosen) parents[j].push_back(vname(p));
    }
    long double states = 1;
    for (std::size_t j = 0; j < n; ++j) {
        spec.exogenous.push_back({"U_" + vname(j), dom, random_marginal(rng, dom.size(), cfg.max_weight)});
        parents[j].push_back("U_" + vname(j));
        states *= static_cast<long double>(dom.size());
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!coin(rng, cfg.confounder_probability)) continue;
            if (states * static_cast<long double>(dom.size()) > static_cast<long double>(cfg.cap)) continue;
            states *= static_cast<long double>(dom.size());
            const std::string u = "U_" + vname(i) + "_" + vname(j);
            spec.exogenous.push_back({u, dom, random_marginal(rng, dom.size(), cfg.max_weight)});
            parents[i].push_back(u);
            parents[j].push_back(u);
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        EndogenousSpec x{vname(j), dom, parents[j], {}};
        std::size_t rows = 1;
        for (std::size_t p = 0; p < parents[j].size(); ++p) rows *= dom.size();
        for (std::size_t r = 0; r < rows; ++r) x.table.push_back(pick(rng, dom.size()));
        spec.endogenous.push_back(std::move(x));
    }
    return Model::from_spec(std::move(spec));
}

std::string_view to_string(AdjustStatus s) {
    switch (s) {
        case AdjustStatus::not_applicable: return "n/a";
        case AdjustStatus::estimated: return "estimated";
        case AdjustStatus::inadmissible: return "inadmissible";
        case AdjustStatus::positivity_violation: return "positivity-violation";
        case AdjustStatus::zero_evidence: return "zero-evidence";
    }
    return "?";
}

TrialSummary& TrialSummary::operator+=(const TrialSummary& o) {
    trials += o.trials;
    queries += o.queries;
    teleporter_unsound += o.teleporter_unsound;
    twin_unsound += o.twin_unsound;
    dominance_violations += o.dominance_violations;
    teleporter_only += o.teleporter_only;
    adjustments += o.adjustments;
    adjustment_mismatches += o.adjustment_mismatches;
    inadmissible += o.inadmissible;
    positivity_violations += o.positivity_violations;
    duplicate_set_failures += o.duplicate_set_failures;
    semantic_failures += o.semantic_failures;
    consistency_failures += o.consistency_failures;
    return *this;
}

namespace {

bool check_semantics(const Model& model, const Intervention& iv, const CrossWorldGraph& twin,
                     const CrossWorldGraph& tele, std::uint64_t cap) {
    const Model mutilated = intervene(model, iv);
    const CrossWorldModel twin_exec(model, twin);
    const CrossWorldModel tele_exec(model, tele);
    bool ok = true;
    auto agrees = [&](const CrossWorldGraph& g, const std::vector<ValueIndex>& got, const std::vector<ValueIndex>& real,
                      const std::vector<ValueIndex>& cf) {
        for (NodeIndex n = 0; n < g.graph.size(); ++n) {
            const auto& info = g.roles.at(g.graph.node(n).name);
            const VarIndex b = model.index_of(info.base);
            switch (info.role) {
                case NodeRole::counterfactual_duplicate:
                    if (got[n] != cf[b]) return false;
                    break;
                case NodeRole::teleporter:
                    if (got[n] != real[b] || got[n] != cf[b]) return false;
                    break;
                default:
                    if (got[n] != real[b]) return false;
            }
        }
        return true;
    };
    for_each_exogenous_state(
        model,
        [&](std::span<const ValueIndex> u, const Rational&) {
            if (!ok) return;
            const auto real = model.solve(u);
            const auto cf = mutilated.solve(u);
            ok = agrees(twin, twin_exec.evaluate(u), real, cf) && agrees(tele, tele_exec.evaluate(u), real, cf);
        },
        cap);
    return ok;
}

nlohmann::ordered_json assignment_json(const Assignment& a) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : a) j[k] = v;
    return j;
}

}  // namespace

TrialReport run_trial(const Model& model, const Intervention& iv, std::span<const TrialQuery> queries,
                      std::uint64_t cap) {
    TrialReport rep;
    rep.intervention = iv;
    const auto twin = build_twin(model, iv);
    const auto tele = build_teleporter(model, iv);
    rep.duplicates = tele.duplicates();

    const auto [x, _] = check_intervention(model, iv);
    std::set<std::string> expected;
    for (auto d : model_descendants(model, x)) expected.insert(counterfactual_name(model.name(d), iv));
    rep.duplicates_exact = std::set<std::string>(rep.duplicates.begin(), rep.duplicates.end()) == expected;
    rep.semantic_agreement = check_semantics(model, iv, twin, tele, cap);
    rep.consistency = consistency_check(model, iv, cap);

    auto& s = rep.summary;
    s.trials = 1;
    s.duplicate_set_failures = rep.duplicates_exact ? 0 : 1;
    s.semantic_failures = rep.semantic_agreement ? 0 : 1;
    s.consistency_failures = rep.consistency ? 0 : 1;

    auto nodes_in = [&](const CrossWorldGraph& g, const std::vector<std::string>& toks) {
        std::vector<std::string> out;
        for (const auto& t : toks) out.push_back(resolve_node(model, g, t));
        return out;
    };
    for (const auto& q : queries) {
        QueryRecord r;
        r.query = q;
        r.twin_separated =
            d_separated(twin.graph, resolve_node(model, twin, q.a), resolve_node(model, twin, q.b), nodes_in(twin, q.cond))
                .separated;
        r.teleporter_separated =
            d_separated(tele.graph, resolve_node(model, tele, q.a), resolve_node(model, tele, q.b), nodes_in(tele, q.cond))
                .separated;
        std::vector<std::string> cols{q.a, q.b};
        cols.insert(cols.end(), q.cond.begin(), q.cond.end());
        const auto joint = crossworld_joint(model, iv, cols, cap);
        std::vector<std::string> cond_labels(joint.variables().begin() + 2, joint.variables().end());
        r.oracle_ci = check_ci_numeric(joint, joint.variables()[0], joint.variables()[1], cond_labels);

        ++s.queries;
        if (r.teleporter_separated && !r.oracle_ci) ++s.teleporter_unsound;
        if (r.twin_separated && !r.oracle_ci) ++s.twin_unsound;
        if (r.twin_separated && !r.teleporter_separated) ++s.dominance_violations;
        if (!r.twin_separated && r.teleporter_separated) ++s.teleporter_only;

        if (q.adjustment) {
            const auto& adj = *q.adjustment;
            const Target target{q.b, adj.target_value};
            std::vector<std::string> ev_vars;
            for (const auto& [k, _] : adj.evidence) ev_vars.push_back(k);
            try {
                if (!counterfactual_criterion(model, iv, q.b, ev_vars, adj.adjust).satisfied) {
                    r.adjust_status = AdjustStatus::inadmissible;
                    ++s.inadmissible;
                } else {
                    r.estimate = adjustment_estimate(model, iv, target, adj.evidence, adj.adjust, cap);
                    r.oracle = abduction_action_prediction(model, iv, target, adj.evidence, cap);
                    r.delta = *r.estimate - *r.oracle;
                    r.adjust_status = AdjustStatus::estimated;
                    ++s.adjustments;
                    if (*r.delta != 0) ++s.adjustment_mismatches;
                }
            } catch (const InferenceError& e) {
                r.note = e.what();
                if (r.note.rfind("positivity violation", 0) == 0) {
                    r.adjust_status = AdjustStatus::positivity_violation;
                    ++s.positivity_violations;
                } else {
                    r.adjust_status = AdjustStatus::zero_evidence;
                }
            }
        }
        rep.records.push_back(std::move(r));
    }
    return rep;
}

TrialReport soundness_trial(const GenConfig& cfg, std::size_t n_queries) {
    const Model model = random_scm(cfg);
    Rng rng(derive_seed(cfg.seed, 0x51ab));

    const std::size_t ne = model.exogenous_count();
    std::vector<VarIndex> endo;
    for (VarIndex v = ne; v < model.size(); ++v) endo.push_back(v);
    std::vector<VarIndex> with_desc;
    for (auto v : endo)
        if (!model_descendants(model, v).empty()) with_desc.push_back(v);
    const VarIndex x = with_desc.empty() ? endo[pick(rng, endo.size())] : with_desc[pick(rng, with_desc.size())];
    const Intervention iv{model.name(x), model.domain(x).values[pick(rng, model.domain(x).size())]};
    const auto desc = model_descendants(model, x);

    std::vector<TrialQuery> queries;
    for (std::size_t k = 0; k < n_queries; ++k) {
        TrialQuery q;
        const bool adjustment_style = !desc.empty() && coin(rng, 0.5);
        VarIndex yb;
        if (!desc.empty() && (adjustment_style || coin(rng, 0.8))) {
            yb = desc[pick(rng, desc.size())];
        } else {
            std::vector<VarIndex> others;
            for (auto v : endo)
                if (v != x) others.push_back(v);
            yb = others[pick(rng, others.size())];
        }
        VarIndex xa = x;
        if (!adjustment_style && coin(rng, 0.4)) {
            std::vector<VarIndex> others;
            for (auto v : endo)
                if (v != yb) others.push_back(v);
            xa = others[pick(rng, others.size())];
        }
        q.a = model.name(xa);
        q.b = counterfactual_name(model.name(yb), iv);

        std::vector<std::string> pool;
        for (auto v : endo)
            if (v != xa && v != yb) pool.push_back(model.name(v));
        if (!adjustment_style)
            for (auto d : desc)
                if (d != xa && d != yb) pool.push_back(counterfactual_name(model.name(d), iv));
        q.cond = sample_subset(rng, pool, 0.3);

        if (adjustment_style) {
            AdjustQuery adj;
            // Evidence values come from a solved exogenous state so P(e) > 0.
            std::vector<ValueIndex> u(ne);
            for (VarIndex i = 0; i < ne; ++i) u[i] = pick(rng, model.domain(i).size());
            const auto state = model.solve(u);
            for (const auto& c : q.cond) {
                if (coin(rng, 0.5)) {
                    const auto v = model.index_of(c);
                    adj.evidence[c] = model.domain(v).values[state[v]];
                } else {
                    adj.adjust.push_back(c);
                }
            }
            adj.target_value = model.domain(yb).values[pick(rng, model.domain(yb).size())];
            q.adjustment = std::move(adj);
        }
        queries.push_back(std::move(q));
    }
    auto rep = run_trial(model, iv, queries, cfg.cap);
    rep.seed = cfg.seed;
    return rep;
}

std::string TrialReport::to_jsonl() const {
    using oj = nlohmann::ordered_json;
    std::string out;
    oj head;
    head["trial"] = index;
    head["seed"] = seed;
    head["intervention"] = intervention.to_string();
    head["duplicates"] = duplicates;
    head["duplicates_exact"] = duplicates_exact;
    head["semantic_agreement"] = semantic_agreement;
    head["consistency"] = consistency;
    out += head.dump() + "\n";
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        oj j;
        j["trial"] = index;
        j["query"] = k;
        j["a"] = r.query.a;
        j["b"] = r.query.b;
        j["cond"] = r.query.cond;
        j["twin"] = r.twin_separated ? "separated" : "connected";
        j["teleporter"] = r.teleporter_separated ? "separated" : "connected";
        j["oracle_ci"] = r.oracle_ci;
        if (r.query.adjustment) {
            oj a;
            a["status"] = std::string(to_string(r.adjust_status));
            a["evidence"] = assignment_json(r.query.adjustment->evidence);
            a["adjust"] = r.query.adjustment->adjust;
            a["target_value"] = r.query.adjustment->target_value;
            if (r.estimate) a["estimate"] = to_string(*r.estimate);
            if (r.oracle) a["oracle"] = to_string(*r.oracle);
            if (r.delta) a["delta"] = to_string(*r.delta);
            if (!r.note.empty()) a["note"] = r.note;
            j["adjustment"] = std::move(a);
        }
        out += j.dump() + "\n";
    }
    return out;
}

std::string BatchReport::to_jsonl() const {
    std::string out;
    for (const auto& t : trials) out += t.to_jsonl();
    nlohmann::ordered_json s;
    s["summary"] = {
        {"trials", total.trials},
        {"queries", total.queries},
        {"teleporter_unsound", total.teleporter_unsound},
        {"twin_unsound", total.twin_unsound},
        {"dominance_violations", total.dominance_violations},
        {"teleporter_only", total.teleporter_only},
        {"adjustments", total.adjustments},
        {"adjustment_mismatches", total.adjustment_mismatches},
        {"inadmissible", total.inadmissible},
        {"positivity_violations", total.positivity_violations},
        {"duplicate_set_failures", total.duplicate_set_failures},
        {"semantic_failures", total.semantic_failures},
        {"consistency_failures", total.consistency_failures},
    };
    out += s.dump() + "\n";
    return out;
}

BatchReport run_trials(const GenConfig& base, std::size_t n_trials, std::size_t n_queries, unsigned threads) {
    check_config(base);
    BatchReport batch;
    batch.trials.resize(n_trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (std::size_t i = next++; i < n_trials; i = next++) {
                GenConfig cfg = base;
                cfg.seed = derive_seed(base.seed, i);
                auto rep = soundness_trial(cfg, n_queries);
                rep.index = i;
                batch.trials[i] = std::move(rep);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n_trials;
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (const auto& t : batch.trials) batch.total += t.summary;
    return batch;
}

}  // namespace xworld
