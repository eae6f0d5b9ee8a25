#include "xworld/inference.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace xworld {

namespace {

std::vector<VarIndex> real_evidence_vars(const Model& model, const Intervention& iv, const Assignment& evidence) {
    std::vector<VarIndex> out;
    for (const auto& [name, value] : evidence) {
        auto v = resolve_crossworld(model, iv, name);
        if (v.counterfactual) throw QueryError("evidence must be real-world: " + name);
        model.domain(v.base).require(value, model.name(v.base));
        out.push_back(v.base);
    }
    return out;
}

Assignment canonical_evidence(const Model& model, const Intervention& iv, const Assignment& evidence) {
    Assignment out;
    for (const auto& [name, value] : evidence) out[model.name(resolve_crossworld(model, iv, name).base)] = value;
    return out;
}

CrossWorldVar counterfactual_target(const Model& model, const Intervention& iv, std::string_view token) {
    auto v = resolve_crossworld(model, iv, token);
    if (!v.counterfactual) throw QueryError("target must be a counterfactual variable: " + std::string(token));
    if (model.is_exogenous(v.base)) throw QueryError("target must be endogenous: " + std::string(token));
    if (model.name(v.base) == iv.target)
        throw QueryError("target must differ from the intervened variable: " + std::string(token));
    return v;
}

std::string describe(const Assignment& a) {
    std::string s;
    for (const auto& [k, v] : a) s += (s.empty() ? "" : ",") + k + "=" + v;
    return s.empty() ? "{}" : s;
}

}  // namespace

JointTable crossworld_joint(const Model& model, const Intervention& iv, std::span<const std::string> vars,
                            std::uint64_t cap) {
    const Model mutilated = intervene(model, iv);
    std::vector<CrossWorldVar> cols;
    std::vector<std::string> names;
    std::vector<Domain> doms;
    for (const auto& tok : vars) {
        cols.push_back(resolve_crossworld(model, iv, tok));
        names.push_back(crossworld_label(model, iv, cols.back()));
        doms.push_back(model.domain(cols.back().base));
    }
    JointTable table(std::move(names), std::move(doms));
    const bool need_cf = std::any_of(cols.begin(), cols.end(), [](const auto& c) { return c.counterfactual; });
    JointTable::Tuple tuple(cols.size());
    for_each_exogenous_state(
        model,
        [&](std::span<const ValueIndex> u, const Rational& w) {
            const auto real = model.solve(u);
            std::vector<ValueIndex> cf;
            if (need_cf) cf = mutilated.solve(u);
            for (std::size_t i = 0; i < cols.size(); ++i)
                tuple[i] = cols[i].counterfactual ? cf[cols[i].base] : real[cols[i].base];
            table.add(tuple, w);
        },
        cap);
    return table;
}

Rational abduction_action_prediction(const Model& model, const Intervention& iv, const Target& target,
                                     const Assignment& evidence, std::uint64_t cap) {
    const auto y = counterfactual_target(model, iv, target.variable);
    const ValueIndex y_value = model.domain(y.base).require(target.value, model.name(y.base));
    const auto ev_vars = real_evidence_vars(model, iv, evidence);
    std::vector<ValueIndex> ev_values;
    for (std::size_t i = 0; i < ev_vars.size(); ++i) {
        auto it = std::next(evidence.begin(), static_cast<std::ptrdiff_t>(i));
        ev_values.push_back(model.domain(ev_vars[i]).require(it->second, model.name(ev_vars[i])));
    }

    // Abduction: P(u | e), kept as the consistent states and their prior weights.
    const std::size_t ne = model.exogenous_count();
    std::vector<std::uint32_t> states;
    std::vector<Rational> weights;
    Rational evidence_mass = 0;
    for_each_exogenous_state(
        model,
        [&](std::span<const ValueIndex> u, const Rational& w) {
            const auto real = model.solve(u);
            for (std::size_t i = 0; i < ev_vars.size(); ++i)
                if (real[ev_vars[i]] != ev_values[i]) return;
            states.insert(states.end(), u.begin(), u.end());
            weights.push_back(w);
            evidence_mass += w;
        },
        cap);
    if (evidence_mass == 0) throw InferenceError("evidence has zero probability: " + describe(evidence));

    // Action, then prediction in <M_x, P(u | e)>.
    const Model mutilated = intervene(model, iv);
    Rational hit = 0;
    std::vector<ValueIndex> u(ne);
    for (std::size_t k = 0; k < weights.size(); ++k) {
        std::copy_n(states.begin() + static_cast<std::ptrdiff_t>(k * ne), ne, u.begin());
        if (mutilated.solve(u)[y.base] == y_value) hit += weights[k];
    }
    return hit / evidence_mass;
}

bool check_ci_numeric(const JointTable& table, std::string_view a, std::string_view b,
                      std::span<const std::string> cond) {
    if (a == b) throw QueryError("independence endpoints must differ");
    std::vector<std::string> cols{std::string(a), std::string(b)};
    for (const auto& c : cond) {
        if (c == a || c == b) throw QueryError("endpoint in conditioning set: " + c);
        if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    }
    const auto m = table.marginalize(cols);
    using Key = std::vector<ValueIndex>;
    std::map<Key, Rational> pc;
    std::map<std::pair<ValueIndex, Key>, Rational> pac, pbc;
    std::map<std::tuple<ValueIndex, ValueIndex, Key>, Rational> pabc;
    for (const auto& [t, p] : m.rows()) {
        Key c(t.begin() + 2, t.end());
        pc[c] += p;
        pac[{t[0], c}] += p;
        pbc[{t[1], c}] += p;
        pabc[{t[0], t[1], c}] += p;
    }
    const auto na = m.domains()[0].size();
    const auto nb = m.domains()[1].size();
    auto get = [](const auto& map, const auto& key) {
        auto it = map.find(key);
        return it == map.end() ? Rational(0) : it->second;
    };
    for (const auto& [c, p] : pc) {
        for (ValueIndex i = 0; i < na; ++i) {
            const Rational pa = get(pac, std::pair{i, c});
            for (ValueIndex j = 0; j < nb; ++j) {
                // P(a,b|c) = P(a|c) P(b|c)  <=>  P(a,b,c) P(c) = P(a,c) P(b,c)
                if (get(pabc, std::tuple{i, j, c}) * p != pa * get(pbc, std::pair{j, c})) return false;
            }
        }
    }
    return true;
}

CriterionVerdict counterfactual_criterion(const Model& model, const Intervention& iv, std::string_view target,
                                          std::span<const std::string> evidence_vars,
                                          std::span<const std::string> adjust) {
    const auto y = counterfactual_target(model, iv, target);
    const auto cw = build_teleporter(model, iv);
    std::vector<std::string> sep;
    auto add_real = [&](const std::string& tok, const char* what) {
        auto v = resolve_crossworld(model, iv, tok);
        if (v.counterfactual) throw QueryError(std::string(what) + " must be real-world: " + tok);
        if (model.is_exogenous(v.base)) throw QueryError(std::string(what) + " must be observable: " + tok);
        if (model.name(v.base) == iv.target)
            throw QueryError(std::string(what) + " must not contain the intervened variable " + iv.target);
        const auto& n = model.name(v.base);
        if (std::find(sep.begin(), sep.end(), n) == sep.end()) sep.push_back(n);
    };
    for (const auto& e : evidence_vars) add_real(e, "evidence");
    for (const auto& z : adjust) add_real(z, "adjustment set");
    const auto y_node = *cw.counterfactual_node(model.name(y.base));
    if (std::find(sep.begin(), sep.end(), y_node) != sep.end())
        throw QueryError("conditioning set contains the target " + y_node);
    auto verdict = d_separated(cw.graph, iv.target, y_node, sep);
    return {verdict.separated, std::move(sep), std::move(verdict.witness)};
}

Rational conditional(const JointTable& table, const Assignment& event, const Assignment& given) {
    const Rational den = table.probability(given);
    if (den == 0) throw InferenceError("evidence has zero probability: " + describe(given));
    Assignment both = given;
    for (const auto& [k, v] : event) {
        auto [it, inserted] = both.emplace(k, v);
        if (!inserted && it->second != v) return 0;
    }
    return table.probability(both) / den;
}

Rational adjustment_estimate(const Model& model, const Intervention& iv, const Target& target,
                             const Assignment& evidence, std::span<const std::string> adjust, std::uint64_t cap) {
    const auto y = counterfactual_target(model, iv, target.variable);
    const auto& y_name = model.name(y.base);
    model.domain(y.base).require(target.value, y_name);
    const auto ev = canonical_evidence(model, iv, evidence);
    real_evidence_vars(model, iv, evidence);

    std::vector<std::string> cols{y_name, iv.target};
    auto add_col = [&](const std::string& n) {
        if (std::find(cols.begin(), cols.end(), n) == cols.end()) cols.push_back(n);
    };
    for (const auto& [k, _] : ev) add_col(k);

    const auto [x_index, _] = check_intervention(model, iv);
    const auto desc = model_descendants(model, x_index);
    if (std::find(desc.begin(), desc.end(), y.base) == desc.end()) {
        // Y is shared by both worlds.
        const auto joint = observational_joint(model, cols, cap);
        return conditional(joint, {{y_name, target.value}}, ev);
    }

    std::vector<std::string> ev_names;
    for (const auto& [k, _] : ev) ev_names.push_back(k);
    const auto verdict = counterfactual_criterion(model, iv, target.variable, ev_names, adjust);
    if (!verdict.satisfied)
        throw InferenceError("adjustment set not admissible: " + verdict.witness->to_string() + " is open");

    std::vector<std::string> z_names;
    for (const auto& z : adjust) {
        auto n = model.name(resolve_crossworld(model, iv, z).base);
        if (std::find(z_names.begin(), z_names.end(), n) == z_names.end()) z_names.push_back(n);
        add_col(n);
    }
    const auto joint = observational_joint(model, cols, cap);
    const Rational p_e = joint.probability(ev);
    if (p_e == 0) throw InferenceError("evidence has zero probability: " + describe(ev));

    // Iterate over the Z-slices that carry mass together with e.
    std::set<std::vector<ValueIndex>> slices;
    std::vector<std::size_t> z_cols;
    for (const auto& z : z_names) z_cols.push_back(joint.column(z));
    for (const auto& [t, p] : joint.rows()) {
        bool matches_e = true;
        for (const auto& [k, v] : ev)
            if (joint.domains()[joint.column(k)].values[t[joint.column(k)]] != v) matches_e = false;
        if (!matches_e) continue;
        std::vector<ValueIndex> z;
        for (auto c : z_cols) z.push_back(t[c]);
        slices.insert(z);
    }

    Rational sum = 0;
    for (const auto& z : slices) {
        Assignment ze = ev;
        for (std::size_t i = 0; i < z_names.size(); ++i) ze[z_names[i]] = joint.domains()[z_cols[i]].values[z[i]];
        const Rational p_ze = joint.probability(ze);
        if (p_ze == 0) continue;
        Assignment xze = ze;
        auto [it, inserted] = xze.emplace(iv.target, iv.value);
        const Rational p_xze = (!inserted && it->second != iv.value) ? Rational(0) : joint.probability(xze);
        if (p_xze == 0) {
            Assignment slice;
            for (std::size_t i = 0; i < z_names.size(); ++i) slice[z_names[i]] = ze[z_names[i]];
            throw InferenceError("positivity violation at slice " + describe(slice) + " (P(" + iv.to_string() +
                                 ", z, e) = 0)");
        }
        Assignment yxze = xze;
        auto [yit, yins] = yxze.emplace(y_name, target.value);
        const Rational p_yxze = (!yins && yit->second != target.value) ? Rational(0) : joint.probability(yxze);
        sum += (p_yxze / p_xze) * (p_ze / p_e);
    }
    return sum;
}

bool consistency_check(const Model& model, const Intervention& iv, std::uint64_t cap) {
    const auto [x, value] = check_intervention(model, iv);
    const Model mutilated = intervene(model, iv);
    bool ok = true;
    for_each_exogenous_state(
        model,
        [&](std::span<const ValueIndex> u, const Rational&) {
            if (!ok) return;
            const auto real = model.solve(u);
            if (real[x] != value) return;
            if (mutilated.solve(u) != real) ok = false;
        },
        cap);
    return ok;
}

Rational interventional(const Model& model, const Intervention& iv, const Target& target, std::uint64_t cap) {
    const Model mutilated = intervene(model, iv);
    const VarIndex y = model.index_of(target.variable);
    const ValueIndex yv = model.domain(y).require(target.value, target.variable);
    Rational p = 0;
    for_each_exogenous_state(
        mutilated,
        [&](std::span<const ValueIndex> u, const Rational& w) {
            if (mutilated.solve(u)[y] == yv) p += w;
        },
        cap);
    return p;
}

EnvironmentSumResult environment_sum(const Model& model, const Intervention& iv, const Assignment& x_prime,
                                  std::string_view environment, std::string_view outcome, std::uint64_t cap) {
    const auto [x, _] = check_intervention(model, iv);
    auto mismatch = [](const std::string& why) { return InferenceError("fixture shape mismatch: " + why); };
    if (x_prime.size() != 1 || x_prime.begin()->first != iv.target)
        throw mismatch("x' must assign exactly the intervened variable " + iv.target);
    const std::string& xp = x_prime.begin()->second;
    model.domain(x).require(xp, iv.target);
    const auto e = model.find(environment);
    const auto y = model.find(outcome);
    if (!e || !y || model.is_exogenous(*e) || model.is_exogenous(*y))
        throw mismatch("model needs endogenous " + std::string(environment) + " and " + std::string(outcome));
    const auto desc = model_descendants(model, x);
    auto is_desc = [&](VarIndex v) { return std::find(desc.begin(), desc.end(), v) != desc.end(); };
    if (*e == x || is_desc(*e)) throw mismatch(std::string(environment) + " must not depend on " + iv.target);
    if (!is_desc(*y)) throw mismatch(std::string(outcome) + " must be a descendant of " + iv.target);

    EnvironmentSumResult r{JointTable({}, {}), JointTable({}, {}), false, {}, 0};
    const auto cw = build_teleporter(model, iv);
    const auto y_node = *cw.counterfactual_node(outcome);
    r.certificate = d_separated(cw.graph, iv.target, y_node, {std::string(environment)});
    if (!r.certificate.separated)
        throw mismatch(iv.target + " and " + y_node + " are not separated by " + std::string(environment));

    const std::vector<std::string> cols{iv.target, std::string(environment), std::string(outcome)};
    const auto joint = observational_joint(model, cols, cap);
    const Rational p_xp = joint.probability({{iv.target, xp}});
    if (p_xp == 0) throw InferenceError("evidence has zero probability: " + iv.target + "=" + xp);

    const std::string env(environment);
    const std::string out(outcome);
    r.formula = JointTable({y_node}, {model.domain(*y)});
    std::vector<Rational> acc(model.domain(*y).size(), Rational(0));
    for (const auto& ev : model.domain(*e).values) {
        const Rational p_e_given_xp = joint.probability({{iv.target, xp}, {env, ev}}) / p_xp;
        if (p_e_given_xp == 0) continue;
        ++r.terms;
        const Rational p_xe = joint.probability({{iv.target, iv.value}, {env, ev}});
        if (p_xe == 0)
            throw InferenceError("positivity violation at slice " + env + "=" + ev + " (P(" + iv.to_string() + ", " +
                                 env + "=" + ev + ") = 0)");
        for (ValueIndex yi = 0; yi < acc.size(); ++yi) {
            const auto& yv = model.domain(*y).values[yi];
            acc[yi] += joint.probability({{iv.target, iv.value}, {env, ev}, {out, yv}}) / p_xe * p_e_given_xp;
        }
    }
    for (ValueIndex yi = 0; yi < acc.size(); ++yi) r.formula.add({yi}, acc[yi]);

    const std::vector<std::string> oracle_cols{iv.target, y_node};
    const auto cf = crossworld_joint(model, iv, oracle_cols, cap);
    r.oracle = JointTable({y_node}, {model.domain(*y)});
    for (ValueIndex yi = 0; yi < acc.size(); ++yi)
        r.oracle.add({yi}, conditional(cf, {{y_node, model.domain(*y).values[yi]}}, {{iv.target, xp}}));
    r.matches = r.formula == r.oracle;
    return r;
}

}  // namespace xworld
