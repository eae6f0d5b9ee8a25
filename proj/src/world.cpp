#include "xworld/world.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace xworld {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Intervention parse_intervention(std::string_view text) {
    auto eq = text.find('=');
    if (eq == std::string_view::npos || text.find('=', eq + 1) != std::string_view::npos)
        throw QueryError("malformed intervention '" + std::string(text) + "', expected X=x");
    const auto target = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    if (target.empty() || value.empty())
        throw QueryError("malformed intervention '" + std::string(text) + "', expected X=x");
    return {std::string(target), std::string(value)};
}

std::pair<VarIndex, ValueIndex> check_intervention(const Model& model, const Intervention& iv) {
    const VarIndex t = model.index_of(iv.target);
    if (model.is_exogenous(t)) throw QueryError("cannot intervene on exogenous variable: " + iv.target);
    return {t, model.domain(t).require(iv.value, iv.target)};
}

Model intervene(const Model& model, const Intervention& iv) {
    auto [t, v] = check_intervention(model, iv);
    return model.with_constant(t, v);
}

std::string counterfactual_name(std::string_view base, const Intervention& iv) {
    return std::string(base) + "_do_" + iv.target + "=" + iv.value;
}

std::string_view to_string(WorldMethod m) {
    return m == WorldMethod::twin ? "twin" : "teleporter";
}

std::string_view to_string(NodeRole r) {
    switch (r) {
        case NodeRole::real: return "real";
        case NodeRole::counterfactual_duplicate: return "counterfactual-duplicate";
        case NodeRole::teleporter: return "teleporter";
        case NodeRole::shared_exogenous: return "shared-exogenous";
        case NodeRole::real_only_exogenous: return "real-only-exogenous";
    }
    return "?";
}

std::optional<std::string> CrossWorldGraph::counterfactual_node(std::string_view base) const {
    auto dup = counterfactual_name(base, intervention);
    if (graph.find(dup)) return dup;
    return real_node(base);
}

std::optional<std::string> CrossWorldGraph::real_node(std::string_view base) const {
    if (graph.find(base)) return std::string(base);
    return std::nullopt;
}

std::vector<std::string> CrossWorldGraph::duplicates() const {
    std::vector<std::string> out;
    for (const auto& n : graph.nodes())
        if (roles.at(n.name).role == NodeRole::counterfactual_duplicate) out.push_back(n.name);
    return out;
}

namespace {

std::vector<bool> descendant_mask(const Model& model, VarIndex target) {
    std::vector<bool> mask(model.size(), false);
    for (auto d : model_descendants(model, target)) mask[d] = true;
    return mask;
}

}  // namespace

ExogenousClass classify_exogenous(const Model& model, VarIndex target, VarIndex exo) {
    const auto desc = descendant_mask(model, target);
    auto kids = model.children(exo);
    bool touches_world = std::any_of(kids.begin(), kids.end(), [&](VarIndex c) { return c == target || desc[c]; });
    if (touches_world) return ExogenousClass::retained;
    return kids.size() <= 1 ? ExogenousClass::removed : ExogenousClass::shared;
}

TeleporterSet find_teleporters(const Model& model, const Intervention& iv) {
    const auto [target, _] = check_intervention(model, iv);
    const auto desc = descendant_mask(model, target);
    TeleporterSet out;
    for (VarIndex v = model.exogenous_count(); v < model.size(); ++v)
        if (v != target && !desc[v]) out.endogenous.push_back(model.name(v));
    for (VarIndex u = 0; u < model.exogenous_count(); ++u) {
        switch (classify_exogenous(model, target, u)) {
            case ExogenousClass::removed: out.removed_exogenous.push_back(model.name(u)); break;
            case ExogenousClass::shared: out.shared_exogenous.push_back(model.name(u)); break;
            case ExogenousClass::retained: out.retained_exogenous.push_back(model.name(u)); break;
        }
    }
    return out;
}

CrossWorldGraph build_twin(const Model& model, const Intervention& iv) {
    const auto [target, _] = check_intervention(model, iv);
    CrossWorldGraph cw;
    cw.method = WorldMethod::twin;
    cw.intervention = iv;
    auto& g = cw.graph;
    const std::size_t ne = model.exogenous_count();
    for (VarIndex u = 0; u < ne; ++u) {
        g.add_node(model.name(u), NodeKind::exogenous);
        auto kids = model.children(u);
        bool feeds_duplicate = std::any_of(kids.begin(), kids.end(), [&](VarIndex c) { return c != target; });
        cw.roles[model.name(u)] = {feeds_duplicate ? NodeRole::shared_exogenous : NodeRole::real_only_exogenous,
                                   model.name(u)};
    }
    for (VarIndex v = ne; v < model.size(); ++v) {
        g.add_node(model.name(v), NodeKind::endogenous);
        cw.roles[model.name(v)] = {NodeRole::real, model.name(v)};
    }
    for (VarIndex v = ne; v < model.size(); ++v) {
        auto dup = counterfactual_name(model.name(v), iv);
        g.add_node(dup, NodeKind::counterfactual_duplicate);
        cw.roles[dup] = {NodeRole::counterfactual_duplicate, model.name(v)};
    }
    for (VarIndex v = ne; v < model.size(); ++v)
        for (auto p : model.parents(v)) g.add_edge(p, v);
    for (VarIndex v = ne; v < model.size(); ++v) {
        if (v == target) continue;
        const auto dup = g.index_of(counterfactual_name(model.name(v), iv));
        for (auto p : model.parents(v)) {
            if (model.is_exogenous(p)) g.add_edge(p, dup);
            else g.add_edge(g.index_of(counterfactual_name(model.name(p), iv)), dup);
        }
    }
    return cw;
}

CrossWorldGraph build_teleporter(const Model& model, const Intervention& iv) {
    const auto [target, _] = check_intervention(model, iv);
    const auto desc = descendant_mask(model, target);
    CrossWorldGraph cw;
    cw.method = WorldMethod::teleporter;
    cw.intervention = iv;
    auto& g = cw.graph;
    const std::size_t ne = model.exogenous_count();
    cw.counterfactual_trivial = std::none_of(desc.begin(), desc.end(), [](bool b) { return b; });

    if (cw.counterfactual_trivial) {
        g = graph_of(model);
        for (VarIndex u = 0; u < ne; ++u) {
            auto cls = classify_exogenous(model, target, u);
            cw.roles[model.name(u)] = {cls == ExogenousClass::retained ? NodeRole::real_only_exogenous
                                                                        : NodeRole::teleporter,
                                       model.name(u)};
        }
        for (VarIndex v = ne; v < model.size(); ++v)
            cw.roles[model.name(v)] = {v == target ? NodeRole::real : NodeRole::teleporter, model.name(v)};
        return cw;
    }

    std::vector<bool> kept(ne, false);
    for (VarIndex u = 0; u < ne; ++u) {
        const auto cls = classify_exogenous(model, target, u);
        if (cls == ExogenousClass::removed) {
            cw.removed_exogenous.push_back(model.name(u));
            continue;
        }
        kept[u] = true;
        g.add_node(model.name(u), NodeKind::exogenous);
        NodeRole role = NodeRole::teleporter;
        if (cls == ExogenousClass::retained) {
            auto kids = model.children(u);
            bool feeds_duplicate = std::any_of(kids.begin(), kids.end(), [&](VarIndex c) { return desc[c]; });
            role = feeds_duplicate ? NodeRole::shared_exogenous : NodeRole::real_only_exogenous;
        }
        cw.roles[model.name(u)] = {role, model.name(u)};
    }
    for (VarIndex v = ne; v < model.size(); ++v) {
        const bool teleporter = v != target && !desc[v];
        g.add_node(model.name(v), teleporter ? NodeKind::teleporter_shared : NodeKind::endogenous);
        cw.roles[model.name(v)] = {teleporter ? NodeRole::teleporter : NodeRole::real, model.name(v)};
    }
    for (VarIndex v = ne; v < model.size(); ++v) {
        if (!desc[v]) continue;
        auto dup = counterfactual_name(model.name(v), iv);
        g.add_node(dup, NodeKind::counterfactual_duplicate);
        cw.roles[dup] = {NodeRole::counterfactual_duplicate, model.name(v)};
    }
    // Real side: the base graph minus removed exogenous nodes.
    for (VarIndex v = ne; v < model.size(); ++v)
        for (auto p : model.parents(v))
            if (!model.is_exogenous(p) || kept[p]) g.add_edge(g.index_of(model.name(p)), g.index_of(model.name(v)));
    // Counterfactual side: duplicates read duplicates, teleporters and shared exogenous parents.
    for (VarIndex v = ne; v < model.size(); ++v) {
        if (!desc[v]) continue;
        const auto dup = g.index_of(counterfactual_name(model.name(v), iv));
        for (auto p : model.parents(v)) {
            if (p == target) continue;
            const auto& pn = model.name(p);
            g.add_edge(g.index_of(desc[p] ? counterfactual_name(pn, iv) : pn), dup);
        }
    }
    return cw;
}

CrossWorldModel::CrossWorldModel(const Model& model, CrossWorldGraph graph)
    : model_(model), graph_(std::move(graph)) {
    const auto [target, value] = check_intervention(model_, graph_.intervention);
    const auto& g = graph_.graph;
    equations_.resize(g.size());
    for (NodeIndex n = 0; n < g.size(); ++n) {
        const auto& info = graph_.roles.at(g.node(n).name);
        Equation eq{model_.index_of(info.base), {}, std::nullopt};
        if (model_.is_exogenous(eq.base)) {
            equations_[n] = std::move(eq);
            continue;
        }
        const bool counterfactual = info.role == NodeRole::counterfactual_duplicate;
        if (counterfactual && eq.base == target) {
            eq.constant = value;
            equations_[n] = std::move(eq);
            continue;
        }
        for (auto p : model_.parents(eq.base)) {
            if (model_.is_exogenous(p)) {
                eq.inputs.push_back({Source::Kind::exogenous, p});
            } else if (counterfactual && p == target) {
                eq.inputs.push_back({Source::Kind::constant, value});
            } else {
                const auto& pn = model_.name(p);
                auto src = counterfactual ? graph_.counterfactual_node(pn) : graph_.real_node(pn);
                eq.inputs.push_back({Source::Kind::node, g.index_of(*src)});
            }
        }
        equations_[n] = std::move(eq);
    }
    order_ = topological_order(g);
}

std::vector<ValueIndex> CrossWorldModel::evaluate(std::span<const ValueIndex> exogenous_state) const {
    std::vector<ValueIndex> out(graph_.graph.size(), 0);
    std::vector<ValueIndex> args;
    for (auto n : order_) {
        const auto& eq = equations_[n];
        if (model_.is_exogenous(eq.base)) {
            out[n] = exogenous_state[eq.base];
        } else if (eq.constant) {
            out[n] = *eq.constant;
        } else {
            args.clear();
            for (const auto& s : eq.inputs) {
                switch (s.kind) {
                    case Source::Kind::node: args.push_back(out[s.index]); break;
                    case Source::Kind::exogenous: args.push_back(exogenous_state[s.index]); break;
                    case Source::Kind::constant: args.push_back(s.index); break;
                }
            }
            out[n] = model_.lookup(eq.base, args);
        }
    }
    return out;
}

CrossWorldVar resolve_crossworld(const Model& model, const Intervention& iv, std::string_view token) {
    const std::string tok(token);
    if (auto v = model.find(tok)) return {*v, false};

    auto matches_iv = [&](std::string_view spec) {
        auto parsed = parse_intervention(spec);
        if (!(parsed == iv))
            throw QueryError("'" + tok + "' refers to do(" + parsed.to_string() + ") but the active intervention is do(" +
                             iv.to_string() + ")");
    };
    if (auto at = tok.find("@do("); at != std::string::npos && tok.back() == ')') {
        matches_iv(std::string_view(tok).substr(at + 4, tok.size() - at - 5));
        return {model.index_of(tok.substr(0, at)), true};
    }
    if (auto at = tok.find("_do_"); at != std::string::npos) {
        matches_iv(std::string_view(tok).substr(at + 4));
        return {model.index_of(tok.substr(0, at)), true};
    }
    if (auto us = tok.rfind('_'); us != std::string::npos && us > 0) {
        std::string lowered = iv.target;
        std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (tok.substr(us + 1) == lowered) {
            if (auto base = model.find(tok.substr(0, us))) return {*base, true};
        }
    }
    throw QueryError("unknown variable: " + tok);
}

std::string crossworld_label(const Model& model, const Intervention& iv, const CrossWorldVar& v) {
    return v.counterfactual ? counterfactual_name(model.name(v.base), iv) : model.name(v.base);
}

std::string resolve_node(const Model& model, const CrossWorldGraph& g, std::string_view token) {
    auto v = resolve_crossworld(model, g.intervention, token);
    const auto& base = model.name(v.base);
    auto node = v.counterfactual ? g.counterfactual_node(base) : g.real_node(base);
    if (!node)
        throw QueryError("variable " + base + " is not present in the " + std::string(to_string(g.method)) + " graph");
    return *node;
}

}  // namespace xworld
