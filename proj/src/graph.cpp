#include "xworld/graph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>

namespace xworld {

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::endogenous: return "endogenous";
        case NodeKind::exogenous: return "exogenous";
        case NodeKind::counterfactual_duplicate: return "counterfactual-duplicate";
        case NodeKind::teleporter_shared: return "teleporter-shared";
    }
    return "?";
}

NodeIndex CausalGraph::add_node(std::string name, NodeKind kind) {
    if (by_name_.count(name)) throw QueryError("duplicate node: " + name);
    const NodeIndex i = nodes_.size();
    by_name_.emplace(name, i);
    nodes_.push_back({std::move(name), kind});
    parents_.emplace_back();
    children_.emplace_back();
    return i;
}

bool CausalGraph::has_edge(NodeIndex from, NodeIndex to) const {
    const auto& c = children_[from];
    return std::find(c.begin(), c.end(), to) != c.end();
}

bool CausalGraph::reaches(NodeIndex from, NodeIndex to) const {
    std::vector<bool> seen(size(), false);
    std::vector<NodeIndex> stack{from};
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        if (v == to) return true;
        for (auto c : children_[v]) {
            if (!seen[c]) {
                seen[c] = true;
                stack.push_back(c);
            }
        }
    }
    return false;
}

void CausalGraph::add_edge(NodeIndex from, NodeIndex to) {
    if (from >= size() || to >= size()) throw QueryError("edge endpoint out of range");
    if (has_edge(from, to)) return;
    if (nodes_[to].kind == NodeKind::exogenous)
        throw QueryError("edge into exogenous node: " + nodes_[from].name + " -> " + nodes_[to].name);
    if (from == to || reaches(to, from))
        throw QueryError("edge would create a cycle: " + nodes_[from].name + " -> " + nodes_[to].name);
    children_[from].push_back(to);
    parents_[to].push_back(from);
    edges_.emplace_back(from, to);
}

void CausalGraph::add_edge(std::string_view from, std::string_view to) {
    add_edge(index_of(from), index_of(to));
}

void CausalGraph::remove_edge(NodeIndex from, NodeIndex to) {
    auto drop = [](std::vector<NodeIndex>& v, NodeIndex x) { v.erase(std::remove(v.begin(), v.end(), x), v.end()); };
    drop(children_[from], to);
    drop(parents_[to], from);
    edges_.erase(std::remove(edges_.begin(), edges_.end(), std::pair{from, to}), edges_.end());
}

std::optional<NodeIndex> CausalGraph::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

NodeIndex CausalGraph::index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw QueryError("unknown node: " + std::string(name));
}

std::vector<NodeIndex> topological_order(const CausalGraph& g) {
    std::vector<std::size_t> pending(g.size());
    std::set<NodeIndex> ready;
    for (NodeIndex i = 0; i < g.size(); ++i) {
        pending[i] = g.parents(i).size();
        if (pending[i] == 0) ready.insert(i);
    }
    std::vector<NodeIndex> order;
    while (!ready.empty()) {
        auto n = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(n);
        for (auto c : g.children(n))
            if (--pending[c] == 0) ready.insert(c);
    }
    return order;
}

CausalGraph graph_of(const Model& model) {
    CausalGraph g;
    for (VarIndex v = 0; v < model.size(); ++v)
        g.add_node(model.name(v), model.is_exogenous(v) ? NodeKind::exogenous : NodeKind::endogenous);
    for (VarIndex v = model.exogenous_count(); v < model.size(); ++v)
        for (auto p : model.parents(v)) g.add_edge(p, v);
    return g;
}

std::string Path::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i > 0) s += edges[i - 1] == EdgeDir::forward ? " -> " : " <- ";
        s += nodes[i];
    }
    return s;
}

std::vector<NodeIndex> descendant_indices(const CausalGraph& g, NodeIndex v) {
    std::vector<bool> seen(g.size(), false);
    std::vector<NodeIndex> stack{v};
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        for (auto c : g.children(n)) {
            if (!seen[c]) {
                seen[c] = true;
                stack.push_back(c);
            }
        }
    }
    std::vector<NodeIndex> out;
    for (NodeIndex i = 0; i < g.size(); ++i)
        if (seen[i] && i != v) out.push_back(i);
    return out;
}

std::set<std::string> descendants(const CausalGraph& g, std::string_view v) {
    std::set<std::string> out;
    for (auto i : descendant_indices(g, g.index_of(v))) out.insert(g.node(i).name);
    return out;
}

namespace {

struct Query {
    NodeIndex a;
    NodeIndex b;
    std::vector<bool> in_cond;
};

Query resolve(const CausalGraph& g, std::string_view a, std::string_view b, std::span<const std::string> cond) {
    Query q{g.index_of(a), g.index_of(b), std::vector<bool>(g.size(), false)};
    if (q.a == q.b) throw QueryError("d-separation endpoints must differ: " + std::string(a));
    for (const auto& c : cond) q.in_cond[g.index_of(c)] = true;
    if (q.in_cond[q.a] || q.in_cond[q.b])
        throw QueryError("endpoint in conditioning set: " + std::string(q.in_cond[q.a] ? a : b));
    return q;
}

// cond together with all its ancestors: a collider opens iff it is in this set.
std::vector<bool> ancestral_closure(const CausalGraph& g, const std::vector<bool>& in_cond) {
    std::vector<bool> anc(g.size(), false);
    std::vector<NodeIndex> stack;
    for (NodeIndex i = 0; i < g.size(); ++i) {
        if (in_cond[i]) {
            anc[i] = true;
            stack.push_back(i);
        }
    }
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        for (auto p : g.parents(n)) {
            if (!anc[p]) {
                anc[p] = true;
                stack.push_back(p);
            }
        }
    }
    return anc;
}

std::vector<NodeIndex> sorted_by_name(const CausalGraph& g, std::vector<NodeIndex> v) {
    std::sort(v.begin(), v.end(), [&](NodeIndex x, NodeIndex y) { return g.node(x).name < g.node(y).name; });
    return v;
}

std::vector<std::vector<NodeIndex>> skeleton_neighbours(const CausalGraph& g) {
    std::vector<std::vector<NodeIndex>> nb(g.size());
    for (NodeIndex i = 0; i < g.size(); ++i) {
        std::vector<NodeIndex> all(g.parents(i).begin(), g.parents(i).end());
        all.insert(all.end(), g.children(i).begin(), g.children(i).end());
        nb[i] = sorted_by_name(g, std::move(all));
    }
    return nb;
}

Path make_path(const CausalGraph& g, const std::vector<NodeIndex>& seq) {
    Path p;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        p.nodes.push_back(g.node(seq[i]).name);
        if (i > 0) p.edges.push_back(g.has_edge(seq[i - 1], seq[i]) ? EdgeDir::forward : EdgeDir::backward);
    }
    return p;
}

// Lexicographically first simple path whose every interior node is open.
std::optional<Path> find_active_path(const CausalGraph& g, const Query& q, const std::vector<bool>& anc) {
    const auto nb = skeleton_neighbours(g);
    std::vector<bool> on_path(g.size(), false);
    std::vector<NodeIndex> seq{q.a};
    on_path[q.a] = true;
    auto open_at = [&](NodeIndex prev, NodeIndex mid, NodeIndex next) {
        bool collider = g.has_edge(prev, mid) && g.has_edge(next, mid);
        return collider ? anc[mid] : !q.in_cond[mid];
    };
    std::function<bool()> extend = [&]() -> bool {
        const NodeIndex cur = seq.back();
        if (cur == q.b) return true;
        for (auto n : nb[cur]) {
            if (on_path[n]) continue;
            if (seq.size() >= 2 && !open_at(seq[seq.size() - 2], cur, n)) continue;
            seq.push_back(n);
            on_path[n] = true;
            if (extend()) return true;
            on_path[n] = false;
            seq.pop_back();
        }
        return false;
    };
    if (!extend()) return std::nullopt;
    return make_path(g, seq);
}

}  // namespace

SeparationVerdict d_separated(const CausalGraph& g, std::string_view a, std::string_view b,
                              std::span<const std::string> cond) {
    const Query q = resolve(g, a, b, cond);
    const auto anc = ancestral_closure(g, q.in_cond);

    // States are (node, arrived-from-child) / (node, arrived-from-parent).
    enum Dir : int { up = 0, down = 1 };
    std::vector<std::array<bool, 2>> visited(g.size(), {false, false});
    std::deque<std::pair<NodeIndex, Dir>> frontier{{q.a, up}};
    bool reached = false;
    while (!frontier.empty() && !reached) {
        auto [n, d] = frontier.front();
        frontier.pop_front();
        if (visited[n][d]) continue;
        visited[n][d] = true;
        if (n == q.b) {
            reached = true;
            break;
        }
        if (d == up) {
            if (q.in_cond[n]) continue;
            for (auto p : g.parents(n)) frontier.emplace_back(p, up);
            for (auto c : g.children(n)) frontier.emplace_back(c, down);
        } else {
            if (!q.in_cond[n])
                for (auto c : g.children(n)) frontier.emplace_back(c, down);
            if (anc[n])
                for (auto p : g.parents(n)) frontier.emplace_back(p, up);
        }
    }
    SeparationVerdict v;
    v.separated = !reached;
    if (reached) {
        v.witness = find_active_path(g, q, anc);
        if (!v.witness) throw std::logic_error("d-separation: reachable endpoint without an active simple path");
    }
    return v;
}

SeparationVerdict d_separated(const CausalGraph& g, std::string_view a, std::string_view b,
                              std::initializer_list<std::string> cond) {
    return d_separated(g, a, b, std::span<const std::string>(cond.begin(), cond.size()));
}

bool path_blocked(const CausalGraph& g, const Path& path, std::span<const std::string> cond) {
    std::set<std::string> z(cond.begin(), cond.end());
    for (std::size_t i = 1; i + 1 < path.nodes.size(); ++i) {
        const auto& mid = path.nodes[i];
        const bool into_from_left = path.edges[i - 1] == EdgeDir::forward;
        const bool into_from_right = path.edges[i] == EdgeDir::backward;
        if (into_from_left && into_from_right) {
            // Collider: blocks unless it or one of its descendants is conditioned on.
            if (z.count(mid)) continue;
            auto desc = descendants(g, mid);
            bool opened = std::any_of(desc.begin(), desc.end(), [&](const auto& d) { return z.count(d) > 0; });
            if (!opened) return true;
        } else if (z.count(mid)) {
            // Chain or fork with the middle node conditioned on.
            return true;
        }
    }
    return false;
}

std::vector<PathStatus> all_paths(const CausalGraph& g, std::string_view a, std::string_view b,
                                  std::span<const std::string> cond) {
    const NodeIndex ia = g.index_of(a);
    const NodeIndex ib = g.index_of(b);
    if (ia == ib) throw QueryError("path endpoints must differ: " + std::string(a));
    for (const auto& c : cond) g.index_of(c);
    const auto nb = skeleton_neighbours(g);
    std::vector<PathStatus> out;
    std::vector<bool> on_path(g.size(), false);
    std::vector<NodeIndex> seq{ia};
    on_path[ia] = true;
    std::function<void()> walk = [&]() {
        const NodeIndex cur = seq.back();
        if (cur == ib) {
            PathStatus ps{make_path(g, seq), false};
            ps.blocked = path_blocked(g, ps.path, cond);
            out.push_back(std::move(ps));
            return;
        }
        for (auto n : nb[cur]) {
            if (on_path[n]) continue;
            on_path[n] = true;
            seq.push_back(n);
            walk();
            seq.pop_back();
            on_path[n] = false;
        }
    };
    walk();
    return out;
}

bool backdoor_admissible(const CausalGraph& g, std::string_view x, std::string_view y,
                         std::span<const std::string> z) {
    const NodeIndex ix = g.index_of(x);
    g.index_of(y);
    std::set<std::string> zs(z.begin(), z.end());
    for (const auto& n : zs) g.index_of(n);
    if (zs.count(std::string(x)) || zs.count(std::string(y)))
        throw QueryError("back-door set must not contain the treatment or outcome");
    for (auto d : descendant_indices(g, ix))
        if (zs.count(g.node(d).name)) return false;
    // Paths entering x are exactly the paths of the graph without x's outgoing edges.
    CausalGraph cut = g;
    for (auto c : std::vector<NodeIndex>(g.children(ix).begin(), g.children(ix).end())) cut.remove_edge(ix, c);
    return d_separated(cut, x, y, z).separated;
}

}  // namespace xworld
