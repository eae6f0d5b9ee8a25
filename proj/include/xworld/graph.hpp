#pragma once

// Graph-level reasoning over causal DAGs: reachability, simple paths,
// d-separation and the back-door criterion. Everything here is a pure
// function of an immutable CausalGraph.

#include "xworld/errors.hpp"
#include "xworld/scm.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xworld {

enum class NodeKind { endogenous, exogenous, counterfactual_duplicate, teleporter_shared };

std::string_view to_string(NodeKind kind);

using NodeIndex = std::size_t;

struct GraphNode {
    std::string name;
    NodeKind kind;
};

class CausalGraph {
 public:
    /// Throws QueryError on a duplicate name.
    NodeIndex add_node(std::string name, NodeKind kind);
    /// Throws QueryError for unknown endpoints, edges into exogenous nodes, and cycles.
    /// Adding an existing edge is a no-op.
    void add_edge(NodeIndex from, NodeIndex to);
    void add_edge(std::string_view from, std::string_view to);
    /// Removing a missing edge is a no-op.
    void remove_edge(NodeIndex from, NodeIndex to);

    std::size_t size() const { return nodes_.size(); }
    const GraphNode& node(NodeIndex i) const { return nodes_[i]; }
    const std::vector<GraphNode>& nodes() const { return nodes_; }
    std::optional<NodeIndex> find(std::string_view name) const;
    /// Throws QueryError("unknown node ...").
    NodeIndex index_of(std::string_view name) const;

    std::span<const NodeIndex> parents(NodeIndex i) const { return parents_[i]; }
    std::span<const NodeIndex> children(NodeIndex i) const { return children_[i]; }
    bool has_edge(NodeIndex from, NodeIndex to) const;
    /// Edges in insertion order.
    const std::vector<std::pair<NodeIndex, NodeIndex>>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

 private:
    bool reaches(NodeIndex from, NodeIndex to) const;

    std::vector<GraphNode> nodes_;
    std::unordered_map<std::string, NodeIndex> by_name_;
    std::vector<std::vector<NodeIndex>> parents_;
    std::vector<std::vector<NodeIndex>> children_;
    std::vector<std::pair<NodeIndex, NodeIndex>> edges_;
};

/// Kahn order; ties broken by node index.
std::vector<NodeIndex> topological_order(const CausalGraph& g);

/// DAG of a model: exogenous then endogenous nodes in declaration order.
CausalGraph graph_of(const Model& model);

enum class EdgeDir { forward, backward };  // forward: nodes[i] -> nodes[i + 1]

struct Path {
    std::vector<std::string> nodes;
    std::vector<EdgeDir> edges;

    /// "A <- C -> B -> D"
    std::string to_string() const;
    friend bool operator==(const Path&, const Path&) = default;
};

struct SeparationVerdict {
    bool separated = true;
    std::optional<Path> witness;  // present iff !separated
};

struct PathStatus {
    Path path;
    bool blocked = false;
};

std::set<std::string> descendants(const CausalGraph& g, std::string_view v);
std::vector<NodeIndex> descendant_indices(const CausalGraph& g, NodeIndex v);

/// Reachability-based d-separation test. Throws QueryError when a == b, when
/// an endpoint is in `cond`, or for unknown nodes.
SeparationVerdict d_separated(const CausalGraph& g, std::string_view a, std::string_view b,
                              std::span<const std::string> cond);
SeparationVerdict d_separated(const CausalGraph& g, std::string_view a, std::string_view b,
                              std::initializer_list<std::string> cond);

/// Every simple path between a and b on the skeleton, lexicographic by node
/// sequence, each marked blocked/unblocked with respect to `cond`.
std::vector<PathStatus> all_paths(const CausalGraph& g, std::string_view a, std::string_view b,
                                  std::span<const std::string> cond = {});

/// Clause-by-clause blocking test of a single path.
bool path_blocked(const CausalGraph& g, const Path& path, std::span<const std::string> cond);

/// Back-door criterion for (x, y) with adjustment set z.
bool backdoor_admissible(const CausalGraph& g, std::string_view x, std::string_view y,
                         std::span<const std::string> z);

}  // namespace xworld
