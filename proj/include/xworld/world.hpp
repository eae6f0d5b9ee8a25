#pragma once

// Intervened models and cross-world graphs.
//
// Two constructions are provided for a single atomic intervention do(X=x):
//   build_twin       duplicates every endogenous variable; exogenous nodes
//                    parent both copies; arrows into the duplicate of X are cut.
//   build_teleporter duplicates only the descendants of X; every other
//                    endogenous variable appears once and is shared by both
//                    worlds. Exogenous nodes are removed, shared or kept
//                    according to their children (see ExogenousClass).
//
// Duplicates are named "<base>_do_<target>=<value>".

#include "xworld/graph.hpp"
#include "xworld/scm.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xworld {

struct Intervention {
    std::string target;
    std::string value;

    std::string to_string() const { return target + "=" + value; }
    friend bool operator==(const Intervention&, const Intervention&) = default;
};

/// Parses "X=x". Throws QueryError on malformed input.
Intervention parse_intervention(std::string_view text);

/// Checks the intervention against the model; returns (target index, value index).
std::pair<VarIndex, ValueIndex> check_intervention(const Model& model, const Intervention& iv);

/// Replaces the target's equation by the constant. Throws QueryError
/// ("cannot intervene on exogenous variable") for exogenous targets.
Model intervene(const Model& model, const Intervention& iv);

std::string counterfactual_name(std::string_view base, const Intervention& iv);

enum class WorldMethod { twin, teleporter };
enum class NodeRole { real, counterfactual_duplicate, teleporter, shared_exogenous, real_only_exogenous };

std::string_view to_string(WorldMethod m);
std::string_view to_string(NodeRole r);

struct RoleInfo {
    NodeRole role;
    std::string base;  // base-model variable this node stands for
};

struct CrossWorldGraph {
    CausalGraph graph;
    WorldMethod method = WorldMethod::teleporter;
    Intervention intervention;
    std::map<std::string, RoleInfo> roles;
    std::vector<std::string> removed_exogenous;
    // The target has no descendants: Y_x and Y coincide for every Y.
    bool counterfactual_trivial = false;

    /// Node carrying `base` in the counterfactual world: its duplicate when one
    /// exists, otherwise the shared node itself. nullopt when the node was removed.
    std::optional<std::string> counterfactual_node(std::string_view base) const;
    /// Node carrying `base` in the real world.
    std::optional<std::string> real_node(std::string_view base) const;
    /// Duplicate node names in graph order.
    std::vector<std::string> duplicates() const;
};

/// How the teleporter graph treats an exogenous variable.
enum class ExogenousClass {
    removed,   // at most one child, and it is a teleporter
    shared,    // two or more children, all teleporters
    retained,  // some child is the target or one of its descendants
};

struct TeleporterSet {
    std::vector<std::string> endogenous;        // non-descendants of the target, target excluded
    std::vector<std::string> shared_exogenous;  // ExogenousClass::shared
    std::vector<std::string> retained_exogenous;
    std::vector<std::string> removed_exogenous;
};

TeleporterSet find_teleporters(const Model& model, const Intervention& iv);
ExogenousClass classify_exogenous(const Model& model, VarIndex target, VarIndex exo);

CrossWorldGraph build_twin(const Model& model, const Intervention& iv);
CrossWorldGraph build_teleporter(const Model& model, const Intervention& iv);

/// Executable semantics of a cross-world graph: each node is evaluated from
/// its own (possibly rewired) structural equation, in graph order.
class CrossWorldModel {
 public:
    CrossWorldModel(const Model& model, CrossWorldGraph graph);

    const CrossWorldGraph& graph() const { return graph_; }

    /// Value index of every graph node for an exogenous state of the base model.
    /// Exogenous variables removed from the graph still feed their former children.
    std::vector<ValueIndex> evaluate(std::span<const ValueIndex> exogenous_state) const;

 private:
    struct Source {
        enum class Kind { node, exogenous, constant } kind;
        std::size_t index;
    };
    struct Equation {
        VarIndex base;
        std::vector<Source> inputs;
        std::optional<ValueIndex> constant;
    };

    Model model_;
    CrossWorldGraph graph_;
    std::vector<Equation> equations_;  // per graph node
    std::vector<NodeIndex> order_;
};

/// A variable addressed across worlds: the base variable, and whether it is read
/// in the counterfactual world.
struct CrossWorldVar {
    VarIndex base;
    bool counterfactual;
};

/// Resolves "Y", "Y@do(X=x)", "Y_do_X=x", or the short form "Y_x" (base name,
/// underscore, lower-cased target name) against the model and intervention.
CrossWorldVar resolve_crossworld(const Model& model, const Intervention& iv, std::string_view token);

/// Canonical column name: the base name for the real world, counterfactual_name otherwise.
std::string crossworld_label(const Model& model, const Intervention& iv, const CrossWorldVar& v);

/// Graph node for a token in a cross-world graph. Throws QueryError when the
/// variable is absent (for example a removed exogenous node).
std::string resolve_node(const Model& model, const CrossWorldGraph& g, std::string_view token);

}  // namespace xworld
