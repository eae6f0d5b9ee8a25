#pragma once

#include "xworld/graph.hpp"
#include "xworld/world.hpp"

#include <span>
#include <string>
#include <string_view>

namespace xworld {

/// Graphviz rendering. Nodes and edges follow graph order, so output is
/// byte-stable. Real nodes are solid, duplicates dashed, teleporters
/// double-bordered, exogenous nodes boxed, conditioned nodes filled grey.
std::string export_dot(const CrossWorldGraph& g, std::span<const std::string> conditioned = {},
                       std::string_view graph_name = "G");
std::string export_dot(const CausalGraph& g, std::span<const std::string> conditioned = {},
                       std::string_view graph_name = "G");

}  // namespace xworld
