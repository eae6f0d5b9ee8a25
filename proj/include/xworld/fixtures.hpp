#pragma once

// Small discrete models shaped after the standard cross-world examples.
// Every variable is binary with labels "0" and "1".
//
//   fig1  Z -> X, Z -> Y, X -> Y                   (confounded treatment)
//   fig2  U -> C, C -> A, C -> B, A -> D, B -> D   (firing squad)
//   fig3  C -> X, C -> Z -> T -> Y, X -> Y
//   fig4  X -> W <- Z -> T -> Y, X -> Y
//   fig5  E -> X -> R -> Y, E -> R                 (environment / representation)
//
// All but fig2 give each endogenous variable a dedicated exogenous parent U_<name>.

#include "xworld/scm.hpp"
#include "xworld/world.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace xworld {

const std::vector<std::string>& fixture_names();

/// Throws QueryError for unknown names.
Model fixture(std::string_view name);

/// Canonical model-file text of a fixture.
std::string fixture_text(std::string_view name);

/// The intervention each fixture is built around, e.g. do(A=1) for fig2.
Intervention fixture_intervention(std::string_view name);

}  // namespace xworld
