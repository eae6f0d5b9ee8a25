#pragma once

// Exact cross-world probability computation.
//
// Everything is exact rational arithmetic over the enumerated exogenous
// state space; there are no tolerances in this layer. Counterfactual
// variables are addressed with the tokens accepted by resolve_crossworld.

#include "xworld/graph.hpp"
#include "xworld/joint_table.hpp"
#include "xworld/scm.hpp"
#include "xworld/world.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xworld {

/// Y_x = y: a cross-world variable token and a value label.
struct Target {
    std::string variable;
    std::string value;
};

/// Joint over real and counterfactual variables: each exogenous state u adds
/// P(u) to the tuple (V(u), V_x(u)) restricted to `vars`.
JointTable crossworld_joint(const Model& model, const Intervention& iv, std::span<const std::string> vars,
                            std::uint64_t cap = kDefaultEnumerationCap);

/// P(Y_x = y | e) by conditioning P(u) on e, mutilating to M_x and evaluating.
/// Evidence must name real-world variables. Throws InferenceError on P(e) = 0.
Rational abduction_action_prediction(const Model& model, const Intervention& iv, const Target& target,
                                     const Assignment& evidence, std::uint64_t cap = kDefaultEnumerationCap);

/// Exact test of a ⊥ b | cond on a joint table.
bool check_ci_numeric(const JointTable& table, std::string_view a, std::string_view b,
                      std::span<const std::string> cond);

struct CriterionVerdict {
    bool satisfied = false;
    std::vector<std::string> separating_set;  // graph nodes for E ∪ Z
    std::optional<Path> witness;              // present iff !satisfied
};

/// X and Y_x d-separated by E ∪ Z in the teleporter graph.
CriterionVerdict counterfactual_criterion(const Model& model, const Intervention& iv, std::string_view target,
                                          std::span<const std::string> evidence_vars,
                                          std::span<const std::string> adjust);

/// Cross-world adjustment: sum over z of P(Y=y | z, x, e) P(z | e).
///
/// Slices with P(z | e) = 0 contribute nothing. A slice with P(z | e) > 0 but
/// P(x, z, e) = 0 throws InferenceError("positivity violation at slice ...").
/// When Y is not a descendant of X, Y_x and Y coincide and the observational
/// P(Y = y | e) is returned without consulting Z.
Rational adjustment_estimate(const Model& model, const Intervention& iv, const Target& target,
                             const Assignment& evidence, std::span<const std::string> adjust,
                             std::uint64_t cap = kDefaultEnumerationCap);

/// For every u with X(u) = x, the solution of M_x equals the solution of M.
bool consistency_check(const Model& model, const Intervention& iv, std::uint64_t cap = kDefaultEnumerationCap);

struct EnvironmentSumResult {
    JointTable formula;  // conditional distribution of Y_x given X = x' from the environment sum
    JointTable oracle;   // same conditional from the enumeration oracle
    bool matches = false;
    SeparationVerdict certificate;  // X vs Y_x given the environment in the teleporter graph
    std::size_t terms = 0;          // environment values with P(E = e | X = x') > 0
};

/// P(Y_x = y | X = x') = sum_e P(Y = y | X = x, E = e) P(E = e | X = x'), for an
/// environment variable E that is shared by both worlds and separates X from Y_x.
/// Throws InferenceError("fixture shape mismatch: ...") when the model does not
/// have that shape.
EnvironmentSumResult environment_sum(const Model& model, const Intervention& iv, const Assignment& x_prime,
                                  std::string_view environment = "E", std::string_view outcome = "Y",
                                  std::uint64_t cap = kDefaultEnumerationCap);

/// Interventional P(Y = y | do(x)) by summing P(u) over the mutilated model.
Rational interventional(const Model& model, const Intervention& iv, const Target& target,
                        std::uint64_t cap = kDefaultEnumerationCap);

/// Observational conditional P(event | given); throws InferenceError on P(given) = 0.
Rational conditional(const JointTable& table, const Assignment& event, const Assignment& given);

}  // namespace xworld
