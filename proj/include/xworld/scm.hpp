#pragma once

// Discrete structural causal models with lookup-table equations.
//
// Variables are addressed by name at the API boundary and by VarIndex
// internally. Exogenous variables occupy indices [0, exogenous_count()),
// endogenous variables follow in declaration order. All randomness lives in
// the exogenous marginals; the joint P(u) is their product.

#include "xworld/errors.hpp"
#include "xworld/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xworld {

using VarIndex = std::size_t;
using ValueIndex = std::size_t;

/// Default limit on the number of joint exogenous states any enumeration visits.
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

struct Domain {
    std::vector<std::string> values;

    std::size_t size() const { return values.size(); }
    std::optional<ValueIndex> index_of(std::string_view label) const;
    /// Like index_of but throws QueryError naming `owner`.
    ValueIndex require(std::string_view label, std::string_view owner) const;

    friend bool operator==(const Domain&, const Domain&) = default;
};

struct ExogenousSpec {
    std::string name;
    Domain domain;
    std::vector<Rational> marginal;

    friend bool operator==(const ExogenousSpec&, const ExogenousSpec&) = default;
};

struct EndogenousSpec {
    std::string name;
    Domain domain;
    std::vector<std::string> parents;
    // One output value index per joint parent configuration, enumerated in
    // mixed radix with the first parent most significant.
    std::vector<ValueIndex> table;

    friend bool operator==(const EndogenousSpec&, const EndogenousSpec&) = default;
};

/// Raw, possibly invalid model description. Model is the validated form.
struct ModelSpec {
    std::vector<ExogenousSpec> exogenous;
    std::vector<EndogenousSpec> endogenous;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// Checks every structural invariant of a model description.
ValidationReport validate(const ModelSpec& spec);

/// Map from variable name to value label.
using Assignment = std::map<std::string, std::string>;

class Model {
 public:
    /// Validates `spec` and compiles it. Throws ModelError listing all violations.
    static Model from_spec(ModelSpec spec);

    const ModelSpec& spec() const { return spec_; }

    std::size_t size() const { return names_.size(); }
    std::size_t exogenous_count() const { return spec_.exogenous.size(); }
    std::size_t endogenous_count() const { return spec_.endogenous.size(); }
    bool is_exogenous(VarIndex v) const { return v < exogenous_count(); }

    const std::string& name(VarIndex v) const { return names_[v]; }
    const Domain& domain(VarIndex v) const;
    std::optional<VarIndex> find(std::string_view name) const;
    /// Throws QueryError("unknown variable ...").
    VarIndex index_of(std::string_view name) const;

    std::span<const VarIndex> parents(VarIndex v) const { return parents_[v]; }
    std::span<const VarIndex> children(VarIndex v) const { return children_[v]; }
    /// Endogenous variables in evaluation order; ties broken by declaration order.
    std::span<const VarIndex> topological_order() const { return topo_; }

    const std::vector<Rational>& marginal(VarIndex exo) const;

    /// Equation lookup for endogenous `v` given its parents' values in parent order.
    ValueIndex lookup(VarIndex v, std::span<const ValueIndex> parent_values) const;

    /// Full state (indexed by VarIndex) from an exogenous state (indexed by VarIndex < exogenous_count()).
    std::vector<ValueIndex> solve(std::span<const ValueIndex> exogenous_state) const;

    /// Product of the exogenous marginals at this state.
    Rational weight(std::span<const ValueIndex> exogenous_state) const;

    /// Number of joint exogenous states, saturating at UINT64_MAX.
    std::uint64_t exogenous_state_count() const;

    /// Endogenous variables that were replaced by constants.
    const std::vector<std::string>& intervened() const { return intervened_; }

    /// Copy with endogenous `v` replaced by the constant `value` and its parents dropped.
    /// The result is exempt from the exogenous-ancestor requirement for `v`.
    Model with_constant(VarIndex v, ValueIndex value) const;

 private:
    void compile();

    ModelSpec spec_;
    std::vector<std::string> intervened_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, VarIndex> by_name_;
    std::vector<std::vector<VarIndex>> parents_;
    std::vector<std::vector<VarIndex>> children_;
    std::vector<std::vector<std::size_t>> strides_;
    std::vector<VarIndex> topo_;
};

/// Solves the model for a complete exogenous assignment.
/// Throws QueryError("missing exogenous assignment: ...") when `u` is incomplete.
Assignment solve(const Model& model, const Assignment& u);

/// Converts a label assignment over exogenous variables to an exogenous state.
std::vector<ValueIndex> exogenous_state(const Model& model, const Assignment& u);

/// Calls `fn(state, weight)` for every joint exogenous state with positive weight,
/// in lexicographic order (first exogenous variable most significant).
/// Throws CapExceeded when the state space exceeds `cap`.
void for_each_exogenous_state(const Model& model,
                              const std::function<void(std::span<const ValueIndex>, const Rational&)>& fn,
                              std::uint64_t cap = kDefaultEnumerationCap);

/// Every vertex reachable from `from` via directed edges, excluding `from`.
std::vector<VarIndex> model_descendants(const Model& model, VarIndex from);

}  // namespace xworld
