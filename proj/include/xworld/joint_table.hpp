#pragma once

#include "xworld/rational.hpp"
#include "xworld/scm.hpp"

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xworld {

/// Exact joint distribution over an ordered list of (possibly cross-world) variables.
/// Only tuples with positive probability are stored.
class JointTable {
 public:
    using Tuple = std::vector<ValueIndex>;

    JointTable(std::vector<std::string> variables, std::vector<Domain> domains);

    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<Domain>& domains() const { return domains_; }
    const std::map<Tuple, Rational>& rows() const { return rows_; }

    /// Adds `p` to the row for `tuple`. Zero additions are dropped.
    void add(const Tuple& tuple, const Rational& p);

    /// Column index of `name`; throws QueryError when absent.
    std::size_t column(std::string_view name) const;

    /// Probability of a partial assignment (labels) over a subset of the columns.
    Rational probability(const Assignment& event) const;

    /// Marginal table over `keep`, in the order given.
    JointTable marginalize(std::span<const std::string> keep) const;

    Rational total() const;

    friend bool operator==(const JointTable&, const JointTable&) = default;

 private:
    std::vector<std::string> variables_;
    std::vector<Domain> domains_;
    std::map<Tuple, Rational> rows_;
};

/// Exact joint over `vars` by enumerating every exogenous state.
JointTable observational_joint(const Model& model, std::span<const std::string> vars,
                               std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace xworld
