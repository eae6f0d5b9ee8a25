#include "xworld/joint_table.hpp"

#include <algorithm>

namespace xworld {

JointTable::JointTable(std::vector<std::string> variables, std::vector<Domain> domains)
    : variables_(std::move(variables)), domains_(std::move(domains)) {
    if (variables_.size() != domains_.size())
        throw std::invalid_argument("JointTable: variables and domains differ in length");
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        for (std::size_t j = i + 1; j < variables_.size(); ++j) {
            if (variables_[i] == variables_[j])
                throw QueryError("duplicate variable in joint table: " + variables_[i]);
        }
    }
}

void JointTable::add(const Tuple& tuple, const Rational& p) {
    if (p == 0) return;
    rows_[tuple] += p;
}

std::size_t JointTable::column(std::string_view name) const {
    auto it = std::find(variables_.begin(), variables_.end(), name);
    if (it == variables_.end())
        throw QueryError("variable not in joint table: " + std::string(name));
    return static_cast<std::size_t>(it - variables_.begin());
}

Rational JointTable::probability(const Assignment& event) const {
    std::vector<std::pair<std::size_t, ValueIndex>> fixed;
    for (const auto& [var, label] : event) {
        auto c = column(var);
        fixed.emplace_back(c, domains_[c].require(label, var));
    }
    Rational p = 0;
    for (const auto& [tuple, q] : rows_) {
        bool match = std::all_of(fixed.begin(), fixed.end(),
                                 [&](const auto& f) { return tuple[f.first] == f.second; });
        if (match) p += q;
    }
    return p;
}

JointTable JointTable::marginalize(std::span<const std::string> keep) const {
    std::vector<std::size_t> cols;
    std::vector<Domain> doms;
    for (const auto& k : keep) {
        cols.push_back(column(k));
        doms.push_back(domains_[cols.back()]);
    }
    JointTable out(std::vector<std::string>(keep.begin(), keep.end()), std::move(doms));
    Tuple sub(cols.size());
    for (const auto& [tuple, p] : rows_) {
        for (std::size_t i = 0; i < cols.size(); ++i) sub[i] = tuple[cols[i]];
        out.add(sub, p);
    }
    return out;
}

Rational JointTable::total() const {
    Rational t = 0;
    for (const auto& [_, p] : rows_) t += p;
    return t;
}

JointTable observational_joint(const Model& model, std::span<const std::string> vars, std::uint64_t cap) {
    std::vector<VarIndex> idx;
    std::vector<Domain> doms;
    for (const auto& v : vars) {
        idx.push_back(model.index_of(v));
        doms.push_back(model.domain(idx.back()));
    }
    JointTable table(std::vector<std::string>(vars.begin(), vars.end()), std::move(doms));
    JointTable::Tuple tuple(idx.size());
    for_each_exogenous_state(
        model,
        [&](std::span<const ValueIndex> u, const Rational& w) {
            auto state = model.solve(u);
            for (std::size_t i = 0; i < idx.size(); ++i) tuple[i] = state[idx[i]];
            table.add(tuple, w);
        },
        cap);
    return table;
}

}  // namespace xworld
