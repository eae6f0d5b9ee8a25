#include "xworld/scm.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace xworld {

std::optional<ValueIndex> Domain::index_of(std::string_view label) const {
    auto it = std::find(values.begin(), values.end(), label);
    if (it == values.end()) return std::nullopt;
    return static_cast<ValueIndex>(it - values.begin());
}

ValueIndex Domain::require(std::string_view label, std::string_view owner) const {
    if (auto i = index_of(label)) return *i;
    throw QueryError("value '" + std::string(label) + "' is not in the domain of " + std::string(owner));
}

namespace {

bool valid_identifier(const std::string& name) {
    if (name.empty()) return false;
    if (name.find("_do_") != std::string::npos) return false;
    return std::none_of(name.begin(), name.end(), [](char c) {
        return c == '=' || c == '@' || c == '(' || c == ')' || c == ',' || c == '"' ||
               static_cast<unsigned char>(c) <= ' ';
    });
}

void check_domain(const std::string& owner, const Domain& d, std::vector<std::string>& out) {
    if (d.values.empty()) out.push_back("empty domain: " + owner);
    std::set<std::string> seen;
    for (const auto& v : d.values) {
        if (v.empty() || v.find_first_of(",= ") != std::string::npos)
            out.push_back("invalid value label '" + v + "' in domain of " + owner);
        if (!seen.insert(v).second) out.push_back("duplicate value label '" + v + "' in domain of " + owner);
    }
}

// Kahn's algorithm over endogenous variables; ties go to the earliest declaration.
// Returns std::nullopt when a cycle exists.
std::optional<std::vector<std::size_t>> endogenous_order(const std::vector<std::vector<std::size_t>>& endo_parents) {
    const std::size_t n = endo_parents.size();
    std::vector<std::size_t> pending(n);
    std::vector<std::vector<std::size_t>> kids(n);
    for (std::size_t v = 0; v < n; ++v) {
        pending[v] = endo_parents[v].size();
        for (auto p : endo_parents[v]) kids[p].push_back(v);
    }
    std::set<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (pending[v] == 0) ready.insert(v);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        auto v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (auto k : kids[v])
            if (--pending[k] == 0) ready.insert(k);
    }
    if (order.size() != n) return std::nullopt;
    return order;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

}  // namespace

ValidationReport validate(const ModelSpec& spec) {
    ValidationReport report;
    auto& out = report.violations;

    std::unordered_map<std::string, std::pair<bool, std::size_t>> names;  // name -> (exogenous, position)
    for (std::size_t i = 0; i < spec.exogenous.size(); ++i) {
        const auto& u = spec.exogenous[i];
        if (!valid_identifier(u.name)) out.push_back("invalid identifier '" + u.name + "'");
        if (!names.emplace(u.name, std::pair{true, i}).second) out.push_back("duplicate variable name: " + u.name);
        check_domain(u.name, u.domain, out);
        if (u.marginal.size() != u.domain.size()) {
            out.push_back("marginal length does not match domain: " + u.name);
            continue;
        }
        Rational sum = 0;
        bool negative = false;
        for (const auto& p : u.marginal) {
            if (p < 0) negative = true;
            sum += p;
        }
        if (negative) out.push_back("negative probability in marginal: " + u.name);
        if (sum != 1) out.push_back("marginal not normalized: " + u.name + " sums to " + to_string(sum));
    }
    for (std::size_t i = 0; i < spec.endogenous.size(); ++i) {
        const auto& x = spec.endogenous[i];
        if (!valid_identifier(x.name)) out.push_back("invalid identifier '" + x.name + "'");
        if (!names.emplace(x.name, std::pair{false, i}).second) out.push_back("duplicate variable name: " + x.name);
        check_domain(x.name, x.domain, out);
    }

    std::vector<std::vector<std::size_t>> endo_parents(spec.endogenous.size());
    std::vector<std::vector<std::size_t>> exo_parents(spec.endogenous.size());
    bool structural_ok = true;
    for (std::size_t i = 0; i < spec.endogenous.size(); ++i) {
        const auto& x = spec.endogenous[i];
        std::set<std::string> seen;
        std::uint64_t rows = 1;
        bool parents_ok = true;
        for (const auto& p : x.parents) {
            if (!seen.insert(p).second) {
                out.push_back("duplicate parent " + p + " of " + x.name);
                parents_ok = false;
                continue;
            }
            auto it = names.find(p);
            if (it == names.end()) {
                out.push_back("unknown parent " + p + " of " + x.name);
                parents_ok = false;
                continue;
            }
            const auto& [exo, pos] = it->second;
            const Domain& d = exo ? spec.exogenous[pos].domain : spec.endogenous[pos].domain;
            rows = saturating_mul(rows, d.size());
            (exo ? exo_parents : endo_parents)[i].push_back(pos);
        }
        if (!parents_ok) {
            structural_ok = false;
            continue;
        }
        if (x.table.size() != rows)
            out.push_back("incomplete equation table: " + x.name + " has " + std::to_string(x.table.size()) +
                          " rows, expected " + std::to_string(rows));
        for (auto v : x.table) {
            if (v >= x.domain.size()) {
                out.push_back("equation output outside domain: " + x.name);
                break;
            }
        }
    }
    if (!structural_ok) return report;

    auto order = endogenous_order(endo_parents);
    if (!order) {
        out.push_back("graph contains a cycle");
        return report;
    }
    // Exogenous-ancestor coverage, propagated in topological order.
    std::vector<bool> covered(spec.endogenous.size(), false);
    for (auto v : *order) {
        covered[v] = !exo_parents[v].empty() ||
                     std::any_of(endo_parents[v].begin(), endo_parents[v].end(), [&](auto p) { return covered[p]; });
        if (!covered[v]) out.push_back("no exogenous ancestor: " + spec.endogenous[v].name);
    }
    return report;
}

Model Model::from_spec(ModelSpec spec) {
    auto report = validate(spec);
    if (!report.ok()) {
        std::string msg = "invalid model:";
        for (const auto& v : report.violations) msg += "\n  " + v;
        throw ModelError(msg);
    }
    Model m;
    m.spec_ = std::move(spec);
    m.compile();
    return m;
}

void Model::compile() {
    const std::size_t ne = spec_.exogenous.size();
    names_.clear();
    for (const auto& u : spec_.exogenous) names_.push_back(u.name);
    for (const auto& x : spec_.endogenous) names_.push_back(x.name);
    by_name_.clear();
    for (std::size_t i = 0; i < names_.size(); ++i) by_name_.emplace(names_[i], i);

    parents_.assign(names_.size(), {});
    children_.assign(names_.size(), {});
    strides_.assign(names_.size(), {});
    std::vector<std::vector<std::size_t>> endo_parents(spec_.endogenous.size());
    for (std::size_t i = 0; i < spec_.endogenous.size(); ++i) {
        const VarIndex v = ne + i;
        for (const auto& p : spec_.endogenous[i].parents) {
            auto pi = by_name_.at(p);
            parents_[v].push_back(pi);
            children_[pi].push_back(v);
            if (pi >= ne) endo_parents[i].push_back(pi - ne);
        }
        auto& st = strides_[v];
        st.assign(parents_[v].size(), 1);
        for (std::size_t k = parents_[v].size(); k-- > 1;)
            st[k - 1] = st[k] * domain(parents_[v][k]).size();
    }
    topo_.clear();
    const auto order = endogenous_order(endo_parents);
    for (auto i : *order) topo_.push_back(ne + i);
}

Model Model::with_constant(VarIndex v, ValueIndex value) const {
    if (is_exogenous(v) || v >= size()) throw QueryError("not an endogenous variable: " + name(v));
    Model m = *this;
    auto& eq = m.spec_.endogenous[v - exogenous_count()];
    eq.parents.clear();
    eq.table.assign(1, value);
    m.intervened_.push_back(eq.name);
    m.compile();
    return m;
}

const Domain& Model::domain(VarIndex v) const {
    return v < exogenous_count() ? spec_.exogenous[v].domain : spec_.endogenous[v - exogenous_count()].domain;
}

std::optional<VarIndex> Model::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

VarIndex Model::index_of(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw QueryError("unknown variable: " + std::string(name));
}

const std::vector<Rational>& Model::marginal(VarIndex exo) const {
    return spec_.exogenous.at(exo).marginal;
}

ValueIndex Model::lookup(VarIndex v, std::span<const ValueIndex> parent_values) const {
    const auto& st = strides_[v];
    std::size_t row = 0;
    for (std::size_t k = 0; k < st.size(); ++k) row += st[k] * parent_values[k];
    return spec_.endogenous[v - exogenous_count()].table[row];
}

std::vector<ValueIndex> Model::solve(std::span<const ValueIndex> exogenous_state) const {
    std::vector<ValueIndex> state(size(), 0);
    std::copy_n(exogenous_state.begin(), exogenous_count(), state.begin());
    for (auto v : topo_) {
        const auto& st = strides_[v];
        const auto& ps = parents_[v];
        std::size_t row = 0;
        for (std::size_t k = 0; k < ps.size(); ++k) row += st[k] * state[ps[k]];
        state[v] = spec_.endogenous[v - exogenous_count()].table[row];
    }
    return state;
}

Rational Model::weight(std::span<const ValueIndex> exogenous_state) const {
    Rational w = 1;
    for (std::size_t i = 0; i < exogenous_count(); ++i) w *= spec_.exogenous[i].marginal[exogenous_state[i]];
    return w;
}

std::uint64_t Model::exogenous_state_count() const {
    std::uint64_t n = 1;
    for (const auto& u : spec_.exogenous) n = saturating_mul(n, u.domain.size());
    return n;
}

std::vector<ValueIndex> exogenous_state(const Model& model, const Assignment& u) {
    std::vector<ValueIndex> state(model.exogenous_count());
    for (VarIndex i = 0; i < model.exogenous_count(); ++i) {
        auto it = u.find(model.name(i));
        if (it == u.end()) throw QueryError("missing exogenous assignment: " + model.name(i));
        state[i] = model.domain(i).require(it->second, model.name(i));
    }
    for (const auto& [name, _] : u) {
        auto v = model.index_of(name);
        if (!model.is_exogenous(v)) throw QueryError("not an exogenous variable: " + name);
    }
    return state;
}

Assignment solve(const Model& model, const Assignment& u) {
    auto state = model.solve(exogenous_state(model, u));
    Assignment out;
    for (VarIndex v = 0; v < model.size(); ++v) out[model.name(v)] = model.domain(v).values[state[v]];
    return out;
}

void for_each_exogenous_state(const Model& model,
                              const std::function<void(std::span<const ValueIndex>, const Rational&)>& fn,
                              std::uint64_t cap) {
    const auto count = model.exogenous_state_count();
    if (count > cap)
        throw CapExceeded("exogenous state space has " +
                          (count == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64")
                                                                               : std::to_string(count)) +
                          " states, above the enumeration cap of " + std::to_string(cap));
    const std::size_t n = model.exogenous_count();
    std::vector<ValueIndex> state(n, 0);
    // prefix[i] = product of the marginals of variables [0, i)
    std::vector<Rational> prefix(n + 1, Rational(1));
    auto refresh = [&](std::size_t from) {
        for (std::size_t i = from; i < n; ++i) prefix[i + 1] = prefix[i] * model.marginal(i)[state[i]];
    };
    refresh(0);
    while (true) {
        if (prefix[n] != 0) fn(state, prefix[n]);
        std::size_t k = n;
        while (k > 0) {
            --k;
            if (++state[k] < model.domain(k).size()) break;
            state[k] = 0;
            if (k == 0) return;
        }
        if (n == 0) return;
        refresh(k);
    }
}

std::vector<VarIndex> model_descendants(const Model& model, VarIndex from) {
    std::vector<bool> seen(model.size(), false);
    std::vector<VarIndex> stack{from};
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto c : model.children(v)) {
            if (!seen[c]) {
                seen[c] = true;
                stack.push_back(c);
            }
        }
    }
    std::vector<VarIndex> out;
    for (VarIndex v = 0; v < model.size(); ++v)
        if (seen[v] && v != from) out.push_back(v);
    return out;
}

}  // namespace xworld
