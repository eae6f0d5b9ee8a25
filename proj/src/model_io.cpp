#include "xworld/model_io.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace xworld {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
    throw ModelError("model format error at " + where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) schema_error(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
    return *it;
}

std::string label(const json& v, const std::string& where) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    schema_error(where, "expected a string or integer value label");
}

std::string name_of(const json& obj, const std::string& where) {
    const auto& n = field(obj, "name", where);
    if (!n.is_string()) schema_error(where + "/name", "expected a string");
    return n.get<std::string>();
}

Domain domain_of(const json& obj, const std::string& where) {
    const auto& d = field(obj, "domain", where);
    if (!d.is_array()) schema_error(where + "/domain", "expected an array");
    Domain out;
    for (std::size_t i = 0; i < d.size(); ++i) out.values.push_back(label(d[i], where + "/domain/" + std::to_string(i)));
    return out;
}

std::vector<ValueIndex> parse_table(const json& rows, const std::string& where, const std::string& owner,
                                    const Domain& own, const std::vector<const Domain*>& parent_domains) {
    if (!rows.is_array()) schema_error(where, "expected an array");
    std::size_t total = 1;
    for (const auto* d : parent_domains) total *= d->size();
    std::vector<std::optional<ValueIndex>> dense(total);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string at = where + "/" + std::to_string(r);
        const auto& given = field(rows[r], "given", at);
        if (!given.is_array() || given.size() != parent_domains.size())
            schema_error(at + "/given", "expected " + std::to_string(parent_domains.size()) + " parent values");
        std::size_t index = 0;
        for (std::size_t k = 0; k < given.size(); ++k) {
            auto lbl = label(given[k], at + "/given/" + std::to_string(k));
            auto vi = parent_domains[k]->index_of(lbl);
            if (!vi) schema_error(at + "/given/" + std::to_string(k), "value '" + lbl + "' not in parent domain");
            index = index * parent_domains[k]->size() + *vi;
        }
        auto out = label(field(rows[r], "then", at), at + "/then");
        auto oi = own.index_of(out);
        if (!oi) throw ModelError("equation output outside domain: " + owner + " at " + at + "/then");
        if (dense[index]) throw ModelError("duplicate equation row: " + owner + " at " + at);
        dense[index] = *oi;
    }
    std::vector<ValueIndex> table;
    table.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        if (!dense[i]) throw ModelError("incomplete equation table: " + owner + " is missing a parent combination");
        table.push_back(*dense[i]);
    }
    return table;
}

}  // namespace

ModelSpec parse_model_spec(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ModelError("model syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) schema_error("/", "expected an object");

    ModelSpec spec;
    const auto& exo = field(doc, "exogenous", "");
    if (!exo.is_array()) schema_error("/exogenous", "expected an array");
    for (std::size_t i = 0; i < exo.size(); ++i) {
        const std::string at = "/exogenous/" + std::to_string(i);
        ExogenousSpec u;
        u.name = name_of(exo[i], at);
        u.domain = domain_of(exo[i], at);
        const auto& m = field(exo[i], "marginal", at);
        if (!m.is_array()) schema_error(at + "/marginal", "expected an array");
        for (std::size_t k = 0; k < m.size(); ++k) {
            const std::string mat = at + "/marginal/" + std::to_string(k);
            try {
                if (m[k].is_string()) u.marginal.push_back(parse_rational(m[k].get<std::string>()));
                else if (m[k].is_number_integer()) u.marginal.push_back(parse_rational(m[k].dump()));
                else schema_error(mat, "expected a rational string \"p/q\"");
            } catch (const std::invalid_argument& e) {
                schema_error(mat, e.what());
            }
        }
        spec.exogenous.push_back(std::move(u));
    }

    const auto& endo = field(doc, "endogenous", "");
    if (!endo.is_array()) schema_error("/endogenous", "expected an array");
    // Domains first: equation rows may reference parents declared later.
    std::vector<std::pair<std::string, Domain>> headers;
    for (std::size_t i = 0; i < endo.size(); ++i) {
        const std::string at = "/endogenous/" + std::to_string(i);
        headers.emplace_back(name_of(endo[i], at), domain_of(endo[i], at));
    }
    auto find_domain = [&](const std::string& n) -> const Domain* {
        for (const auto& u : spec.exogenous)
            if (u.name == n) return &u.domain;
        for (const auto& [hn, hd] : headers)
            if (hn == n) return &hd;
        return nullptr;
    };
    for (std::size_t i = 0; i < endo.size(); ++i) {
        const std::string at = "/endogenous/" + std::to_string(i);
        EndogenousSpec x;
        x.name = headers[i].first;
        x.domain = headers[i].second;
        const auto& ps = field(endo[i], "parents", at);
        if (!ps.is_array()) schema_error(at + "/parents", "expected an array");
        std::vector<const Domain*> pdoms;
        bool resolvable = true;
        for (std::size_t k = 0; k < ps.size(); ++k) {
            if (!ps[k].is_string()) schema_error(at + "/parents/" + std::to_string(k), "expected a string");
            x.parents.push_back(ps[k].get<std::string>());
            const auto* d = find_domain(x.parents.back());
            if (!d) resolvable = false;
            pdoms.push_back(d);
        }
        const auto& rows = field(endo[i], "table", at);
        // Unknown parents leave the table empty; validate() reports them.
        if (resolvable) x.table = parse_table(rows, at + "/table", x.name, x.domain, pdoms);
        spec.endogenous.push_back(std::move(x));
    }
    return spec;
}

Model parse_model(std::string_view text) {
    return Model::from_spec(parse_model_spec(text));
}

std::string render_model(const ModelSpec& spec) {
    ordered_json doc;
    doc["exogenous"] = ordered_json::array();
    for (const auto& u : spec.exogenous) {
        ordered_json e;
        e["name"] = u.name;
        e["domain"] = u.domain.values;
        auto& m = e["marginal"] = ordered_json::array();
        for (const auto& p : u.marginal) m.push_back(to_string(p));
        doc["exogenous"].push_back(std::move(e));
    }
    doc["endogenous"] = ordered_json::array();
    auto domain_of_name = [&](const std::string& n) -> const Domain& {
        for (const auto& u : spec.exogenous)
            if (u.name == n) return u.domain;
        for (const auto& x : spec.endogenous)
            if (x.name == n) return x.domain;
        throw ModelError("cannot render: unknown parent " + n);
    };
    for (const auto& x : spec.endogenous) {
        ordered_json e;
        e["name"] = x.name;
        e["domain"] = x.domain.values;
        e["parents"] = x.parents;
        std::vector<const Domain*> pd;
        for (const auto& p : x.parents) pd.push_back(&domain_of_name(p));
        auto& rows = e["table"] = ordered_json::array();
        std::vector<ValueIndex> digits(pd.size(), 0);
        for (std::size_t r = 0; r < x.table.size(); ++r) {
            ordered_json row;
            auto& given = row["given"] = ordered_json::array();
            for (std::size_t k = 0; k < pd.size(); ++k) given.push_back(pd[k]->values[digits[k]]);
            row["then"] = x.domain.values.at(x.table[r]);
            rows.push_back(std::move(row));
            for (std::size_t k = pd.size(); k-- > 0;) {
                if (++digits[k] < pd[k]->size()) break;
                digits[k] = 0;
            }
        }
        doc["endogenous"].push_back(std::move(e));
    }
    return doc.dump(2) + "\n";
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot read model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

}  // namespace xworld
