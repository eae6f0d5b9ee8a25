#include "xworld/fixtures.hpp"

#include "xworld/model_io.hpp"

#include <functional>

namespace xworld {

namespace {

const Domain kBinary{{"0", "1"}};

ExogenousSpec coin(std::string name, int p0_num, int p0_den) {
    return {std::move(name), kBinary, {Rational(p0_num, p0_den), Rational(p0_den - p0_num, p0_den)}};
}

// Binary equation from a boolean function of the parent values (parent order).
EndogenousSpec equation(std::string name, std::vector<std::string> parents,
                        const std::function<bool(const std::vector<bool>&)>& f) {
    EndogenousSpec x{std::move(name), kBinary, std::move(parents), {}};
    const std::size_t k = x.parents.size();
    for (std::size_t row = 0; row < (std::size_t{1} << k); ++row) {
        std::vector<bool> bits(k);
        for (std::size_t i = 0; i < k; ++i) bits[i] = (row >> (k - 1 - i)) & 1;
        x.table.push_back(f(bits) ? 1 : 0);
    }
    return x;
}

ModelSpec fig1() {
    ModelSpec s;
    s.exogenous = {coin("U_Z", 1, 2), coin("U_X", 3, 4), coin("U_Y", 2, 3)};
    s.endogenous = {
        equation("Z", {"U_Z"}, [](auto& b) { return b[0]; }),
        equation("X", {"Z", "U_X"}, [](auto& b) { return b[0] != b[1]; }),
        equation("Y", {"X", "Z", "U_Y"}, [](auto& b) { return (b[0] && b[1]) != b[2]; }),
    };
    return s;
}

ModelSpec fig2() {
    ModelSpec s;
    s.exogenous = {coin("U", 1, 3)};
    s.endogenous = {
        equation("C", {"U"}, [](auto& b) { return b[0]; }),
        equation("A", {"C"}, [](auto& b) { return b[0]; }),
        equation("B", {"C"}, [](auto& b) { return b[0]; }),
        equation("D", {"A", "B"}, [](auto& b) { return b[0] || b[1]; }),
    };
    return s;
}

ModelSpec fig3() {
    ModelSpec s;
    s.exogenous = {coin("U_C", 1, 3), coin("U_X", 2, 3), coin("U_Z", 3, 4), coin("U_T", 3, 5), coin("U_Y", 4, 5)};
    s.endogenous = {
        equation("C", {"U_C"}, [](auto& b) { return b[0]; }),
        equation("X", {"C", "U_X"}, [](auto& b) { return b[0] != b[1]; }),
        equation("Z", {"C", "U_Z"}, [](auto& b) { return b[0] != b[1]; }),
        equation("T", {"Z", "U_T"}, [](auto& b) { return b[0] != b[1]; }),
        equation("Y", {"X", "T", "U_Y"}, [](auto& b) { return (b[0] && b[1]) != b[2]; }),
    };
    return s;
}

ModelSpec fig4() {
    ModelSpec s;
    s.exogenous = {coin("U_X", 2, 5), coin("U_Z", 1, 3), coin("U_W", 3, 4), coin("U_T", 4, 5), coin("U_Y", 5, 6)};
    s.endogenous = {
        equation("X", {"U_X"}, [](auto& b) { return b[0]; }),
        equation("Z", {"U_Z"}, [](auto& b) { return b[0]; }),
        equation("W", {"X", "Z", "U_W"}, [](auto& b) { return (b[0] || b[1]) != b[2]; }),
        equation("T", {"Z", "U_T"}, [](auto& b) { return b[0] != b[1]; }),
        equation("Y", {"X", "T", "U_Y"}, [](auto& b) { return (b[0] && b[1]) != b[2]; }),
    };
    return s;
}

ModelSpec fig5() {
    ModelSpec s;
    s.exogenous = {coin("U_E", 1, 2), coin("U_X", 3, 4), coin("U_R", 5, 6), coin("U_Y", 7, 8)};
    s.endogenous = {
        equation("E", {"U_E"}, [](auto& b) { return b[0]; }),
        equation("X", {"E", "U_X"}, [](auto& b) { return b[0] != b[1]; }),
        equation("R", {"X", "E", "U_R"}, [](auto& b) { return (b[0] && b[1]) != b[2]; }),
        equation("Y", {"R", "U_Y"}, [](auto& b) { return b[0] != b[1]; }),
    };
    return s;
}

struct Entry {
    const char* name;
    ModelSpec (*make)();
    Intervention iv;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> all = {
        {"fig1", fig1, {"X", "1"}}, {"fig2", fig2, {"A", "1"}}, {"fig3", fig3, {"X", "1"}},
        {"fig4", fig4, {"X", "1"}}, {"fig5", fig5, {"X", "1"}},
    };
    return all;
}

const Entry& entry(std::string_view name) {
    for (const auto& e : entries())
        if (name == e.name) return e;
    throw QueryError("unknown fixture: " + std::string(name));
}

}  // namespace

const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& e : entries()) n.emplace_back(e.name);
        return n;
    }();
    return names;
}

Model fixture(std::string_view name) {
    return Model::from_spec(entry(name).make());
}

std::string fixture_text(std::string_view name) {
    return render_model(entry(name).make());
}

Intervention fixture_intervention(std::string_view name) {
    return entry(name).iv;
}

}  // namespace xworld
