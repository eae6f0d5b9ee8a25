#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "xworld/fixtures.hpp"
#include "xworld/model_io.hpp"

#include <filesystem>
#include <fstream>

using namespace xworld;

namespace {

const char* kIdentity = R"({
  "exogenous": [{"name": "U", "domain": ["0", "1"], "marginal": ["1/2", "1/2"]}],
  "endogenous": [{"name": "X", "domain": ["0", "1"], "parents": ["U"],
                  "table": [{"given": ["0"], "then": "0"}, {"given": ["1"], "then": "1"}]}]
})";

std::string error_of(const std::string& text) {
    try {
        parse_model(text);
    } catch (const ModelError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("identity model parses to two nodes") {
    const Model m = parse_model(kIdentity);
    CHECK(m.size() == 2);
    CHECK(solve(m, {{"U", "1"}}).at("X") == "1");
}

TEST_CASE("integer labels and marginals are accepted") {
    const Model m = parse_model(R"({
      "exogenous": [{"name": "U", "domain": [0, 1, 2], "marginal": [1, 0, "0/3"]}],
      "endogenous": [{"name": "X", "domain": [0, 1], "parents": ["U"],
        "table": [{"given": [0], "then": 1}, {"given": [1], "then": 0}, {"given": [2], "then": 0}]}]
    })");
    CHECK(m.marginal(0)[0] == 1);
    CHECK(solve(m, {{"U", "0"}}).at("X") == "1");
}

TEST_CASE("rows may appear in any order") {
    const Model m = parse_model(R"({
      "exogenous": [{"name": "U", "domain": ["a", "b"], "marginal": ["1/3", "2/3"]}],
      "endogenous": [{"name": "X", "domain": ["p", "q"], "parents": ["U"],
        "table": [{"given": ["b"], "then": "p"}, {"given": ["a"], "then": "q"}]}]
    })");
    CHECK(solve(m, {{"U", "a"}}).at("X") == "q");
    CHECK(solve(m, {{"U", "b"}}).at("X") == "p");
}

TEST_CASE("parse errors") {
    CHECK(error_of(R"({"exogenous": [)").rfind("model syntax error at byte", 0) == 0);
    CHECK(error_of(R"({
      "exogenous": [{"name": "U", "domain": ["0", "1"], "marginal": ["1/2", "1/2"]}],
      "endogenous": [{"name": "X", "domain": ["0", "1"], "parents": ["U"],
                      "table": [{"given": ["0"], "then": "0"}]}]
    })").find("incomplete equation table") != std::string::npos);
    CHECK(error_of(R"({
      "exogenous": [{"name": "U", "domain": ["0", "1"], "marginal": ["1/2", "1/2"]}],
      "endogenous": [{"name": "X", "domain": ["0", "1"], "parents": ["U"],
                      "table": [{"given": ["0"], "then": "0"}, {"given": ["0"], "then": "1"},
                                {"given": ["1"], "then": "1"}]}]
    })").find("duplicate equation row") != std::string::npos);
    CHECK(error_of(R"({
      "exogenous": [{"name": "U", "domain": ["0", "1"], "marginal": ["1/2", "1/2"]}],
      "endogenous": [{"name": "X", "domain": ["0", "1"], "parents": ["U"],
                      "table": [{"given": ["0"], "then": "7"}, {"given": ["1"], "then": "1"}]}]
    })").find("equation output outside domain") != std::string::npos);
    CHECK(error_of(R"({"exogenous": [{"name": "U", "domain": ["0"], "marginal": ["x"]}], "endogenous": []})")
              .find("/exogenous/0/marginal/0") != std::string::npos);
    CHECK(error_of(R"({"exogenous": [{"name": "U", "domain": ["0", "1"], "marginal": ["1/2", "1/3"]}],
                       "endogenous": []})")
              .find("marginal not normalized") != std::string::npos);
}

TEST_CASE("canonical rendering round-trips") {
    for (const auto& name : fixture_names()) {
        const Model m = fixture(name);
        const std::string text = render_model(m);
        const Model back = parse_model(text);
        CHECK(back.spec() == m.spec());
        CHECK(render_model(back) == text);
    }
}

TEST_CASE("rendering reduces marginals to lowest terms") {
    const Model m = parse_model(R"({
      "exogenous": [{"name": "U", "domain": ["0", "1"], "marginal": ["2/4", "3/6"]}],
      "endogenous": [{"name": "X", "domain": ["0", "1"], "parents": ["U"],
        "table": [{"given": ["1"], "then": "1"}, {"given": ["0"], "then": "0"}]}]
    })");
    const std::string text = render_model(m);
    CHECK(text.find("\"1/2\"") != std::string::npos);
    CHECK(text.find("2/4") == std::string::npos);
    CHECK(text.find("\"exogenous\"") < text.find("\"endogenous\""));
}

TEST_CASE("load_model reads files") {
    const auto path = std::filesystem::temp_directory_path() / "xworld_identity.json";
    {
        std::ofstream out(path);
        out << kIdentity;
    }
    CHECK(load_model(path.string()).size() == 2);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_model(path.string()), ModelError);
}
