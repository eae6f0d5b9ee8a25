#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xworld/cli.hpp"
#include "xworld/dot.hpp"
#include "xworld/fixtures.hpp"
#include "xworld/genrand.hpp"
#include "xworld/inference.hpp"
#include "xworld/model_io.hpp"

#include <sstream>

namespace py = pybind11;
using namespace xworld;

namespace {

// Exact values cross the boundary as (numerator, denominator) so Python can build a Fraction.
py::tuple fraction(const Rational& r) {
    const auto num = boost::multiprecision::numerator(r).str();
    const auto den = boost::multiprecision::denominator(r).str();
    return py::make_tuple(py::int_(py::str(num)), py::int_(py::str(den)));
}

CrossWorldGraph world_graph(const Model& m, const std::string& method, const Intervention& iv) {
    if (method == "twin") return build_twin(m, iv);
    if (method == "teleporter") return build_teleporter(m, iv);
    throw QueryError("unknown world '" + method + "', expected twin or teleporter");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact cross-world counterfactual reasoning over discrete SCMs";

    py::register_exception<Error>(m, "XWorldError", PyExc_RuntimeError);

    py::class_<Intervention>(m, "Intervention")
        .def(py::init<std::string, std::string>(), py::arg("target"), py::arg("value"))
        .def_readonly("target", &Intervention::target)
        .def_readonly("value", &Intervention::value)
        .def("__repr__", [](const Intervention& iv) { return "do(" + iv.to_string() + ")"; });
    m.def("parse_intervention", &parse_intervention, py::arg("text"));

    py::class_<Model>(m, "Model")
        .def_static("parse", [](const std::string& text) { return parse_model(text); }, py::arg("text"))
        .def_static("load", &load_model, py::arg("path"))
        .def_static("fixture", [](const std::string& name) { return fixture(name); }, py::arg("name"))
        .def("render", [](const Model& model) { return render_model(model); })
        .def_property_readonly("exogenous", [](const Model& model) {
            std::vector<std::string> out;
            for (VarIndex v = 0; v < model.exogenous_count(); ++v) out.push_back(model.name(v));
            return out;
        })
        .def_property_readonly("endogenous", [](const Model& model) {
            std::vector<std::string> out;
            for (VarIndex v = model.exogenous_count(); v < model.size(); ++v) out.push_back(model.name(v));
            return out;
        })
        .def("solve", [](const Model& model, const Assignment& u) { return solve(model, u); }, py::arg("u"))
        .def("intervene", [](const Model& model, const Intervention& iv) { return intervene(model, iv); });

    m.def("fixture_names", &fixture_names);
    m.def("fixture_intervention", [](const std::string& name) { return fixture_intervention(name); });
    m.def("validate_text", [](const std::string& text) { return validate(parse_model_spec(text)).violations; },
          py::arg("text"), "Violations of a model document; empty when valid.");

    m.def(
        "d_separated",
        [](const Model& model, const std::string& world, const Intervention* iv, const std::string& a,
           const std::string& b, const std::vector<std::string>& given) {
            CausalGraph g;
            std::function<std::string(const std::string&)> node = [](const std::string& s) { return s; };
            std::optional<CrossWorldGraph> cw;
            if (world == "real") {
                g = graph_of(model);
            } else {
                if (!iv) throw QueryError("world '" + world + "' requires an intervention");
                cw = world_graph(model, world, *iv);
                g = cw->graph;
                node = [&](const std::string& s) { return resolve_node(model, *cw, s); };
            }
            std::vector<std::string> cond;
            for (const auto& c : given) cond.push_back(node(c));
            const auto v = d_separated(g, node(a), node(b), cond);
            py::dict out;
            out["separated"] = v.separated;
            out["witness"] = v.witness ? py::object(py::str(v.witness->to_string())) : py::object(py::none());
            return out;
        },
        py::arg("model"), py::arg("world"), py::arg("intervention"), py::arg("a"), py::arg("b"),
        py::arg("given") = std::vector<std::string>{});

    m.def(
        "export_dot",
        [](const Model& model, const std::string& world, const Intervention& iv, const std::vector<std::string>& given) {
            const auto cw = world_graph(model, world, iv);
            std::vector<std::string> cond;
            for (const auto& c : given) cond.push_back(resolve_node(model, cw, c));
            return export_dot(cw, cond);
        },
        py::arg("model"), py::arg("world"), py::arg("intervention"), py::arg("given") = std::vector<std::string>{});

    m.def(
        "duplicates",
        [](const Model& model, const std::string& world, const Intervention& iv) {
            return world_graph(model, world, iv).duplicates();
        },
        py::arg("model"), py::arg("world"), py::arg("intervention"));

    m.def(
        "abduction",
        [](const Model& model, const Intervention& iv, const std::string& target, const std::string& value,
           const Assignment& evidence) {
            return fraction(abduction_action_prediction(model, iv, {target, value}, evidence));
        },
        py::arg("model"), py::arg("intervention"), py::arg("target"), py::arg("value"),
        py::arg("evidence") = Assignment{});

    m.def(
        "adjust",
        [](const Model& model, const Intervention& iv, const std::string& target, const std::string& value,
           const Assignment& evidence, const std::vector<std::string>& z) {
            return fraction(adjustment_estimate(model, iv, {target, value}, evidence, z));
        },
        py::arg("model"), py::arg("intervention"), py::arg("target"), py::arg("value"), py::arg("evidence"),
        py::arg("adjust"));

    m.def(
        "criterion",
        [](const Model& model, const Intervention& iv, const std::string& target,
           const std::vector<std::string>& evidence_vars, const std::vector<std::string>& z) {
            const auto v = counterfactual_criterion(model, iv, target, evidence_vars, z);
            py::dict out;
            out["satisfied"] = v.satisfied;
            out["witness"] = v.witness ? py::object(py::str(v.witness->to_string())) : py::object(py::none());
            return out;
        },
        py::arg("model"), py::arg("intervention"), py::arg("target"), py::arg("evidence_vars"), py::arg("adjust"));

    m.def(
        "crossworld_joint",
        [](const Model& model, const Intervention& iv, const std::vector<std::string>& vars) {
            const auto t = crossworld_joint(model, iv, vars);
            py::list rows;
            for (const auto& [tuple, p] : t.rows()) {
                py::list labels;
                for (std::size_t i = 0; i < tuple.size(); ++i) labels.append(t.domains()[i].values[tuple[i]]);
                rows.append(py::make_tuple(py::tuple(labels), fraction(p)));
            }
            return py::make_tuple(t.variables(), rows);
        },
        py::arg("model"), py::arg("intervention"), py::arg("vars"));

    m.def("consistency_check", [](const Model& model, const Intervention& iv) { return consistency_check(model, iv); });

    m.def(
        "trials",
        [](std::uint64_t seed, std::size_t count, std::size_t queries, std::size_t n, unsigned threads) {
            GenConfig cfg;
            cfg.seed = seed;
            cfg.n_endogenous = n;
            py::gil_scoped_release release;
            return run_trials(cfg, count, queries, threads).to_jsonl();
        },
        py::arg("seed") = 42, py::arg("count") = 100, py::arg("queries") = 3, py::arg("n") = 4,
        py::arg("threads") = 1, "Soundness trials as JSON lines; the last line is the summary.");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
