#include "xworld/dot.hpp"

#include <functional>
#include <set>
#include <sstream>

namespace xworld {

namespace {

std::string html_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string quoted(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

struct Style {
    bool exogenous = false;
    bool dashed = false;
    bool double_border = false;
    std::string label;  // HTML label body
};

std::string render(const CausalGraph& g, std::span<const std::string> conditioned, std::string_view name,
                   const std::function<Style(NodeIndex)>& style_of) {
    std::set<std::string> grey(conditioned.begin(), conditioned.end());
    for (const auto& c : grey) g.index_of(c);
    std::ostringstream os;
    os << "digraph " << quoted(name) << " {\n";
    for (NodeIndex i = 0; i < g.size(); ++i) {
        const auto s = style_of(i);
        const bool filled = grey.count(g.node(i).name) > 0;
        std::string st = s.dashed ? "dashed" : "solid";
        if (filled) st += ",filled";
        os << "  " << quoted(g.node(i).name) << " [label=<" << s.label << ">, shape="
           << (s.exogenous ? "box" : "ellipse") << ", style=\"" << st << "\"";
        if (s.double_border) os << ", peripheries=2";
        if (filled) os << ", fillcolor=grey";
        os << "];\n";
    }
    for (const auto& [from, to] : g.edges())
        os << "  " << quoted(g.node(from).name) << " -> " << quoted(g.node(to).name) << ";\n";
    os << "}\n";
    return os.str();
}

std::string subscript_label(std::string_view base, std::string_view sub) {
    return html_escape(base) + "<SUB>" + html_escape(sub) + "</SUB>";
}

}  // namespace

std::string export_dot(const CrossWorldGraph& g, std::span<const std::string> conditioned,
                       std::string_view graph_name) {
    return render(g.graph, conditioned, graph_name, [&](NodeIndex i) {
        const auto& node = g.graph.node(i);
        const auto& info = g.roles.at(node.name);
        Style s;
        s.exogenous = node.kind == NodeKind::exogenous;
        s.dashed = info.role == NodeRole::counterfactual_duplicate;
        s.double_border = info.role == NodeRole::teleporter;
        s.label = s.dashed ? subscript_label(info.base, g.intervention.to_string()) : html_escape(node.name);
        return s;
    });
}

std::string export_dot(const CausalGraph& g, std::span<const std::string> conditioned, std::string_view graph_name) {
    return render(g, conditioned, graph_name, [&](NodeIndex i) {
        const auto& node = g.node(i);
        Style s;
        s.exogenous = node.kind == NodeKind::exogenous;
        s.dashed = node.kind == NodeKind::counterfactual_duplicate;
        s.double_border = node.kind == NodeKind::teleporter_shared;
        s.label = html_escape(node.name);
        return s;
    });
}

}  // namespace xworld
