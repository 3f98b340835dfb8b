#include "graph_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ymcli {

using ym::Error;
using ym::ErrorCode;
using json = nlohmann::json;

namespace {

[[noreturn]] void semantic(const std::string& source, const std::string& what)
{
    throw Error(ErrorCode::SemanticError, source + ": " + what);
}

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where,
               const std::string& source)
{
    if (!obj.is_object()) semantic(source, where + " must be an object");
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) semantic(source, "unknown key '" + k + "' in " + where);
}

int as_int(const json& v, const std::string& where, const std::string& source)
{
    if (!v.is_number_integer()) semantic(source, where + " must be an integer");
    return v.get<int>();
}

std::string where_in(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace

GraphFile parse_graph_text(const std::string& text, const std::string& source)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::string msg = e.what();
        auto cut = msg.find("]: ");
        if (cut != std::string::npos) msg = msg.substr(cut + 3);
        throw Error(ErrorCode::ParseError, source + ": " + where_in(text, e.byte) + ": " + msg);
    }
    only_keys(doc, {"vertices", "edges", "unbounded_marker", "areas", "loops"}, "top level", source);
    for (const char* k : {"vertices", "edges", "unbounded_marker"})
        if (!doc.contains(k)) semantic(source, std::string("missing key '") + k + "'");

    std::vector<ym::VertexSpec> vertices;
    if (!doc["vertices"].is_array()) semantic(source, "vertices must be an array");
    for (const auto& v : doc["vertices"]) {
        only_keys(v, {"id", "rotation"}, "vertex", source);
        if (!v.contains("id") || !v.contains("rotation")) semantic(source, "vertex needs id and rotation");
        ym::VertexSpec spec;
        spec.id = as_int(v["id"], "vertex id", source);
        if (!v["rotation"].is_array()) semantic(source, "rotation must be an array");
        for (const auto& h : v["rotation"]) spec.rotation.push_back(as_int(h, "half-edge id", source));
        vertices.push_back(std::move(spec));
    }

    std::vector<ym::EdgeSpec> edges;
    if (!doc["edges"].is_array()) semantic(source, "edges must be an array");
    for (const auto& e : doc["edges"]) {
        only_keys(e, {"id", "half_edges"}, "edge", source);
        if (!e.contains("id") || !e.contains("half_edges")) semantic(source, "edge needs id and half_edges");
        ym::EdgeSpec spec;
        spec.id = as_int(e["id"], "edge id", source);
        const auto& he = e["half_edges"];
        if (!he.is_array() || he.size() != 2) semantic(source, "half_edges must list two ids");
        spec.half_edges = {as_int(he[0], "half-edge id", source), as_int(he[1], "half-edge id", source)};
        edges.push_back(spec);
    }

    // dangling half-edges are reported here rather than as a rotation error
    std::set<int> in_rotation, in_edges;
    for (const auto& v : vertices) in_rotation.insert(v.rotation.begin(), v.rotation.end());
    for (const auto& e : edges) in_edges.insert(e.half_edges.begin(), e.half_edges.end());
    for (int h : in_edges)
        if (!in_rotation.count(h)) semantic(source, "dangling half-edge " + std::to_string(h));
    for (int h : in_rotation)
        if (!in_edges.count(h)) semantic(source, "half-edge " + std::to_string(h) + " belongs to no edge");

    GraphFile g;
    g.map = ym::build_map(vertices, edges, as_int(doc["unbounded_marker"], "unbounded_marker", source));
    for (int f : g.map.bounded_faces()) g.areas[f] = 1.0;

    if (doc.contains("areas")) {
        if (!doc["areas"].is_object()) semantic(source, "areas must be an object");
        for (const auto& [k, v] : doc["areas"].items()) {
            int f = 0;
            std::size_t used = 0;
            try {
                f = std::stoi(k, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != k.size()) semantic(source, "area key '" + k + "' is not a face id");
            if (!g.areas.count(f)) semantic(source, "face " + k + " is not a bounded face");
            if (!v.is_number() || !std::isfinite(v.get<double>()) || v.get<double>() < 0)
                semantic(source, "area of face " + k + " must be a non-negative number");
            g.areas[f] = v.get<double>();
        }
    }

    if (doc.contains("loops")) {
        if (!doc["loops"].is_object()) semantic(source, "loops must be an object");
        for (const auto& [name, word] : doc["loops"].items()) {
            if (!word.is_array() || word.empty()) semantic(source, "loop '" + name + "' must be a non-empty array");
            ym::LoopWord loop;
            for (const auto& s : word) {
                int step = as_int(s, "loop step", source);
                if (step == 0 || !g.map.has_edge(std::abs(step)))
                    semantic(source, "loop '" + name + "' uses unknown edge " + std::to_string(step));
                loop.steps.push_back(step);
            }
            loop.base = g.map.step_from(loop.steps.front());
            try {
                g.map.check_loop(loop);
            } catch (const Error& e) {
                semantic(source, "loop '" + name + "' is not a closed walk (" + e.what() + ")");
            }
            g.loops[name] = std::move(loop);
        }
    }
    return g;
}

GraphFile parse_graph_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_graph_text(ss.str(), path);
}

nlohmann::ordered_json to_json(const GraphFile& g)
{
    nlohmann::ordered_json out;
    out["vertices"] = nlohmann::ordered_json::array();
    for (const auto& v : g.map.vertex_specs()) out["vertices"].push_back({{"id", v.id}, {"rotation", v.rotation}});
    out["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.map.edge_specs())
        out["edges"].push_back({{"id", e.id}, {"half_edges", {e.half_edges[0], e.half_edges[1]}}});
    out["unbounded_marker"] = g.map.unbounded_marker();
    out["areas"] = nlohmann::ordered_json::object();
    for (const auto& [f, a] : g.areas) out["areas"][std::to_string(f)] = a;
    out["loops"] = nlohmann::ordered_json::object();
    for (const auto& [name, loop] : g.loops) out["loops"][name] = loop.steps;
    return out;
}

GraphFile from_example(const ym::Example& ex, const std::vector<std::string>& loop_names)
{
    GraphFile g;
    g.map = ex.map;
    g.areas = ex.areas;
    for (std::size_t i = 0; i < ex.loops.size(); ++i) {
        std::string name = i < loop_names.size() ? loop_names[i] : "L" + std::to_string(i + 1);
        g.loops[name] = ym::rotate_loop(ex.map, ex.loops[i], 0);
    }
    return g;
}

void apply_area_override(GraphFile& g, const std::string& spec)
{
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::SemanticError, "area override '" + spec + "' is not F=value");
    std::string key = spec.substr(0, eq), val = spec.substr(eq + 1);
    if (!key.empty() && (key[0] == 'F' || key[0] == 'f')) key = key.substr(1);
    int f = 0;
    double a = 0;
    try {
        std::size_t used = 0;
        f = std::stoi(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
        a = std::stod(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
        throw Error(ErrorCode::SemanticError, "area override '" + spec + "' is not F=value");
    }
    if (!g.areas.count(f)) throw Error(ErrorCode::SemanticError, "face " + key + " is not a bounded face");
    if (!(a >= 0) || !std::isfinite(a)) throw Error(ErrorCode::SemanticError, "area must be a non-negative number");
    g.areas[f] = a;
}

} // namespace ymcli
