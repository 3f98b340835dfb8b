#include "ym/planar_map.hpp"

namespace ym {

namespace {

// Vertex i gets rotations[i]; edge k (1-based) uses half-edges 2k-2 (tail) and 2k-1 (head).
PlanarMap make_map(const std::vector<std::vector<int>>& rotations, int num_edges, int marker)
{
    std::vector<VertexSpec> vs;
    for (size_t i = 0; i < rotations.size(); ++i) vs.push_back({static_cast<int>(i), rotations[i]});
    std::vector<EdgeSpec> es;
    for (int k = 1; k <= num_edges; ++k) es.push_back({k, {2 * k - 2, 2 * k - 1}});
    return build_map(vs, es, marker);
}

std::vector<double> with_defaults(const std::string& name, const std::vector<double>& params,
                                  std::vector<double> defaults)
{
    if (params.empty()) return defaults;
    if (params.size() != defaults.size())
        throw Error(ErrorCode::SemanticError, name + " expects " + std::to_string(defaults.size()) + " parameters");
    for (double p : params)
        if (!(p >= 0)) throw Error(ErrorCode::NonpositiveTime, name + ": areas must be nonnegative");
    return params;
}

} // namespace

std::vector<std::string> standard_example_names()
{
    return {"simple", "figure_eight", "double_wound", "two_loops_at_vertex",
            "fig2_example", "lasso_example", "lasso_tree_example"};
}

Example standard_example(const std::string& name, const std::vector<double>& params)
{
    Example ex;
    ex.name = name;
    if (name == "simple") {
        auto p = with_defaults(name, params, {1.0});
        ex.map = make_map({{0, 1}}, 1, 0);
        ex.loops = {{0, {1}}};
        ex.faces = {{"disk", ex.map.face_left(0)}};
        ex.areas = {{ex.faces["disk"], p[0]}};
    } else if (name == "figure_eight") {
        // right lobe counterclockwise, left lobe clockwise
        auto p = with_defaults(name, params, {1.0, 1.0});
        ex.map = make_map({{1, 3, 2, 0}}, 2, 0);
        ex.loops = {{0, {1, 2}}};
        ex.faces = {{"lobe1", ex.map.face_left(0)}, {"lobe2", ex.map.face_right(2)}};
        ex.areas = {{ex.faces["lobe1"], p[0]}, {ex.faces["lobe2"], p[1]}};
    } else if (name == "double_wound") {
        // outer circle then inner circle, both counterclockwise
        auto p = with_defaults(name, params, {1.0, 1.0});
        ex.map = make_map({{2, 3, 1, 0}}, 2, 0);
        ex.loops = {{0, {1, 2}}};
        ex.faces = {{"inner", ex.map.face_left(2)}, {"annulus", ex.map.face_left(0)}};
        ex.areas = {{ex.faces["inner"], p[0]}, {ex.faces["annulus"], p[1]}};
    } else if (name == "two_loops_at_vertex") {
        // two overlapping circles through v and w; L1 = edges 1,2 and L2 = edges 3,4
        auto p = with_defaults(name, params, {1.0, 1.0, 1.0});
        ex.map = make_map({{0, 7, 3, 4}, {5, 2, 6, 1}}, 4, 2);
        ex.loops = {{0, {1, 2}}, {0, {3, 4}}};
        ex.faces = {{"first_only", ex.map.sector_face(7)},
                    {"second_only", ex.map.sector_face(4)},
                    {"overlap", ex.map.sector_face(0)}};
        ex.areas = {{ex.faces["first_only"], p[0]}, {ex.faces["second_only"], p[1]}, {ex.faces["overlap"], p[2]}};
    } else if (name == "fig2_example") {
        // figure eight whose first lobe carries an inward curl
        auto p = with_defaults(name, params, {1.0, 1.0, 1.0});
        ex.map = make_map({{5, 7, 6, 0}, {4, 2, 3, 1}}, 4, 4);
        ex.loops = {{0, {1, 2, 3, 4}}};
        ex.faces = {{"lobe1", ex.map.sector_face(0)},
                    {"curl", ex.map.sector_face(2)},
                    {"lobe2", ex.map.sector_face(7)}};
        ex.areas = {{ex.faces["lobe1"], p[0]}, {ex.faces["curl"], p[1]}, {ex.faces["lobe2"], p[2]}};
    } else if (name == "lasso_example") {
        // three simple crossings; lassos L1..L4 attached to the faces around v
        auto p = with_defaults(name, params, {1.0, 1.0, 1.0, 1.0});
        ex.map = make_map({{4, 0, 6, 2}, {10, 8, 1, 5}, {3, 7, 9, 11}}, 6, 11);
        ex.loops = {{0, {3, 5, -2, 1, 6, -4}}};
        ex.faces = {{"F1", ex.map.sector_face(4)},
                    {"F2", ex.map.sector_face(0)},
                    {"F3", ex.map.sector_face(6)},
                    {"F4", ex.map.sector_face(2)}};
        for (int i = 1; i <= 4; ++i) ex.areas[ex.faces["F" + std::to_string(i)]] = p[i - 1];
    } else if (name == "lasso_tree_example") {
        // five bounded faces; F1 is a quadrilateral, F5 a bigon outside it
        auto p = with_defaults(name, params, {1.0, 1.0, 1.0, 1.0, 1.0});
        ex.map = make_map({{0, 2, 4, 6}, {12, 9, 1, 17}, {13, 10, 8}, {11, 14, 3}, {7, 5, 15, 16}}, 9, 12);
        ex.loops = {{0, {1, 7, 6, -2}}};
        ex.faces = {{"F1", ex.map.sector_face(0)},
                    {"F2", ex.map.sector_face(2)},
                    {"F3", ex.map.sector_face(4)},
                    {"F4", ex.map.sector_face(6)},
                    {"F5", ex.map.sector_face(12)}};
        for (int i = 1; i <= 5; ++i) ex.areas[ex.faces["F" + std::to_string(i)]] = p[i - 1];
    } else {
        throw Error(ErrorCode::UnknownName, "no standard example named '" + name + "'");
    }
    return ex;
}

} // namespace ym
