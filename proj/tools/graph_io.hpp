#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "ym/planar_map.hpp"

namespace ymcli {

struct GraphFile {
    ym::PlanarMap map;
    ym::AreaVector areas;                     // every bounded face, defaults filled in
    std::map<std::string, ym::LoopWord> loops; // base = start vertex of the first step
};

// Keys: vertices[{id, rotation[]}], edges[{id, half_edges[2]}], unbounded_marker,
// areas{face: value}, loops{name: [signed edge ids]}. Unknown keys are rejected.
GraphFile parse_graph_text(const std::string& text, const std::string& source = "<input>");
GraphFile parse_graph_file(const std::string& path);

nlohmann::ordered_json to_json(const GraphFile& g);
GraphFile from_example(const ym::Example& ex, const std::vector<std::string>& loop_names = {});

// "F=v" overrides; F must be a bounded face of the map.
void apply_area_override(GraphFile& g, const std::string& spec);

} // namespace ymcli
