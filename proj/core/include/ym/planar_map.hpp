#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ym/errors.hpp"

namespace ym {

struct VertexSpec {
    int id = 0;
    std::vector<int> rotation; // half-edge ids, counterclockwise
};

struct EdgeSpec {
    int id = 0;                     // positive
    std::array<int, 2> half_edges{}; // [tail, head]
};

// Area per bounded face id.
using AreaVector = std::map<int, double>;

// Closed walk given by signed edge ids; +k runs tail -> head of edge k.
struct LoopWord {
    int base = -1;
    std::vector<int> steps;
    bool operator==(const LoopWord&) const = default;
};

class PlanarMap {
public:
    PlanarMap() = default;

    const std::vector<int>& vertex_ids() const { return vertex_ids_; }
    const std::vector<int>& edge_ids() const { return edge_ids_; }
    const std::vector<int>& half_edge_ids() const { return half_ids_; }

    int num_vertices() const { return static_cast<int>(vertex_ids_.size()); }
    int num_edges() const { return static_cast<int>(edge_ids_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int unbounded_face() const { return unbounded_; }
    int unbounded_marker() const { return marker_; }

    bool has_vertex(int v) const;
    bool has_edge(int e) const;
    bool has_half_edge(int h) const;

    const std::vector<int>& rotation(int v) const;
    int degree(int v) const { return static_cast<int>(rotation(v).size()); }
    std::array<int, 2> halves(int e) const;
    int tail(int e) const { return vertex_of(halves(e)[0]); }
    int head(int e) const { return vertex_of(halves(e)[1]); }

    int vertex_of(int h) const;
    int twin(int h) const;
    int edge_of(int h) const;
    bool is_tail_half(int h) const;
    int rot_next(int h) const;
    int rot_prev(int h) const;

    // Traced face on the right of h (h directed away from its vertex).
    int face_right(int h) const;
    int face_left(int h) const { return face_right(twin(h)); }
    // Face in the counterclockwise sector from h to rot_next(h).
    int sector_face(int h) const { return face_left(h); }
    const std::vector<int>& face_boundary(int f) const;
    std::vector<int> bounded_faces() const;

    // Half-edge through which a signed step leaves its start / enters its end.
    int step_out(int step) const;
    int step_in(int step) const;
    int step_from(int step) const { return vertex_of(step_out(step)); }
    int step_to(int step) const { return vertex_of(step_in(step)); }
    // Signed step that leaves along the half-edge h.
    int step_of(int h) const;

    // Throws NotOnGraph / EmptyLoop unless loop is a closed walk from its base.
    void check_loop(const LoopWord& loop) const;

    std::vector<VertexSpec> vertex_specs() const;
    std::vector<EdgeSpec> edge_specs() const;

    friend PlanarMap build_map(const std::vector<VertexSpec>&, const std::vector<EdgeSpec>&, int);

private:
    std::vector<int> vertex_ids_, edge_ids_, half_ids_;
    std::vector<std::vector<int>> rot_;      // by vertex id
    std::vector<std::array<int, 2>> halves_; // by edge id
    std::vector<int> vtx_, edge_, pos_;      // by half-edge id
    std::vector<int> face_;                  // by half-edge id
    std::vector<std::vector<int>> faces_;
    int unbounded_ = -1;
    int marker_ = -1;
};

// Faces are traced with succ(h) = rot_next(twin(h)); ids follow the smallest
// half-edge id on each boundary. Checks connectivity and V - E + F = 2.
PlanarMap build_map(const std::vector<VertexSpec>& vertices, const std::vector<EdgeSpec>& edges,
                    int unbounded_marker);

struct CrossingFrame {
    int vertex = -1;
    std::array<int, 4> e{};     // outgoing half-edges e1..e4
    std::array<int, 4> faces{}; // F1..F4, F_i between e_i and e_{i+1}
    int start = 0;              // step index leaving along e1
    int s0 = 0;                 // step index leaving along e2
    bool counterclockwise = true;
};

struct CrossingScan {
    std::vector<CrossingFrame> frames;
    std::vector<int> nonsimple_vertices; // visited at least twice, not a simple crossing
};

CrossingScan scan_crossings(const PlanarMap& map, const LoopWord& loop);
std::vector<CrossingFrame> crossing_frames(const PlanarMap& map, const LoopWord& loop);
std::pair<LoopWord, LoopWord> split_loop(const PlanarMap& map, const LoopWord& loop,
                                         const CrossingFrame& frame);

// Word helpers.
LoopWord rotate_loop(const PlanarMap& map, const LoopWord& loop, int start);
LoopWord reverse_loop(const PlanarMap& map, const LoopWord& loop);
LoopWord concat(const LoopWord& a, const LoopWord& b);
std::vector<int> free_reduce(const std::vector<int>& word);
LoopWord cyclic_reduce(const PlanarMap& map, const LoopWord& loop);
// Signed number of times the loop encircles each face (unbounded face = 0).
std::map<int, int> winding_numbers(const PlanarMap& map, const LoopWord& loop);
// Number of traversals of each edge id, either direction.
std::map<int, int> edge_multiplicity(const LoopWord& loop);

struct FaceMerge {
    std::map<int, int> to_child; // parent face id -> child face id
    int child_unbounded = -1;
    AreaVector aggregate(const AreaVector& parent) const;
};

struct EdgeSubstitution {
    std::map<int, std::vector<int>> words; // edge id -> signed word replacing +id
    std::vector<int> rewrite(const std::vector<int>& steps) const;
    LoopWord rewrite(const LoopWord& loop) const;
};

struct ReducedLoop {
    PlanarMap map;
    LoopWord loop;
    FaceMerge merge;
    std::map<int, std::vector<int>> edge_words; // child edge -> word of parent edges
};

// Drops untraversed edges and isolated vertices, smooths degree-2 vertices, retraces faces.
ReducedLoop reduce_subloop(const PlanarMap& map, const LoopWord& sub);

struct Genericized {
    PlanarMap map;
    EdgeSubstitution substitution;
    int vertex = -1;
    std::array<int, 4> half_edges{};     // original half-edges at v, rotation order
    std::array<int, 4> ring_vertices{};
    std::array<int, 4> spokes{};         // v -> ring vertex i
    std::array<int, 4> ring_edges{};     // ring vertex i -> ring vertex i+1
    std::array<int, 4> inner_faces{};    // between spokes i and i+1
    std::array<int, 4> outer_faces{};    // remnant of the original sector face (same id)
    AreaVector transfer(const AreaVector& areas, const std::array<double, 4>& inner = {}) const;
};

Genericized genericize(const PlanarMap& map, int v);

struct Subdivided {
    PlanarMap map;
    EdgeSubstitution substitution;
    int new_vertex = -1;
    int first = -1;  // keeps the old id, tail side
    int second = -1; // new edge, head side
};

Subdivided subdivide_edge(const PlanarMap& map, int e);

struct Example {
    std::string name;
    PlanarMap map;
    std::vector<LoopWord> loops;
    AreaVector areas;
    std::map<std::string, int> faces; // descriptive face names
};

// Names: simple(t), figure_eight(t1, t2), double_wound(s, a),
// two_loops_at_vertex(x, y, z), fig2_example(a, c, b),
// lasso_example(t1..t4), lasso_tree_example(t1..t5).
Example standard_example(const std::string& name, const std::vector<double>& params = {});
std::vector<std::string> standard_example_names();

} // namespace ym
