#include "ym/planar_map.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ym {

namespace {

constexpr int kMaxId = 10'000'000;

template <class T>
void grow(std::vector<T>& v, int id, const T& fill)
{
    if (id >= static_cast<int>(v.size())) v.resize(id + 1, fill);
}

int find_root(std::vector<int>& parent, int x)
{
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

} // namespace

bool PlanarMap::has_vertex(int v) const
{
    return v >= 0 && v < static_cast<int>(rot_.size()) &&
           std::binary_search(vertex_ids_.begin(), vertex_ids_.end(), v);
}

bool PlanarMap::has_edge(int e) const
{
    return e > 0 && e < static_cast<int>(halves_.size()) && halves_[e][0] >= 0;
}

bool PlanarMap::has_half_edge(int h) const
{
    return h >= 0 && h < static_cast<int>(vtx_.size()) && vtx_[h] >= 0;
}

const std::vector<int>& PlanarMap::rotation(int v) const
{
    if (!has_vertex(v)) throw Error(ErrorCode::NotOnGraph, "no vertex " + std::to_string(v));
    return rot_[v];
}

std::array<int, 2> PlanarMap::halves(int e) const
{
    if (!has_edge(e)) throw Error(ErrorCode::NotOnGraph, "no edge " + std::to_string(e));
    return halves_[e];
}

int PlanarMap::vertex_of(int h) const
{
    if (!has_half_edge(h)) throw Error(ErrorCode::NotOnGraph, "no half-edge " + std::to_string(h));
    return vtx_[h];
}

int PlanarMap::edge_of(int h) const
{
    vertex_of(h);
    return edge_[h];
}

int PlanarMap::twin(int h) const
{
    const auto& hh = halves_[edge_of(h)];
    return hh[0] == h ? hh[1] : hh[0];
}

bool PlanarMap::is_tail_half(int h) const { return halves_[edge_of(h)][0] == h; }

int PlanarMap::rot_next(int h) const
{
    const auto& r = rot_[vertex_of(h)];
    return r[(pos_[h] + 1) % r.size()];
}

int PlanarMap::rot_prev(int h) const
{
    const auto& r = rot_[vertex_of(h)];
    return r[(pos_[h] + r.size() - 1) % r.size()];
}

int PlanarMap::face_right(int h) const
{
    vertex_of(h);
    return face_[h];
}

const std::vector<int>& PlanarMap::face_boundary(int f) const
{
    if (f < 0 || f >= num_faces()) throw Error(ErrorCode::NotOnGraph, "no face " + std::to_string(f));
    return faces_[f];
}

std::vector<int> PlanarMap::bounded_faces() const
{
    std::vector<int> out;
    for (int f = 0; f < num_faces(); ++f)
        if (f != unbounded_) out.push_back(f);
    return out;
}

int PlanarMap::step_out(int step) const
{
    auto hh = halves(std::abs(step));
    return step > 0 ? hh[0] : hh[1];
}

int PlanarMap::step_in(int step) const
{
    auto hh = halves(std::abs(step));
    return step > 0 ? hh[1] : hh[0];
}

int PlanarMap::step_of(int h) const
{
    int e = edge_of(h);
    return is_tail_half(h) ? e : -e;
}

void PlanarMap::check_loop(const LoopWord& loop) const
{
    if (loop.steps.empty()) throw Error(ErrorCode::EmptyLoop, "loop has no steps");
    for (int s : loop.steps)
        if (s == 0 || !has_edge(std::abs(s)))
            throw Error(ErrorCode::NotOnGraph, "loop uses unknown edge " + std::to_string(s));
    if (step_from(loop.steps.front()) != loop.base)
        throw Error(ErrorCode::NotOnGraph, "loop does not start at its base vertex");
    for (size_t i = 0; i < loop.steps.size(); ++i) {
        int next = loop.steps[(i + 1) % loop.steps.size()];
        if (step_to(loop.steps[i]) != step_from(next))
            throw Error(ErrorCode::NotOnGraph, "loop is not a closed walk at step " + std::to_string(i));
    }
}

std::vector<VertexSpec> PlanarMap::vertex_specs() const
{
    std::vector<VertexSpec> out;
    for (int v : vertex_ids_) out.push_back({v, rot_[v]});
    return out;
}

std::vector<EdgeSpec> PlanarMap::edge_specs() const
{
    std::vector<EdgeSpec> out;
    for (int e : edge_ids_) out.push_back({e, halves_[e]});
    return out;
}

PlanarMap build_map(const std::vector<VertexSpec>& vertices, const std::vector<EdgeSpec>& edges,
                    int unbounded_marker)
{
    if (vertices.empty()) throw Error(ErrorCode::MalformedRotation, "map has no vertices");
    if (edges.empty()) throw Error(ErrorCode::MalformedRotation, "map has no edges");
    PlanarMap m;
    for (const auto& v : vertices) {
        if (v.id < 0 || v.id > kMaxId) throw Error(ErrorCode::MalformedRotation, "bad vertex id");
        grow(m.rot_, v.id, {});
        if (std::find(m.vertex_ids_.begin(), m.vertex_ids_.end(), v.id) != m.vertex_ids_.end())
            throw Error(ErrorCode::MalformedRotation, "duplicate vertex " + std::to_string(v.id));
        m.vertex_ids_.push_back(v.id);
        m.rot_[v.id] = v.rotation;
        for (size_t i = 0; i < v.rotation.size(); ++i) {
            int h = v.rotation[i];
            if (h < 0 || h > kMaxId) throw Error(ErrorCode::MalformedRotation, "bad half-edge id");
            grow(m.vtx_, h, -1);
            grow(m.pos_, h, -1);
            if (m.vtx_[h] >= 0)
                throw Error(ErrorCode::MalformedRotation,
                            "half-edge " + std::to_string(h) + " appears in two rotations");
            m.vtx_[h] = v.id;
            m.pos_[h] = static_cast<int>(i);
        }
    }
    std::sort(m.vertex_ids_.begin(), m.vertex_ids_.end());
    m.edge_.assign(m.vtx_.size(), -1);
    for (const auto& e : edges) {
        if (e.id <= 0 || e.id > kMaxId) throw Error(ErrorCode::MalformedRotation, "edge ids must be positive");
        grow(m.halves_, e.id, {-1, -1});
        if (m.halves_[e.id][0] >= 0)
            throw Error(ErrorCode::MalformedRotation, "duplicate edge " + std::to_string(e.id));
        if (e.half_edges[0] == e.half_edges[1])
            throw Error(ErrorCode::MalformedRotation, "edge " + std::to_string(e.id) + " repeats a half-edge");
        for (int h : e.half_edges) {
            if (h < 0 || h >= static_cast<int>(m.vtx_.size()) || m.vtx_[h] < 0)
                throw Error(ErrorCode::MalformedRotation,
                            "half-edge " + std::to_string(h) + " is missing from the rotations");
            if (m.edge_[h] >= 0)
                throw Error(ErrorCode::MalformedRotation,
                            "half-edge " + std::to_string(h) + " belongs to two edges");
            m.edge_[h] = e.id;
        }
        m.halves_[e.id] = e.half_edges;
        m.edge_ids_.push_back(e.id);
    }
    std::sort(m.edge_ids_.begin(), m.edge_ids_.end());
    for (int h = 0; h < static_cast<int>(m.vtx_.size()); ++h) {
        if (m.vtx_[h] < 0) continue;
        if (m.edge_[h] < 0)
            throw Error(ErrorCode::MalformedRotation, "half-edge " + std::to_string(h) + " has no edge");
        m.half_ids_.push_back(h);
    }

    // connectivity
    std::vector<int> parent(m.rot_.size());
    std::iota(parent.begin(), parent.end(), 0);
    for (int e : m.edge_ids_) {
        int a = find_root(parent, m.vtx_[m.halves_[e][0]]);
        int b = find_root(parent, m.vtx_[m.halves_[e][1]]);
        parent[a] = b;
    }
    int root = find_root(parent, m.vertex_ids_.front());
    for (int v : m.vertex_ids_)
        if (find_root(parent, v) != root)
            throw Error(ErrorCode::Disconnected, "vertex " + std::to_string(v) + " is not connected");

    // face tracing
    m.face_.assign(m.vtx_.size(), -1);
    std::vector<std::vector<int>> cycles;
    for (int h : m.half_ids_) {
        if (m.face_[h] >= 0) continue;
        std::vector<int> cyc;
        int cur = h;
        do {
            m.face_[cur] = 0;
            cyc.push_back(cur);
            cur = m.rot_next(m.twin(cur));
        } while (cur != h);
        cycles.push_back(std::move(cyc));
    }
    std::sort(cycles.begin(), cycles.end(), [](const auto& a, const auto& b) {
        return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
    });
    for (size_t f = 0; f < cycles.size(); ++f)
        for (int h : cycles[f]) m.face_[h] = static_cast<int>(f);
    m.faces_ = std::move(cycles);

    int V = m.num_vertices(), E = m.num_edges(), F = m.num_faces();
    if (V - E + F != 2)
        throw Error(ErrorCode::NonPlanar, "V - E + F = " + std::to_string(V - E + F) + " (V=" +
                                              std::to_string(V) + ", E=" + std::to_string(E) +
                                              ", F=" + std::to_string(F) + ")");
    if (!m.has_half_edge(unbounded_marker))
        throw Error(ErrorCode::MalformedRotation, "unbounded marker is not a half-edge");
    m.marker_ = unbounded_marker;
    m.unbounded_ = m.face_[unbounded_marker];
    return m;
}

CrossingScan scan_crossings(const PlanarMap& map, const LoopWord& loop)
{
    map.check_loop(loop);
    struct Visit {
        int arrive, depart, index;
    };
    const int n = static_cast<int>(loop.steps.size());
    std::map<int, std::vector<Visit>> visits;
    for (int j = 0; j < n; ++j) {
        int prev = loop.steps[(j + n - 1) % n];
        int cur = loop.steps[j];
        visits[map.step_from(cur)].push_back({map.step_in(prev), map.step_out(cur), j});
    }
    CrossingScan scan;
    for (auto& [v, vs] : visits) {
        if (vs.size() < 2) continue;
        bool simple = vs.size() == 2 && map.degree(v) == 4;
        if (simple) {
            std::set<int> hs{vs[0].arrive, vs[0].depart, vs[1].arrive, vs[1].depart};
            simple = hs.size() == 4;
            for (const auto& vis : vs)
                simple = simple && map.rot_next(map.rot_next(vis.arrive)) == vis.depart;
        }
        if (!simple) {
            scan.nonsimple_vertices.push_back(v);
            continue;
        }
        std::sort(vs.begin(), vs.end(), [](const Visit& a, const Visit& b) { return a.index < b.index; });
        CrossingFrame fr;
        fr.vertex = v;
        fr.e = {vs[0].depart, vs[1].depart, vs[0].arrive, vs[1].arrive};
        fr.start = vs[0].index;
        fr.s0 = vs[1].index;
        fr.counterclockwise = map.rot_next(fr.e[0]) == fr.e[1];
        for (int i = 0; i < 4; ++i)
            fr.faces[i] = fr.counterclockwise ? map.sector_face(fr.e[i]) : map.sector_face(fr.e[(i + 1) % 4]);
        scan.frames.push_back(fr);
    }
    std::sort(scan.frames.begin(), scan.frames.end(),
              [](const CrossingFrame& a, const CrossingFrame& b) { return a.start < b.start; });
    return scan;
}

std::vector<CrossingFrame> crossing_frames(const PlanarMap& map, const LoopWord& loop)
{
    return scan_crossings(map, loop).frames;
}

std::pair<LoopWord, LoopWord> split_loop(const PlanarMap& map, const LoopWord& loop, const CrossingFrame& frame)
{
    map.check_loop(loop);
    const int n = static_cast<int>(loop.steps.size());
    if (frame.start < 0 || frame.start >= n || frame.s0 < 0 || frame.s0 >= n || frame.start == frame.s0 ||
        map.step_out(loop.steps[frame.start]) != frame.e[0] || map.step_out(loop.steps[frame.s0]) != frame.e[1])
        throw Error(ErrorCode::PatternMismatch, "frame does not belong to this loop");
    LoopWord a{frame.vertex, {}}, b{frame.vertex, {}};
    for (int i = frame.start; i != frame.s0; i = (i + 1) % n) a.steps.push_back(loop.steps[i]);
    for (int i = frame.s0; i != frame.start; i = (i + 1) % n) b.steps.push_back(loop.steps[i]);
    return {a, b};
}

LoopWord rotate_loop(const PlanarMap& map, const LoopWord& loop, int start)
{
    const int n = static_cast<int>(loop.steps.size());
    if (n == 0) return loop;
    start = ((start % n) + n) % n;
    LoopWord out;
    out.steps.reserve(n);
    for (int i = 0; i < n; ++i) out.steps.push_back(loop.steps[(start + i) % n]);
    out.base = map.step_from(out.steps.front());
    return out;
}

LoopWord reverse_loop(const PlanarMap& map, const LoopWord& loop)
{
    (void)map;
    LoopWord out{loop.base, {}};
    for (auto it = loop.steps.rbegin(); it != loop.steps.rend(); ++it) out.steps.push_back(-*it);
    return out;
}

LoopWord concat(const LoopWord& a, const LoopWord& b)
{
    LoopWord out = a;
    out.steps.insert(out.steps.end(), b.steps.begin(), b.steps.end());
    return out;
}

std::vector<int> free_reduce(const std::vector<int>& word)
{
    std::vector<int> st;
    for (int s : word) {
        if (!st.empty() && st.back() == -s)
            st.pop_back();
        else
            st.push_back(s);
    }
    return st;
}

LoopWord cyclic_reduce(const PlanarMap& map, const LoopWord& loop)
{
    auto w = free_reduce(loop.steps);
    size_t lo = 0, hi = w.size();
    while (hi - lo >= 2 && w[lo] == -w[hi - 1]) {
        ++lo;
        --hi;
    }
    LoopWord out{loop.base, std::vector<int>(w.begin() + lo, w.begin() + hi)};
    if (!out.steps.empty()) out.base = map.step_from(out.steps.front());
    return out;
}

std::map<int, int> edge_multiplicity(const LoopWord& loop)
{
    std::map<int, int> m;
    for (int s : loop.steps) ++m[std::abs(s)];
    return m;
}

std::map<int, int> winding_numbers(const PlanarMap& map, const LoopWord& loop)
{
    std::map<int, int> net; // signed traversal count per edge
    for (int s : loop.steps) net[std::abs(s)] += s > 0 ? 1 : -1;
    std::vector<std::vector<std::pair<int, int>>> adj(map.num_faces());
    for (int e : map.edge_ids()) {
        int t = map.halves(e)[0];
        int l = map.face_left(t), r = map.face_right(t);
        int d = net.count(e) ? net[e] : 0;
        adj[r].push_back({l, d});
        adj[l].push_back({r, -d});
    }
    std::vector<int> w(map.num_faces(), 0);
    std::vector<char> seen(map.num_faces(), 0);
    std::deque<int> q{map.unbounded_face()};
    seen[map.unbounded_face()] = 1;
    while (!q.empty()) {
        int f = q.front();
        q.pop_front();
        for (auto [g, d] : adj[f]) {
            if (seen[g]) {
                if (w[g] != w[f] + d) throw std::logic_error("inconsistent winding numbers");
                continue;
            }
            seen[g] = 1;
            w[g] = w[f] + d;
            q.push_back(g);
        }
    }
    std::map<int, int> out;
    for (int f = 0; f < map.num_faces(); ++f) out[f] = w[f];
    return out;
}

AreaVector FaceMerge::aggregate(const AreaVector& parent) const
{
    AreaVector out;
    for (const auto& [pf, c] : to_child)
        if (c != child_unbounded) out[c] += 0.0;
    for (const auto& [f, a] : parent) {
        auto it = to_child.find(f);
        if (it == to_child.end()) throw Error(ErrorCode::NotOnGraph, "area given for unknown face");
        if (it->second != child_unbounded) out[it->second] += a;
    }
    return out;
}

std::vector<int> EdgeSubstitution::rewrite(const std::vector<int>& steps) const
{
    std::vector<int> out;
    for (int s : steps) {
        auto it = words.find(std::abs(s));
        if (it == words.end()) {
            out.push_back(s);
        } else if (s > 0) {
            out.insert(out.end(), it->second.begin(), it->second.end());
        } else {
            for (auto r = it->second.rbegin(); r != it->second.rend(); ++r) out.push_back(-*r);
        }
    }
    return out;
}

LoopWord EdgeSubstitution::rewrite(const LoopWord& loop) const { return {loop.base, rewrite(loop.steps)}; }

} // namespace ym
