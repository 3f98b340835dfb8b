#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "ym/planar_map.hpp"

namespace ym {

namespace {

int max_of(const std::vector<int>& ids) { return ids.empty() ? -1 : *std::max_element(ids.begin(), ids.end()); }

std::vector<int> oriented(const std::vector<int>& word, int sign)
{
    if (sign > 0) return word;
    std::vector<int> out;
    for (auto it = word.rbegin(); it != word.rend(); ++it) out.push_back(-*it);
    return out;
}

struct DisjointSets {
    std::vector<int> p;
    explicit DisjointSets(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x)
    {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void join(int a, int b) { p[find(a)] = find(b); }
};

// Replaces each passage (first, second) through a smoothed vertex by merged,
// and the reverse passage (-second, -first) by -merged.
std::vector<int> contract_pairs(const std::vector<int>& steps, int first, int second, int merged)
{
    const int n = static_cast<int>(steps.size());
    auto is_second = [&](int i) {
        int prev = steps[(i + n - 1) % n];
        return (steps[i] == second && prev == first) || (steps[i] == -first && prev == -second);
    };
    int r = 0;
    while (r < n && is_second(r)) ++r;
    if (r == n) throw std::logic_error("contract_pairs: no pair boundary");
    std::vector<int> out;
    for (int k = 0; k < n; ++k) {
        int i = (r + k) % n;
        int next = steps[(i + 1) % n];
        if (steps[i] == first && next == second) {
            out.push_back(merged);
            ++k;
        } else if (steps[i] == -second && next == -first) {
            out.push_back(-merged);
            ++k;
        } else {
            out.push_back(steps[i]);
        }
    }
    return out;
}

} // namespace

ReducedLoop reduce_subloop(const PlanarMap& map, const LoopWord& sub)
{
    map.check_loop(sub);
    LoopWord red = cyclic_reduce(map, sub);
    if (red.steps.empty()) throw Error(ErrorCode::EmptyLoop, "sub-loop reduces to the trivial word");

    std::map<int, std::array<int, 2>> eh;
    std::map<int, int> he;
    std::map<int, std::vector<int>> words;
    for (int s : red.steps) {
        int e = std::abs(s);
        if (eh.count(e)) continue;
        eh[e] = map.halves(e);
        he[eh[e][0]] = e;
        he[eh[e][1]] = e;
        words[e] = {e};
    }
    std::map<int, std::vector<int>> rot;
    for (int v : map.vertex_ids()) {
        std::vector<int> r;
        for (int h : map.rotation(v))
            if (he.count(h)) r.push_back(h);
        if (!r.empty()) rot[v] = std::move(r);
    }

    std::vector<int> steps = red.steps;
    int next_edge = max_of(map.edge_ids()) + 1;
    for (bool changed = true; changed;) {
        changed = false;
        for (auto it = rot.begin(); it != rot.end(); ++it) {
            if (it->second.size() != 2) continue;
            int h1 = it->second[0], h2 = it->second[1];
            int A = he[h1], B = he[h2];
            if (A == B) continue;
            int sigma = eh[A][1] == h1 ? 1 : -1; // A oriented into the vertex
            int tau = eh[B][0] == h2 ? 1 : -1;   // B oriented out of it
            int fa = eh[A][0] == h1 ? eh[A][1] : eh[A][0];
            int fb = eh[B][0] == h2 ? eh[B][1] : eh[B][0];
            int C = next_edge++;
            eh[C] = {fa, fb};
            he[fa] = C;
            he[fb] = C;
            auto wa = oriented(words[A], sigma), wb = oriented(words[B], tau);
            wa.insert(wa.end(), wb.begin(), wb.end());
            words[C] = std::move(wa);
            steps = contract_pairs(steps, sigma * A, tau * B, C);
            for (int s : steps)
                if (std::abs(s) == A || std::abs(s) == B)
                    throw std::logic_error("reduce_subloop: smoothed edge left in loop");
            eh.erase(A);
            eh.erase(B);
            words.erase(A);
            words.erase(B);
            he.erase(h1);
            he.erase(h2);
            rot.erase(it);
            changed = true;
            break;
        }
    }

    std::vector<VertexSpec> vs;
    for (const auto& [v, r] : rot) vs.push_back({v, r});
    std::vector<EdgeSpec> es;
    for (const auto& [e, hh] : eh) es.push_back({e, hh});
    PlanarMap provisional = build_map(vs, es, es.front().half_edges[0]);

    DisjointSets ds(map.num_faces());
    const auto used = edge_multiplicity(red);
    for (int e : map.edge_ids()) {
        if (used.count(e)) continue;
        int t = map.halves(e)[0];
        ds.join(map.face_left(t), map.face_right(t));
    }
    std::map<int, int> comp_to_child;
    auto assign = [&](int parent_face, int child_face) {
        int c = ds.find(parent_face);
        auto [pos, fresh] = comp_to_child.emplace(c, child_face);
        if (!fresh && pos->second != child_face) throw std::logic_error("reduce_subloop: inconsistent face merge");
    };
    for (const auto& [C, w] : words) {
        int tc = eh[C][0];
        int right = provisional.face_right(tc), left = provisional.face_left(tc);
        for (int s : w) {
            int t = map.halves(std::abs(s))[0];
            int pr = map.face_right(t), pl = map.face_left(t);
            assign(pr, s > 0 ? right : left);
            assign(pl, s > 0 ? left : right);
        }
    }
    FaceMerge merge;
    for (int f = 0; f < map.num_faces(); ++f) {
        auto it = comp_to_child.find(ds.find(f));
        if (it == comp_to_child.end()) throw std::logic_error("reduce_subloop: parent face without child");
        merge.to_child[f] = it->second;
    }
    int child_unb = merge.to_child[map.unbounded_face()];
    int marker = -1;
    for (int h : provisional.half_edge_ids())
        if (provisional.face_right(h) == child_unb) {
            marker = h;
            break;
        }

    ReducedLoop out;
    out.map = build_map(vs, es, marker);
    merge.child_unbounded = out.map.unbounded_face();
    out.merge = std::move(merge);
    out.loop = LoopWord{out.map.step_from(steps.front()), steps};
    out.edge_words = std::move(words);
    return out;
}

AreaVector Genericized::transfer(const AreaVector& areas, const std::array<double, 4>& inner) const
{
    AreaVector out;
    for (int f : map.bounded_faces()) {
        auto it = areas.find(f);
        out[f] = it == areas.end() ? 0.0 : it->second;
    }
    for (int i = 0; i < 4; ++i) {
        if (inner[i] < 0) throw Error(ErrorCode::NonpositiveTime, "negative circle-face area");
        out[inner_faces[i]] = inner[i];
        if (outer_faces[i] != map.unbounded_face()) {
            out[outer_faces[i]] -= inner[i];
            if (out[outer_faces[i]] < 0)
                throw Error(ErrorCode::NonpositiveTime, "circle face larger than its parent face");
        }
    }
    return out;
}

Genericized genericize(const PlanarMap& map, int v)
{
    if (map.degree(v) != 4)
        throw Error(ErrorCode::WrongDegree, "vertex " + std::to_string(v) + " has degree " + std::to_string(map.degree(v)));
    const int mv = max_of(map.vertex_ids()), me = max_of(map.edge_ids()), mh = max_of(map.half_edge_ids());
    Genericized g;
    g.vertex = v;
    const auto& hs = map.rotation(v);
    std::array<int, 4> a{}, b{}, c{}, d{};
    for (int i = 0; i < 4; ++i) {
        g.half_edges[i] = hs[i];
        g.ring_vertices[i] = mv + 1 + i;
        g.spokes[i] = me + 1 + i;
        g.ring_edges[i] = me + 5 + i;
        a[i] = mh + 1 + 2 * i;
        b[i] = mh + 2 + 2 * i;
        c[i] = mh + 9 + 2 * i;
        d[i] = mh + 10 + 2 * i;
    }
    std::vector<VertexSpec> vs;
    for (const auto& spec : map.vertex_specs()) {
        if (spec.id == v)
            vs.push_back({v, {a[0], a[1], a[2], a[3]}});
        else
            vs.push_back(spec);
    }
    for (int i = 0; i < 4; ++i)
        vs.push_back({g.ring_vertices[i], {g.half_edges[i], c[i], b[i], d[(i + 3) % 4]}});
    auto es = map.edge_specs();
    for (int i = 0; i < 4; ++i) {
        es.push_back({g.spokes[i], {a[i], b[i]}});
        es.push_back({g.ring_edges[i], {c[i], d[i]}});
    }
    g.map = build_map(vs, es, map.unbounded_marker());

    for (int e : map.edge_ids()) {
        auto hh = map.halves(e);
        std::vector<int> w;
        for (int i = 0; i < 4; ++i)
            if (g.half_edges[i] == hh[0]) w.push_back(g.spokes[i]);
        w.push_back(e);
        for (int i = 0; i < 4; ++i)
            if (g.half_edges[i] == hh[1]) w.push_back(-g.spokes[i]);
        if (w.size() > 1) g.substitution.words[e] = std::move(w);
    }
    for (int i = 0; i < 4; ++i) {
        g.inner_faces[i] = g.map.face_left(a[i]);
        g.outer_faces[i] = g.map.face_right(c[i]);
        if (g.outer_faces[i] != map.sector_face(g.half_edges[i]))
            throw std::logic_error("genericize: outer face id changed");
    }
    return g;
}

Subdivided subdivide_edge(const PlanarMap& map, int e)
{
    auto hh = map.halves(e);
    const int mv = max_of(map.vertex_ids()), me = max_of(map.edge_ids()), mh = max_of(map.half_edge_ids());
    Subdivided s;
    s.new_vertex = mv + 1;
    s.first = e;
    s.second = me + 1;
    const int x = mh + 1, y = mh + 2;
    auto vs = map.vertex_specs();
    vs.push_back({s.new_vertex, {x, y}});
    auto es = map.edge_specs();
    for (auto& spec : es)
        if (spec.id == e) spec.half_edges = {hh[0], x};
    es.push_back({s.second, {y, hh[1]}});
    s.map = build_map(vs, es, map.unbounded_marker());
    s.substitution.words[e] = {e, s.second};
    return s;
}

} // namespace ym
