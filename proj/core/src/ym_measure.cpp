#include "ym/ym_measure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <numeric>
#include <thread>

namespace ym {

namespace {

std::vector<int> inverse_steps(const std::vector<int>& w)
{
    std::vector<int> out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(-*it);
    return out;
}

// Tree path from `from` to every vertex.
std::map<int, std::vector<int>> tree_paths(const PlanarMap& map, const SpanningTree& tree, int from)
{
    std::map<int, std::vector<int>> path{{from, {}}};
    std::deque<int> q{from};
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int h : map.rotation(v)) {
            int e = map.edge_of(h);
            if (!tree.edges.count(e)) continue;
            int step = map.step_of(h);
            int w = map.step_to(step);
            if (path.count(w)) continue;
            path[w] = path[v];
            path[w].push_back(step);
            q.push_back(w);
        }
    }
    return path;
}

Mat identity_like(const std::map<int, Mat>& values)
{
    int n = values.empty() ? 1 : static_cast<int>(values.begin()->second.rows());
    return Mat::Identity(n, n);
}

} // namespace

SpanningTree spanning_tree(const PlanarMap& map)
{
    SpanningTree t;
    t.root = map.vertex_ids().front();
    std::set<int> seen{t.root};
    std::deque<int> q{t.root};
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        std::vector<int> hs = map.rotation(v);
        std::sort(hs.begin(), hs.end(), [&](int a, int b) {
            return std::pair(map.edge_of(a), a) < std::pair(map.edge_of(b), b);
        });
        for (int h : hs) {
            int w = map.vertex_of(map.twin(h));
            if (seen.count(w)) continue;
            seen.insert(w);
            t.edges.insert(map.edge_of(h));
            q.push_back(w);
        }
    }
    if (static_cast<int>(seen.size()) != map.num_vertices())
        throw Error(ErrorCode::Disconnected, "map is not connected");
    return t;
}

SpanningTree make_tree(const PlanarMap& map, const std::vector<int>& edges, int root)
{
    if (!map.has_vertex(root)) throw Error(ErrorCode::NotOnGraph, "tree root is not a vertex");
    SpanningTree t{root, {edges.begin(), edges.end()}};
    if (static_cast<int>(t.edges.size()) != map.num_vertices() - 1 || t.edges.size() != edges.size())
        throw Error(ErrorCode::SemanticError, "a spanning tree needs V - 1 distinct edges");
    for (int e : t.edges)
        if (!map.has_edge(e)) throw Error(ErrorCode::NotOnGraph, "tree edge " + std::to_string(e) + " not in map");
    if (static_cast<int>(tree_paths(map, t, root).size()) != map.num_vertices())
        throw Error(ErrorCode::Disconnected, "tree edges do not span the map");
    return t;
}

std::vector<int> tree_path(const PlanarMap& map, const SpanningTree& tree, int a, int b)
{
    auto paths = tree_paths(map, tree, a);
    auto it = paths.find(b);
    if (it == paths.end()) throw Error(ErrorCode::Disconnected, "no tree path");
    return it->second;
}

LassoBasis lasso_basis(const PlanarMap& map, const SpanningTree& tree, int base)
{
    if (!map.has_vertex(base)) throw Error(ErrorCode::NotOnGraph, "base vertex not in map");
    const int U = map.unbounded_face();
    const int bounded = map.num_faces() - 1;
    const int nontree = map.num_edges() - static_cast<int>(tree.edges.size());
    if (nontree != bounded)
        throw Error(ErrorCode::AmbiguousPath, std::to_string(nontree) + " non-tree edges for " +
                                                  std::to_string(bounded) + " bounded faces");
    LassoBasis basis;
    basis.base = base;
    auto paths = tree_paths(map, tree, base);

    std::map<int, int> depth{{U, 0}};
    std::vector<int> discovered;
    std::set<int> used_edges;
    std::deque<int> q{U};
    while (!q.empty()) {
        int f = q.front();
        q.pop_front();
        for (int h : map.face_boundary(f)) {
            int e = map.edge_of(h);
            if (tree.edges.count(e) || used_edges.count(e)) continue;
            int g = map.face_left(h);
            used_edges.insert(e);
            if (depth.count(g))
                throw Error(ErrorCode::AmbiguousPath, "face " + std::to_string(g) + " reached twice");
            depth[g] = depth[f] + 1;
            LassoFace lf;
            lf.parent = f;
            lf.depth = depth[g];
            lf.step = map.step_of(h); // h has g on its left
            basis.faces[g] = lf;
            basis.face_of_edge[e] = g;
            discovered.push_back(g);
            q.push_back(g);
        }
    }
    if (static_cast<int>(discovered.size()) != bounded)
        throw Error(ErrorCode::AmbiguousPath, "some bounded face cannot reach the unbounded face");

    for (auto& [f, lf] : basis.faces) {
        int h0 = map.step_out(lf.step);
        int h = h0;
        do {
            lf.boundary.push_back(map.step_of(h));
            h = map.rot_prev(map.twin(h));
        } while (h != h0);
        lf.tail = paths.at(map.vertex_of(h0));
        std::vector<int> w = lf.tail;
        w.insert(w.end(), lf.boundary.begin(), lf.boundary.end());
        auto back = inverse_steps(lf.tail);
        w.insert(w.end(), back.begin(), back.end());
        lf.word = free_reduce(w);
    }
    basis.order = discovered;
    std::stable_sort(basis.order.begin(), basis.order.end(),
                     [&](int a, int b) { return basis.faces[a].depth > basis.faces[b].depth; });
    return basis;
}

LassoWord free_reduce(const LassoWord& word)
{
    LassoWord st;
    for (const auto& l : word) {
        if (!st.empty() && st.back().face == l.face && st.back().power == -l.power)
            st.pop_back();
        else
            st.push_back(l);
    }
    return st;
}

LassoWord inverse(const LassoWord& word)
{
    LassoWord out;
    for (auto it = word.rbegin(); it != word.rend(); ++it) out.push_back({it->face, -it->power});
    return out;
}

LassoWord loop_in_lassos(const PlanarMap& map, const LoopWord& loop, const LassoBasis& basis,
                         const SpanningTree& tree)
{
    map.check_loop(loop);
    if (loop.base != basis.base)
        throw Error(ErrorCode::BaseMismatch, "loop based at " + std::to_string(loop.base) +
                                                 ", lasso basis at " + std::to_string(basis.base));
    // x_e for the positively oriented non-tree edge e, in lasso generators
    std::map<int, LassoWord> x;
    for (int f : basis.order) {
        const auto& lf = basis.faces.at(f);
        LassoWord rest;
        for (size_t i = 1; i < lf.boundary.size(); ++i) {
            int s = lf.boundary[i];
            int e = std::abs(s);
            if (tree.edges.count(e)) continue;
            auto it = x.find(e);
            if (it == x.end()) throw Error(ErrorCode::TriangularSolveFailed, "elimination order broken");
            const LassoWord& xe = it->second;
            if (s > 0)
                rest.insert(rest.end(), xe.begin(), xe.end());
            else {
                auto inv = inverse(xe);
                rest.insert(rest.end(), inv.begin(), inv.end());
            }
        }
        LassoWord xs{{f, 1}};
        auto rinv = inverse(rest);
        xs.insert(xs.end(), rinv.begin(), rinv.end());
        x[std::abs(lf.step)] = free_reduce(lf.step > 0 ? xs : inverse(xs));
    }
    LassoWord out;
    for (int s : loop.steps) {
        int e = std::abs(s);
        if (tree.edges.count(e)) continue;
        const auto& xe = x.at(e);
        if (s > 0)
            out.insert(out.end(), xe.begin(), xe.end());
        else {
            auto inv = inverse(xe);
            out.insert(out.end(), inv.begin(), inv.end());
        }
    }
    return free_reduce(out);
}

LassoConfig sample_lassos(const PlanarMap& map, const AreaVector& areas, const GroupSpec& spec, Rng& rng,
                          int rw_steps)
{
    LassoConfig out;
    for (int f : map.bounded_faces()) {
        auto it = areas.find(f);
        if (it == areas.end()) throw Error(ErrorCode::SemanticError, "no area for face " + std::to_string(f));
        out[f] = heat_sample(spec, it->second, rw_steps, rng);
    }
    return out;
}

Mat holonomy(const std::vector<int>& word, const EdgeConfig& edges)
{
    Mat h = identity_like(edges);
    for (int s : word) {
        auto it = edges.find(std::abs(s));
        if (it == edges.end()) throw Error(ErrorCode::MissingSymbol, "no value for edge " + std::to_string(std::abs(s)));
        h = s > 0 ? Mat(it->second * h) : Mat(it->second.adjoint() * h);
    }
    return h;
}

Mat holonomy(const LassoWord& word, const LassoConfig& lassos)
{
    Mat h = identity_like(lassos);
    for (const auto& l : word) {
        auto it = lassos.find(l.face);
        if (it == lassos.end()) throw Error(ErrorCode::MissingSymbol, "no value for face " + std::to_string(l.face));
        h = l.power > 0 ? Mat(it->second * h) : Mat(it->second.adjoint() * h);
    }
    return h;
}

EdgeConfig edges_from_lassos(const PlanarMap& map, const SpanningTree& tree, const LassoBasis& basis,
                             const LassoConfig& lassos)
{
    EdgeConfig edges;
    Mat I = identity_like(lassos);
    for (int e : tree.edges) edges[e] = I;
    for (int f : basis.order) {
        const auto& lf = basis.faces.at(f);
        std::vector<int> rest(lf.boundary.begin() + 1, lf.boundary.end());
        for (int s : rest)
            if (!edges.count(std::abs(s)))
                throw Error(ErrorCode::TriangularSolveFailed, "edge " + std::to_string(std::abs(s)) + " unsolved");
        auto it = lassos.find(f);
        if (it == lassos.end()) throw Error(ErrorCode::MissingSymbol, "no lasso value for face " + std::to_string(f));
        Mat xs = rest.empty() ? it->second : Mat(holonomy(rest, edges).adjoint() * it->second);
        edges[std::abs(lf.step)] = lf.step > 0 ? xs : Mat(xs.adjoint());
    }
    if (static_cast<int>(edges.size()) != map.num_edges())
        throw Error(ErrorCode::TriangularSolveFailed, "not every edge was assigned");
    return edges;
}

EdgeConfig apply_gauge(const EdgeConfig& config, const GaugeTransform& g, const PlanarMap& map)
{
    EdgeConfig out;
    for (const auto& [e, a] : config) {
        const Mat& gt = g.at(map.tail(e));
        const Mat& gh = g.at(map.head(e));
        out[e] = gh.adjoint() * a * gt;
    }
    return out;
}

std::vector<double> run_sharded(int samples, int width, std::uint64_t seed, int shards,
                                const std::function<void(Rng&, double*)>& draw)
{
    shards = std::max(1, std::min(shards, samples));
    std::vector<double> rows(static_cast<size_t>(samples) * width);
    std::vector<std::exception_ptr> errors(shards);
    auto work = [&](int k) {
        try {
            Rng rng = make_rng(seed, k);
            long lo = static_cast<long>(samples) * k / shards, hi = static_cast<long>(samples) * (k + 1) / shards;
            for (long i = lo; i < hi; ++i) draw(rng, rows.data() + i * width);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };
    if (shards == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < shards; ++k) pool.emplace_back(work, k);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

MeanEstimate mean_of(const std::vector<double>& rows, int width, int column)
{
    const size_t n = rows.size() / width;
    double s = 0;
    for (size_t i = 0; i < n; ++i) s += rows[i * width + column];
    double mean = s / n, ss = 0;
    for (size_t i = 0; i < n; ++i) {
        double d = rows[i * width + column] - mean;
        ss += d * d;
    }
    return {mean, n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0};
}

WilsonEstimate wilson_estimate(const PlanarMap& map, const AreaVector& areas, const std::vector<LoopWord>& loops,
                               const GroupSpec& spec, const SamplerOptions& opt)
{
    if (opt.samples < 2) throw Error(ErrorCode::SemanticError, "need at least 2 samples");
    if (loops.empty()) throw Error(ErrorCode::EmptyLoop, "no loops given");
    for (const auto& l : loops) map.check_loop(l);
    auto tree = spanning_tree(map);
    auto basis = lasso_basis(map, tree, loops.front().base);
    auto rows = run_sharded(opt.samples, 2, opt.seed, opt.shards, [&](Rng& rng, double* row) {
        auto edges = edges_from_lassos(map, tree, basis, sample_lassos(map, areas, spec, rng, opt.rw_steps));
        cplx v = 1;
        for (const auto& l : loops) v *= ntrace(holonomy(l.steps, edges));
        row[0] = v.real();
        row[1] = v.imag();
    });
    auto re = mean_of(rows, 2, 0), im = mean_of(rows, 2, 1);
    return {re.mean, re.stderr_, im.mean, im.stderr_, opt.samples};
}

CrnResult crn_derivative(const PlanarMap& map, const AreaVector& areas, const GroupSpec& spec,
                         const CrnRequest& req, const SamplerOptions& opt)
{
    if (opt.samples < 2) throw Error(ErrorCode::SemanticError, "need at least 2 samples");
    if (!(req.h > 0)) throw Error(ErrorCode::StepTooLarge, "finite-difference step must be positive");
    std::map<int, double> coef;
    for (const auto& [f, c] : req.coefficients) {
        if (f == map.unbounded_face() || c == 0) continue;
        auto it = areas.find(f);
        if (it == areas.end()) throw Error(ErrorCode::SemanticError, "no area for face " + std::to_string(f));
        if (req.h >= it->second)
            throw Error(ErrorCode::StepTooLarge, "h = " + std::to_string(req.h) + " is not below the area " +
                                                     std::to_string(it->second) + " of face " + std::to_string(f));
        coef[f] = c;
    }
    auto tree = spanning_tree(map);
    auto basis = lasso_basis(map, tree, map.vertex_ids().front());
    const double h = req.h;
    const int inc_steps = opt.rw_steps;

    auto rows = run_sharded(opt.samples, 6, opt.seed, opt.shards, [&](Rng& rng, double* row) {
        LassoConfig base;
        std::map<int, std::array<Mat, 5>> chain;
        for (int f : map.bounded_faces()) {
            double t = areas.at(f);
            if (!coef.count(f)) {
                base[f] = heat_sample(spec, t, opt.rw_steps, rng);
                continue;
            }
            auto& c = chain[f];
            c[0] = heat_sample(spec, t - h, opt.rw_steps, rng);
            for (int k = 1; k < 5; ++k) c[k] = c[k - 1] * heat_sample(spec, h / 2, inc_steps, rng);
            base[f] = c[2];
        }
        auto eval = [&](const LassoConfig& cfg) { return edges_from_lassos(map, tree, basis, cfg); };
        EdgeConfig e0 = eval(base);
        cplx g0 = req.rhs(e0);
        cplx d_h = 0, d_h2 = 0;
        for (const auto& [f, c] : coef) {
            std::array<cplx, 5> v;
            LassoConfig cfg = base;
            for (int k : {0, 1, 3, 4}) {
                cfg[f] = chain[f][k];
                v[k] = req.differentiated(eval(cfg));
            }
            d_h += c * (v[4] - v[0]) / (2 * h);
            d_h2 += c * (v[3] - v[1]) / h;
        }
        row[0] = d_h.real();
        row[1] = d_h2.real();
        row[2] = g0.real();
        row[3] = (d_h - g0).real();
        row[4] = d_h.imag();
        row[5] = g0.imag();
    });
    CrnResult r;
    auto lhs = mean_of(rows, 6, 0), half = mean_of(rows, 6, 1), rhs = mean_of(rows, 6, 2), res = mean_of(rows, 6, 3);
    r.lhs = lhs.mean;
    r.lhs_stderr = lhs.stderr_;
    r.lhs_half = half.mean;
    r.rhs = rhs.mean;
    r.rhs_stderr = rhs.stderr_;
    r.residual = res.mean;
    r.sigma = res.stderr_;
    r.allowance = 4.0 / 3.0 * std::abs(r.lhs - r.lhs_half);
    r.max_imag = std::max(std::abs(mean_of(rows, 6, 4).mean), std::abs(mean_of(rows, 6, 5).mean));
    return r;
}

} // namespace ym
