#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "ym/mm_verify.hpp"
#include "ym/ym_measure.hpp"

using namespace ym;

namespace {

LassoWord named(const Example& ex, std::initializer_list<std::pair<const char*, int>> letters)
{
    LassoWord w;
    for (auto [n, p] : letters) w.push_back({ex.faces.at(n), p});
    return w;
}

bool is_tree(const PlanarMap& m, const SpanningTree& t)
{
    if (static_cast<int>(t.edges.size()) != m.num_vertices() - 1) return false;
    std::map<int, int> parent;
    for (int v : m.vertex_ids()) parent[v] = v;
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (int e : t.edges) {
        int a = find(m.tail(e)), b = find(m.head(e));
        if (a == b) return false;
        parent[a] = b;
    }
    return true;
}

} // namespace

TEST_CASE("spanning trees of the standard examples")
{
    for (const auto& name : standard_example_names()) {
        auto ex = standard_example(name);
        auto t = spanning_tree(ex.map);
        CAPTURE(name);
        CHECK(is_tree(ex.map, t));
        for (int v : ex.map.vertex_ids()) {
            auto p = tree_path(ex.map, t, t.root, v);
            int at = t.root;
            for (int s : p) {
                CHECK(t.edges.count(std::abs(s)));
                CHECK(ex.map.step_from(s) == at);
                at = ex.map.step_to(s);
            }
            CHECK(at == v);
        }
    }
}

TEST_CASE("make_tree validates the caller's tree")
{
    auto ex = standard_example("lasso_tree_example");
    CHECK_NOTHROW(make_tree(ex.map, {1, 2, 3, 6}, 0));
    CHECK_THROWS_AS(make_tree(ex.map, {1, 2, 3}, 0), Error);
    CHECK_THROWS_AS(make_tree(ex.map, {1, 2, 3, 4, 6}, 0), Error);
}

TEST_CASE("lasso basis of the five-face map with tree {1,2,3,6}")
{
    auto ex = standard_example("lasso_tree_example");
    auto tree = make_tree(ex.map, {1, 2, 3, 6}, 0);
    auto basis = lasso_basis(ex.map, tree, 0);
    CHECK(basis.faces.at(ex.faces["F1"]).word == std::vector<int>{1, -5, 6, -2});
    CHECK(basis.faces.at(ex.faces["F5"]).word == std::vector<int>{1, 7, 5, -1});
    // every non-tree edge is distinguished for exactly one face
    CHECK(basis.face_of_edge.size() == basis.faces.size());
    std::set<int> seen;
    for (auto& [e, f] : basis.face_of_edge) {
        CHECK_FALSE(tree.edges.count(e));
        CHECK(seen.insert(f).second);
    }
}

TEST_CASE("triangular order: each face brings exactly one new edge")
{
    for (const auto& name : standard_example_names()) {
        auto ex = standard_example(name);
        auto tree = spanning_tree(ex.map);
        auto basis = lasso_basis(ex.map, tree, ex.loops[0].base);
        std::set<int> known(tree.edges.begin(), tree.edges.end());
        for (int f : basis.order) {
            const auto& lf = basis.faces.at(f);
            CHECK(ex.map.face_left(ex.map.step_out(lf.step)) == f);
            for (std::size_t k = 1; k < lf.boundary.size(); ++k) CHECK(known.count(std::abs(lf.boundary[k])));
            CHECK_FALSE(known.count(std::abs(lf.step)));
            known.insert(std::abs(lf.step));
        }
        CHECK(static_cast<int>(known.size()) == ex.map.num_edges());
    }
}

TEST_CASE("four-face worked example decomposes as L1 L2 L3 L1^-1 L4^-1 L3^-1")
{
    auto ex = standard_example("lasso_example");
    auto tree = spanning_tree(ex.map);
    auto basis = lasso_basis(ex.map, tree, ex.loops[0].base);
    auto w = loop_in_lassos(ex.map, ex.loops[0], basis, tree);
    CHECK(w == named(ex, {{"F1", 1}, {"F2", 1}, {"F3", 1}, {"F1", -1}, {"F4", -1}, {"F3", -1}}));
}

TEST_CASE("figure eight is one lasso per lobe")
{
    auto ex = standard_example("figure_eight");
    auto tree = spanning_tree(ex.map);
    auto basis = lasso_basis(ex.map, tree, 0);
    auto w = loop_in_lassos(ex.map, ex.loops[0], basis, tree);
    REQUIRE(w.size() == 2);
    std::set<int> faces = {w[0].face, w[1].face};
    CHECK(faces == std::set<int>{ex.faces["lobe1"], ex.faces["lobe2"]});
}

TEST_CASE("lasso words reproduce the loop holonomy on random edge variables")
{
    Rng rng(17);
    for (const auto& name : standard_example_names()) {
        auto ex = standard_example(name);
        auto tree = spanning_tree(ex.map);
        for (const auto& loop : ex.loops) {
            auto basis = lasso_basis(ex.map, tree, loop.base);
            auto w = loop_in_lassos(ex.map, loop, basis, tree);
            for (int k = 0; k < 5; ++k) {
                auto edges = random_config(ex.map, GroupSpec(3), rng);
                LassoConfig lassos;
                for (auto& [f, lf] : basis.faces) lassos[f] = holonomy(lf.word, edges);
                CAPTURE(name);
                CHECK((holonomy(w, lassos) - holonomy(loop.steps, edges)).norm() < 1e-12);
            }
        }
    }
}

TEST_CASE("edges_from_lassos inverts the lasso map")
{
    Rng rng(23);
    for (const auto& name : standard_example_names()) {
        auto ex = standard_example(name);
        auto tree = spanning_tree(ex.map);
        auto basis = lasso_basis(ex.map, tree, ex.loops[0].base);
        for (int N : {1, 2, 3}) {
            LassoConfig lassos;
            for (auto& [f, lf] : basis.faces) lassos[f] = haar_unitary(GroupSpec(N), rng);
            auto edges = edges_from_lassos(ex.map, tree, basis, lassos);
            CHECK(static_cast<int>(edges.size()) == ex.map.num_edges());
            for (int e : tree.edges) CHECK((edges.at(e) - Mat::Identity(N, N)).norm() == 0);
            for (auto& [f, lf] : basis.faces) {
                CAPTURE(name);
                CAPTURE(N);
                REQUIRE(edges.at(std::abs(lf.step)).rows() == N);
                CHECK((holonomy(lf.word, edges) - lassos.at(f)).norm() < 1e-12);
            }
        }
    }
}

TEST_CASE("missing symbols and base mismatch")
{
    auto ex = standard_example("figure_eight");
    auto tree = spanning_tree(ex.map);
    auto basis = lasso_basis(ex.map, tree, 0);
    try {
        holonomy(std::vector<int>{1, 9}, EdgeConfig{{1, Mat::Identity(2, 2)}});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingSymbol);
    }
    auto lt = standard_example("lasso_tree_example");
    auto t2 = make_tree(lt.map, {1, 2, 3, 6}, 0);
    auto b2 = lasso_basis(lt.map, t2, 0);
    LoopWord elsewhere = rotate_loop(lt.map, lt.loops[0], 1);
    REQUIRE(elsewhere.base != 0);
    try {
        loop_in_lassos(lt.map, elsewhere, b2, t2);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BaseMismatch);
    }
}

TEST_CASE("traces of holonomies are invariant under discrete gauge transformations")
{
    Rng rng(31);
    for (const auto& name : standard_example_names()) {
        auto ex = standard_example(name);
        for (int k = 0; k < 20; ++k) {
            auto cfg = random_config(ex.map, GroupSpec(3), rng);
            auto g = random_gauge(ex.map, GroupSpec(3), rng);
            auto moved = apply_gauge(cfg, g, ex.map);
            for (const auto& loop : ex.loops) {
                cplx a = ntrace(holonomy(loop.steps, cfg)), b = ntrace(holonomy(loop.steps, moved));
                CHECK(std::abs(a - b) < 1e-12);
                // the holonomy itself is conjugated by the gauge at the base
                Mat gb = g.at(loop.base);
                CHECK((holonomy(loop.steps, moved) - gb.adjoint() * holonomy(loop.steps, cfg) * gb).norm() < 1e-12);
            }
        }
    }
}

TEST_CASE("run_sharded: deterministic per seed and shard count, errors propagate")
{
    auto draw = [](Rng& r, double* row) {
        std::normal_distribution<double> g;
        row[0] = g(r);
        row[1] = row[0] * row[0];
    };
    auto a = run_sharded(1000, 2, 42, 3, draw), b = run_sharded(1000, 2, 42, 3, draw);
    CHECK(a == b);
    auto c = run_sharded(1000, 2, 43, 3, draw);
    CHECK(a != c);
    auto m = mean_of(a, 2, 1);
    CHECK(m.mean == doctest::Approx(1.0).epsilon(0.15));
    CHECK(m.stderr_ > 0);
    CHECK_THROWS_AS(run_sharded(10, 1, 0, 2, [](Rng&, double*) { throw std::runtime_error("boom"); }),
                    std::runtime_error);
}

TEST_CASE("simple loop law at N = 1, 2")
{
    for (int N : {1, 2}) {
        for (double t : {0.5, 2.0}) {
            auto ex = standard_example("simple", {t});
            SamplerOptions opt;
            opt.samples = 8000;
            opt.seed = 5;
            auto w = wilson_estimate(ex.map, ex.areas, ex.loops, GroupSpec(N), opt);
            CHECK(std::abs(w.estimate - std::exp(-t / 2)) < 4 * w.stderr_);
            CHECK(w.samples == 8000);
        }
    }
}

TEST_CASE("doubly wound loop matches the exact finite-N second moment")
{
    // E tr U^2 = e^{-s}(cosh(s/N) - N sinh(s/N)) when the annulus has zero area
    for (int N : {1, 2, 3}) {
        const double s = 0.7;
        auto ex = standard_example("double_wound", {s, 0.0});
        SamplerOptions opt;
        opt.samples = N == 3 ? 4000 : 10000;
        opt.seed = 8;
        auto w = wilson_estimate(ex.map, ex.areas, ex.loops, GroupSpec(N), opt);
        double exact = std::exp(-s) * (std::cosh(s / N) - N * std::sinh(s / N));
        CAPTURE(N);
        CHECK(std::abs(w.estimate - exact) < 4 * w.stderr_ + 0.003);
    }
}

TEST_CASE("figure eight factorises at every N")
{
    for (int N : {1, 2, 3}) {
        auto ex = standard_example("figure_eight", {0.4, 1.3});
        SamplerOptions opt;
        opt.samples = 6000;
        opt.seed = 13;
        auto w = wilson_estimate(ex.map, ex.areas, ex.loops, GroupSpec(N), opt);
        CHECK(std::abs(w.estimate - std::exp(-0.85)) < 4 * w.stderr_ + 0.003);
    }
}

TEST_CASE("estimates do not depend on the spanning tree")
{
    auto ex = standard_example("lasso_tree_example", {0.5, 0.7, 0.3, 0.9, 0.6});
    auto t1 = spanning_tree(ex.map);
    auto t2 = make_tree(ex.map, {1, 2, 3, 6}, 0);
    REQUIRE(t1.edges != t2.edges);
    const auto& loop = ex.loops[0];
    auto estimate = [&](const SpanningTree& t, std::uint64_t seed) {
        auto basis = lasso_basis(ex.map, t, loop.base);
        auto rows = run_sharded(6000, 1, seed, 1, [&](Rng& r, double* row) {
            auto edges = edges_from_lassos(ex.map, t, basis, sample_lassos(ex.map, ex.areas, GroupSpec(2), r));
            row[0] = ntrace(holonomy(loop.steps, edges)).real();
        });
        return mean_of(rows, 1, 0);
    };
    auto a = estimate(t1, 1), b = estimate(t2, 2);
    CHECK(std::abs(a.mean - b.mean) < 4 * std::hypot(a.stderr_, b.stderr_));
}

TEST_CASE("coupled derivative of the simple loop")
{
    // d/dt e^{-t/2} = -e^{-t/2}/2 for every N
    for (int N : {1, 2}) {
        auto ex = standard_example("simple", {1.2});
        const int F = ex.faces["disk"];
        CrnRequest req;
        req.coefficients = {{F, 1.0}};
        req.h = 0.05;
        const auto& loop = ex.loops[0];
        req.differentiated = [&](const EdgeConfig& c) { return ntrace(holonomy(loop.steps, c)); };
        req.rhs = [&](const EdgeConfig& c) { return -0.5 * ntrace(holonomy(loop.steps, c)); };
        SamplerOptions opt;
        opt.samples = 20000;
        opt.seed = 3;
        auto r = crn_derivative(ex.map, ex.areas, GroupSpec(N), req, opt);
        CHECK(std::abs(r.lhs + 0.5 * std::exp(-0.6)) < 4 * r.lhs_stderr + r.allowance);
        CHECK(std::abs(r.residual) <= 3 * r.sigma + r.allowance);
        req.h = 1.5;
        try {
            crn_derivative(ex.map, ex.areas, GroupSpec(N), req, opt);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::StepTooLarge);
        }
    }
}

TEST_CASE("reproducible with a fixed seed and shard count")
{
    auto ex = standard_example("fig2_example");
    SamplerOptions opt;
    opt.samples = 500;
    opt.seed = 77;
    opt.shards = 2;
    auto a = wilson_estimate(ex.map, ex.areas, ex.loops, GroupSpec(2), opt);
    auto b = wilson_estimate(ex.map, ex.areas, ex.loops, GroupSpec(2), opt);
    CHECK(a.estimate == b.estimate);
    CHECK(a.stderr_ == b.stderr_);
}
