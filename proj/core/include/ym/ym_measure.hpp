#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "ym/group_core.hpp"
#include "ym/planar_map.hpp"

namespace ym {

struct SpanningTree {
    int root = -1;
    std::set<int> edges;
};

// Breadth-first tree from the lowest vertex id, neighbours by increasing edge id.
SpanningTree spanning_tree(const PlanarMap& map);
// Validates a caller-chosen tree (|edges| = V - 1, spanning, acyclic).
SpanningTree make_tree(const PlanarMap& map, const std::vector<int>& edges, int root);
// Signed edge path inside the tree from vertex a to vertex b.
std::vector<int> tree_path(const PlanarMap& map, const SpanningTree& tree, int a, int b);

struct LassoFace {
    int step = 0;               // distinguished edge e_F, oriented with F on its left
    int parent = -1;            // next face towards the unbounded face across e_F
    int depth = 0;              // number of crossings to reach the unbounded face
    std::vector<int> tail;      // tree path from the base to the start of e_F
    std::vector<int> boundary;  // counterclockwise boundary of F starting with e_F
    std::vector<int> word;      // reduced lasso word
};

struct LassoBasis {
    int base = -1;
    std::vector<int> order;           // elimination order: deepest faces first
    std::map<int, LassoFace> faces;   // by bounded face id
    std::map<int, int> face_of_edge;  // non-tree edge id -> face it is distinguished for
};

LassoBasis lasso_basis(const PlanarMap& map, const SpanningTree& tree, int base);

struct Letter {
    int face = 0;
    int power = 1; // +1 or -1
    bool operator==(const Letter&) const = default;
};
using LassoWord = std::vector<Letter>;

LassoWord free_reduce(const LassoWord& word);
LassoWord inverse(const LassoWord& word);
LassoWord loop_in_lassos(const PlanarMap& map, const LoopWord& loop, const LassoBasis& basis,
                         const SpanningTree& tree);

using LassoConfig = std::map<int, Mat>; // bounded face -> loop variable
using EdgeConfig = std::map<int, Mat>;  // edge id -> variable of the positively oriented edge
using GaugeTransform = std::map<int, Mat>;

// One heat sample per bounded face; rw_steps <= 0 selects the default walk length.
LassoConfig sample_lassos(const PlanarMap& map, const AreaVector& areas, const GroupSpec& spec, Rng& rng,
                          int rw_steps = 0);

// Product in reverse traversal order; negative symbols use the inverse.
Mat holonomy(const std::vector<int>& word, const EdgeConfig& edges);
Mat holonomy(const LassoWord& word, const LassoConfig& lassos);

EdgeConfig edges_from_lassos(const PlanarMap& map, const SpanningTree& tree, const LassoBasis& basis,
                             const LassoConfig& lassos);
EdgeConfig apply_gauge(const EdgeConfig& config, const GaugeTransform& g, const PlanarMap& map);

// Runs draw(rng, row) for every sample; shard k owns a contiguous block of rows and the
// stream derive_seed(seed, k). Returns samples x width values, row-major.
std::vector<double> run_sharded(int samples, int width, std::uint64_t seed, int shards,
                                const std::function<void(Rng&, double*)>& draw);

struct MeanEstimate {
    double mean = 0;
    double stderr_ = 0;
};
MeanEstimate mean_of(const std::vector<double>& rows, int width, int column);

struct WilsonEstimate {
    double estimate = 0;
    double stderr_ = 0;
    double imag = 0;
    double imag_stderr = 0;
    int samples = 0;
};

struct SamplerOptions {
    int samples = 10000;
    std::uint64_t seed = 0;
    int shards = 1;
    int rw_steps = 0;
};

// Monte Carlo estimate of E[prod_j tr hol(loop_j)].
WilsonEstimate wilson_estimate(const PlanarMap& map, const AreaVector& areas, const std::vector<LoopWord>& loops,
                               const GroupSpec& spec, const SamplerOptions& opt);

// Coupled samples for finite-difference area derivatives. Each perturbed face F gets
// variables at t_F - h, t_F - h/2, t_F, t_F + h/2, t_F + h linked by independent
// heat increments; every other face is sampled once at its area.
struct CrnRequest {
    std::map<int, double> coefficients; // face -> weight of d/dt_F
    double h = 0.05;
    std::function<cplx(const EdgeConfig&)> differentiated;
    std::function<cplx(const EdgeConfig&)> rhs;
};

struct CrnResult {
    double lhs = 0;       // sum_F c_F [E(t_F+h) - E(t_F-h)] / 2h
    double lhs_half = 0;  // same with h/2
    double lhs_stderr = 0;
    double rhs = 0;
    double rhs_stderr = 0;
    double residual = 0;
    double sigma = 0;     // stderr of the per-sample residual
    double allowance = 0; // 4/3 |lhs - lhs_half|
    double max_imag = 0;  // largest |mean imaginary part| seen, diagnostic
};

CrnResult crn_derivative(const PlanarMap& map, const AreaVector& areas, const GroupSpec& spec,
                         const CrnRequest& req, const SamplerOptions& opt);

} // namespace ym
