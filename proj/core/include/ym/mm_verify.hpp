#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ym/ym_measure.hpp"

namespace ym {

struct MMReport {
    double lhs = 0;
    double rhs = 0;
    double residual = 0;
    double sigma = 0;     // Monte Carlo stderr of the coupled residual
    double allowance = 0; // finite-difference truncation allowance
    double lhs_half = 0;  // derivative estimate at h/2
    double h = 0;
    double max_imag = 0;
    int samples = 0;
    bool pass = false;
};

MMReport make_report(const CrnResult& r, double h, int samples);

struct MMParams {
    SamplerOptions sampler;
    double h = 0; // <= 0: min(0.05 * smallest perturbed area, 0.05)
};

// (+1, -1, +1, -1) on F1..F4, accumulated over coincident faces, unbounded face dropped.
std::map<int, double> frame_coefficients(const PlanarMap& map, const CrossingFrame& frame);
double default_fd_step(const AreaVector& areas, const std::map<int, double>& coefficients);

struct AltDerivative {
    double value = 0;
    double sigma = 0;
    double value_half = 0;
    double allowance = 0;
};

// Alternating area derivative at a frame of E[observable].
AltDerivative alt_area_derivative(const PlanarMap& map, const AreaVector& areas,
                                  const std::function<cplx(const EdgeConfig&)>& observable,
                                  const CrossingFrame& frame, const GroupSpec& spec, const MMParams& params);

// d/dt_F E tr hol(L) + 1/2 E tr hol(L) for a face sharing a once-traversed edge with the unbounded face.
MMReport unbounded_face_residual(const PlanarMap& map, const AreaVector& areas, const LoopWord& loop, int face,
                                 const GroupSpec& spec, const MMParams& params);

MMReport mm_residual(const PlanarMap& map, const AreaVector& areas, const LoopWord& loop, const CrossingFrame& frame,
                     const GroupSpec& spec, const MMParams& params);

// Frame of two loops based at the same vertex: L1 leaves along e1 and returns through e3,
// L2 leaves along e2 and returns through e4.
CrossingFrame two_loop_frame(const PlanarMap& map, const LoopWord& L1, const LoopWord& L2);
MMReport two_loop_residual(const PlanarMap& map, const AreaVector& areas, const LoopWord& L1, const LoopWord& L2,
                           const GroupSpec& spec, const MMParams& params);

// U(1) local identity by tensor quadrature on the 4-torus.
struct U1TestFunction {
    std::string name;
    std::function<double(const std::array<double, 4>&)> value;
    std::function<double(const std::array<double, 4>&)> mixed; // d^2/dtheta1 dtheta2; empty -> finite differences
};
std::vector<U1TestFunction> u1_test_functions();

struct LocalMMResult {
    double lhs = 0;
    double rhs = 0;
    double residual = 0;
    double lhs_fine = 0; // at 2n
    double rhs_fine = 0;
    double richardson = 0; // max difference between the n and 2n evaluations
};

LocalMMResult local_mm_u1_residual(const std::array<double, 4>& alpha, const std::array<double, 4>& t,
                                   const U1TestFunction& f, int n = 64, double grid_tol = 1e-9,
                                   std::uint64_t check_seed = 1);

// Variables inserted at outgoing half-edges of a vertex: a tail half sends a_E to a_E x,
// a head half sends a_E to x^-1 a_E.
EdgeConfig insert_at(const PlanarMap& map, const EdgeConfig& config, const std::vector<int>& halves, const Mat& x);

using EdgeFunction = std::function<cplx(const EdgeConfig&)>;

// max |f - f o substitution| over both extended-gauge substitutions at the frame.
double extended_gauge_check(const EdgeFunction& f, const PlanarMap& map, const CrossingFrame& frame,
                            const GroupSpec& spec, int trials, Rng& rng);

// Closed form -tr(hol L1) tr(hol L2) of the mixed gradient at e1, e2 of tr hol(L).
cplx grad_dot_word(const PlanarMap& map, const LoopWord& loop, const CrossingFrame& frame, const EdgeConfig& config);

// Derivative of f along X inserted at outgoing half-edge `half`.
cplx grad_at_half(const EdgeFunction& f, const PlanarMap& map, const EdgeConfig& config, int half, const Mat& X,
                  double h = kDefaultGroupStep);
// Sum over the basis of mixed derivatives with X inserted at half1 and at half2.
cplx grad_dot_halves(const EdgeFunction& f, const PlanarMap& map, const EdgeConfig& config, int half1, int half2,
                     const GroupSpec& spec, double h = kDefaultGroupStep);

EdgeConfig random_config(const PlanarMap& map, const GroupSpec& spec, Rng& rng);
GaugeTransform random_gauge(const PlanarMap& map, const GroupSpec& spec, Rng& rng);

} // namespace ym
