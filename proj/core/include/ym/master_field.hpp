#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ym/planar_map.hpp"
#include "ym/ym_measure.hpp"

namespace ym {

// Rows: one per crossing frame (alternating coefficients), one per (bounded face,
// once-traversed edge shared with the unbounded face) with unit coefficient.
struct DerivativeSystem {
    std::vector<int> faces;    // column order: bounded faces by id
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<int> frame_of_row; // frame index, or -1 for an unbounded row
    int rank = 0;
    Eigen::VectorXd solution; // dPhi / dt_F per column
    double residual = 0;      // max |A x - b|
};

struct SystemRows {
    std::vector<int> faces;
    Eigen::MatrixXd A;
    std::vector<int> frame_of_row;
};

// Throws UnderdeterminedSystem when the rank is below the number of bounded faces.
SystemRows system_rows(const PlanarMap& map, const LoopWord& loop);
// products[k] = master value of L1 times that of L2 at frame k; phi = value of the loop.
DerivativeSystem derivative_system(const PlanarMap& map, const LoopWord& loop, double phi,
                                   const std::vector<double>& products, double tol = 1e-8);

struct CanonicalForm {
    std::vector<int> key;
    std::vector<int> face_order; // bounded faces in canonical order
    std::string str() const;
};

// Invariant under relabelling, cyclic rotation, reversal and mirror image.
CanonicalForm canonical_key(const PlanarMap& map, const LoopWord& loop);

struct MasterOptions {
    int steps = 256;            // RK4 steps; the run is repeated with twice as many
    double path_exponent = 1.0; // areas(s) = s^p a
    double tol = 1e-8;
};

struct MasterFieldResult {
    double value = 1;
    double imag = 0;
    double coarse_value = 1;           // with options.steps
    std::map<int, double> derivatives; // d value / d area of each bounded face of the input map
    int depth = 0;
    int nodes = 0;
    int analytic_nodes = 0;
    int memo_hits = 0;
    int memo_misses = 0;
    double max_system_residual = 0;
    double max_condition = 0;
};

MasterFieldResult master_value(const PlanarMap& map, const LoopWord& loop, const AreaVector& areas,
                               const MasterOptions& options = {});

WilsonEstimate mc_oracle(const PlanarMap& map, const LoopWord& loop, const AreaVector& areas,
                         const SamplerOptions& opt, int N = 512);

} // namespace ym
