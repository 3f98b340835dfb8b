#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ym/errors.hpp"

namespace ym {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

// U(N) with <X,Y> = N trace(X* Y).
struct GroupSpec {
    int N = 1;
    explicit GroupSpec(int n = 1);
};

// Seed derivation for independent streams (shards, faces).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) { return Rng(derive_seed(seed, stream)); }

// Normalized trace tr = trace / N.
inline cplx ntrace(const Mat& m) { return m.trace() / static_cast<double>(m.rows()); }

std::vector<Mat> unitary_basis(const GroupSpec& spec);
Mat contract_basis(const GroupSpec& spec, const Mat& C);

// Sum_X xi_X X with xi_X iid N(0, scale^2) over the orthonormal basis.
Mat random_algebra(const GroupSpec& spec, double scale, Rng& rng);

// exp of a skew-Hermitian matrix; Pade scaling-and-squaring, unitary to roundoff.
Mat expm_skew(const Mat& X);

double unitarity_defect(const Mat& U);
void reunitarize(Mat& U);

int default_walk_steps(double t);
// Geodesic random walk approximating the heat kernel at time t; m <= 0 selects the default.
Mat heat_sample(const GroupSpec& spec, double t, int m, Rng& rng);
// Haar-distributed unitary.
Mat haar_unitary(const GroupSpec& spec, Rng& rng);

// Wrapped Gaussian heat kernel on U(1), density with respect to dtheta / 2pi.
double u1_heat_density(double t, double theta);
// d/dt of the density (= half its second theta-derivative).
double u1_heat_density_dt(double t, double theta);
double u1_heat_sample(double t, Rng& rng);

enum class Side { Left, Right };
using GroupFunction = std::function<cplx(const Mat&)>;
using GroupFunction2 = std::function<cplx(const Mat&, const Mat&)>;

constexpr double kDefaultGroupStep = 1e-4;

cplx grad_fd(const GroupFunction& f, const Mat& a, const Mat& X, Side side, double h = kDefaultGroupStep);
cplx laplacian_fd(const GroupSpec& spec, const GroupFunction& f, const Mat& a, double h = kDefaultGroupStep);
// Sum over the basis of d^2/ds dt f(a e^{sX}, b e^{tX}) at 0.
cplx grad_dot_fd(const GroupSpec& spec, const GroupFunction2& f, const Mat& a, const Mat& b,
                 double h = kDefaultGroupStep);

} // namespace ym
