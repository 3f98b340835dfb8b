#include "ym/group_core.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace ym {

GroupSpec::GroupSpec(int n) : N(n)
{
    if (n < 1) throw Error(ErrorCode::SizeMismatch, "group size must be >= 1");
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

std::vector<Mat> unitary_basis(const GroupSpec& spec)
{
    const int N = spec.N;
    const double d = 1.0 / std::sqrt(double(N)), o = 1.0 / std::sqrt(2.0 * N);
    const cplx I(0, 1);
    std::vector<Mat> basis;
    basis.reserve(N * N);
    for (int k = 0; k < N; ++k) {
        Mat X = Mat::Zero(N, N);
        X(k, k) = I * d;
        basis.push_back(std::move(X));
    }
    for (int j = 0; j < N; ++j)
        for (int k = j + 1; k < N; ++k) {
            Mat A = Mat::Zero(N, N), B = Mat::Zero(N, N);
            A(j, k) = o;
            A(k, j) = -o;
            B(j, k) = I * o;
            B(k, j) = I * o;
            basis.push_back(std::move(A));
            basis.push_back(std::move(B));
        }
    return basis;
}

Mat contract_basis(const GroupSpec& spec, const Mat& C)
{
    if (C.rows() != spec.N || C.cols() != spec.N)
        throw Error(ErrorCode::SizeMismatch, "matrix is " + std::to_string(C.rows()) + "x" +
                                                 std::to_string(C.cols()) + ", expected N=" + std::to_string(spec.N));
    Mat sum = Mat::Zero(spec.N, spec.N);
    for (const auto& X : unitary_basis(spec)) sum += X * C * X;
    return sum;
}

Mat random_algebra(const GroupSpec& spec, double scale, Rng& rng)
{
    const int N = spec.N;
    std::normal_distribution<double> g;
    const double d = scale / std::sqrt(double(N)), o = scale / std::sqrt(2.0 * N);
    Mat X(N, N);
    for (int k = 0; k < N; ++k) X(k, k) = cplx(0, d * g(rng));
    for (int j = 0; j < N; ++j)
        for (int k = j + 1; k < N; ++k) {
            cplx z(o * g(rng), o * g(rng));
            X(j, k) = z;
            X(k, j) = -std::conj(z);
        }
    return X;
}

namespace {

double norm1(const Mat& A) { return A.cwiseAbs().colwise().sum().maxCoeff(); }

constexpr std::array<double, 4> b3 = {120., 60., 12., 1.};
constexpr std::array<double, 6> b5 = {30240., 15120., 3360., 420., 30., 1.};
constexpr std::array<double, 8> b7 = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
constexpr std::array<double, 10> b9 = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                       2162160.,     110880.,     3960.,       90.,        1.};
constexpr std::array<double, 14> b13 = {64764752532480000., 32382376266240000., 7771770303897600.,
                                        1187353796428800.,  129060195264000.,   10559470521600.,
                                        670442572800.,      33522128640.,       1323241920.,
                                        40840800.,          960960.,            16380.,
                                        182.,               1.};
constexpr double theta3 = 1.495585217958292e-2, theta5 = 2.539398330063230e-1, theta7 = 9.504178996162932e-1,
                 theta9 = 2.097847961257068, theta13 = 5.371920351148152;

template <size_t K>
Mat pade_low(const Mat& X, const std::vector<Mat>& evens, const std::array<double, K>& b)
{
    // evens[j] = X^{2j}, j >= 1
    const int n = static_cast<int>(X.rows());
    Mat U = b[1] * Mat::Identity(n, n), V = b[0] * Mat::Identity(n, n);
    for (size_t j = 1; 2 * j < K; ++j) {
        U += b[2 * j + 1] * evens[j];
        V += b[2 * j] * evens[j];
    }
    U = X * U;
    return (V - U).partialPivLu().solve(V + U);
}

Mat expm_small(const Mat& X)
{
    const int n = static_cast<int>(X.rows());
    if (n == 1) return Mat::Constant(1, 1, std::exp(X(0, 0)));
    // exp(i a I + B) with B traceless skew-Hermitian, B^2 = -w^2 I
    cplx ia = X.trace() / 2.0;
    Mat B = X - ia * Mat::Identity(2, 2);
    double w = std::sqrt(std::max(0.0, std::norm(B(0, 0)) + std::norm(B(0, 1))));
    double sinc = w < 1e-8 ? 1.0 - w * w / 6.0 : std::sin(w) / w;
    return std::exp(ia) * (std::cos(w) * Mat::Identity(2, 2) + sinc * B);
}

} // namespace

Mat expm_skew(const Mat& Xin)
{
    const int n = static_cast<int>(Xin.rows());
    if (n <= 2) return expm_small(Xin);
    std::vector<Mat> ev(2);
    ev[1] = Xin * Xin;
    // spectral radius bound valid for normal matrices
    double rho = std::min(norm1(Xin), std::sqrt(norm1(ev[1])));
    if (rho <= theta3) return pade_low(Xin, ev, b3);
    ev.push_back(ev[1] * ev[1]);
    rho = std::min(rho, std::pow(norm1(ev[2]), 0.25));
    if (rho <= theta5) return pade_low(Xin, ev, b5);
    ev.push_back(ev[2] * ev[1]);
    if (rho <= theta7) return pade_low(Xin, ev, b7);
    if (rho <= theta9) {
        ev.push_back(ev[2] * ev[2]);
        return pade_low(Xin, ev, b9);
    }
    int s = std::max(0, static_cast<int>(std::ceil(std::log2(rho / theta13))));
    const double c = std::ldexp(1.0, -s);
    Mat X = c * Xin, A2 = (c * c) * ev[1], A4 = std::pow(c, 4) * ev[2], A6 = std::pow(c, 6) * ev[3];
    Mat I = Mat::Identity(n, n);
    Mat U = X * (A6 * (b13[13] * A6 + b13[11] * A4 + b13[9] * A2) + b13[7] * A6 + b13[5] * A4 + b13[3] * A2 + b13[1] * I);
    Mat V = A6 * (b13[12] * A6 + b13[10] * A4 + b13[8] * A2) + b13[6] * A6 + b13[4] * A4 + b13[2] * A2 + b13[0] * I;
    Mat R = (V - U).partialPivLu().solve(V + U);
    for (int k = 0; k < s; ++k) R = R * R;
    return R;
}

double unitarity_defect(const Mat& U)
{
    return (U.adjoint() * U - Mat::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff();
}

void reunitarize(Mat& U)
{
    if (U.rows() == 1) {
        U(0, 0) /= std::abs(U(0, 0));
        return;
    }
    for (int it = 0; it < 8; ++it) {
        Mat E = U.adjoint() * U - Mat::Identity(U.rows(), U.cols());
        if (E.cwiseAbs().maxCoeff() < 1e-15) return;
        U = U * (Mat::Identity(U.rows(), U.cols()) - 0.5 * E);
    }
}

int default_walk_steps(double t) { return std::max(8, static_cast<int>(std::ceil(64.0 * t))); }

Mat heat_sample(const GroupSpec& spec, double t, int m, Rng& rng)
{
    if (t < 0) throw Error(ErrorCode::NonpositiveTime, "negative heat-kernel time");
    Mat U = Mat::Identity(spec.N, spec.N);
    if (t == 0) return U;
    if (m <= 0) m = default_walk_steps(t);
    const double scale = std::sqrt(t / m);
    if (spec.N == 1) {
        std::normal_distribution<double> g;
        double angle = 0;
        for (int j = 0; j < m; ++j) angle += scale * g(rng);
        U(0, 0) = std::polar(1.0, angle);
        return U;
    }
    if (spec.N == 2) {
        // same draws and closed form as the general path, without heap traffic
        std::normal_distribution<double> g;
        const double d = scale / std::sqrt(2.0), o = scale / 2.0;
        Eigen::Matrix2cd W = Eigen::Matrix2cd::Identity();
        for (int j = 0; j < m; ++j) {
            double x0 = d * g(rng), x1 = d * g(rng);
            cplx z(o * g(rng), o * g(rng));
            cplx ia(0, 0.5 * (x0 + x1));
            double b = 0.5 * (x0 - x1);
            double w = std::sqrt(b * b + std::norm(z));
            double sinc = w < 1e-8 ? 1.0 - w * w / 6.0 : std::sin(w) / w;
            Eigen::Matrix2cd E;
            E << std::cos(w) + sinc * cplx(0, b), sinc * z, -sinc * std::conj(z), std::cos(w) - sinc * cplx(0, b);
            W = W * (std::exp(ia) * E);
        }
        U = W;
        reunitarize(U);
        return U;
    }
    for (int j = 0; j < m; ++j) U = U * expm_skew(random_algebra(spec, scale, rng));
    reunitarize(U);
    return U;
}

Mat haar_unitary(const GroupSpec& spec, Rng& rng)
{
    const int N = spec.N;
    std::normal_distribution<double> g;
    Mat Z(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) Z(j, k) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(Z);
    Mat Q = qr.householderQ();
    Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < N; ++k) Q.col(k) *= R(k, k) / std::abs(R(k, k));
    return Q;
}

namespace {

template <class Term>
double wrapped_sum(double t, double theta, Term term)
{
    if (!(t > 0)) throw Error(ErrorCode::NonpositiveTime, "heat-kernel density needs t > 0");
    const double two_pi = 2 * std::numbers::pi;
    theta = std::remainder(theta, two_pi);
    double sum = term(theta);
    for (int k = 1;; ++k) {
        double a = term(theta + two_pi * k), b = term(theta - two_pi * k);
        sum += a + b;
        double x = two_pi * k - std::abs(theta);
        if (x * x / (2 * t) > 40.0 && std::abs(a) + std::abs(b) < 1e-16) break;
    }
    return sum;
}

} // namespace

double u1_heat_density(double t, double theta)
{
    const double c = 2 * std::numbers::pi / std::sqrt(2 * std::numbers::pi * t);
    return wrapped_sum(t, theta, [&](double x) { return c * std::exp(-x * x / (2 * t)); });
}

double u1_heat_density_dt(double t, double theta)
{
    const double c = 2 * std::numbers::pi / std::sqrt(2 * std::numbers::pi * t);
    return wrapped_sum(t, theta, [&](double x) {
        return c * std::exp(-x * x / (2 * t)) * 0.5 * (x * x / (t * t) - 1.0 / t);
    });
}

double u1_heat_sample(double t, Rng& rng)
{
    if (t < 0) throw Error(ErrorCode::NonpositiveTime, "negative heat-kernel time");
    std::normal_distribution<double> g(0.0, std::sqrt(t));
    double x = std::fmod(g(rng), 2 * std::numbers::pi);
    return x < 0 ? x + 2 * std::numbers::pi : x;
}

cplx grad_fd(const GroupFunction& f, const Mat& a, const Mat& X, Side side, double h)
{
    Mat ep = expm_skew(h * X), em = expm_skew(-h * X);
    if (side == Side::Right) return (f(a * ep) - f(a * em)) / (2 * h);
    return (f(ep * a) - f(em * a)) / (2 * h);
}

cplx laplacian_fd(const GroupSpec& spec, const GroupFunction& f, const Mat& a, double h)
{
    cplx sum = 0, f0 = f(a);
    for (const auto& X : unitary_basis(spec))
        sum += (f(a * expm_skew(h * X)) - 2.0 * f0 + f(a * expm_skew(-h * X))) / (h * h);
    return sum;
}

cplx grad_dot_fd(const GroupSpec& spec, const GroupFunction2& f, const Mat& a, const Mat& b, double h)
{
    cplx sum = 0;
    for (const auto& X : unitary_basis(spec)) {
        Mat ep = expm_skew(h * X), em = expm_skew(-h * X);
        Mat ap = a * ep, am = a * em, bp = b * ep, bm = b * em;
        sum += (f(ap, bp) - f(ap, bm) - f(am, bp) + f(am, bm)) / (4 * h * h);
    }
    return sum;
}

} // namespace ym
