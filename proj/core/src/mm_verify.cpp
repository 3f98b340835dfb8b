#include "ym/mm_verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace ym {

MMReport make_report(const CrnResult& r, double h, int samples)
{
    MMReport m;
    m.lhs = r.lhs;
    m.rhs = r.rhs;
    m.residual = r.residual;
    m.sigma = r.sigma;
    m.allowance = r.allowance;
    m.lhs_half = r.lhs_half;
    m.h = h;
    m.max_imag = r.max_imag;
    m.samples = samples;
    m.pass = std::abs(m.residual) <= 3 * m.sigma + m.allowance;
    return m;
}

std::map<int, double> frame_coefficients(const PlanarMap& map, const CrossingFrame& frame)
{
    std::map<int, double> c;
    for (int i = 0; i < 4; ++i) {
        int f = frame.faces[i];
        if (f == map.unbounded_face()) continue;
        c[f] += (i % 2 == 0) ? 1.0 : -1.0;
    }
    for (auto it = c.begin(); it != c.end();) it = it->second == 0 ? c.erase(it) : std::next(it);
    return c;
}

double default_fd_step(const AreaVector& areas, const std::map<int, double>& coefficients)
{
    double m = 1.0;
    for (const auto& [f, c] : coefficients) {
        auto it = areas.find(f);
        if (it != areas.end()) m = std::min(m, it->second);
    }
    return std::min(0.05 * m, 0.05);
}

namespace {

double resolve_step(const MMParams& p, const AreaVector& areas, const std::map<int, double>& coef)
{
    return p.h > 0 ? p.h : default_fd_step(areas, coef);
}

cplx trace_of(const LoopWord& l, const EdgeConfig& c) { return ntrace(holonomy(l.steps, c)); }

} // namespace

AltDerivative alt_area_derivative(const PlanarMap& map, const AreaVector& areas,
                                  const std::function<cplx(const EdgeConfig&)>& observable,
                                  const CrossingFrame& frame, const GroupSpec& spec, const MMParams& params)
{
    CrnRequest req;
    req.coefficients = frame_coefficients(map, frame);
    req.h = resolve_step(params, areas, req.coefficients);
    req.differentiated = observable;
    req.rhs = [](const EdgeConfig&) { return cplx(0); };
    if (req.coefficients.empty()) return {};
    auto r = crn_derivative(map, areas, spec, req, params.sampler);
    return {r.lhs, r.lhs_stderr, r.lhs_half, r.allowance};
}

MMReport unbounded_face_residual(const PlanarMap& map, const AreaVector& areas, const LoopWord& loop, int face,
                                 const GroupSpec& spec, const MMParams& params)
{
    map.check_loop(loop);
    const int U = map.unbounded_face();
    if (face < 0 || face >= map.num_faces() || face == U)
        throw Error(ErrorCode::EdgeNotOnUnbounded, "face " + std::to_string(face) + " is not a bounded face");
    auto mult = edge_multiplicity(loop);
    bool shares = false, once = false;
    for (int e : map.edge_ids()) {
        int t = map.halves(e)[0];
        std::set<int> sides{map.face_left(t), map.face_right(t)};
        if (sides != std::set<int>{face, U}) continue;
        shares = true;
        auto it = mult.find(e);
        if (it != mult.end() && it->second == 1) once = true;
    }
    if (!shares)
        throw Error(ErrorCode::EdgeNotOnUnbounded, "face " + std::to_string(face) + " shares no edge with the unbounded face");
    if (!once)
        throw Error(ErrorCode::EdgeMultiplicity, "no edge between face " + std::to_string(face) +
                                                     " and the unbounded face is traversed exactly once");
    CrnRequest req;
    req.coefficients = {{face, 1.0}};
    req.h = resolve_step(params, areas, req.coefficients);
    req.differentiated = [&](const EdgeConfig& c) { return trace_of(loop, c); };
    req.rhs = [&](const EdgeConfig& c) { return -0.5 * trace_of(loop, c); };
    return make_report(crn_derivative(map, areas, spec, req, params.sampler), req.h, params.sampler.samples);
}

MMReport mm_residual(const PlanarMap& map, const AreaVector& areas, const LoopWord& loop, const CrossingFrame& frame,
                     const GroupSpec& spec, const MMParams& params)
{
    auto [L1, L2] = split_loop(map, loop, frame);
    CrnRequest req;
    req.coefficients = frame_coefficients(map, frame);
    req.h = resolve_step(params, areas, req.coefficients);
    req.differentiated = [&](const EdgeConfig& c) { return trace_of(loop, c); };
    req.rhs = [&, L1 = L1, L2 = L2](const EdgeConfig& c) { return trace_of(L1, c) * trace_of(L2, c); };
    return make_report(crn_derivative(map, areas, spec, req, params.sampler), req.h, params.sampler.samples);
}

CrossingFrame two_loop_frame(const PlanarMap& map, const LoopWord& L1, const LoopWord& L2)
{
    map.check_loop(L1);
    map.check_loop(L2);
    if (L1.base != L2.base) throw Error(ErrorCode::PatternMismatch, "loops must share their base vertex");
    const int v = L1.base;
    if (map.degree(v) != 4) throw Error(ErrorCode::PatternMismatch, "base vertex must have degree 4");
    CrossingFrame fr;
    fr.vertex = v;
    fr.e = {map.step_out(L1.steps.front()), map.step_out(L2.steps.front()), map.step_in(L1.steps.back()),
            map.step_in(L2.steps.back())};
    std::set<int> distinct(fr.e.begin(), fr.e.end());
    if (distinct.size() != 4 || map.rot_next(map.rot_next(fr.e[0])) != fr.e[2] ||
        map.rot_next(map.rot_next(fr.e[1])) != fr.e[3])
        throw Error(ErrorCode::PatternMismatch, "loops do not cross straight through their base vertex");
    fr.counterclockwise = map.rot_next(fr.e[0]) == fr.e[1];
    for (int i = 0; i < 4; ++i)
        fr.faces[i] = fr.counterclockwise ? map.sector_face(fr.e[i]) : map.sector_face(fr.e[(i + 1) % 4]);
    fr.start = 0;
    fr.s0 = static_cast<int>(L1.steps.size());
    return fr;
}

MMReport two_loop_residual(const PlanarMap& map, const AreaVector& areas, const LoopWord& L1, const LoopWord& L2,
                           const GroupSpec& spec, const MMParams& params)
{
    auto frame = two_loop_frame(map, L1, L2);
    CrnRequest req;
    req.coefficients = frame_coefficients(map, frame);
    req.h = resolve_step(params, areas, req.coefficients);
    const double n2 = double(spec.N) * spec.N;
    req.differentiated = [&](const EdgeConfig& c) { return trace_of(L1, c) * trace_of(L2, c); };
    req.rhs = [&](const EdgeConfig& c) {
        return ntrace(holonomy(L1.steps, c) * holonomy(L2.steps, c)) / n2;
    };
    return make_report(crn_derivative(map, areas, spec, req, params.sampler), req.h, params.sampler.samples);
}

std::vector<U1TestFunction> u1_test_functions()
{
    using A = std::array<double, 4>;
    std::vector<U1TestFunction> out;
    out.push_back({"cos(u+v)",
                   [](const A& x) { return std::cos(x[0] - x[2] + x[1] - x[3]); },
                   [](const A& x) { return -std::cos(x[0] - x[2] + x[1] - x[3]); }});
    out.push_back({"cos(u)cos(v)+sin(2u-v)",
                   [](const A& x) {
                       double u = x[0] - x[2], v = x[1] - x[3];
                       return std::cos(u) * std::cos(v) + std::sin(2 * u - v);
                   },
                   [](const A& x) {
                       double u = x[0] - x[2], v = x[1] - x[3];
                       return std::sin(u) * std::sin(v) + 2 * std::sin(2 * u - v);
                   }});
    out.push_back({"exp(cos(u)/2)cos(v-0.3)+sin(u+2v)",
                   [](const A& x) {
                       double u = x[0] - x[2], v = x[1] - x[3];
                       return std::exp(0.5 * std::cos(u)) * std::cos(v - 0.3) + std::sin(u + 2 * v);
                   },
                   [](const A& x) {
                       double u = x[0] - x[2], v = x[1] - x[3];
                       return 0.5 * std::sin(u) * std::exp(0.5 * std::cos(u)) * std::sin(v - 0.3) -
                              2 * std::sin(u + 2 * v);
                   }});
    return out;
}

namespace {

double mixed_fd(const U1TestFunction& f, std::array<double, 4> x)
{
    auto d = [&](double h) {
        auto at = [&](double s, double t) {
            auto y = x;
            y[0] += s;
            y[1] += t;
            return f.value(y);
        };
        return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
    };
    return (4 * d(5e-3) - d(1e-2)) / 3;
}

std::pair<double, double> torus_quadrature(const std::array<double, 4>& alpha, const std::array<double, 4>& t,
                                           const U1TestFunction& f, int n)
{
    const double two_pi = 2 * std::numbers::pi;
    std::array<std::vector<double>, 4> R, dR;
    for (int i = 0; i < 4; ++i) {
        R[i].resize(n);
        dR[i].resize(n);
        for (int d = 0; d < n; ++d) {
            R[i][d] = u1_heat_density(t[i], two_pi * d / n + alpha[i]);
            dR[i][d] = u1_heat_density_dt(t[i], two_pi * d / n + alpha[i]);
        }
    }
    auto diff = [n](int a, int b) { return ((a - b) % n + n) % n; };
    double lhs = 0, rhs = 0;
    std::array<double, 4> x{};
    for (int j1 = 0; j1 < n; ++j1) {
        x[0] = two_pi * j1 / n;
        for (int j2 = 0; j2 < n; ++j2) {
            x[1] = two_pi * j2 / n;
            const double r1 = R[0][diff(j1, j2)], d1 = dR[0][diff(j1, j2)];
            for (int j3 = 0; j3 < n; ++j3) {
                x[2] = two_pi * j3 / n;
                const double r2 = R[1][diff(j2, j3)], d2 = dR[1][diff(j2, j3)];
                for (int j4 = 0; j4 < n; ++j4) {
                    x[3] = two_pi * j4 / n;
                    const double r3 = R[2][diff(j3, j4)], d3 = dR[2][diff(j3, j4)];
                    const double r4 = R[3][diff(j4, j1)], d4 = dR[3][diff(j4, j1)];
                    const double w = r1 * r2 * r3 * r4;
                    const double wl = d1 * r2 * r3 * r4 - r1 * d2 * r3 * r4 + r1 * r2 * d3 * r4 - r1 * r2 * r3 * d4;
                    if (w == 0 && wl == 0) continue;
                    lhs += wl * f.value(x);
                    rhs -= w * (f.mixed ? f.mixed(x) : mixed_fd(f, x));
                }
            }
        }
    }
    const double n4 = std::pow(double(n), 4);
    return {lhs / n4, rhs / n4};
}

} // namespace

LocalMMResult local_mm_u1_residual(const std::array<double, 4>& alpha, const std::array<double, 4>& t,
                                   const U1TestFunction& f, int n, double grid_tol, std::uint64_t check_seed)
{
    for (double ti : t)
        if (!(ti > 0)) throw Error(ErrorCode::NonpositiveTime, "local MM needs positive areas");
    if (n < 4) throw Error(ErrorCode::GridTooCoarse, "grid needs at least 4 points per axis");
    Rng rng(check_seed);
    std::uniform_real_distribution<double> U(0, 2 * std::numbers::pi);
    for (int k = 0; k < 32; ++k) {
        std::array<double, 4> x{U(rng), U(rng), U(rng), U(rng)};
        double s = U(rng), f0 = f.value(x);
        auto y = x, z = x;
        y[0] += s;
        y[2] += s;
        z[1] += s;
        z[3] += s;
        double dev = std::max(std::abs(f.value(y) - f0), std::abs(f.value(z) - f0));
        if (dev > 1e-10 * std::max(1.0, std::abs(f0)))
            throw Error(ErrorCode::NotExtendedInvariant, f.name + " deviates by " + std::to_string(dev));
    }
    LocalMMResult r;
    std::tie(r.lhs, r.rhs) = torus_quadrature(alpha, t, f, n);
    std::tie(r.lhs_fine, r.rhs_fine) = torus_quadrature(alpha, t, f, 2 * n);
    r.residual = r.lhs - r.rhs;
    r.richardson = std::max(std::abs(r.lhs - r.lhs_fine), std::abs(r.rhs - r.rhs_fine));
    if (r.richardson > grid_tol)
        throw Error(ErrorCode::GridTooCoarse, "n and 2n quadratures differ by " + std::to_string(r.richardson));
    return r;
}

EdgeConfig insert_at(const PlanarMap& map, const EdgeConfig& config, const std::vector<int>& halves, const Mat& x)
{
    EdgeConfig out = config;
    for (int h : halves) {
        int e = map.edge_of(h);
        Mat& a = out.at(e);
        a = map.is_tail_half(h) ? Mat(a * x) : Mat(x.adjoint() * a);
    }
    return out;
}

double extended_gauge_check(const EdgeFunction& f, const PlanarMap& map, const CrossingFrame& frame,
                            const GroupSpec& spec, int trials, Rng& rng)
{
    if (map.degree(frame.vertex) != 4)
        throw Error(ErrorCode::WrongDegree, "extended gauge invariance needs a 4-valent vertex");
    double dev = 0;
    for (int k = 0; k < trials; ++k) {
        auto c = random_config(map, spec, rng);
        Mat x = haar_unitary(spec, rng);
        cplx f0 = f(c);
        dev = std::max(dev, std::abs(f(insert_at(map, c, {frame.e[0], frame.e[2]}, x)) - f0));
        dev = std::max(dev, std::abs(f(insert_at(map, c, {frame.e[1], frame.e[3]}, x)) - f0));
    }
    return dev;
}

cplx grad_dot_word(const PlanarMap& map, const LoopWord& loop, const CrossingFrame& frame, const EdgeConfig& config)
{
    auto [L1, L2] = split_loop(map, loop, frame);
    return -trace_of(L1, config) * trace_of(L2, config);
}

cplx grad_at_half(const EdgeFunction& f, const PlanarMap& map, const EdgeConfig& config, int half, const Mat& X,
                  double h)
{
    return (f(insert_at(map, config, {half}, expm_skew(h * X))) - f(insert_at(map, config, {half}, expm_skew(-h * X)))) /
           (2 * h);
}

cplx grad_dot_halves(const EdgeFunction& f, const PlanarMap& map, const EdgeConfig& config, int half1, int half2,
                     const GroupSpec& spec, double h)
{
    cplx sum = 0;
    for (const auto& X : unitary_basis(spec)) {
        Mat p = expm_skew(h * X), m = expm_skew(-h * X);
        auto at = [&](const Mat& s, const Mat& t) {
            return f(insert_at(map, insert_at(map, config, {half1}, s), {half2}, t));
        };
        sum += (at(p, p) - at(p, m) - at(m, p) + at(m, m)) / (4 * h * h);
    }
    return sum;
}

EdgeConfig random_config(const PlanarMap& map, const GroupSpec& spec, Rng& rng)
{
    EdgeConfig c;
    for (int e : map.edge_ids()) c[e] = haar_unitary(spec, rng);
    return c;
}

GaugeTransform random_gauge(const PlanarMap& map, const GroupSpec& spec, Rng& rng)
{
    GaugeTransform g;
    for (int v : map.vertex_ids()) g[v] = haar_unitary(spec, rng);
    return g;
}

} // namespace ym
