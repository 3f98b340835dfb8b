#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ym/master_field.hpp"
#include "ym/mm_verify.hpp"

using namespace ym;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

MMParams mm_params(int samples, std::uint64_t seed, double h = 0)
{
    MMParams p;
    p.sampler.samples = samples;
    p.sampler.seed = seed;
    p.h = h;
    return p;
}

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

void a1(Outcome& out)
{
    auto t0 = Clock::now();
    double worst = 0, worst_se = 0;
    for (int N : {1, 2, 4})
        for (double t : {0.5, 1.0, 2.0}) {
            auto ex = standard_example("simple", {t});
            SamplerOptions opt;
            opt.samples = 10000;
            opt.seed = 100 + N;
            auto w = wilson_estimate(ex.map, ex.areas, {ex.loops[0]}, GroupSpec(N), opt);
            double z = std::abs(w.estimate - std::exp(-t / 2)) / w.stderr_;
            worst = std::max(worst, z);
            worst_se = std::max(worst_se, w.stderr_);
            out.require(z <= 4, "N=" + std::to_string(N) + " t=" + fmt(t) + " off by " + fmt(z) + " stderr");
            out.require(w.stderr_ < 0.01, "stderr " + fmt(w.stderr_));
        }
    double secs = seconds_since(t0);
    out.require(secs < 30, "runtime");
    out.detail << "max |z| = " << fmt(worst) << ", max stderr = " << fmt(worst_se) << ", " << fmt(secs) << " s";
}

void mm_at_all_crossings(Outcome& out, const char* name, int N, int samples, std::uint64_t seed, double h,
                         double& worst)
{
    auto ex = standard_example(name);
    const auto& loop = ex.loops[0];
    for (const auto& f : crossing_frames(ex.map, loop)) {
        auto r = mm_residual(ex.map, ex.areas, loop, f, GroupSpec(N), mm_params(samples, seed, h));
        worst = std::max(worst, std::abs(r.residual) / (3 * r.sigma + r.allowance));
        out.require(r.pass, std::string(name) + " N=" + std::to_string(N) + " vertex " + std::to_string(f.vertex) +
                                " residual " + fmt(r.residual));
    }
}

void a2(Outcome& out)
{
    auto t0 = Clock::now();
    double worst = 0;
    for (const char* name : {"figure_eight", "double_wound", "fig2_example", "lasso_example"})
        for (int N : {1, 2}) mm_at_all_crossings(out, name, N, 100000, 7 + N, 0.05, worst);
    double secs = seconds_since(t0);
    out.require(secs < 600, "runtime");
    out.detail << "max |residual| / (3 sigma + allowance) = " << fmt(worst) << ", " << fmt(secs) << " s";
}

void a3(Outcome& out)
{
    double worst = 0;
    auto check = [&](const Example& ex, const char* face) {
        auto r = unbounded_face_residual(ex.map, ex.areas, ex.loops[0], ex.faces.at(face), GroupSpec(2),
                                         mm_params(20000, 3));
        worst = std::max(worst, std::abs(r.residual) / (3 * r.sigma + r.allowance));
        out.require(r.pass, ex.name + " " + face);
    };
    check(standard_example("simple"), "disk");
    auto fig = standard_example("figure_eight");
    check(fig, "lobe1");
    check(fig, "lobe2");
    out.detail << "max |residual| / (3 sigma + allowance) = " << fmt(worst);
}

void a4(Outcome& out)
{
    auto t0 = Clock::now();
    Rng rng(2024);
    std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi), time(0.2, 1.5);
    std::array<double, 4> alpha{}, t{};
    for (auto& a : alpha) a = angle(rng);
    for (auto& s : t) s = time(rng);
    double worst = 0, worst_rich = 0;
    auto fns = u1_test_functions();
    out.require(fns.size() >= 3, "three test functions");
    for (const auto& f : fns) {
        auto r = local_mm_u1_residual(alpha, t, f, 64, 1e-9);
        worst = std::max(worst, std::abs(r.residual));
        worst_rich = std::max(worst_rich, r.richardson);
        out.require(std::abs(r.residual) < 1e-8, f.name + " residual " + fmt(r.residual));
        out.require(r.richardson < 1e-9, f.name + " richardson " + fmt(r.richardson));
    }
    double secs = seconds_since(t0);
    out.require(secs < 120, "runtime");
    out.detail << "max residual = " << fmt(worst) << ", max n->2n change = " << fmt(worst_rich) << ", " << fmt(secs)
               << " s";
}

void a5(Outcome& out)
{
    auto s = standard_example("simple", {2.0});
    double v = master_value(s.map, s.loops[0], s.areas).value;
    out.require(std::abs(v - std::exp(-1.0)) < 1e-8, "simple loop");
    out.detail << "simple error " << fmt(std::abs(v - std::exp(-1.0)));

    double worst = 0;
    for (double t1 : {0.3, 1.0, 2.2})
        for (double t2 : {0.5, 1.3, 1.9}) {
            auto ex = standard_example("figure_eight", {t1, t2});
            double m = master_value(ex.map, ex.loops[0], ex.areas).value;
            worst = std::max(worst, std::abs(m - std::exp(-(t1 + t2) / 2)));
        }
    out.require(worst < 1e-6, "figure eight grid");
    out.detail << "; figure eight max error " << fmt(worst);

    SamplerOptions opt;
    opt.samples = 3;
    opt.seed = 77;
    opt.rw_steps = 16;
    std::vector<double> mc;
    for (double t : {0.5, 1.0, 2.0}) {
        auto ex = standard_example("double_wound", {t, 0.0});
        double m = master_value(ex.map, ex.loops[0], ex.areas).value;
        out.require(std::abs(m - std::exp(-t) * (1 - t)) < 1e-7, "double wound closed form at t=" + fmt(t));
        auto w = mc_oracle(ex.map, ex.loops[0], ex.areas, opt, 512);
        out.require(std::abs(w.estimate - m) <= 3 * (w.stderr_ + 0.02), "double wound oracle at t=" + fmt(t));
        mc.push_back(w.estimate);
        out.detail << "; t=" << fmt(t) << " master " << fmt(m) << " N=512 " << fmt(w.estimate);
    }
    out.require(mc[0] > 0 && mc[2] < 0, "sign change");
}

Mat random_complex(int n, Rng& rng)
{
    std::normal_distribution<double> g;
    Mat C(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) C(i, j) = cplx(g(rng), g(rng));
    return C;
}

void a6(Outcome& out)
{
    Rng rng(6);
    double worst = 0;
    for (int N = 1; N <= 8; ++N) {
        GroupSpec spec(N);
        Mat I = Mat::Identity(N, N);
        Mat sq = Mat::Zero(N, N);
        auto basis = unitary_basis(spec);
        for (const auto& X : basis) sq += X * X;
        worst = std::max(worst, (sq + I).cwiseAbs().maxCoeff());
        for (int k = 0; k < 100; ++k) {
            Mat C = random_complex(N, rng);
            Mat direct = Mat::Zero(N, N);
            for (const auto& X : basis) direct += X * C * X;
            worst = std::max(worst, (direct + ntrace(C) * I).cwiseAbs().maxCoeff());
            worst = std::max(worst, (contract_basis(spec, C) + ntrace(C) * I).cwiseAbs().maxCoeff());
        }
    }
    out.require(worst < 1e-12, "identity residual " + fmt(worst));
    out.detail << "max entry error " << fmt(worst);
}

void a7(Outcome& out)
{
    Rng rng(7);
    double worst = 0;
    for (const auto& name : standard_example_names()) {
        auto ex = standard_example(name);
        for (int N : {1, 3}) {
            GroupSpec spec(N);
            auto tree = spanning_tree(ex.map);
            auto basis = lasso_basis(ex.map, tree, ex.loops[0].base);
            auto cfg = edges_from_lassos(ex.map, tree, basis, sample_lassos(ex.map, ex.areas, spec, rng));
            for (int k = 0; k < 100; ++k) {
                auto moved = apply_gauge(cfg, random_gauge(ex.map, spec, rng), ex.map);
                for (const auto& loop : ex.loops)
                    worst = std::max(worst,
                                     std::abs(ntrace(holonomy(loop.steps, cfg)) - ntrace(holonomy(loop.steps, moved))));
            }
        }
    }
    out.require(worst < 1e-12, "per-sample trace change " + fmt(worst));

    double worst_grad = 0;
    for (const char* name : {"figure_eight", "double_wound", "fig2_example", "lasso_example"}) {
        auto ex = standard_example(name);
        const auto& loop = ex.loops[0];
        EdgeFunction tr = [&](const EdgeConfig& c) { return ntrace(holonomy(loop.steps, c)); };
        for (int N : {2, 3}) {
            GroupSpec spec(N);
            for (const auto& f : crossing_frames(ex.map, loop)) {
                auto cfg = random_config(ex.map, spec, rng);
                cplx a = grad_dot_halves(tr, ex.map, cfg, f.e[0], f.e[1], spec);
                for (int k = 0; k < 5; ++k) {
                    auto moved = apply_gauge(cfg, random_gauge(ex.map, spec, rng), ex.map);
                    worst_grad = std::max(worst_grad, std::abs(a - grad_dot_halves(tr, ex.map, moved, f.e[0], f.e[1], spec)));
                }
            }
        }
    }
    out.require(worst_grad < 1e-6, "mixed gradient change " + fmt(worst_grad));
    out.detail << "trace change " << fmt(worst) << ", mixed gradient change " << fmt(worst_grad);
}

bool agree(const WilsonEstimate& a, const WilsonEstimate& b, double& z)
{
    double s = std::hypot(a.stderr_, b.stderr_);
    z = std::abs(a.estimate - b.estimate) / s;
    return z <= 3;
}

void a8(Outcome& out)
{
    const GroupSpec spec(2);
    SamplerOptions opt;
    opt.samples = 20000;
    double worst = 0;
    int cases = 0;
    for (const char* name : {"figure_eight", "double_wound", "fig2_example"}) {
        auto ex = standard_example(name);
        const auto& loop = ex.loops[0];
        opt.seed = 1;
        auto base = wilson_estimate(ex.map, ex.areas, {loop}, spec, opt);
        opt.seed = 2;
        for (int e : ex.map.edge_ids()) {
            auto s = subdivide_edge(ex.map, e);
            auto w = wilson_estimate(s.map, ex.areas, {s.substitution.rewrite(loop)}, spec, opt);
            double z = 0;
            out.require(agree(base, w, z), std::string(name) + " subdivide edge " + std::to_string(e));
            worst = std::max(worst, z);
            ++cases;
        }
        opt.seed = 3;
        for (const auto& f : crossing_frames(ex.map, loop)) {
            auto g = genericize(ex.map, f.vertex);
            auto w = wilson_estimate(g.map, g.transfer(ex.areas), {g.substitution.rewrite(loop)}, spec, opt);
            double z = 0;
            out.require(agree(base, w, z), std::string(name) + " genericize vertex " + std::to_string(f.vertex));
            worst = std::max(worst, z);
            ++cases;
        }
    }

    // rho_s * rho_s' = rho_{s+s'}: compare tr U and tr U^2 of a product of two samples with one sample
    double worst_conv = 0;
    for (int N : {1, 2, 3}) {
        const double s = 0.4, sp = 0.7;
        const int n = 20000;
        Rng r1(11 + N), r2(23 + N);
        double m[2][2] = {}, q[2][2] = {};
        for (int k = 0; k < n; ++k) {
            Mat prod = heat_sample(GroupSpec(N), s, 0, r1) * heat_sample(GroupSpec(N), sp, 0, r1);
            Mat one = heat_sample(GroupSpec(N), s + sp, 0, r2);
            const Mat* u[2] = {&prod, &one};
            for (int j = 0; j < 2; ++j) {
                double x1 = ntrace(*u[j]).real(), x2 = ntrace(*u[j] * *u[j]).real();
                m[j][0] += x1;
                q[j][0] += x1 * x1;
                m[j][1] += x2;
                q[j][1] += x2 * x2;
            }
        }
        for (int mom = 0; mom < 2; ++mom) {
            double var = 0;
            for (int j = 0; j < 2; ++j) {
                double mean = m[j][mom] / n;
                var += (q[j][mom] / n - mean * mean) / (n - 1);
            }
            double z = std::abs(m[0][mom] - m[1][mom]) / n / std::sqrt(var);
            worst_conv = std::max(worst_conv, z);
            out.require(z <= 3, "convolution N=" + std::to_string(N) + " moment " + std::to_string(mom + 1));
        }
    }
    out.detail << cases << " rewritten maps, max |z| = " << fmt(worst) << "; convolution max |z| = " << fmt(worst_conv);
}

void a9(Outcome& out)
{
    auto ex = standard_example("two_loops_at_vertex");
    double worst = 0;
    for (int N : {1, 2, 8}) {
        auto r = two_loop_residual(ex.map, ex.areas, ex.loops[0], ex.loops[1], GroupSpec(N), mm_params(20000, 9));
        worst = std::max(worst, std::abs(r.residual) / (3 * r.sigma + r.allowance));
        out.require(r.pass, "N=" + std::to_string(N) + " residual " + fmt(r.residual));
    }
    out.detail << "max |residual| / (3 sigma + allowance) = " << fmt(worst);
}

void a10(Outcome& out)
{
    auto ex = standard_example("lasso_example");
    auto tree = spanning_tree(ex.map);
    auto basis = lasso_basis(ex.map, tree, ex.loops[0].base);
    auto w = loop_in_lassos(ex.map, ex.loops[0], basis, tree);
    auto F = [&](const char* n, int p) { return Letter{ex.faces.at(n), p}; };
    LassoWord expected{F("F1", 1), F("F2", 1), F("F3", 1), F("F1", -1), F("F4", -1), F("F3", -1)};
    out.require(w == expected, "lasso decomposition");
    std::string word;
    for (const auto& l : w)
        for (const auto& [n, f] : ex.faces)
            if (f == l.face) word += n + (l.power < 0 ? std::string("^-1 ") : std::string(" "));
    double worst = 0;
    mm_at_all_crossings(out, "lasso_example", 2, 20000, 5, 0, worst);
    out.detail << "word " << word << "; MM max |residual| / (3 sigma + allowance) = " << fmt(worst);
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
        {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
        {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome out;
        try {
            run(out);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << " [exception: " << e.what() << "]";
        }
        failures += out.pass ? 0 : 1;
        std::printf("%-3s %s  %s\n", name, out.pass ? "PASS" : "FAIL", out.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
