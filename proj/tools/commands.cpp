#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "graph_io.hpp"
#include "ym/master_field.hpp"
#include "ym/mm_verify.hpp"

#ifndef YM_VERSION
#define YM_VERSION "0.0.0"
#endif

namespace ymcli {

const char* const kVersion = YM_VERSION;

using ym::Error;
using ym::ErrorCode;
using ojson = nlohmann::ordered_json;

namespace {

constexpr double kImagTol = 1e-6;

struct Loaded {
    GraphFile graph;
    std::vector<std::pair<std::string, ym::LoopWord>> loops; // selected
};

Loaded load(const RunConfig& c, bool need_loop)
{
    if (c.graph.empty()) throw Error(ErrorCode::SemanticError, "--graph is required");
    Loaded l;
    l.graph = parse_graph_file(c.graph);
    for (const auto& a : c.areas) apply_area_override(l.graph, a);
    if (c.loops.empty()) {
        for (const auto& [name, loop] : l.graph.loops) l.loops.emplace_back(name, loop);
    } else {
        for (const auto& name : c.loops) {
            auto it = l.graph.loops.find(name);
            if (it == l.graph.loops.end()) throw Error(ErrorCode::UnknownName, "no loop named '" + name + "'");
            l.loops.emplace_back(name, it->second);
        }
    }
    if (need_loop && l.loops.empty()) throw Error(ErrorCode::SemanticError, "the graph file defines no loop");
    return l;
}

const ym::LoopWord& single_loop(const Loaded& l, const std::string& command)
{
    if (l.loops.size() != 1)
        throw Error(ErrorCode::SemanticError, command + " needs exactly one loop; pass --loop");
    return l.loops.front().second;
}

ym::SamplerOptions sampler(const RunConfig& c)
{
    if (c.samples < 2) throw Error(ErrorCode::SemanticError, "--samples must be at least 2");
    if (c.shards < 1) throw Error(ErrorCode::SemanticError, "--shards must be at least 1");
    ym::SamplerOptions o;
    o.samples = c.samples;
    o.seed = c.seed;
    o.shards = c.shards;
    o.rw_steps = c.rw_steps;
    return o;
}

ojson areas_json(const ym::AreaVector& areas)
{
    ojson out = ojson::object();
    for (const auto& [f, a] : areas) out[std::to_string(f)] = a;
    return out;
}

ojson report_json(const ym::MMReport& r)
{
    return {{"lhs", r.lhs},           {"rhs", r.rhs},           {"residual", r.residual},
            {"sigma", r.sigma},       {"allowance", r.allowance}, {"lhs_half", r.lhs_half},
            {"h", r.h},               {"max_imag", r.max_imag}, {"samples", r.samples},
            {"pass", r.pass}};
}

ojson frame_json(const ym::CrossingFrame& f)
{
    return {{"vertex", f.vertex},
            {"half_edges", f.e},
            {"faces", f.faces},
            {"start", f.start},
            {"s0", f.s0},
            {"counterclockwise", f.counterclockwise}};
}

// Bounded faces that share a once-traversed edge with the unbounded face.
std::vector<int> unbounded_rows(const ym::PlanarMap& map, const ym::LoopWord& loop)
{
    std::set<int> faces;
    const int u = map.unbounded_face();
    for (const auto& [e, k] : ym::edge_multiplicity(loop)) {
        if (k != 1) continue;
        auto h = map.halves(e);
        int a = map.face_right(h[0]), b = map.face_left(h[0]);
        if (a == u && b != u) faces.insert(b);
        if (b == u && a != u) faces.insert(a);
    }
    return {faces.begin(), faces.end()};
}

Report cmd_validate(const RunConfig& c)
{
    Loaded l = load(c, false);
    const auto& m = l.graph.map;
    Report rep;
    ojson checks = ojson::object();
    bool ok = true;
    auto check = [&](const std::string& name, bool pass) {
        checks[name] = pass;
        ok = ok && pass;
    };

    bool twins = true, rotation = true;
    for (int h : m.half_edge_ids()) {
        twins = twins && m.twin(m.twin(h)) == h && m.twin(h) != h;
        rotation = rotation && m.rot_prev(m.rot_next(h)) == h && m.vertex_of(m.rot_next(h)) == m.vertex_of(h);
    }
    check("twin_involution", twins);
    check("rotation_cycles", rotation);

    std::map<int, int> seen;
    for (int f = 0; f < m.num_faces(); ++f)
        for (int h : m.face_boundary(f)) ++seen[h];
    bool once = static_cast<int>(seen.size()) == static_cast<int>(m.half_edge_ids().size());
    for (const auto& [h, k] : seen) once = once && k == 1;
    check("faces_partition_half_edges", once);
    check("euler", m.num_vertices() - m.num_edges() + m.num_faces() == 2);
    check("marker_on_unbounded", m.face_right(m.unbounded_marker()) == m.unbounded_face());

    auto tree = ym::spanning_tree(m);
    auto basis = ym::lasso_basis(m, tree, m.vertex_ids().front());
    check("lasso_basis_complete", static_cast<int>(basis.face_of_edge.size()) == m.num_edges() - m.num_vertices() + 1);

    ojson loops = ojson::object();
    for (const auto& [name, loop] : l.loops) {
        auto scan = ym::scan_crossings(m, loop);
        ojson frames = ojson::array();
        for (const auto& f : scan.frames) frames.push_back(frame_json(f));
        ojson winding = ojson::object();
        for (const auto& [f, w] : ym::winding_numbers(m, loop)) winding[std::to_string(f)] = w;
        loops[name] = {{"base", loop.base},
                       {"length", loop.steps.size()},
                       {"crossings", frames},
                       {"nonsimple_vertices", scan.nonsimple_vertices},
                       {"winding", winding}};
    }

    ojson faces = ojson::object();
    for (int f = 0; f < m.num_faces(); ++f) faces[std::to_string(f)] = m.face_boundary(f);
    rep.json["results"] = {{"vertices", m.num_vertices()},
                           {"edges", m.num_edges()},
                           {"faces", faces},
                           {"unbounded_face", m.unbounded_face()},
                           {"areas", areas_json(l.graph.areas)},
                           {"loops", loops},
                           {"checks", checks},
                           {"pass", ok}};
    rep.exit_code = ok ? 0 : 1;
    return rep;
}

Report cmd_expect(const RunConfig& c)
{
    Loaded l = load(c, true);
    if (c.loops.empty() && l.loops.size() > 1)
        throw Error(ErrorCode::SemanticError, "expect needs --loop when the file defines several loops");
    std::vector<ym::LoopWord> loops;
    for (const auto& [name, loop] : l.loops) loops.push_back(loop);
    auto w = ym::wilson_estimate(l.graph.map, l.graph.areas, loops, ym::GroupSpec(c.group_size), sampler(c));
    Report rep;
    rep.json["results"] = {{"estimate", w.estimate},
                           {"stderr", w.stderr_},
                           {"imag", w.imag},
                           {"imag_stderr", w.imag_stderr},
                           {"samples", w.samples}};
    return rep;
}

Report cmd_master(const RunConfig& c)
{
    Loaded l = load(c, true);
    const auto& loop = single_loop(l, "master");
    auto r = ym::master_value(l.graph.map, loop, l.graph.areas);
    Report rep;
    ojson deriv = ojson::object();
    for (const auto& [f, d] : r.derivatives) deriv[std::to_string(f)] = d;
    ojson res = {{"value", r.value},
                 {"imag", r.imag},
                 {"coarse_value", r.coarse_value},
                 {"derivatives", deriv},
                 {"depth", r.depth},
                 {"nodes", r.nodes},
                 {"analytic_nodes", r.analytic_nodes},
                 {"memo_hits", r.memo_hits},
                 {"memo_misses", r.memo_misses},
                 {"max_system_residual", r.max_system_residual},
                 {"max_condition", r.max_condition}};
    bool ok = std::abs(r.imag) <= kImagTol;
    res["imag_ok"] = ok;
    if (c.cross_check) {
        auto w = ym::mc_oracle(l.graph.map, loop, l.graph.areas, sampler(c), c.oracle_size);
        double tol = 3 * (w.stderr_ + 0.02);
        bool agree = std::abs(w.estimate - r.value) <= tol;
        res["oracle"] = {{"group_size", c.oracle_size},
                         {"estimate", w.estimate},
                         {"stderr", w.stderr_},
                         {"tolerance", tol},
                         {"agree", agree}};
        ok = ok && agree;
    }
    res["pass"] = ok;
    rep.json["results"] = res;
    rep.exit_code = ok ? 0 : 1;
    return rep;
}

Report cmd_mm_check(const RunConfig& c)
{
    Loaded l = load(c, true);
    const auto& m = l.graph.map;
    ym::GroupSpec spec(c.group_size);
    ym::MMParams params{sampler(c), c.fd_step};
    Report rep;
    ojson loops = ojson::object();
    bool ok = true;
    for (const auto& [name, loop] : l.loops) {
        ojson frames = ojson::array(), rows = ojson::array();
        for (const auto& f : ym::crossing_frames(m, loop)) {
            auto r = ym::mm_residual(m, l.graph.areas, loop, f, spec, params);
            ok = ok && r.pass;
            ojson item = frame_json(f);
            item["report"] = report_json(r);
            frames.push_back(item);
        }
        for (int f : unbounded_rows(m, loop)) {
            auto r = ym::unbounded_face_residual(m, l.graph.areas, loop, f, spec, params);
            ok = ok && r.pass;
            rows.push_back({{"face", f}, {"report", report_json(r)}});
        }
        loops[name] = {{"crossings", frames}, {"unbounded_faces", rows}};
    }
    rep.json["results"] = {{"loops", loops}, {"pass", ok}};
    rep.exit_code = ok ? 0 : 1;
    return rep;
}

Report cmd_gauge_check(const RunConfig& c)
{
    Loaded l = load(c, true);
    const auto& m = l.graph.map;
    ym::GroupSpec spec(c.group_size);
    ym::Rng rng = ym::make_rng(c.seed, 0x9a);
    const int trials = std::max(1, std::min(c.samples, 100));
    Report rep;
    ojson loops = ojson::object();
    bool ok = true;
    for (const auto& [name, loop] : l.loops) {
        double gauge = 0;
        for (int k = 0; k < trials; ++k) {
            auto cfg = ym::random_config(m, spec, rng);
            auto g = ym::random_gauge(m, spec, rng);
            auto before = ym::ntrace(ym::holonomy(loop.steps, cfg));
            auto after = ym::ntrace(ym::holonomy(loop.steps, ym::apply_gauge(cfg, g, m)));
            gauge = std::max(gauge, std::abs(before - after));
        }
        ym::EdgeFunction f = [&loop](const ym::EdgeConfig& cfg) { return ym::ntrace(ym::holonomy(loop.steps, cfg)); };
        ojson frames = ojson::array();
        for (const auto& fr : ym::crossing_frames(m, loop)) {
            double d = ym::extended_gauge_check(f, m, fr, spec, trials, rng);
            bool pass = d <= 1e-12;
            ok = ok && pass;
            frames.push_back({{"vertex", fr.vertex}, {"max_deviation", d}, {"pass", pass}});
        }
        bool pass = gauge <= 1e-12;
        ok = ok && pass;
        loops[name] = {{"gauge_max_deviation", gauge}, {"gauge_pass", pass}, {"extended", frames}};
    }
    rep.json["results"] = {{"trials", trials}, {"loops", loops}, {"pass", ok}};
    rep.exit_code = ok ? 0 : 1;
    return rep;
}

Report cmd_local_mm(const RunConfig& c)
{
    if (c.grid < 8) throw Error(ErrorCode::SemanticError, "--grid must be at least 8");
    ym::Rng rng = ym::make_rng(c.seed, 0x10ca1);
    std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi), time(0.2, 1.5);
    std::array<double, 4> alpha{}, t{};
    for (auto& a : alpha) a = angle(rng);
    for (auto& s : t) s = time(rng);
    Report rep;
    ojson fns = ojson::array();
    bool ok = true;
    for (const auto& f : ym::u1_test_functions()) {
        auto r = ym::local_mm_u1_residual(alpha, t, f, c.grid, 1e-9, c.seed);
        bool pass = std::abs(r.residual) < 1e-8 && r.richardson < 1e-9;
        ok = ok && pass;
        fns.push_back({{"function", f.name},
                       {"lhs", r.lhs},
                       {"rhs", r.rhs},
                       {"residual", r.residual},
                       {"richardson", r.richardson},
                       {"pass", pass}});
    }
    rep.json["results"] = {{"alpha", alpha}, {"t", t}, {"grid", c.grid}, {"functions", fns}, {"pass", ok}};
    rep.exit_code = ok ? 0 : 1;
    return rep;
}

struct Axis {
    int face;
    std::vector<double> values;
};

Axis parse_axis(const GraphFile& g, const std::string& spec)
{
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::SemanticError, "sweep '" + spec + "' is not F=lo:hi:count");
    std::string key = spec.substr(0, eq);
    if (!key.empty() && (key[0] == 'F' || key[0] == 'f')) key = key.substr(1);
    std::istringstream in(spec.substr(eq + 1));
    double lo = 0, hi = 0;
    int n = 0;
    char c1 = 0, c2 = 0;
    int face = -1;
    try {
        face = std::stoi(key);
    } catch (const std::exception&) {
    }
    if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || lo < 0 || hi < 0)
        throw Error(ErrorCode::SemanticError, "sweep '" + spec + "' is not F=lo:hi:count");
    if (!g.areas.count(face)) throw Error(ErrorCode::SemanticError, "face " + key + " is not a bounded face");
    Axis a{face, {}};
    for (int i = 0; i < n; ++i) a.values.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return a;
}

Report cmd_sweep(const RunConfig& c)
{
    Loaded l = load(c, true);
    const auto& loop = single_loop(l, "sweep");
    if (c.sweep.empty()) throw Error(ErrorCode::SemanticError, "sweep needs at least one --vary F=lo:hi:count");
    if (c.method != "master" && c.method != "mc" && c.method != "both")
        throw Error(ErrorCode::SemanticError, "--method must be master, mc or both");
    std::vector<Axis> axes;
    for (const auto& s : c.sweep) axes.push_back(parse_axis(l.graph, s));
    const bool master = c.method != "mc", mc = c.method != "master";

    std::ostringstream csv;
    csv << std::setprecision(17);
    for (const auto& [f, a] : l.graph.areas) csv << "t" << f << ",";
    if (master) csv << "master" << (mc ? "," : "");
    if (mc) csv << "mc,mc_stderr";
    csv << "\n";

    ojson rows = ojson::array();
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
        ym::AreaVector areas = l.graph.areas;
        for (std::size_t k = 0; k < axes.size(); ++k) areas[axes[k].face] = axes[k].values[idx[k]];
        ojson row = {{"areas", areas_json(areas)}};
        for (const auto& [f, a] : areas) csv << a << ",";
        if (master) {
            double v = ym::master_value(l.graph.map, loop, areas).value;
            row["master"] = v;
            csv << v << (mc ? "," : "");
        }
        if (mc) {
            auto w = ym::wilson_estimate(l.graph.map, areas, {loop}, ym::GroupSpec(c.group_size), sampler(c));
            row["mc"] = w.estimate;
            row["mc_stderr"] = w.stderr_;
            csv << w.estimate << "," << w.stderr_;
        }
        csv << "\n";
        rows.push_back(row);
        std::size_t k = 0;
        for (; k < axes.size(); ++k) {
            if (++idx[k] < axes[k].values.size()) break;
            idx[k] = 0;
        }
        if (k == axes.size()) break;
    }
    Report rep;
    rep.json["results"] = {{"rows", rows}};
    if (c.format == "csv") rep.text = csv.str();
    return rep;
}

ojson inputs_json(const RunConfig& c)
{
    return {{"graph", c.graph},         {"loops", c.loops},       {"group_size", c.group_size},
            {"samples", c.samples},     {"rw_steps", c.rw_steps}, {"shards", c.shards},
            {"fd_step", c.fd_step},     {"areas", c.areas},       {"cross_check", c.cross_check},
            {"oracle_size", c.oracle_size}, {"sweep", c.sweep},   {"method", c.method},
            {"grid", c.grid}};
}

} // namespace

Report dispatch(const RunConfig& c)
{
    if (c.group_size < 1) throw Error(ErrorCode::SizeMismatch, "--group-size must be at least 1");
    if (c.format != "json" && !(c.format == "csv" && c.command == "sweep"))
        throw Error(ErrorCode::SemanticError, "--format must be json (or csv for sweep)");
    auto start = std::chrono::steady_clock::now();
    Report rep;
    if (c.command == "validate") rep = cmd_validate(c);
    else if (c.command == "expect") rep = cmd_expect(c);
    else if (c.command == "master") rep = cmd_master(c);
    else if (c.command == "mm-check") rep = cmd_mm_check(c);
    else if (c.command == "gauge-check") rep = cmd_gauge_check(c);
    else if (c.command == "local-mm") rep = cmd_local_mm(c);
    else if (c.command == "sweep") rep = cmd_sweep(c);
    else throw Error(ErrorCode::UnknownName, "unknown command '" + c.command + "'");
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    ojson out;
    out["command"] = c.command;
    out["inputs"] = inputs_json(c);
    out["results"] = rep.json["results"];
    out["runtime_ms"] = ms;
    out["seed"] = c.seed;
    out["version"] = kVersion;
    rep.json = std::move(out);
    return rep;
}

int exit_code_for(const std::exception& e)
{
    auto* err = dynamic_cast<const Error*>(&e);
    if (!err) return 2;
    switch (err->code()) {
    case ErrorCode::TriangularSolveFailed:
    case ErrorCode::NotExtendedInvariant:
    case ErrorCode::GridTooCoarse:
    case ErrorCode::InconsistentSystem:
    case ErrorCode::NonConvergent:
        return 1;
    default:
        return 2;
    }
}

} // namespace ymcli
