#include "ym/master_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "ym/mm_verify.hpp"

namespace ym {

std::string CanonicalForm::str() const
{
    std::string s;
    for (int k : key) s += std::to_string(k) + ',';
    return s;
}

CanonicalForm canonical_key(const PlanarMap& map, const LoopWord& loop)
{
    map.check_loop(loop);
    const auto& hs = map.half_edge_ids();
    const int H = static_cast<int>(hs.size());
    const int n = static_cast<int>(loop.steps.size());
    const int U = map.unbounded_face();
    std::vector<int> lab(hs.back() + 1, -1), by_label;
    CanonicalForm best;
    for (int rev = 0; rev < 2; ++rev) {
        LoopWord W = rev ? reverse_loop(map, loop) : loop;
        for (int mir = 0; mir < 2; ++mir) {
            auto next = [&](int h) { return mir ? map.rot_prev(h) : map.rot_next(h); };
            auto face = [&](int h) { return mir ? map.face_left(h) : map.face_right(h); };
            for (int i = 0; i < n; ++i) {
                std::fill(lab.begin(), lab.end(), -1);
                by_label.clear();
                int h0 = map.step_out(W.steps[i]);
                lab[h0] = 0;
                by_label.push_back(h0);
                for (size_t q = 0; q < by_label.size(); ++q) {
                    int h = by_label[q];
                    for (int g : {map.twin(h), next(h)})
                        if (lab[g] < 0) {
                            lab[g] = static_cast<int>(by_label.size());
                            by_label.push_back(g);
                        }
                }
                std::vector<int> key{H};
                key.reserve(3 * H + n + 2);
                for (int h : by_label) {
                    key.push_back(lab[map.twin(h)]);
                    key.push_back(lab[next(h)]);
                    key.push_back(face(h) == U);
                }
                key.push_back(n);
                for (int j = 0; j < n; ++j) key.push_back(lab[map.step_out(W.steps[(i + j) % n])]);
                if (best.key.empty() || key < best.key) {
                    best.key = std::move(key);
                    best.face_order.clear();
                    std::set<int> seen;
                    for (int h : by_label) {
                        int f = face(h);
                        if (f != U && seen.insert(f).second) best.face_order.push_back(f);
                    }
                }
            }
        }
    }
    return best;
}

SystemRows system_rows(const PlanarMap& map, const LoopWord& loop)
{
    auto scan = scan_crossings(map, loop);
    if (!scan.nonsimple_vertices.empty())
        throw Error(ErrorCode::PatternMismatch, "loop has a non-simple self-intersection at vertex " +
                                                    std::to_string(scan.nonsimple_vertices.front()));
    SystemRows r;
    r.faces = map.bounded_faces();
    std::map<int, int> col;
    for (size_t k = 0; k < r.faces.size(); ++k) col[r.faces[k]] = static_cast<int>(k);
    std::vector<std::vector<double>> rows;
    for (size_t k = 0; k < scan.frames.size(); ++k) {
        std::vector<double> row(r.faces.size(), 0.0);
        for (const auto& [f, c] : frame_coefficients(map, scan.frames[k])) row[col.at(f)] = c;
        rows.push_back(row);
        r.frame_of_row.push_back(static_cast<int>(k));
    }
    auto mult = edge_multiplicity(loop);
    const int U = map.unbounded_face();
    for (int f : r.faces)
        for (int e : map.edge_ids()) {
            int t = map.halves(e)[0];
            std::set<int> sides{map.face_left(t), map.face_right(t)};
            if (sides != std::set<int>{f, U}) continue;
            auto it = mult.find(e);
            if (it == mult.end() || it->second != 1) continue;
            std::vector<double> row(r.faces.size(), 0.0);
            row[col.at(f)] = 1.0;
            rows.push_back(row);
            r.frame_of_row.push_back(-1);
        }
    r.A = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), static_cast<int>(r.faces.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < r.faces.size(); ++j) r.A(i, j) = rows[i][j];
    int rank = rows.empty() ? 0 : static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(r.A).rank());
    if (rank < static_cast<int>(r.faces.size()))
        throw Error(ErrorCode::UnderdeterminedSystem,
                    "rank " + std::to_string(rank) + " < " + std::to_string(r.faces.size()) +
                        " bounded faces for loop of length " + std::to_string(loop.steps.size()));
    return r;
}

DerivativeSystem derivative_system(const PlanarMap& map, const LoopWord& loop, double phi,
                                   const std::vector<double>& products, double tol)
{
    auto rows = system_rows(map, loop);
    DerivativeSystem d;
    d.faces = rows.faces;
    d.A = rows.A;
    d.frame_of_row = rows.frame_of_row;
    d.b.resize(d.A.rows());
    for (int i = 0; i < d.A.rows(); ++i) {
        int k = d.frame_of_row[i];
        if (k >= 0) {
            if (k >= static_cast<int>(products.size()))
                throw Error(ErrorCode::SizeMismatch, "missing sub-loop product for frame " + std::to_string(k));
            d.b(i) = products[k];
        } else {
            d.b(i) = -0.5 * phi;
        }
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(d.A);
    d.rank = static_cast<int>(cod.rank());
    d.solution = cod.solve(d.b);
    d.residual = (d.A * d.solution - d.b).cwiseAbs().maxCoeff();
    if (d.residual > tol)
        throw Error(ErrorCode::InconsistentSystem, "least-squares residual " + std::to_string(d.residual));
    return d;
}

namespace {

constexpr int kTrivial = -1;

struct Node {
    PlanarMap map;
    LoopWord loop;
    Eigen::VectorXd a; // areas of the bounded faces, column order
    bool analytic = false;
    double analytic_area = 0;
    Eigen::MatrixXd A, pinv;
    std::vector<int> frame_of_row;
    std::vector<std::pair<int, int>> kids;
    int depth = 0;
    int state = -1;
};

class Recursion {
public:
    std::vector<Node> nodes;
    std::map<std::string, int> memo;
    int hits = 0, misses = 0;
    double max_condition = 0;

    int add(const PlanarMap& parent, const LoopWord& sub, const AreaVector& parent_areas, ReducedLoop* keep = nullptr)
    {
        ReducedLoop red;
        try {
            red = reduce_subloop(parent, sub);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::EmptyLoop) return kTrivial;
            throw;
        }
        AreaVector areas = red.merge.aggregate(parent_areas);
        auto cf = canonical_key(red.map, red.loop);
        std::string key = cf.str();
        for (int f : cf.face_order) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "|%.17g", areas.at(f));
            key += buf;
        }
        if (keep) *keep = red;
        if (auto it = memo.find(key); it != memo.end()) {
            ++hits;
            return it->second;
        }
        ++misses;
        Node node;
        node.map = red.map;
        node.loop = red.loop;
        auto scan = scan_crossings(node.map, node.loop);
        auto faces = node.map.bounded_faces();
        if (scan.frames.empty() && scan.nonsimple_vertices.empty() && faces.size() == 1) {
            node.analytic = true;
            node.analytic_area = areas.at(faces.front());
        } else {
            auto rows = system_rows(node.map, node.loop);
            node.A = rows.A;
            node.frame_of_row = rows.frame_of_row;
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(rows.A);
            node.pinv = cod.pseudoInverse();
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows.A);
            const auto& sv = svd.singularValues();
            max_condition = std::max(max_condition, sv(0) / sv(sv.size() - 1));
            node.a.resize(static_cast<int>(faces.size()));
            for (size_t k = 0; k < faces.size(); ++k) node.a(k) = areas.at(faces[k]);
        }
        int idx = static_cast<int>(nodes.size());
        nodes.push_back(std::move(node));
        memo[key] = idx;
        if (!nodes[idx].analytic) {
            int depth = 0;
            const PlanarMap m = nodes[idx].map;
            const LoopWord l = nodes[idx].loop;
            std::vector<std::pair<int, int>> kids;
            for (const auto& fr : scan.frames) {
                auto [L1, L2] = split_loop(m, l, fr);
                int k1 = add(m, L1, areas), k2 = add(m, L2, areas);
                for (int k : {k1, k2})
                    if (k != kTrivial) depth = std::max(depth, nodes[k].depth);
                kids.push_back({k1, k2});
            }
            nodes[idx].kids = std::move(kids);
            nodes[idx].depth = depth + 1;
        }
        return idx;
    }
};

struct Integrator {
    const std::vector<Node>& nodes;
    std::vector<int> active; // non-analytic node indices; state k belongs to active[k]
    double p;

    double value(int n, double s, const Eigen::VectorXd& y) const
    {
        if (n == kTrivial) return 1.0;
        const Node& nd = nodes[n];
        if (nd.analytic) return std::exp(-0.5 * std::pow(s, p) * nd.analytic_area);
        return y(nd.state);
    }

    Eigen::VectorXd rhs_vector(const Node& nd, double s, const Eigen::VectorXd& y) const
    {
        Eigen::VectorXd b(nd.A.rows());
        for (int i = 0; i < nd.A.rows(); ++i) {
            int k = nd.frame_of_row[i];
            if (k >= 0) {
                b(i) = value(nd.kids[k].first, s, y) * value(nd.kids[k].second, s, y);
            } else {
                b(i) = -0.5 * y(nd.state);
            }
        }
        return b;
    }

    Eigen::VectorXd derivative(double s, const Eigen::VectorXd& y) const
    {
        Eigen::VectorXd dy(y.size());
        const double scale = p == 1.0 ? 1.0 : p * std::pow(s, p - 1);
        for (int n : active) {
            const Node& nd = nodes[n];
            Eigen::VectorXd x = nd.pinv * rhs_vector(nd, s, y);
            dy(nd.state) = scale * nd.a.dot(x);
        }
        return dy;
    }

    double consistency(double s, const Eigen::VectorXd& y) const
    {
        double worst = 0;
        for (int n : active) {
            const Node& nd = nodes[n];
            Eigen::VectorXd b = rhs_vector(nd, s, y);
            Eigen::VectorXd x = nd.pinv * b;
            worst = std::max(worst, (nd.A * x - b).cwiseAbs().maxCoeff());
        }
        return worst;
    }

    Eigen::VectorXd run(int steps, double& max_residual) const
    {
        Eigen::VectorXd y = Eigen::VectorXd::Ones(static_cast<int>(active.size()));
        const double h = 1.0 / steps;
        for (int k = 0; k <= steps; ++k) {
            double s = k * h;
            max_residual = std::max(max_residual, consistency(s, y));
            if (k == steps) break;
            Eigen::VectorXd k1 = derivative(s, y);
            Eigen::VectorXd k2 = derivative(s + h / 2, y + h / 2 * k1);
            Eigen::VectorXd k3 = derivative(s + h / 2, y + h / 2 * k2);
            Eigen::VectorXd k4 = derivative(s + h, y + h * k3);
            y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        return y;
    }
};

} // namespace

MasterFieldResult master_value(const PlanarMap& map, const LoopWord& loop, const AreaVector& areas,
                               const MasterOptions& options)
{
    map.check_loop(loop);
    for (int f : map.bounded_faces()) {
        auto it = areas.find(f);
        if (it == areas.end()) throw Error(ErrorCode::SemanticError, "no area for face " + std::to_string(f));
        if (it->second < 0) throw Error(ErrorCode::NonpositiveTime, "negative area for face " + std::to_string(f));
    }
    if (options.steps < 1 || options.path_exponent < 1)
        throw Error(ErrorCode::SemanticError, "need steps >= 1 and path exponent >= 1");
    MasterFieldResult res;
    for (int f : map.bounded_faces()) res.derivatives[f] = 0.0;

    Recursion rec;
    ReducedLoop top;
    int root = rec.add(map, loop, areas, &top);
    res.memo_hits = rec.hits;
    res.memo_misses = rec.misses;
    res.nodes = static_cast<int>(rec.nodes.size());
    res.max_condition = rec.max_condition;
    if (root == kTrivial) return res;

    std::vector<Node>& nodes = rec.nodes;
    Integrator integ{nodes, {}, options.path_exponent};
    for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
        if (nodes[n].analytic) {
            ++res.analytic_nodes;
            continue;
        }
        nodes[n].state = static_cast<int>(integ.active.size());
        integ.active.push_back(n);
    }
    res.depth = nodes[root].depth;

    Eigen::VectorXd y_coarse, y_fine;
    double coarse_residual = 0;
    y_coarse = integ.run(options.steps, coarse_residual);
    y_fine = integ.run(2 * options.steps, res.max_system_residual);
    res.coarse_value = integ.value(root, 1.0, y_coarse);
    res.value = integ.value(root, 1.0, y_fine);
    if (std::abs(res.value - res.coarse_value) > options.tol)
        throw Error(ErrorCode::NonConvergent, "step halving changed the value by " +
                                                  std::to_string(std::abs(res.value - res.coarse_value)));
    if (res.max_system_residual > options.tol)
        throw Error(ErrorCode::InconsistentSystem,
                    "derivative system residual " + std::to_string(res.max_system_residual));

    // derivatives with respect to the faces of the top-level reduced map
    std::map<int, double> dchild;
    const Node& rn = nodes[root];
    if (rn.analytic) {
        for (int f : rn.map.bounded_faces()) dchild[f] = -0.5 * res.value;
    } else {
        Eigen::VectorXd x = rn.pinv * integ.rhs_vector(rn, 1.0, y_fine);
        auto faces = rn.map.bounded_faces();
        for (size_t k = 0; k < faces.size(); ++k) dchild[faces[k]] = x(k);
    }
    // the memoized root keeps the map it was built from, which is the top-level reduction
    for (int f : map.bounded_faces()) {
        int c = top.merge.to_child.at(f);
        res.derivatives[f] = c == top.merge.child_unbounded ? 0.0 : dchild.at(c);
    }
    return res;
}

WilsonEstimate mc_oracle(const PlanarMap& map, const LoopWord& loop, const AreaVector& areas,
                         const SamplerOptions& opt, int N)
{
    return wilson_estimate(map, areas, {loop}, GroupSpec(N), opt);
}

} // namespace ym
