#include "conley/experiments.hpp"
#include "conley/equilibria.hpp"
#include "conley/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace conley {

std::vector<std::string> MorseRun::index_strings() const
{
    std::vector<std::string> out;
    for (const auto& p : indices) {
        out.push_back(p ? p->to_string() : "?");
    }
    return out;
}

std::optional<MorseEquationReport> MorseRun::equation() const
{
    std::vector<Polynomial> per_node;
    for (const auto& p : indices) {
        if (!p) {
            return std::nullopt;
        }
        per_node.push_back(*p);
    }
    return morse_equations(per_node, Polynomial{1});
}

MorseRun run_morse(const VectorField& model, Grid grid, const OuterMapConfig& cfg, int threads,
                   const NodeLabeler& label, bool with_indices)
{
    MorseRun run{std::move(grid), {}, {}, {}, {}, 0};
    const TransitionGraph g = build_transition_graph(run.grid, model, cfg, threads);
    run.digest = graph_digest(run.grid, g);
    run.edges = g.edge_count();
    run.graph = compute_morse_graph(g);
    if (label) {
        label(run.graph, run.grid);
    }
    run.indices.assign(run.graph.size(), std::nullopt);
    run.methods.assign(run.graph.size(), "skipped");
    if (!with_indices) {
        return run;
    }
    for (std::size_t i = 0; i < run.graph.size(); ++i) {
        try {
            const NodeIndex ni = node_conley_index(run.graph, static_cast<int>(i), g, run.grid);
            run.indices[i] = ni.polynomial;
            run.methods[i] = to_string(ni.method);
        } catch (const IsolationFailure& e) {
            run.methods[i] = e.what();
        }
    }
    return run;
}

MorseRun run_lorenz_morse(double r, const std::vector<int>& depths, double tau, int threads, std::size_t budget)
{
    LorenzParams p;
    p.r = r;
    const LorenzModel model(p);
    OuterMapConfig cfg;
    cfg.tau = tau;
    return run_morse(model, Grid(trapping_box(model), depths, budget), cfg, threads,
                     [&](MorseGraph& mg, const Grid& grid) { label_lorenz_nodes(mg, grid, p); });
}

nlohmann::json morse_run_json(const MorseRun& run)
{
    nlohmann::json j = morse_graph_json(run.graph, run.indices);
    for (std::size_t i = 0; i < run.methods.size(); ++i) {
        j["nodes"][i]["index_method"] = run.methods[i];
    }
    j["grid"] = {{"depths", run.grid.depths()},
                 {"lo", std::vector<double>(run.grid.box().lo.begin(), run.grid.box().lo.end())},
                 {"hi", std::vector<double>(run.grid.box().hi.begin(), run.grid.box().hi.end())}};
    j["edges_in_transition_graph"] = run.edges;
    j["digest"] = run.digest;
    if (const auto eq = run.equation()) {
        j["morse_equation"] = *eq;
    }
    return j;
}

double cubeset_diameter(const Grid& grid, const CubeSet& cubes)
{
    const int n = grid.dimension();
    std::vector<TrappingBox> boxes;
    boxes.reserve(cubes.size());
    for (CubeId c : cubes) {
        boxes.push_back(grid.cube_box(c));
    }
    double best = 0.0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        for (std::size_t j = i; j < boxes.size(); ++j) {
            double s = 0.0;
            for (int a = 0; a < n; ++a) {
                const double d = std::max(boxes[i].hi[a] - boxes[j].lo[a], boxes[j].hi[a] - boxes[i].lo[a]);
                s += d * d;
            }
            best = std::max(best, s);
        }
    }
    return std::sqrt(best);
}

PitchforkDemo run_pitchfork_demo(double lambda, int threads, const std::vector<int>& depths, double tau_scale)
{
    if (!(lambda > 0.0)) {
        throw ContractViolation("pitchfork demo needs lambda > 0");
    }
    if (!(tau_scale > 0.0)) {
        throw ContractViolation("tau_scale must be positive");
    }
    NormalFormParams p;
    p.n = 3;
    p.k = 2;
    p.lambda = lambda;
    const NormalFormModel model(p);
    OuterMapConfig cfg;
    cfg.tau = tau_scale / lambda;
    cfg.rk4_step = std::min(0.05, cfg.tau / 20.0);

    PitchforkDemo d{lambda,
                    cfg.tau,
                    depths,
                    run_morse(model, Grid(trapping_box(model), depths), cfg, threads,
                              [](MorseGraph& mg, const Grid& grid) {
                                  label_nodes(mg, grid, {{"origin", make_state({0.0, 0.0, 0.0})}});
                              }),
                    {},
                    {},
                    0.0,
                    std::nullopt,
                    {}};
    for (int m : d.run.graph.minimal_nodes()) {
        const CubeSet& c = d.run.graph.nodes[m].cubes;
        CubeSet merged;
        std::set_union(d.attractor.begin(), d.attractor.end(), c.begin(), c.end(), std::back_inserter(merged));
        d.attractor = std::move(merged);
    }
    d.attractor_betti = betti_of_cubeset(d.attractor, d.run.grid);
    d.attractor_diameter = cubeset_diameter(d.run.grid, d.attractor);
    d.equation = d.run.equation();
    d.digest = d.run.digest;
    return d;
}

nlohmann::json pitchfork_demo_json(const PitchforkDemo& d)
{
    nlohmann::json j{{"lambda", d.lambda},
                     {"tau", d.tau},
                     {"depths", d.depths},
                     {"morse_graph", morse_run_json(d.run)},
                     {"attractor_cubes", d.attractor.size()},
                     {"attractor_betti", d.attractor_betti},
                     {"attractor_diameter", d.attractor_diameter}};
    if (d.equation) {
        j["morse_equation"] = *d.equation;
    }
    return j;
}

StrangeSweep run_strange_sweep(const std::vector<double>& params, double reference, const std::vector<int>& depths,
                               double tau, int threads)
{
    if (params.empty()) {
        throw ContractViolation("strange-set sweep needs at least one parameter value");
    }
    LorenzParams widest;
    widest.r = std::max(reference, *std::max_element(params.begin(), params.end()));
    const Grid grid(trapping_box(LorenzModel(widest)), depths);
    OuterMapConfig cfg;
    cfg.tau = tau;

    StrangeSweep out;
    out.params = params;
    out.reference = reference;
    auto origin_node = [&](double r, std::string& digest) {
        LorenzParams p;
        p.r = r;
        const LorenzModel model(p);
        const TransitionGraph g = build_transition_graph(grid, model, cfg, threads);
        digest = graph_digest(grid, g);
        const MorseGraph mg = compute_morse_graph(g);
        const auto cube = grid.locate(make_state({0.0, 0.0, 0.0}));
        const auto node = cube ? mg.node_of(*cube) : std::nullopt;
        if (!node) {
            throw NotFoundError("no Morse node holds the origin at r = " + std::to_string(r));
        }
        return mg.nodes[*node].cubes;
    };
    std::string digest;
    const CubeSet ref = origin_node(reference, digest);
    out.digests.push_back(digest);
    out.reference_cubes = ref.size();
    const auto ref_points = cube_centers(grid, ref);
    for (double r : params) {
        const CubeSet s = origin_node(r, digest);
        out.digests.push_back(digest);
        out.cube_counts.push_back(s.size());
        out.distances.push_back(hausdorff_distance(cube_centers(grid, s), ref_points));
    }
    return out;
}

namespace {

using Wide = __int128;

std::int64_t minor_det(const std::vector<std::vector<std::int64_t>>& a, const std::vector<int>& rows,
                       const std::vector<int>& cols)
{
    const std::size_t k = rows.size();
    std::vector<std::vector<Wide>> m(k, std::vector<Wide>(k));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            m[i][j] = a[rows[i]][cols[j]];
        }
    }
    // Fraction-free Bareiss elimination.
    Wide prev = 1;
    int sign = 1;
    for (std::size_t p = 0; p + 1 < k; ++p) {
        if (m[p][p] == 0) {
            std::size_t s = p + 1;
            while (s < k && m[s][p] == 0) {
                ++s;
            }
            if (s == k) {
                return 0;
            }
            std::swap(m[p], m[s]);
            sign = -sign;
        }
        for (std::size_t i = p + 1; i < k; ++i) {
            for (std::size_t j = p + 1; j < k; ++j) {
                m[i][j] = (m[i][j] * m[p][p] - m[i][p] * m[p][j]) / prev;
            }
        }
        prev = m[p][p];
    }
    return static_cast<std::int64_t>(sign * m[k - 1][k - 1]);
}

// Calls f on every increasing k-subset of [0, n) until f returns false.
template <typename F>
bool for_each_subset(int n, int k, F&& f)
{
    std::vector<int> s(k);
    std::iota(s.begin(), s.end(), 0);
    while (true) {
        if (!f(s)) {
            return false;
        }
        int i = k - 1;
        while (i >= 0 && s[i] == n - k + i) {
            --i;
        }
        if (i < 0) {
            return true;
        }
        ++s[i];
        for (int j = i + 1; j < k; ++j) {
            s[j] = s[j - 1] + 1;
        }
    }
}

}  // namespace

std::vector<BigInt> determinantal_factors(const IntMatrix& m)
{
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    if (rows > 10 || cols > 10) {
        throw ContractViolation("determinantal factors are limited to 10 x 10 matrices");
    }
    std::vector<std::vector<std::int64_t>> a(rows, std::vector<std::int64_t>(cols));
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (abs(m(i, j)) > 1000) {
                throw ContractViolation("determinantal factors need entries of magnitude <= 1000");
            }
            a[i][j] = static_cast<std::int64_t>(m(i, j));
        }
    }
    std::vector<BigInt> out;
    std::int64_t prev = 1;
    for (int k = 1; k <= std::min(rows, cols); ++k) {
        std::int64_t g = 0;
        for_each_subset(rows, k, [&](const std::vector<int>& r) {
            return for_each_subset(cols, k, [&](const std::vector<int>& c) {
                g = std::gcd(g, minor_det(a, r, c));
                return g != prev;
            });
        });
        if (g == 0) {
            break;
        }
        out.push_back(BigInt(g / prev));
        prev = g;
    }
    return out;
}

HomologySelfCheck homology_self_check(std::size_t snf_trials, std::uint64_t seed)
{
    HomologySelfCheck h;
    bool d2 = true;
    bool euler = true;

    // Figure eight: a 5 x 3 block of squares with two interior holes.
    CubicalComplex eight({5, 3});
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (j == 1 && (i == 1 || i == 3)) {
                continue;
            }
            const int lower[2] = {i, j};
            eight.add_unit_cube(lower);
        }
    }
    h.figure_eight = homology(eight);
    d2 = d2 && eight.boundary_squared_vanishes();
    euler = euler && eight.euler_characteristic() == h.figure_eight.euler_characteristic();

    // Saddle: N a 3 x 3 block, exit set its left and right columns.
    CubicalComplex n({3, 3});
    CubicalComplex e({3, 3});
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int lower[2] = {i, j};
            n.add_unit_cube(lower);
            if (i != 1) {
                e.add_unit_cube(lower);
            }
        }
    }
    h.saddle_pair = relative_homology(n, e);
    d2 = d2 && n.boundary_squared_vanishes() && e.boundary_squared_vanishes();
    euler = euler && n.euler_characteristic() - e.euler_characteristic() == h.saddle_pair.euler_characteristic();

    // Products of small random factors give varied ranks and torsion.
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dim(1, 8);
    std::uniform_int_distribution<int> entry(-2, 2);
    for (std::size_t t = 0; t < snf_trials; ++t) {
        const int rows = dim(rng);
        const int cols = dim(rng);
        const int inner = dim(rng);
        std::vector<std::vector<int>> a(rows, std::vector<int>(inner));
        std::vector<std::vector<int>> b(inner, std::vector<int>(cols));
        for (auto& row : a) {
            for (auto& v : row) {
                v = entry(rng);
            }
        }
        for (auto& row : b) {
            for (auto& v : row) {
                v = entry(rng);
            }
        }
        IntMatrix m(rows, cols);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                long long s = 0;
                for (int k = 0; k < inner; ++k) {
                    s += static_cast<long long>(a[i][k]) * b[k][j];
                }
                m(i, j) = s;
            }
        }
        const std::vector<BigInt> oracle = determinantal_factors(m);
        const SmithResult snf = smith_normal_form(m);
        ++h.snf_trials;
        if (snf.factors == oracle && snf.rank == oracle.size()) {
            ++h.snf_agreements;
        }
    }
    h.boundary_squared_zero = d2;
    h.euler_identity = euler;
    return h;
}

}  // namespace conley
