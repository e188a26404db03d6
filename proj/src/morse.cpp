#include "conley/morse.hpp"
#include "conley/equilibria.hpp"
#include "conley/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace conley {

Condensation condense(const TransitionGraph& g)
{
    const std::size_t n = g.num_cubes();
    constexpr std::uint32_t kUnvisited = 0;
    std::vector<std::uint32_t> index(n, kUnvisited);
    std::vector<std::uint32_t> low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<CubeId> stack;

    const int dim = g.dimension();
    // Odometer over the image box of v; the last axis varies fastest, so
    // successors come in increasing id order.
    struct Frame {
        CubeId v;
        bool live;
        std::int64_t id;
        std::uint16_t cur[kMaxDim];
    };
    std::vector<Frame> calls;
    const auto& strides = g.strides();

    Condensation cond;
    cond.scc_of.assign(n, 0);
    std::uint32_t counter = 1;
    std::uint32_t components = 0;

    auto open = [&](CubeId v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
        Frame f{v, !g.pruned(v), 0, {}};
        if (f.live) {
            const auto lo = g.image_lo(v);
            for (int a = 0; a < dim; ++a) {
                f.cur[a] = lo[a];
                f.id += static_cast<std::int64_t>(lo[a]) * strides[a];
            }
        }
        calls.push_back(f);
    };
    auto advance = [&](Frame& f) {
        const auto lo = g.image_lo(f.v);
        const auto hi = g.image_hi(f.v);
        for (int a = dim - 1; a >= 0; --a) {
            if (f.cur[a] < hi[a]) {
                ++f.cur[a];
                f.id += strides[a];
                return;
            }
            f.id -= static_cast<std::int64_t>(f.cur[a] - lo[a]) * strides[a];
            f.cur[a] = lo[a];
        }
        f.live = false;
    };

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) {
            continue;
        }
        open(static_cast<CubeId>(root));
        while (!calls.empty()) {
            Frame& f = calls.back();
            if (f.live) {
                const auto w = static_cast<CubeId>(f.id);
                advance(f);
                if (index[w] == kUnvisited) {
                    open(w);
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const CubeId v = f.v;
            if (low[v] == index[v]) {
                CubeId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    cond.scc_of[w] = components;
                } while (w != v);
                ++components;
            }
            calls.pop_back();
            if (!calls.empty()) {
                low[calls.back().v] = std::min(low[calls.back().v], low[v]);
            }
        }
    }

    cond.offsets.assign(static_cast<std::size_t>(components) + 1, 0);
    for (std::size_t c = 0; c < n; ++c) {
        ++cond.offsets[cond.scc_of[c] + 1];
    }
    for (std::size_t s = 0; s < components; ++s) {
        cond.offsets[s + 1] += cond.offsets[s];
    }
    cond.members.resize(n);
    std::vector<std::uint32_t> fill(cond.offsets.begin(), cond.offsets.end() - 1);
    for (std::size_t c = 0; c < n; ++c) {
        cond.members[fill[cond.scc_of[c]]++] = static_cast<CubeId>(c);
    }
    return cond;
}

std::optional<int> MorseGraph::node_of(CubeId c) const
{
    if (condensation && c < condensation->scc_of.size()) {
        const auto s = condensation->scc_of[c];
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].scc == s) {
                return static_cast<int>(i);
            }
        }
        return std::nullopt;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (std::binary_search(nodes[i].cubes.begin(), nodes[i].cubes.end(), c)) {
            return static_cast<int>(i);
        }
    }
    return std::nullopt;
}

std::vector<int> MorseGraph::minimal_nodes() const
{
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (std::none_of(reach[i].begin(), reach[i].end(), [](char v) { return v != 0; })) {
            out.push_back(static_cast<int>(i));
        }
    }
    return out;
}

std::vector<int> MorseGraph::maximal_nodes() const
{
    std::vector<int> out;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        bool reached = false;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            reached = reached || reach[i][j];
        }
        if (!reached) {
            out.push_back(static_cast<int>(j));
        }
    }
    return out;
}

std::optional<int> MorseGraph::find_label(const std::string& label) const
{
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].label == label) {
            return static_cast<int>(i);
        }
    }
    return std::nullopt;
}

MorseGraph compute_morse_graph(const TransitionGraph& g)
{
    auto cond = std::make_shared<Condensation>(condense(g));
    const std::size_t nscc = cond->size();
    const CubeId out = g.out_node();

    MorseGraph mg;
    std::vector<int> node_of_scc(nscc, -1);
    for (std::size_t s = 0; s < nscc; ++s) {
        const auto b = cond->offsets[s];
        const auto e = cond->offsets[s + 1];
        const bool recurrent = (e - b > 1) || g.has_self_loop(cond->members[b]);
        if (!recurrent) {
            continue;
        }
        MorseNode node;
        node.scc = static_cast<std::uint32_t>(s);
        node.cubes.assign(cond->members.begin() + b, cond->members.begin() + e);
        std::sort(node.cubes.begin(), node.cubes.end());
        node_of_scc[s] = static_cast<int>(mg.nodes.size());
        mg.nodes.push_back(std::move(node));
    }

    const std::size_t m = mg.nodes.size();
    const std::size_t words = (m + 63) / 64;
    if (words > 0 && nscc > (std::size_t{1} << 27) / words) {
        throw BudgetExceeded("too many Morse nodes for the reachability table (" + std::to_string(m) + ")");
    }
    // reachable[s]: Morse nodes reachable from component s, itself included.
    std::vector<std::uint64_t> reachable(nscc * words, 0);
    for (std::size_t s = 0; s < nscc; ++s) {
        std::uint64_t* row = reachable.data() + s * words;
        for (auto k = cond->offsets[s]; k < cond->offsets[s + 1]; ++k) {
            g.for_each_successor(cond->members[k], [&](CubeId t) {
                if (t == out) {
                    return;
                }
                const auto ts = cond->scc_of[t];
                if (ts == s) {
                    return;
                }
                const std::uint64_t* other = reachable.data() + std::size_t(ts) * words;
                for (std::size_t w = 0; w < words; ++w) {
                    row[w] |= other[w];
                }
            });
        }
        if (node_of_scc[s] >= 0) {
            row[node_of_scc[s] / 64] |= std::uint64_t{1} << (node_of_scc[s] % 64);
        }
    }

    mg.reach.assign(m, std::vector<char>(m, 0));
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint64_t* row = reachable.data() + std::size_t(mg.nodes[i].scc) * words;
        for (std::size_t j = 0; j < m; ++j) {
            if (i != j && ((row[j / 64] >> (j % 64)) & 1u)) {
                mg.reach[i][j] = 1;
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (!mg.reach[i][j]) {
                continue;
            }
            bool implied = false;
            for (std::size_t k = 0; k < m && !implied; ++k) {
                implied = k != i && k != j && mg.reach[i][k] && mg.reach[k][j];
            }
            if (!implied) {
                mg.edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }
    mg.condensation = std::move(cond);
    return mg;
}

void label_nodes(MorseGraph& mg, const Grid& grid, const std::vector<std::pair<std::string, StateVec>>& points)
{
    const int n = grid.dimension();
    for (const auto& [name, p] : points) {
        const auto home = grid.locate(p);
        if (!home) {
            continue;
        }
        // A point on a cube face belongs to every cube sharing that face.
        int base[kMaxDim];
        grid.multi_index(*home, base);
        std::optional<int> hit;
        for (std::uint32_t mask = 0; mask < (1u << n) && !hit; ++mask) {
            int idx[kMaxDim];
            bool valid = true;
            for (int a = 0; a < n; ++a) {
                idx[a] = base[a] - static_cast<int>((mask >> a) & 1u);
                valid = valid && idx[a] >= 0;
            }
            if (!valid) {
                continue;
            }
            const CubeId c = grid.id(idx);
            if (!grid.cube_box(c).contains(p)) {
                continue;
            }
            hit = mg.node_of(c);
        }
        if (hit && mg.nodes[*hit].label.empty()) {
            mg.nodes[*hit].label = name;
        } else if (hit) {
            mg.nodes[*hit].label += "+" + name;
        }
    }
}

void label_lorenz_nodes(MorseGraph& mg, const Grid& grid, const LorenzParams& p)
{
    std::vector<std::pair<std::string, StateVec>> pts;
    for (const auto& eq : find_equilibria(p)) {
        pts.emplace_back(to_string(eq.label), eq.state);
    }
    label_nodes(mg, grid, pts);
}

namespace {

// Components reachable from the flagged nodes.
std::vector<char> closure_components(const MorseGraph& mg, const TransitionGraph& g, const std::vector<char>& sel)
{
    const Condensation& cond = *mg.condensation;
    const std::size_t nscc = cond.size();
    const CubeId out = g.out_node();
    std::vector<char> from(nscc, 0);
    for (std::size_t i = 0; i < mg.size(); ++i) {
        if (sel[i]) {
            from[mg.nodes[i].scc] = 1;
        }
    }
    // Edges never increase the component id.
    for (std::size_t s = nscc; s-- > 0;) {
        if (!from[s]) {
            continue;
        }
        for (auto k = cond.offsets[s]; k < cond.offsets[s + 1]; ++k) {
            g.for_each_successor(cond.members[k], [&](CubeId t) {
                if (t != out) {
                    from[cond.scc_of[t]] = 1;
                }
            });
        }
    }
    return from;
}

}  // namespace

CubeSet forward_closure(const MorseGraph& mg, const TransitionGraph& g, const std::vector<int>& nodes)
{
    if (!mg.condensation) {
        throw ContractViolation("Morse graph carries no condensation");
    }
    std::vector<char> sel(mg.size(), 0);
    for (int i : nodes) {
        if (i < 0 || static_cast<std::size_t>(i) >= mg.size()) {
            throw ContractViolation("node index out of range");
        }
        sel[i] = 1;
    }
    const auto from = closure_components(mg, g, sel);
    const Condensation& cond = *mg.condensation;
    CubeSet out;
    for (std::size_t c = 0; c < g.num_cubes(); ++c) {
        if (from[cond.scc_of[c]]) {
            out.push_back(static_cast<CubeId>(c));
        }
    }
    return out;
}

AttractorRepeller attractor_repeller_split(const MorseGraph& mg, const TransitionGraph& g,
                                           const std::vector<int>& selected)
{
    if (!mg.condensation) {
        throw ContractViolation("Morse graph carries no condensation");
    }
    const std::size_t m = mg.size();
    std::vector<char> sel(m, 0);
    for (int i : selected) {
        if (i < 0 || static_cast<std::size_t>(i) >= m) {
            throw ContractViolation("selected node index out of range");
        }
        sel[i] = 1;
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (sel[i] && mg.reach[i][j] && !sel[j]) {
                throw ContractViolation("selection is not closed downward in the Morse order");
            }
        }
    }
    const Condensation& cond = *mg.condensation;
    const std::size_t nscc = cond.size();
    const CubeId out = g.out_node();
    const std::vector<char> from_sel = closure_components(mg, g, sel);
    std::vector<char> to_unsel(nscc, 0);
    for (std::size_t i = 0; i < m; ++i) {
        if (!sel[i]) {
            to_unsel[mg.nodes[i].scc] = 1;
        }
    }
    for (std::size_t s = 0; s < nscc; ++s) {
        if (to_unsel[s]) {
            continue;
        }
        for (auto k = cond.offsets[s]; k < cond.offsets[s + 1] && !to_unsel[s]; ++k) {
            g.for_each_successor(cond.members[k], [&](CubeId t) {
                if (t != out && to_unsel[cond.scc_of[t]]) {
                    to_unsel[s] = 1;
                }
            });
        }
    }
    AttractorRepeller ar;
    for (std::size_t c = 0; c < g.num_cubes(); ++c) {
        const auto s = cond.scc_of[c];
        if (from_sel[s]) {
            ar.attractor.push_back(static_cast<CubeId>(c));
        }
        if (to_unsel[s]) {
            ar.repeller.push_back(static_cast<CubeId>(c));
        }
    }
    return ar;
}

namespace {

double sq_dist(const StateVec& a, const StateVec& b)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void check_clouds(const std::vector<StateVec>& a, const std::vector<StateVec>& b)
{
    if (a.empty() || b.empty()) {
        throw ContractViolation("Hausdorff distance needs non-empty point clouds");
    }
    const auto dim = a.front().size();
    for (const auto* cloud : {&a, &b}) {
        for (const auto& p : *cloud) {
            if (p.size() != dim || !all_finite(p)) {
                throw ContractViolation("point clouds must be finite and of one dimension");
            }
        }
    }
}

// Uniform bucket grid over a point cloud for exact nearest-neighbor queries.
class BucketIndex {
public:
    explicit BucketIndex(const std::vector<StateVec>& pts) : pts_(pts), dim_(static_cast<int>(pts.front().size()))
    {
        lo_ = pts.front();
        StateVec hi = pts.front();
        for (const auto& p : pts) {
            lo_ = lo_.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        const double target = std::max(1.0, static_cast<double>(pts.size()) / 2.0);
        const double per_axis = std::max(1.0, std::floor(std::pow(target, 1.0 / dim_)));
        cell_ = StateVec(dim_);
        counts_.assign(dim_, 1);
        std::size_t total = 1;
        for (int a = 0; a < dim_; ++a) {
            const double span = hi[a] - lo_[a];
            counts_[a] = span > 0.0 ? static_cast<int>(per_axis) : 1;
            cell_[a] = span > 0.0 ? span / counts_[a] : 1.0;
            total *= static_cast<std::size_t>(counts_[a]);
        }
        min_cell_ = cell_.minCoeff();
        offsets_.assign(total + 1, 0);
        std::vector<std::size_t> which(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            which[i] = flat(cell_index(pts[i]));
            ++offsets_[which[i] + 1];
        }
        for (std::size_t c = 0; c < total; ++c) {
            offsets_[c + 1] += offsets_[c];
        }
        order_.resize(pts.size());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            order_[fill[which[i]]++] = i;
        }
    }

    /// Smallest squared distance from q to the cloud.  Stops early once the
    /// answer is known to be below `cutoff`.
    double nearest_sq(const StateVec& q, double cutoff) const
    {
        std::vector<long> qc(dim_);
        long max_ring = 0;
        for (int a = 0; a < dim_; ++a) {
            qc[a] = static_cast<long>(std::floor((q[a] - lo_[a]) / cell_[a]));
            max_ring = std::max({max_ring, std::labs(qc[a]), std::labs(qc[a] - (counts_[a] - 1))});
        }
        double best = std::numeric_limits<double>::infinity();
        std::vector<long> off(dim_);
        for (long k = 0; k <= max_ring; ++k) {
            visit_ring(qc, k, off, 0, false, [&](std::size_t cell) {
                for (auto i = offsets_[cell]; i < offsets_[cell + 1]; ++i) {
                    best = std::min(best, sq_dist(q, pts_[order_[i]]));
                }
            });
            // Cells on rings beyond k lie at least k cell widths away.
            const double bound = static_cast<double>(k) * min_cell_;
            if (best <= bound * bound || best < cutoff) {
                break;
            }
        }
        return best;
    }

private:
    std::vector<long> cell_index(const StateVec& p) const
    {
        std::vector<long> idx(dim_);
        for (int a = 0; a < dim_; ++a) {
            const long i = static_cast<long>(std::floor((p[a] - lo_[a]) / cell_[a]));
            idx[a] = std::clamp<long>(i, 0, counts_[a] - 1);
        }
        return idx;
    }

    std::size_t flat(const std::vector<long>& idx) const
    {
        std::size_t f = 0;
        for (int a = 0; a < dim_; ++a) {
            f = f * static_cast<std::size_t>(counts_[a]) + static_cast<std::size_t>(idx[a]);
        }
        return f;
    }

    // Enumerates in-range cells at Chebyshev distance exactly k from qc.
    template <typename F>
    void visit_ring(const std::vector<long>& qc, long k, std::vector<long>& off, int axis, bool on_shell,
                    F&& f) const
    {
        if (axis == dim_) {
            if (!on_shell && k > 0) {
                return;
            }
            std::vector<long> idx(dim_);
            for (int a = 0; a < dim_; ++a) {
                idx[a] = qc[a] + off[a];
            }
            f(flat(idx));
            return;
        }
        const long lo = std::max(-k, -qc[axis]);
        const long hi = std::min(k, counts_[axis] - 1 - qc[axis]);
        for (long d = lo; d <= hi; ++d) {
            off[axis] = d;
            visit_ring(qc, k, off, axis + 1, on_shell || std::labs(d) == k, f);
        }
    }

    const std::vector<StateVec>& pts_;
    int dim_;
    StateVec lo_;
    StateVec cell_;
    double min_cell_ = 1.0;
    std::vector<int> counts_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> order_;
};

double directed_sq(const std::vector<StateVec>& from, const BucketIndex& to)
{
    double worst = 0.0;
    for (const auto& p : from) {
        // Points closer than the current maximum cannot change it.
        worst = std::max(worst, to.nearest_sq(p, worst));
    }
    return worst;
}

}  // namespace

double hausdorff_distance_brute(const std::vector<StateVec>& a, const std::vector<StateVec>& b)
{
    check_clouds(a, b);
    auto directed = [](const std::vector<StateVec>& from, const std::vector<StateVec>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) {
                best = std::min(best, sq_dist(p, q));
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::sqrt(std::max(directed(a, b), directed(b, a)));
}

double hausdorff_distance(const std::vector<StateVec>& a, const std::vector<StateVec>& b)
{
    check_clouds(a, b);
    const BucketIndex ia(a);
    const BucketIndex ib(b);
    return std::sqrt(std::max(directed_sq(a, ib), directed_sq(b, ia)));
}

std::vector<StateVec> cube_centers(const Grid& grid, const CubeSet& cubes)
{
    std::vector<StateVec> out;
    out.reserve(cubes.size());
    for (CubeId c : cubes) {
        out.push_back(grid.cube_center(c));
    }
    return out;
}

namespace {

std::size_t overlap_count(const CubeSet& a, const CubeSet& b)
{
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

}  // namespace

std::vector<NodeMatch> match_nodes(const MorseGraph& a, const MorseGraph& b, const Grid& grid)
{
    std::vector<std::vector<StateVec>> centers_b;
    centers_b.reserve(b.size());
    for (const auto& node : b.nodes) {
        centers_b.push_back(cube_centers(grid, node.cubes));
    }
    std::vector<NodeMatch> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        NodeMatch m;
        m.from = static_cast<int>(i);
        std::vector<int> best;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const std::size_t ov = overlap_count(a.nodes[i].cubes, b.nodes[j].cubes);
            if (ov == 0) {
                continue;
            }
            if (ov > m.overlap) {
                m.overlap = ov;
                best.assign(1, static_cast<int>(j));
            } else if (ov == m.overlap) {
                best.push_back(static_cast<int>(j));
            }
        }
        if (!best.empty()) {
            const auto centers_a = cube_centers(grid, a.nodes[i].cubes);
            double dmin = std::numeric_limits<double>::infinity();
            int count = 0;
            for (int j : best) {
                const double d = hausdorff_distance(centers_a, centers_b[j]);
                if (d < dmin) {
                    dmin = d;
                    m.to = j;
                    count = 1;
                } else if (d == dmin) {
                    ++count;
                }
            }
            m.hausdorff = dmin;
            if (count > 1) {
                m.ambiguous = true;
                m.to = -1;
            }
        }
        out.push_back(m);
    }
    return out;
}

ContinuationTrack track_continuation(const std::function<std::unique_ptr<VectorField>(double)>& model_family,
                                     const std::vector<double>& params, const Grid& grid, const EngineConfig& cfg)
{
    for (std::size_t i = 1; i < params.size(); ++i) {
        if (!(params[i] > params[i - 1])) {
            throw ContractViolation("continuation parameters must be increasing");
        }
    }
    ContinuationTrack track;
    track.params = params;
    for (double r : params) {
        const auto model = model_family(r);
        const TransitionGraph g = build_transition_graph(grid, *model, cfg.map, cfg.threads);
        MorseGraph mg = compute_morse_graph(g);
        if (const auto* lorenz = dynamic_cast<const LorenzModel*>(model.get())) {
            label_lorenz_nodes(mg, grid, lorenz->params());
        }
        track.graphs.push_back(std::move(mg));
    }
    for (std::size_t i = 0; i + 1 < track.graphs.size(); ++i) {
        track.matches.push_back(match_nodes(track.graphs[i], track.graphs[i + 1], grid));
    }
    return track;
}

std::string MorseEquationReport::equation() const
{
    std::string s = lhs.to_string() + "=" + rhs_base.to_string();
    if (!q.is_zero()) {
        s += "+(1+t)";
        const auto& c = q.coefficients();
        const auto nonzero = std::count_if(c.begin(), c.end(), [](std::int64_t v) { return v != 0; });
        if (nonzero > 1) {
            s += "(" + q.to_string() + ")";
        } else if (!(q.degree() == 0 && q[0] == 1)) {
            s += q.to_string();
        }
    }
    if (!remainder.is_zero()) {
        s += (remainder[0] > 0 ? "+" : "") + remainder.to_string();
    }
    return s;
}

MorseEquationReport morse_equations(const std::vector<Polynomial>& per_node, const Polynomial& global)
{
    MorseEquationReport rep;
    for (const auto& p : per_node) {
        rep.lhs = rep.lhs + p;
    }
    rep.rhs_base = global;
    const DivisionResult d = divide_by_one_plus_t(rep.lhs - global);
    rep.q = d.quotient;
    rep.remainder = d.remainder;
    rep.valid = d.remainder.is_zero() && d.quotient.is_nonnegative() && rep.lhs.is_nonnegative() &&
                global.is_nonnegative();
    return rep;
}

TravelEquations travel_equations(const std::vector<std::int64_t>& betti_k, const std::vector<std::int64_t>& betti_c)
{
    const Polynomial pk = poincare(betti_k);
    const Polynomial pc = poincare(betti_c);
    const Polynomial one{1};
    const Polynomial t = Polynomial::monomial(1, 1);
    // Attractor A and repeller R with CH(R) = t (H(A) - 1).
    auto stage = [&](const Polynomial& attractor) {
        return morse_equations({attractor, t * (attractor - one)}, one);
    };
    return {stage(pc), stage(pk + pc), stage(pk)};
}

MorseEquationReport pitchfork_equations(int k)
{
    if (k < 1) {
        throw ContractViolation("pitchfork equations need k >= 1");
    }
    return morse_equations({Polynomial{1}, Polynomial::monomial(1, k - 1), Polynomial::monomial(1, k)},
                           Polynomial{1});
}

void to_json(nlohmann::json& j, const MorseEquationReport& r)
{
    j = nlohmann::json{{"lhs", r.lhs},   {"rhs_base", r.rhs_base}, {"q", r.q},
                       {"remainder", r.remainder}, {"valid", r.valid},   {"equation", r.equation()}};
}

void write_dot(std::ostream& os, const MorseGraph& mg, const DotOptions& opts)
{
    os << "digraph morse {\n";
    for (std::size_t i = 0; i < mg.size(); ++i) {
        os << "  n" << i << " [label=\"" << i;
        if (!mg.nodes[i].label.empty()) {
            os << ": " << mg.nodes[i].label;
        }
        os << "\\n" << mg.nodes[i].cubes.size() << " cubes";
        if (i < opts.indices.size() && opts.indices[i]) {
            os << "\\nP=" << opts.indices[i]->to_string();
        }
        os << "\"];\n";
    }
    for (const auto& [u, l] : mg.edges) {
        os << "  n" << u << " -> n" << l << ";\n";
    }
    os << "}\n";
}

nlohmann::json morse_graph_json(const MorseGraph& mg, const std::vector<std::optional<Polynomial>>& indices)
{
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < mg.size(); ++i) {
        nlohmann::json n{{"id", i}, {"label", mg.nodes[i].label}, {"cube_count", mg.nodes[i].cubes.size()}};
        if (i < indices.size() && indices[i]) {
            n["index"] = *indices[i];
        }
        nodes.push_back(std::move(n));
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [u, l] : mg.edges) {
        edges.push_back({u, l});
    }
    return nlohmann::json{{"nodes", nodes}, {"edges", edges}};
}

}  // namespace conley
