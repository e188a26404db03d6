#include "conley/cubical.hpp"
#include "conley/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace conley {

Grid::Grid(TrappingBox box, std::vector<int> depths, std::size_t budget)
    : box_(std::move(box)), depths_(std::move(depths))
{
    box_.validate();
    const int n = static_cast<int>(depths_.size());
    if (n != box_.dimension()) {
        throw ContractViolation("grid depths must match the box dimension");
    }
    counts_.resize(n);
    strides_.resize(n);
    widths_.resize(n);
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) {
        if (depths_[a] < 0 || depths_[a] > 15) {
            throw ContractViolation("grid depth must lie in [0, 15]");
        }
        counts_[a] = std::int64_t{1} << depths_[a];
        widths_[a] = (box_.hi[a] - box_.lo[a]) / static_cast<double>(counts_[a]);
        if (total > budget / static_cast<std::size_t>(counts_[a])) {
            throw BudgetExceeded("grid exceeds the cube budget of " + std::to_string(budget));
        }
        total *= static_cast<std::size_t>(counts_[a]);
    }
    if (total > std::numeric_limits<CubeId>::max() - 1) {
        throw BudgetExceeded("grid exceeds the cube id range");
    }
    size_ = total;
    std::int64_t s = 1;
    for (int a = n - 1; a >= 0; --a) {
        strides_[a] = s;
        s *= counts_[a];
    }
}

CubeId Grid::id(const int* idx) const
{
    std::int64_t v = 0;
    for (int a = 0; a < dimension(); ++a) {
        if (idx[a] < 0 || idx[a] >= counts_[a]) {
            throw ContractViolation("cube multi-index out of range");
        }
        v += idx[a] * strides_[a];
    }
    return static_cast<CubeId>(v);
}

void Grid::multi_index(CubeId c, int* idx) const
{
    std::int64_t v = c;
    for (int a = 0; a < dimension(); ++a) {
        idx[a] = static_cast<int>(v / strides_[a]);
        v %= strides_[a];
    }
}

std::vector<int> Grid::multi_index(CubeId c) const
{
    if (c >= size_) {
        throw ContractViolation("cube id out of range");
    }
    std::vector<int> idx(dimension());
    multi_index(c, idx.data());
    return idx;
}

std::optional<CubeId> Grid::locate(const StateVec& p) const
{
    if (p.size() != dimension()) {
        throw ContractViolation("point dimension does not match the grid");
    }
    int idx[kMaxDim];
    for (int a = 0; a < dimension(); ++a) {
        if (!(p[a] >= box_.lo[a] && p[a] <= box_.hi[a])) {
            return std::nullopt;
        }
        const auto i = static_cast<std::int64_t>(std::floor((p[a] - box_.lo[a]) / widths_[a]));
        idx[a] = static_cast<int>(std::clamp<std::int64_t>(i, 0, counts_[a] - 1));
    }
    return id(idx);
}

TrappingBox Grid::cube_box(CubeId c) const
{
    int idx[kMaxDim];
    multi_index(c, idx);
    TrappingBox b{StateVec(dimension()), StateVec(dimension())};
    for (int a = 0; a < dimension(); ++a) {
        b.lo[a] = box_.lo[a] + widths_[a] * idx[a];
        b.hi[a] = idx[a] + 1 == counts_[a] ? box_.hi[a] : box_.lo[a] + widths_[a] * (idx[a] + 1);
    }
    return b;
}

StateVec Grid::cube_center(CubeId c) const { return cube_box(c).center(); }

Grid build_grid(const TrappingBox& box, const std::vector<int>& depths, std::size_t budget)
{
    return Grid(box, depths, budget);
}

void OuterMapConfig::validate() const
{
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw ContractViolation("tau must be positive");
    }
    if (!(bloat >= 1.0) || !std::isfinite(bloat)) {
        throw ContractViolation("bloat factor must be at least 1");
    }
    if (!(rk4_step > 0.0)) {
        throw ContractViolation("rk4 step must be positive");
    }
}

namespace {

// Coordinate of doubled lattice index d along axis a: even d is a vertex,
// odd d the midpoint of an edge.
double half_coord(const Grid& grid, int a, std::int64_t d)
{
    const TrappingBox& box = grid.box();
    auto vertex = [&](std::int64_t i) {
        return i == grid.count(a) ? box.hi[a] : box.lo[a] + grid.width(a) * static_cast<double>(i);
    };
    if (d % 2 == 0) {
        return vertex(d / 2);
    }
    return 0.5 * (vertex(d / 2) + vertex(d / 2 + 1));
}

// Doubled coordinates of the sample points of a cube, in cube_samples order.
template <typename Fn>
void for_each_sample(int n, const int* idx, Fn&& fn)
{
    std::int64_t d[kMaxDim];
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        for (int a = 0; a < n; ++a) {
            d[a] = 2 * static_cast<std::int64_t>(idx[a]) + ((mask >> a) & 1u ? 2 : 0);
        }
        fn(d);
    }
    for (int a = 0; a < n; ++a) {
        d[a] = 2 * static_cast<std::int64_t>(idx[a]) + 1;
    }
    fn(d);
    for (int a = 0; a < n; ++a) {
        const std::int64_t mid = d[a];
        d[a] = mid - 1;
        fn(d);
        d[a] = mid + 1;
        fn(d);
        d[a] = mid;
    }
}

StateVec lattice_point(const Grid& grid, const std::int64_t* d)
{
    StateVec p(grid.dimension());
    for (int a = 0; a < grid.dimension(); ++a) {
        p[a] = half_coord(grid, a, d[a]);
    }
    return p;
}

// Bounding box of advanced samples turned into an inflated index range.
class ImageAccumulator {
public:
    explicit ImageAccumulator(int n)
        : lo_(StateVec::Constant(n, std::numeric_limits<double>::infinity())),
          hi_(StateVec::Constant(n, -std::numeric_limits<double>::infinity()))
    {
    }

    void add(const StateVec& p, const TrappingBox& box)
    {
        if (!all_finite(p)) {
            escapes_ = true;
            return;
        }
        any_finite_ = true;
        lo_ = lo_.cwiseMin(p);
        hi_ = hi_.cwiseMax(p);
        any_inside_ = any_inside_ || box.contains(p);
    }

    CubeImage finish(const Grid& grid, const OuterMapConfig& cfg) const
    {
        const int n = grid.dimension();
        CubeImage img;
        img.lo.assign(n, 0);
        img.hi.assign(n, 0);
        img.escapes = escapes_;
        if (!any_finite_ || !any_inside_) {
            img.escapes = true;
            img.all_escaped = true;
            return img;
        }
        const TrappingBox& box = grid.box();
        for (int a = 0; a < n; ++a) {
            const double extent = hi_[a] - lo_[a];
            const double inflated = std::max(cfg.bloat * extent, grid.width(a));
            const double pad = 0.5 * (inflated - extent);
            const double a_lo = lo_[a] - pad;
            const double a_hi = hi_[a] + pad;
            if (a_lo < box.lo[a] || a_hi > box.hi[a]) {
                img.escapes = true;
            }
            const double w = grid.width(a);
            const auto last = grid.count(a) - 1;
            const auto i_lo = static_cast<std::int64_t>(std::floor((std::max(a_lo, box.lo[a]) - box.lo[a]) / w));
            const auto i_hi = static_cast<std::int64_t>(std::floor((std::min(a_hi, box.hi[a]) - box.lo[a]) / w));
            img.lo[a] = static_cast<int>(std::clamp<std::int64_t>(i_lo, 0, last));
            img.hi[a] = static_cast<int>(std::clamp<std::int64_t>(i_hi, 0, last));
        }
        return img;
    }

private:
    StateVec lo_;
    StateVec hi_;
    bool escapes_ = false;
    bool any_finite_ = false;
    bool any_inside_ = false;
};

}  // namespace

std::vector<StateVec> cube_samples(const Grid& grid, CubeId c)
{
    const int n = grid.dimension();
    int idx[kMaxDim];
    grid.multi_index(c, idx);
    std::vector<StateVec> pts;
    pts.reserve((std::size_t{1} << n) + 2 * n + 1);
    for_each_sample(n, idx, [&](const std::int64_t* d) { pts.push_back(lattice_point(grid, d)); });
    return pts;
}

CubeImage cube_image(const Grid& grid, CubeId c, const VectorField& model, const OuterMapConfig& cfg)
{
    const int n = grid.dimension();
    if (model.dimension() != n) {
        throw ContractViolation("model dimension does not match the grid");
    }
    ImageAccumulator acc(n);
    for (StateVec p : cube_samples(grid, c)) {
        rk4_advance(model, p, cfg.tau, cfg.rk4_step);
        acc.add(p, grid.box());
    }
    return acc.finish(grid, cfg);
}

CubeSet outer_map(const Grid& grid, CubeId c, const VectorField& model, const OuterMapConfig& cfg)
{
    cfg.validate();
    if (c >= grid.size()) {
        throw ContractViolation("cube id out of range");
    }
    const CubeImage img = cube_image(grid, c, model, cfg);
    const int n = grid.dimension();
    CubeSet out;
    if (!img.all_escaped) {
        std::vector<int> cur(img.lo);
        while (true) {
            out.push_back(grid.id(cur));
            int a = n - 1;
            while (a >= 0 && cur[a] == img.hi[a]) {
                cur[a] = img.lo[a];
                --a;
            }
            if (a < 0) {
                break;
            }
            ++cur[a];
        }
    }
    if (img.escapes) {
        out.push_back(static_cast<CubeId>(grid.size()));
    }
    return out;
}

TransitionGraph::TransitionGraph(const Grid& grid, std::vector<std::uint16_t> lo, std::vector<std::uint16_t> hi,
                                 std::vector<std::uint8_t> flags)
    : n_(grid.size()), dim_(grid.dimension()), lo_(std::move(lo)), hi_(std::move(hi)), flags_(std::move(flags))
{
    strides_.resize(dim_);
    for (int a = 0; a < dim_; ++a) {
        strides_[a] = grid.stride(a);
    }
    if (lo_.size() != n_ * dim_ || hi_.size() != n_ * dim_ || flags_.size() != n_) {
        throw ContractViolation("transition graph arrays have inconsistent sizes");
    }
}

bool TransitionGraph::has_self_loop(CubeId c) const
{
    if (pruned(c)) {
        return false;
    }
    std::int64_t v = c;
    for (int a = 0; a < dim_; ++a) {
        const auto i = v / strides_[a];
        v %= strides_[a];
        if (i < lo_[std::size_t(c) * dim_ + a] || i > hi_[std::size_t(c) * dim_ + a]) {
            return false;
        }
    }
    return true;
}

std::size_t TransitionGraph::out_degree(CubeId c) const
{
    std::size_t d = (flags_[c] & kEscapes) ? 1 : 0;
    if (!pruned(c)) {
        std::size_t box = 1;
        for (int a = 0; a < dim_; ++a) {
            box *= std::size_t(hi_[std::size_t(c) * dim_ + a] - lo_[std::size_t(c) * dim_ + a] + 1);
        }
        d += box;
    }
    return d;
}

std::size_t TransitionGraph::edge_count() const
{
    std::size_t total = 0;
    for (std::size_t c = 0; c < n_; ++c) {
        total += out_degree(static_cast<CubeId>(c));
    }
    return total;
}

CubeSet TransitionGraph::successors(CubeId c) const
{
    CubeSet out;
    out.reserve(out_degree(c));
    for_each_successor(c, [&](CubeId t) { out.push_back(t); });
    return out;
}

CubeId TransitionGraph::successor_at(CubeId c, std::size_t k) const
{
    if (!pruned(c)) {
        const std::uint16_t* lo = lo_.data() + std::size_t(c) * dim_;
        const std::uint16_t* hi = hi_.data() + std::size_t(c) * dim_;
        std::size_t box = 1;
        for (int a = 0; a < dim_; ++a) {
            box *= std::size_t(hi[a] - lo[a] + 1);
        }
        if (k < box) {
            std::int64_t id = 0;
            for (int a = dim_ - 1; a >= 0; --a) {
                const std::size_t span = std::size_t(hi[a] - lo[a] + 1);
                id += static_cast<std::int64_t>(lo[a] + k % span) * strides_[a];
                k /= span;
            }
            return static_cast<CubeId>(id);
        }
    }
    return out_node();
}

namespace {

// Advanced images of every sample point on the half lattice.  Neighbouring
// cubes share corners and faces, so each point is integrated once.
class SampleCache {
public:
    SampleCache(const Grid& grid, std::uint32_t full)
        : grid_(grid), n_(grid.dimension()), slot_(std::size_t{1} << n_, -1)
    {
        add_kind(0);
        add_kind(full);
        for (int a = 0; a < n_; ++a) {
            add_kind(full & ~(1u << a));
        }
    }

    std::size_t points() const noexcept { return total_; }

    void fill(const VectorField& model, const OuterMapConfig& cfg, int threads)
    {
        data_.assign(total_ * static_cast<std::size_t>(n_), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1024) num_threads(threads)
#else
        (void)threads;
#endif
        for (std::int64_t k = 0; k < static_cast<std::int64_t>(total_); ++k) {
            std::int64_t d[kMaxDim];
            locate_point(static_cast<std::size_t>(k), d);
            StateVec p = lattice_point(grid_, d);
            rk4_advance(model, p, cfg.tau, cfg.rk4_step);
            std::copy(p.data(), p.data() + n_, data_.data() + k * n_);
        }
    }

    void fetch(const std::int64_t* d, StateVec& p) const
    {
        std::uint32_t mask = 0;
        for (int a = 0; a < n_; ++a) {
            mask |= static_cast<std::uint32_t>(d[a] & 1) << a;
        }
        const Kind& k = kinds_[static_cast<std::size_t>(slot_[mask])];
        std::size_t off = k.offset;
        for (int a = 0; a < n_; ++a) {
            off += static_cast<std::size_t>(d[a] >> 1) * k.stride[a];
        }
        p.resize(n_);
        std::copy(data_.data() + off * n_, data_.data() + (off + 1) * n_, p.data());
    }

private:
    struct Kind {
        std::uint32_t mask = 0;
        std::size_t offset = 0;
        std::size_t count = 0;
        std::size_t stride[kMaxDim] = {};
        std::int64_t extent[kMaxDim] = {};
    };

    void add_kind(std::uint32_t mask)
    {
        if (slot_[mask] >= 0) {
            return;
        }
        Kind k;
        k.mask = mask;
        k.offset = total_;
        std::size_t s = 1;
        for (int a = n_; a-- > 0;) {
            k.extent[a] = grid_.count(a) + ((mask >> a) & 1u ? 0 : 1);
            k.stride[a] = s;
            s *= static_cast<std::size_t>(k.extent[a]);
        }
        k.count = s;
        total_ += s;
        slot_[mask] = static_cast<int>(kinds_.size());
        kinds_.push_back(k);
    }

    void locate_point(std::size_t flat, std::int64_t* d) const
    {
        std::size_t i = 0;
        while (flat >= kinds_[i].offset + kinds_[i].count) {
            ++i;
        }
        const Kind& k = kinds_[i];
        std::size_t rem = flat - k.offset;
        for (int a = 0; a < n_; ++a) {
            const auto q = static_cast<std::int64_t>(rem / k.stride[a]);
            rem %= k.stride[a];
            d[a] = 2 * q + ((k.mask >> a) & 1u);
        }
    }

    const Grid& grid_;
    int n_;
    std::vector<int> slot_;
    std::vector<Kind> kinds_;
    std::size_t total_ = 0;
    std::vector<double> data_;
};

// Above this many cached coordinates the per-cube path is used instead.
constexpr std::size_t kSampleCacheLimit = std::size_t{1} << 28;

}  // namespace

TransitionGraph build_transition_graph(const Grid& grid, const VectorField& model, const OuterMapConfig& cfg,
                                       int threads)
{
    cfg.validate();
    if (model.dimension() != grid.dimension()) {
        throw ContractViolation("model dimension does not match the grid");
    }
    const std::size_t n = grid.size();
    const int dim = grid.dimension();
    std::vector<std::uint16_t> lo(n * dim);
    std::vector<std::uint16_t> hi(n * dim);
    std::vector<std::uint8_t> flags(n);
#ifdef _OPENMP
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#else
    const int nthreads = 1;
    (void)threads;
#endif
    const std::uint32_t full = (1u << dim) - 1;
    std::unique_ptr<SampleCache> cache;
    {
        SampleCache probe(grid, full);
        if (probe.points() * static_cast<std::size_t>(dim) <= kSampleCacheLimit) {
            cache = std::make_unique<SampleCache>(grid, full);
            cache->fill(model, cfg, nthreads);
        }
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 256) num_threads(nthreads)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        CubeImage img;
        if (cache) {
            int idx[kMaxDim];
            grid.multi_index(static_cast<CubeId>(i), idx);
            ImageAccumulator acc(dim);
            StateVec p(dim);
            for_each_sample(dim, idx, [&](const std::int64_t* d) {
                cache->fetch(d, p);
                acc.add(p, grid.box());
            });
            img = acc.finish(grid, cfg);
        } else {
            img = cube_image(grid, static_cast<CubeId>(i), model, cfg);
        }
        for (int a = 0; a < dim; ++a) {
            lo[i * dim + a] = static_cast<std::uint16_t>(img.lo[a]);
            hi[i * dim + a] = static_cast<std::uint16_t>(img.hi[a]);
        }
        flags[i] = (img.escapes ? TransitionGraph::kEscapes : 0) | (img.all_escaped ? TransitionGraph::kPruned : 0);
    }
    return TransitionGraph(grid, std::move(lo), std::move(hi), std::move(flags));
}

namespace {

template <typename T>
void put(std::ostream& os, T v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

// Streams the binary dump to any byte sink.
template <typename Sink>
void emit_binary(Sink&& sink, const Grid& grid, const TransitionGraph& g)
{
    auto put_raw = [&](const void* p, std::size_t len) { sink(static_cast<const char*>(p), len); };
    const char magic[8] = {'C', 'M', 'G', 'R', 'A', 'P', 'H', '1'};
    put_raw(magic, 8);
    const std::uint32_t dim = grid.dimension();
    put_raw(&dim, 4);
    for (int a = 0; a < grid.dimension(); ++a) {
        const std::uint32_t d = grid.depths()[a];
        put_raw(&d, 4);
    }
    for (int a = 0; a < grid.dimension(); ++a) {
        const double v = grid.box().lo[a];
        put_raw(&v, 8);
    }
    for (int a = 0; a < grid.dimension(); ++a) {
        const double v = grid.box().hi[a];
        put_raw(&v, 8);
    }
    const std::uint64_t ncubes = g.num_cubes();
    put_raw(&ncubes, 8);
    std::uint64_t off = 0;
    put_raw(&off, 8);
    for (std::size_t c = 0; c < g.num_cubes(); ++c) {
        off += g.out_degree(static_cast<CubeId>(c));
        put_raw(&off, 8);
    }
    for (std::size_t c = 0; c < g.num_cubes(); ++c) {
        g.for_each_successor(static_cast<CubeId>(c), [&](CubeId t) {
            const std::uint32_t v = t;
            put_raw(&v, 4);
        });
    }
}

}  // namespace

void write_graph_binary(std::ostream& os, const Grid& grid, const TransitionGraph& g)
{
    emit_binary([&](const char* p, std::size_t len) { os.write(p, static_cast<std::streamsize>(len)); }, grid, g);
    if (!os) {
        throw IoError("failed writing transition graph dump");
    }
}

void write_graph_text(std::ostream& os, const TransitionGraph& g)
{
    for (std::size_t c = 0; c < g.num_cubes(); ++c) {
        os << c << ':';
        g.for_each_successor(static_cast<CubeId>(c), [&](CubeId t) {
            if (t == g.out_node()) {
                os << " out";
            } else {
                os << ' ' << t;
            }
        });
        os << '\n';
    }
    if (!os) {
        throw IoError("failed writing transition graph text");
    }
}

std::string graph_digest(const Grid& grid, const TransitionGraph& g)
{
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](const void* p, std::size_t len) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    // The per-cube image boxes determine the edge list, and stay small
    // where the CSR dump would not.
    const std::uint32_t dim = grid.dimension();
    mix(&dim, 4);
    for (int a = 0; a < grid.dimension(); ++a) {
        const std::uint32_t d = grid.depths()[a];
        mix(&d, 4);
        mix(&grid.box().lo[a], 8);
        mix(&grid.box().hi[a], 8);
    }
    for (std::size_t c = 0; c < g.num_cubes(); ++c) {
        const auto id = static_cast<CubeId>(c);
        const std::uint8_t f = (g.escapes(id) ? 1 : 0) | (g.pruned(id) ? 2 : 0);
        mix(&f, 1);
        mix(g.image_lo(id).data(), 2 * dim);
        mix(g.image_hi(id).data(), 2 * dim);
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

CoverageReport check_coverage(const Grid& grid, const TransitionGraph& g, const VectorField& model,
                              const OuterMapConfig& cfg, std::size_t trials, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    IntegratorConfig precise = IntegratorConfig::precise(1e-10);
    CoverageReport rep;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto c = static_cast<CubeId>(pick(rng));
        const TrappingBox b = grid.cube_box(c);
        StateVec x(grid.dimension());
        for (int a = 0; a < grid.dimension(); ++a) {
            x[a] = b.lo[a] + unit(rng) * (b.hi[a] - b.lo[a]);
        }
        if (g.pruned(c)) {
            continue;
        }
        ++rep.trials;
        const StateVec y = time_tau_map(model, x, cfg.tau, precise);
        const auto target = grid.locate(y);
        const CubeId want = target ? *target : g.out_node();
        const CubeSet succ = g.successors(c);
        if (!std::binary_search(succ.begin(), succ.end(), want)) {
            ++rep.violations;
        }
    }
    return rep;
}

}  // namespace conley
