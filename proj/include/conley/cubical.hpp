#pragma once

// Uniform cubical grids over a box and the sampled outer approximation of
// the time-tau map as a directed graph on cubes.

#include "conley/flow.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace conley {

using CubeId = std::uint32_t;
/// Sorted, duplicate-free.
using CubeSet = std::vector<CubeId>;

inline constexpr std::size_t kDefaultCubeBudget = std::size_t{1} << 21;

class Grid {
public:
    /// 2^depths[i] cubes along axis i.  Throws BudgetExceeded when the total
    /// exceeds `budget`.
    Grid(TrappingBox box, std::vector<int> depths, std::size_t budget = kDefaultCubeBudget);

    int dimension() const noexcept { return static_cast<int>(depths_.size()); }
    std::size_t size() const noexcept { return size_; }
    const TrappingBox& box() const noexcept { return box_; }
    const std::vector<int>& depths() const noexcept { return depths_; }
    std::int64_t count(int axis) const noexcept { return counts_[axis]; }
    std::int64_t stride(int axis) const noexcept { return strides_[axis]; }
    double width(int axis) const noexcept { return widths_[axis]; }

    /// Axis 0 varies slowest.
    CubeId id(const int* idx) const;
    CubeId id(const std::vector<int>& idx) const { return id(idx.data()); }
    void multi_index(CubeId c, int* idx) const;
    std::vector<int> multi_index(CubeId c) const;

    /// The cube whose half-open extent contains p (upper faces of the grid
    /// box belong to the last cube).  Empty when p is outside the box.
    std::optional<CubeId> locate(const StateVec& p) const;

    TrappingBox cube_box(CubeId c) const;
    StateVec cube_center(CubeId c) const;

private:
    TrappingBox box_;
    std::vector<int> depths_;
    std::vector<std::int64_t> counts_;
    std::vector<std::int64_t> strides_;
    std::vector<double> widths_;
    std::size_t size_ = 0;
};

Grid build_grid(const TrappingBox& box, const std::vector<int>& depths, std::size_t budget = kDefaultCubeBudget);

struct OuterMapConfig {
    double tau = 0.2;
    /// Inflated extent per axis = max(bloat * image extent, one cube width).
    double bloat = 1.5;
    /// Fixed RK4 step.
    double rk4_step = 0.01;

    void validate() const;
};

/// Inflated image of one cube, as index ranges.
struct CubeImage {
    std::vector<int> lo;  ///< inclusive, clamped to the grid
    std::vector<int> hi;  ///< inclusive, clamped to the grid
    bool escapes = false;      ///< part of the inflated image leaves the grid
    bool all_escaped = false;  ///< every sample left the grid or diverged
};

/// Corners, center and face centers of the cube (2^n + 2n + 1 points).
std::vector<StateVec> cube_samples(const Grid& grid, CubeId c);

CubeImage cube_image(const Grid& grid, CubeId c, const VectorField& model, const OuterMapConfig& cfg);

/// Image cubes of `c`, with grid.size() standing for the outside.
CubeSet outer_map(const Grid& grid, CubeId c, const VectorField& model, const OuterMapConfig& cfg);

/// Outer approximation of the time-tau map on every cube.  Edges are stored
/// implicitly as per-cube index boxes; out_node() = number of cubes.
class TransitionGraph {
public:
    TransitionGraph() = default;
    TransitionGraph(const Grid& grid, std::vector<std::uint16_t> lo, std::vector<std::uint16_t> hi,
                    std::vector<std::uint8_t> flags);

    std::size_t num_cubes() const noexcept { return n_; }
    CubeId out_node() const noexcept { return static_cast<CubeId>(n_); }
    int dimension() const noexcept { return dim_; }
    const std::vector<std::int64_t>& strides() const noexcept { return strides_; }

    bool escapes(CubeId c) const { return flags_[c] & kEscapes; }
    /// Every sample of the cube left the grid; excluded from recurrence.
    bool pruned(CubeId c) const { return flags_[c] & kPruned; }
    bool has_self_loop(CubeId c) const;

    std::size_t out_degree(CubeId c) const;
    std::size_t edge_count() const;

    /// Calls f(target) for each successor in increasing order; out_node last.
    template <typename F>
    void for_each_successor(CubeId c, F&& f) const;

    CubeSet successors(CubeId c) const;
    /// k-th successor in the order of for_each_successor; k < out_degree(c).
    CubeId successor_at(CubeId c, std::size_t k) const;

    std::span<const std::uint16_t> image_lo(CubeId c) const { return {lo_.data() + std::size_t(c) * dim_, std::size_t(dim_)}; }
    std::span<const std::uint16_t> image_hi(CubeId c) const { return {hi_.data() + std::size_t(c) * dim_, std::size_t(dim_)}; }

    static constexpr std::uint8_t kEscapes = 1;
    static constexpr std::uint8_t kPruned = 2;

private:
    std::size_t n_ = 0;
    int dim_ = 0;
    std::vector<std::int64_t> strides_;
    std::vector<std::uint16_t> lo_;
    std::vector<std::uint16_t> hi_;
    std::vector<std::uint8_t> flags_;
};

/// Parallel over cubes; the result does not depend on `threads`
/// (0 selects the runtime default).
TransitionGraph build_transition_graph(const Grid& grid, const VectorField& model, const OuterMapConfig& cfg,
                                       int threads = 0);

/// Binary dump: magic, dimension, depths, box, then CSR offsets and targets.
void write_graph_binary(std::ostream& os, const Grid& grid, const TransitionGraph& g);
/// One line per cube: "id: t1 t2 ...", out_node printed as "out".
void write_graph_text(std::ostream& os, const TransitionGraph& g);
/// 64-bit FNV-1a over the grid header and the per-cube image boxes, as 16
/// hex digits.
std::string graph_digest(const Grid& grid, const TransitionGraph& g);

struct CoverageReport {
    std::size_t trials = 0;
    std::size_t violations = 0;
};

/// Random points in random cubes: is the cube holding the point's precise
/// time-tau image among the cube's successors?
CoverageReport check_coverage(const Grid& grid, const TransitionGraph& g, const VectorField& model,
                              const OuterMapConfig& cfg, std::size_t trials, std::uint64_t seed);

template <typename F>
void TransitionGraph::for_each_successor(CubeId c, F&& f) const
{
    const std::uint16_t* lo = lo_.data() + std::size_t(c) * dim_;
    const std::uint16_t* hi = hi_.data() + std::size_t(c) * dim_;
    if (!(flags_[c] & kPruned)) {
        int idx[kMaxDim];
        for (int a = 0; a < dim_; ++a) {
            idx[a] = lo[a];
        }
        while (true) {
            std::int64_t id = 0;
            for (int a = 0; a < dim_; ++a) {
                id += idx[a] * strides_[a];
            }
            f(static_cast<CubeId>(id));
            int a = dim_ - 1;
            while (a >= 0 && idx[a] == hi[a]) {
                idx[a] = lo[a];
                --a;
            }
            if (a < 0) {
                break;
            }
            ++idx[a];
        }
    }
    if (flags_[c] & kEscapes) {
        f(out_node());
    }
}

}  // namespace conley
