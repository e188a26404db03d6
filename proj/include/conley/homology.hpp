#pragma once

// Integer cubical homology, Smith normal form, combinatorial index pairs and
// Conley index polynomials.

#include "conley/cubical.hpp"
#include "conley/polynomial.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace conley {

struct MorseGraph;

using BigInt = boost::multiprecision::cpp_int;

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    IntMatrix(std::initializer_list<std::initializer_list<long long>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    BigInt& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const BigInt& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<BigInt> a_;
};

struct SmithResult {
    std::vector<BigInt> factors;  ///< positive, each divides the next
    std::size_t rank = 0;
};

/// Invariant factors by elimination with minimal-magnitude pivots.
SmithResult smith_normal_form(IntMatrix m);

struct BettiResult {
    std::vector<std::int64_t> betti;  ///< trimmed of trailing zeros
    /// torsion[k]: invariant factors > 1 of H_k.
    std::vector<std::vector<BigInt>> torsion;

    Polynomial poincare() const { return Polynomial(betti); }
    std::int64_t euler_characteristic() const;
    std::int64_t betti_at(std::size_t k) const { return k < betti.size() ? betti[k] : 0; }
};

void to_json(nlohmann::json& j, const BettiResult& b);

/// Cubical complex in doubled coordinates: coordinate 2i is the vertex i,
/// 2i + 1 the interval [i, i + 1].  Adding a cube adds all of its faces.
class CubicalComplex {
public:
    /// extent[a] unit intervals along axis a.
    explicit CubicalComplex(std::vector<int> extent);

    static CubicalComplex from_cubes(const Grid& grid, const CubeSet& cubes);

    int dimension() const noexcept { return static_cast<int>(extent_.size()); }
    const std::vector<int>& extent() const noexcept { return extent_; }

    /// Adds the elementary cube with the given doubled coordinates and all
    /// its faces.
    void add(const std::vector<int>& doubled);
    /// Adds the full-dimensional unit cube with lower corner `lower`.
    void add_unit_cube(const int* lower);

    std::size_t size() const;
    const std::vector<std::uint64_t>& cells() const;
    bool contains(std::uint64_t key) const;

    std::uint64_t encode(const int* doubled) const;
    void decode(std::uint64_t key, int* doubled) const;
    int cell_dimension(std::uint64_t key) const;
    /// Signed faces of a cell (keys may lie outside the complex).
    void boundary(std::uint64_t key, std::vector<std::pair<std::uint64_t, int>>& out) const;

    std::vector<std::size_t> counts_by_dimension() const;
    std::int64_t euler_characteristic() const;
    bool is_closed() const;
    bool contains_all(const CubicalComplex& sub) const;
    /// Checks boundary(boundary(c)) = 0 for every cell.
    bool boundary_squared_vanishes() const;

    /// One cell per line as intervals, e.g. "[0,1]x[2]x[3,4]".
    void write_text(std::ostream& os) const;

private:
    void normalize() const;

    std::vector<int> extent_;
    std::vector<std::uint64_t> radix_;
    mutable std::vector<std::uint64_t> keys_;
    mutable bool sorted_ = true;
};

BettiResult homology(const CubicalComplex& x);
/// H(X, A); A must be a closed subcomplex of X.
BettiResult relative_homology(const CubicalComplex& x, const CubicalComplex& a);

/// Homology of the union of the closed cubes.
BettiResult betti_of_cubeset(const CubeSet& cubes, const Grid& grid);

struct IndexPair {
    CubeSet n;  ///< N
    CubeSet e;  ///< exit set, E subset of N
};

struct IndexPairOptions {
    /// Drop image cubes outside the grid.  Sound when the grid box is
    /// forward invariant, as the certified trapping box is.
    bool clip_to_grid = true;
    /// Fail when the exit set meets another Morse node.
    bool require_isolation = true;
};

/// N = S u F(S), E = F(S) \ S for the node's cube set S.  No cube of E maps
/// back into S because S is a strongly connected component, so the collar
/// is stable after one step.  Throws IsolationFailure when E meets another
/// Morse node, or when F(S) leaves the grid and clipping is off.
IndexPair build_index_pair(const MorseGraph& mg, int node, const TransitionGraph& g, const Grid& grid,
                           const IndexPairOptions& opts = {});

/// Rank polynomial of H(|N|, |E|).
Polynomial conley_index_polynomial(const IndexPair& pair, const Grid& grid);
BettiResult conley_index(const IndexPair& pair, const Grid& grid);

enum class IndexMethod { LocalCollar, DualRepeller };

const char* to_string(IndexMethod m);

struct NodeIndex {
    BettiResult homology;
    Polynomial polynomial;
    IndexMethod method = IndexMethod::LocalCollar;
};

/// Index of the dual repeller of A = forward closure of `others`, from the
/// pair (whole grid, A): the grid box is contractible, so H_k = reduced
/// H_{k-1}(A).
BettiResult dual_repeller_index(const CubeSet& attractor, const Grid& grid);

/// Local collar pair first.  When that fails to isolate and the node lies
/// above every other node, falls back to the dual-repeller pair.
NodeIndex node_conley_index(const MorseGraph& mg, int node, const TransitionGraph& g, const Grid& grid,
                            const IndexPairOptions& opts = {});

}  // namespace conley
