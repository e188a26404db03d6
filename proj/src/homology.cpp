#include "conley/homology.hpp"
#include "conley/errors.hpp"
#include "conley/morse.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <limits>
#include <ostream>
#include <unordered_map>

namespace conley {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long long>> rows)
{
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    a_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw ContractViolation("ragged matrix literal");
        }
        for (long long v : r) {
            a_.emplace_back(v);
        }
    }
}

SmithResult smith_normal_form(IntMatrix m)
{
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    const std::size_t diag = std::min(rows, cols);
    SmithResult res;

    auto swap_rows = [&](std::size_t i, std::size_t j) {
        if (i == j) {
            return;
        }
        for (std::size_t c = 0; c < cols; ++c) {
            std::swap(m(i, c), m(j, c));
        }
    };
    auto swap_cols = [&](std::size_t i, std::size_t j) {
        if (i == j) {
            return;
        }
        for (std::size_t r = 0; r < rows; ++r) {
            std::swap(m(r, i), m(r, j));
        }
    };

    std::size_t t = 0;
    for (; t < diag; ++t) {
        // Smallest nonzero magnitude in the trailing block becomes the pivot.
        auto place_min = [&]() {
            bool found = false;
            BigInt best;
            std::size_t bi = 0;
            std::size_t bj = 0;
            for (std::size_t i = t; i < rows; ++i) {
                for (std::size_t j = t; j < cols; ++j) {
                    if (m(i, j) == 0) {
                        continue;
                    }
                    const BigInt mag = abs(m(i, j));
                    if (!found || mag < best) {
                        found = true;
                        best = mag;
                        bi = i;
                        bj = j;
                        if (best == 1) {
                            break;
                        }
                    }
                }
                if (found && best == 1) {
                    break;
                }
            }
            if (found) {
                swap_rows(t, bi);
                swap_cols(t, bj);
            }
            return found;
        };
        if (!place_min()) {
            break;
        }
        while (true) {
            bool dirty = false;
            const BigInt p = m(t, t);
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (m(i, t) == 0) {
                    continue;
                }
                const BigInt q = m(i, t) / p;
                if (q != 0) {
                    for (std::size_t c = t; c < cols; ++c) {
                        m(i, c) -= q * m(t, c);
                    }
                }
                dirty = dirty || m(i, t) != 0;
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (m(t, j) == 0) {
                    continue;
                }
                const BigInt q = m(t, j) / p;
                if (q != 0) {
                    for (std::size_t r = t; r < rows; ++r) {
                        m(r, j) -= q * m(r, t);
                    }
                }
                dirty = dirty || m(t, j) != 0;
            }
            if (dirty) {
                place_min();
                continue;
            }
            // Divisibility: fold a row with an indivisible entry into row t.
            bool folded = false;
            for (std::size_t i = t + 1; i < rows && !folded; ++i) {
                for (std::size_t j = t + 1; j < cols; ++j) {
                    if (m(i, j) % p != 0) {
                        for (std::size_t c = t; c < cols; ++c) {
                            m(t, c) += m(i, c);
                        }
                        folded = true;
                        break;
                    }
                }
            }
            if (!folded) {
                break;
            }
        }
        res.factors.push_back(abs(m(t, t)));
    }
    res.rank = res.factors.size();
    return res;
}

std::int64_t BettiResult::euler_characteristic() const
{
    std::int64_t s = 0;
    for (std::size_t k = 0; k < betti.size(); ++k) {
        s += (k % 2 == 0) ? betti[k] : -betti[k];
    }
    return s;
}

void to_json(nlohmann::json& j, const BettiResult& b)
{
    nlohmann::json tors = nlohmann::json::array();
    for (const auto& per_dim : b.torsion) {
        nlohmann::json d = nlohmann::json::array();
        for (const auto& f : per_dim) {
            d.push_back(f.str());
        }
        tors.push_back(std::move(d));
    }
    j = nlohmann::json{{"betti", b.betti}, {"torsion", tors}};
}

// ---------------------------------------------------------------------------
// Cubical complexes

CubicalComplex::CubicalComplex(std::vector<int> extent) : extent_(std::move(extent))
{
    if (extent_.empty() || static_cast<int>(extent_.size()) > kMaxDim) {
        throw ContractViolation("cubical complex dimension must lie in [1, 12]");
    }
    radix_.resize(extent_.size());
    // Mixed radix with 2*extent+1 digits per axis; axis 0 most significant.
    unsigned __int128 total = 1;
    for (std::size_t a = extent_.size(); a-- > 0;) {
        if (extent_[a] < 1) {
            throw ContractViolation("cubical complex extent must be positive");
        }
        radix_[a] = static_cast<std::uint64_t>(total);
        total *= static_cast<unsigned __int128>(2 * extent_[a] + 1);
        if (total > std::numeric_limits<std::uint64_t>::max()) {
            throw BudgetExceeded("cubical complex too large to encode");
        }
    }
}

CubicalComplex CubicalComplex::from_cubes(const Grid& grid, const CubeSet& cubes)
{
    std::vector<int> extent(grid.dimension());
    for (int a = 0; a < grid.dimension(); ++a) {
        extent[a] = static_cast<int>(grid.count(a));
    }
    CubicalComplex cx(extent);
    int idx[kMaxDim];
    for (CubeId c : cubes) {
        grid.multi_index(c, idx);
        cx.add_unit_cube(idx);
    }
    cx.normalize();
    return cx;
}

std::uint64_t CubicalComplex::encode(const int* d) const
{
    std::uint64_t k = 0;
    for (int a = 0; a < dimension(); ++a) {
        k += static_cast<std::uint64_t>(d[a]) * radix_[a];
    }
    return k;
}

void CubicalComplex::decode(std::uint64_t key, int* d) const
{
    for (int a = 0; a < dimension(); ++a) {
        d[a] = static_cast<int>(key / radix_[a]);
        key %= radix_[a];
    }
}

int CubicalComplex::cell_dimension(std::uint64_t key) const
{
    int d[kMaxDim];
    decode(key, d);
    int k = 0;
    for (int a = 0; a < dimension(); ++a) {
        k += d[a] & 1;
    }
    return k;
}

void CubicalComplex::add(const std::vector<int>& doubled)
{
    const int n = dimension();
    if (static_cast<int>(doubled.size()) != n) {
        throw ContractViolation("cell dimension mismatch");
    }
    int odd[kMaxDim];
    int nodd = 0;
    for (int a = 0; a < n; ++a) {
        if (doubled[a] < 0 || doubled[a] > 2 * extent_[a]) {
            throw ContractViolation("cell outside the complex extent");
        }
        if (doubled[a] & 1) {
            odd[nodd++] = a;
        }
    }
    // Each odd coordinate independently stays, drops or rises: 3^k faces.
    int cur[kMaxDim];
    std::copy(doubled.begin(), doubled.end(), cur);
    std::uint32_t total = 1;
    for (int i = 0; i < nodd; ++i) {
        total *= 3;
    }
    for (std::uint32_t code = 0; code < total; ++code) {
        std::uint32_t v = code;
        for (int i = 0; i < nodd; ++i) {
            const int choice = static_cast<int>(v % 3);
            v /= 3;
            cur[odd[i]] = doubled[odd[i]] + (choice == 0 ? 0 : (choice == 1 ? -1 : 1));
        }
        keys_.push_back(encode(cur));
    }
    sorted_ = false;
}

void CubicalComplex::add_unit_cube(const int* lower)
{
    std::vector<int> d(dimension());
    for (int a = 0; a < dimension(); ++a) {
        d[a] = 2 * lower[a] + 1;
    }
    add(d);
}

void CubicalComplex::normalize() const
{
    if (!sorted_) {
        std::sort(keys_.begin(), keys_.end());
        keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
        sorted_ = true;
    }
}

std::size_t CubicalComplex::size() const
{
    normalize();
    return keys_.size();
}

const std::vector<std::uint64_t>& CubicalComplex::cells() const
{
    normalize();
    return keys_;
}

bool CubicalComplex::contains(std::uint64_t key) const
{
    normalize();
    return std::binary_search(keys_.begin(), keys_.end(), key);
}

void CubicalComplex::boundary(std::uint64_t key, std::vector<std::pair<std::uint64_t, int>>& out) const
{
    out.clear();
    int d[kMaxDim];
    decode(key, d);
    int sign = 1;
    for (int a = 0; a < dimension(); ++a) {
        if (d[a] & 1) {
            out.emplace_back(key + radix_[a], sign);
            out.emplace_back(key - radix_[a], -sign);
            sign = -sign;
        }
    }
}

std::vector<std::size_t> CubicalComplex::counts_by_dimension() const
{
    std::vector<std::size_t> counts(dimension() + 1, 0);
    for (auto k : cells()) {
        ++counts[cell_dimension(k)];
    }
    return counts;
}

std::int64_t CubicalComplex::euler_characteristic() const
{
    const auto counts = counts_by_dimension();
    std::int64_t s = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        s += (k % 2 == 0) ? static_cast<std::int64_t>(counts[k]) : -static_cast<std::int64_t>(counts[k]);
    }
    return s;
}

bool CubicalComplex::is_closed() const
{
    std::vector<std::pair<std::uint64_t, int>> bd;
    for (auto k : cells()) {
        boundary(k, bd);
        for (const auto& [f, s] : bd) {
            if (!contains(f)) {
                return false;
            }
        }
    }
    return true;
}

bool CubicalComplex::contains_all(const CubicalComplex& sub) const
{
    if (sub.extent_ != extent_) {
        return false;
    }
    const auto& a = cells();
    const auto& b = sub.cells();
    return std::includes(a.begin(), a.end(), b.begin(), b.end());
}

bool CubicalComplex::boundary_squared_vanishes() const
{
    std::vector<std::pair<std::uint64_t, int>> bd;
    std::vector<std::pair<std::uint64_t, int>> bd2;
    std::vector<std::pair<std::uint64_t, int>> acc;
    for (auto k : cells()) {
        boundary(k, bd);
        acc.clear();
        for (const auto& [f, s] : bd) {
            boundary(f, bd2);
            for (const auto& [g, t] : bd2) {
                acc.emplace_back(g, s * t);
            }
        }
        std::sort(acc.begin(), acc.end());
        for (std::size_t i = 0; i < acc.size();) {
            long sum = 0;
            std::size_t j = i;
            for (; j < acc.size() && acc[j].first == acc[i].first; ++j) {
                sum += acc[j].second;
            }
            if (sum != 0) {
                return false;
            }
            i = j;
        }
    }
    return true;
}

void CubicalComplex::write_text(std::ostream& os) const
{
    int d[kMaxDim];
    for (auto k : cells()) {
        decode(k, d);
        for (int a = 0; a < dimension(); ++a) {
            if (a > 0) {
                os << 'x';
            }
            if (d[a] & 1) {
                os << '[' << d[a] / 2 << ',' << d[a] / 2 + 1 << ']';
            } else {
                os << '[' << d[a] / 2 << ']';
            }
        }
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Chain-complex reduction

namespace {

using Entry = std::pair<std::uint32_t, std::int64_t>;

// Sparse integer chain complex with boundary and coboundary lists, reduced
// by eliminating pairs with unit incidence.  Elimination preserves homology.
class Reducer {
public:
    Reducer(std::vector<int> dims, std::vector<std::vector<Entry>> bd) : dim_(std::move(dims)), bd_(std::move(bd))
    {
        const std::size_t n = dim_.size();
        alive_.assign(n, 1);
        cbd_.resize(n);
        for (std::uint32_t c = 0; c < n; ++c) {
            for (const auto& [f, v] : bd_[c]) {
                cbd_[f].emplace_back(c, v);
            }
        }
        for (auto& l : cbd_) {
            std::sort(l.begin(), l.end());
        }
        for (auto& l : bd_) {
            std::sort(l.begin(), l.end());
        }
    }

    void run()
    {
        for (std::uint32_t c = 0; c < dim_.size(); ++c) {
            queue_.push_back(c);
        }
        drain();
        // Remaining pairs need fill-in.  Each round ranks the unit pairs by
        // Markowitz cost and eliminates them in order, skipping stale ones.
        while (true) {
            struct Cand {
                std::size_t cost;
                std::uint32_t a;
                std::uint32_t b;
            };
            std::vector<Cand> cands;
            for (std::uint32_t a = 0; a < dim_.size(); ++a) {
                if (!alive_[a]) {
                    continue;
                }
                for (const auto& [b, v] : bd_[a]) {
                    if (unit(v)) {
                        cands.push_back({(cbd_[b].size() - 1) * (bd_[a].size() - 1), a, b});
                    }
                }
            }
            if (cands.empty()) {
                return;
            }
            std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.cost < y.cost; });
            bool progress = false;
            for (const auto& c : cands) {
                if (!alive_[c.a] || !alive_[c.b] || !unit(coef(bd_[c.a], c.b))) {
                    continue;
                }
                if (!eliminate(c.a, c.b)) {
                    continue;
                }
                progress = true;
                drain();
            }
            if (!progress) {
                // Only overflow-prone pairs remain; exact elimination takes over.
                return;
            }
        }
    }

    /// Surviving cells per dimension and their boundary matrices.
    BettiResult homology() const
    {
        int top = 0;
        for (std::uint32_t c = 0; c < dim_.size(); ++c) {
            if (alive_[c]) {
                top = std::max(top, dim_[c]);
            }
        }
        std::vector<std::vector<std::uint32_t>> by_dim(top + 2);
        std::vector<std::uint32_t> pos(dim_.size(), 0);
        for (std::uint32_t c = 0; c < dim_.size(); ++c) {
            if (alive_[c]) {
                pos[c] = static_cast<std::uint32_t>(by_dim[dim_[c]].size());
                by_dim[dim_[c]].push_back(c);
            }
        }
        // rank[k] and factors of the boundary from dimension k to k-1.
        std::vector<std::size_t> rank(top + 2, 0);
        std::vector<std::vector<BigInt>> factors(top + 2);
        for (int k = 1; k <= top; ++k) {
            if (by_dim[k].empty() || by_dim[k - 1].empty()) {
                continue;
            }
            IntMatrix m(by_dim[k - 1].size(), by_dim[k].size());
            bool nonzero = false;
            for (std::size_t j = 0; j < by_dim[k].size(); ++j) {
                for (const auto& [f, v] : bd_[by_dim[k][j]]) {
                    m(pos[f], j) = v;
                    nonzero = true;
                }
            }
            if (!nonzero) {
                continue;
            }
            SmithResult s = smith_normal_form(std::move(m));
            rank[k] = s.rank;
            factors[k] = std::move(s.factors);
        }
        BettiResult out;
        out.betti.assign(top + 1, 0);
        out.torsion.assign(top + 1, {});
        for (int k = 0; k <= top; ++k) {
            out.betti[k] = static_cast<std::int64_t>(by_dim[k].size()) - static_cast<std::int64_t>(rank[k]) -
                           static_cast<std::int64_t>(rank[k + 1]);
            for (const auto& f : factors[k + 1]) {
                if (f > 1) {
                    out.torsion[k].push_back(f);
                }
            }
        }
        while (!out.betti.empty() && out.betti.back() == 0 && out.torsion.back().empty()) {
            out.betti.pop_back();
            out.torsion.pop_back();
        }
        return out;
    }

private:
    static bool unit(std::int64_t v) { return v == 1 || v == -1; }

    void drain()
    {
        while (!queue_.empty()) {
            const std::uint32_t x = queue_.front();
            queue_.pop_front();
            if (!alive_[x]) {
                continue;
            }
            if (bd_[x].size() == 1 && unit(bd_[x][0].second)) {
                eliminate(x, bd_[x][0].first);
            } else if (cbd_[x].size() == 1 && unit(cbd_[x][0].second)) {
                eliminate(cbd_[x][0].first, x);
            }
        }
    }

    static std::int64_t coef(const std::vector<Entry>& l, std::uint32_t key)
    {
        auto it = std::lower_bound(l.begin(), l.end(), Entry{key, std::numeric_limits<std::int64_t>::min()});
        return (it != l.end() && it->first == key) ? it->second : 0;
    }

    static void set(std::vector<Entry>& l, std::uint32_t key, std::int64_t v)
    {
        auto it = std::lower_bound(l.begin(), l.end(), Entry{key, std::numeric_limits<std::int64_t>::min()});
        if (it != l.end() && it->first == key) {
            if (v == 0) {
                l.erase(it);
            } else {
                it->second = v;
            }
        } else if (v != 0) {
            l.insert(it, Entry{key, v});
        }
    }

    // Removes a and b, where b is a face of a with unit coefficient u.
    // Every other coface c of b gets boundary(c) -= <c,b> u boundary(a).
    bool eliminate(std::uint32_t a, std::uint32_t b)
    {
        const std::int64_t u = coef(bd_[a], b);
        const std::vector<Entry> bda = bd_[a];
        const std::vector<Entry> cbdb = cbd_[b];
        // Overflow check before touching anything.
        for (const auto& [c, k] : cbdb) {
            if (c == a) {
                continue;
            }
            for (const auto& [y, v] : bda) {
                std::int64_t prod = 0;
                std::int64_t diff = 0;
                if (__builtin_mul_overflow(k * u, v, &prod) || __builtin_sub_overflow(coef(bd_[c], y), prod, &diff)) {
                    return false;
                }
            }
        }
        for (const auto& [c, k] : cbdb) {
            if (c == a) {
                continue;
            }
            const std::int64_t f = k * u;
            for (const auto& [y, v] : bda) {
                const std::int64_t nv = coef(bd_[c], y) - f * v;
                set(bd_[c], y, nv);
                set(cbd_[y], c, nv);
                queue_.push_back(y);
            }
            queue_.push_back(c);
        }
        for (const auto& [y, v] : bd_[a]) {
            set(cbd_[y], a, 0);
            queue_.push_back(y);
        }
        for (const auto& [c, v] : cbd_[a]) {
            set(bd_[c], a, 0);
            queue_.push_back(c);
        }
        for (const auto& [y, v] : bd_[b]) {
            set(cbd_[y], b, 0);
            queue_.push_back(y);
        }
        for (const auto& [c, v] : cbd_[b]) {
            set(bd_[c], b, 0);
            queue_.push_back(c);
        }
        for (auto x : {a, b}) {
            bd_[x].clear();
            bd_[x].shrink_to_fit();
            cbd_[x].clear();
            cbd_[x].shrink_to_fit();
            alive_[x] = 0;
        }
        return true;
    }

    std::vector<int> dim_;
    std::vector<std::vector<Entry>> bd_;
    std::vector<std::vector<Entry>> cbd_;
    std::vector<char> alive_;
    std::deque<std::uint32_t> queue_;
};

// Homology of the chain complex spanned by `cells` (sorted keys of x's
// geometry); faces outside the list are treated as zero.
BettiResult reduce_cells(const CubicalComplex& x, const std::vector<std::uint64_t>& cells)
{
    if (cells.size() >= std::numeric_limits<std::uint32_t>::max()) {
        throw BudgetExceeded("complex too large");
    }
    std::vector<int> dims(cells.size());
    std::vector<std::vector<Entry>> bd(cells.size());
    std::vector<std::pair<std::uint64_t, int>> faces;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        dims[i] = x.cell_dimension(cells[i]);
        x.boundary(cells[i], faces);
        for (const auto& [f, s] : faces) {
            auto it = std::lower_bound(cells.begin(), cells.end(), f);
            if (it != cells.end() && *it == f) {
                bd[i].emplace_back(static_cast<std::uint32_t>(it - cells.begin()), s);
            }
        }
    }
    Reducer red(std::move(dims), std::move(bd));
    red.run();
    return red.homology();
}

// Chain complex of the cells of x not in a.
BettiResult reduce_and_compute(const CubicalComplex& x, const CubicalComplex* a)
{
    if (!a) {
        return reduce_cells(x, x.cells());
    }
    std::vector<std::uint64_t> cells;
    const auto& xs = x.cells();
    const auto& as = a->cells();
    std::set_difference(xs.begin(), xs.end(), as.begin(), as.end(), std::back_inserter(cells));
    return reduce_cells(x, cells);
}

}  // namespace

BettiResult homology(const CubicalComplex& x) { return reduce_and_compute(x, nullptr); }

BettiResult relative_homology(const CubicalComplex& x, const CubicalComplex& a)
{
    if (!a.is_closed()) {
        throw ContractViolation("relative homology needs a closed subcomplex");
    }
    if (!x.contains_all(a)) {
        throw ContractViolation("subcomplex is not contained in the complex");
    }
    return reduce_and_compute(x, &a);
}

BettiResult betti_of_cubeset(const CubeSet& cubes, const Grid& grid)
{
    if (cubes.empty()) {
        throw ContractViolation("betti_of_cubeset needs a non-empty cube set");
    }
    return homology(CubicalComplex::from_cubes(grid, cubes));
}

IndexPair build_index_pair(const MorseGraph& mg, int node, const TransitionGraph& g, const Grid& grid,
                           const IndexPairOptions& opts)
{
    if (node < 0 || static_cast<std::size_t>(node) >= mg.size()) {
        throw ContractViolation("Morse node index out of range");
    }
    if (g.num_cubes() != grid.size()) {
        throw ContractViolation("transition graph and grid disagree");
    }
    const CubeSet& s = mg.nodes[node].cubes;
    std::vector<bool> hit(grid.size(), false);
    bool escapes = false;
    for (CubeId c : s) {
        g.for_each_successor(c, [&](CubeId t) {
            if (t == g.out_node()) {
                escapes = true;
            } else {
                hit[t] = true;
            }
        });
    }
    if (escapes && !opts.clip_to_grid) {
        throw IsolationFailure("image of Morse node " + std::to_string(node) +
                               " leaves the grid; enlarge the box or increase depth");
    }
    CubeSet image;
    for (CubeId c = 0; c < grid.size(); ++c) {
        if (hit[c]) {
            image.push_back(c);
        }
    }
    IndexPair pair;
    std::set_union(s.begin(), s.end(), image.begin(), image.end(), std::back_inserter(pair.n));
    std::set_difference(image.begin(), image.end(), s.begin(), s.end(), std::back_inserter(pair.e));
    if (opts.require_isolation) {
        for (CubeId c : pair.e) {
            const auto other = mg.node_of(c);
            if (other && *other != node) {
                throw IsolationFailure("image of Morse node " + std::to_string(node) + " meets Morse node " +
                                       std::to_string(*other) + "; increase grid depth");
            }
        }
    }
    return pair;
}

BettiResult conley_index(const IndexPair& pair, const Grid& grid)
{
    if (pair.n.empty()) {
        throw ContractViolation("index pair with empty N");
    }
    std::vector<int> extent(grid.dimension());
    for (int a = 0; a < grid.dimension(); ++a) {
        extent[a] = static_cast<int>(grid.count(a));
    }
    const CubicalComplex geom(extent);
    const int n = grid.dimension();
    std::vector<bool> in_e(grid.size(), false);
    for (CubeId c : pair.e) {
        in_e[c] = true;
    }
    // Cells of |N \ E| that no cube of E contains span C(N) / C(E).
    auto touches_exit = [&](const int* d) {
        int lo[kMaxDim];
        int span[kMaxDim];
        for (int a = 0; a < n; ++a) {
            if (d[a] & 1) {
                lo[a] = (d[a] - 1) / 2;
                span[a] = 1;
            } else {
                lo[a] = std::max(0, d[a] / 2 - 1);
                span[a] = std::min(d[a] / 2, extent[a] - 1) - lo[a] + 1;
            }
        }
        int cur[kMaxDim];
        std::copy(lo, lo + n, cur);
        while (true) {
            if (in_e[grid.id(cur)]) {
                return true;
            }
            int a = n - 1;
            for (; a >= 0; --a) {
                if (++cur[a] < lo[a] + span[a]) {
                    break;
                }
                cur[a] = lo[a];
            }
            if (a < 0) {
                return false;
            }
        }
    };
    std::vector<std::uint64_t> cells;
    int idx[kMaxDim];
    int d[kMaxDim];
    std::uint32_t faces = 1;
    for (int a = 0; a < n; ++a) {
        faces *= 3;
    }
    for (CubeId c : pair.n) {
        if (in_e[c]) {
            continue;
        }
        grid.multi_index(c, idx);
        for (std::uint32_t code = 0; code < faces; ++code) {
            std::uint32_t v = code;
            for (int a = 0; a < n; ++a) {
                d[a] = 2 * idx[a] + static_cast<int>(v % 3);
                v /= 3;
            }
            if (!touches_exit(d)) {
                cells.push_back(geom.encode(d));
            }
        }
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return reduce_cells(geom, cells);
}

Polynomial conley_index_polynomial(const IndexPair& pair, const Grid& grid)
{
    return conley_index(pair, grid).poincare();
}

const char* to_string(IndexMethod m)
{
    return m == IndexMethod::LocalCollar ? "local-collar" : "dual-repeller";
}

BettiResult dual_repeller_index(const CubeSet& attractor, const Grid& grid)
{
    BettiResult out;
    if (attractor.empty()) {
        // H(X, empty) of the contractible grid box.
        out.betti = {1};
        out.torsion = {{}};
        return out;
    }
    const BettiResult a = betti_of_cubeset(attractor, grid);
    out.betti.assign(a.betti.size() + 1, 0);
    out.torsion.assign(a.betti.size() + 1, {});
    for (std::size_t k = 0; k < a.betti.size(); ++k) {
        out.betti[k + 1] = a.betti[k] - (k == 0 ? 1 : 0);
        out.torsion[k + 1] = a.torsion[k];
    }
    while (!out.betti.empty() && out.betti.back() == 0 && out.torsion.back().empty()) {
        out.betti.pop_back();
        out.torsion.pop_back();
    }
    return out;
}

NodeIndex node_conley_index(const MorseGraph& mg, int node, const TransitionGraph& g, const Grid& grid,
                            const IndexPairOptions& opts)
{
    NodeIndex out;
    try {
        const IndexPair pair = build_index_pair(mg, node, g, grid, opts);
        out.homology = conley_index(pair, grid);
        out.method = IndexMethod::LocalCollar;
    } catch (const IsolationFailure&) {
        std::vector<int> others;
        for (std::size_t j = 0; j < mg.size(); ++j) {
            if (static_cast<int>(j) == node) {
                continue;
            }
            if (!mg.reaches(node, static_cast<int>(j))) {
                throw;
            }
            others.push_back(static_cast<int>(j));
        }
        out.homology = dual_repeller_index(forward_closure(mg, g, others), grid);
        out.method = IndexMethod::DualRepeller;
    }
    out.polynomial = out.homology.poincare();
    return out;
}

}  // namespace conley
