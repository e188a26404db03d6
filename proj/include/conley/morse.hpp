#pragma once

// Morse graphs of transition graphs, attractor-repeller splits, Hausdorff
// distances, continuation across parameters and Morse equations.

#include "conley/cubical.hpp"
#include "conley/polynomial.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace conley {

/// Strongly connected components of a transition graph.  Component ids
/// follow completion order, so every edge runs from a component to one
/// with an equal or smaller id.
struct Condensation {
    std::vector<std::uint32_t> scc_of;   ///< per cube
    std::vector<std::uint32_t> offsets;  ///< members of component s: [offsets[s], offsets[s+1])
    std::vector<CubeId> members;

    std::size_t size() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
};

/// Iterative Tarjan.  out_node is not a vertex.
Condensation condense(const TransitionGraph& g);

struct MorseNode {
    CubeSet cubes;
    std::string label;  ///< empty when unlabeled
    std::uint32_t scc = 0;
};

struct MorseGraph {
    std::vector<MorseNode> nodes;
    /// (upper, lower): a path leads from `upper` down to `lower`.
    /// Transitive reduction of the reachability order.
    std::vector<std::pair<int, int>> edges;
    /// reach[i][j]: some path leads from node i to node j (i != j).
    std::vector<std::vector<char>> reach;
    std::shared_ptr<const Condensation> condensation;

    std::size_t size() const noexcept { return nodes.size(); }
    bool reaches(int i, int j) const { return reach[i][j] != 0; }
    /// Node whose cube set contains c.
    std::optional<int> node_of(CubeId c) const;
    /// Nodes reaching no other node.
    std::vector<int> minimal_nodes() const;
    /// Nodes reached by no other node.
    std::vector<int> maximal_nodes() const;
    std::optional<int> find_label(const std::string& label) const;
};

/// Recurrent components (more than one cube, or a self-loop) ordered by
/// completion; pruned cubes never qualify.
MorseGraph compute_morse_graph(const TransitionGraph& g);

/// Names the node holding the cube that contains each point.
void label_nodes(MorseGraph& mg, const Grid& grid, const std::vector<std::pair<std::string, StateVec>>& points);

/// Labels Lorenz equilibria: "origin", "C1", "C2".
void label_lorenz_nodes(MorseGraph& mg, const Grid& grid, const LorenzParams& p);

struct AttractorRepeller {
    CubeSet attractor;
    CubeSet repeller;
};

/// Every cube reachable from the given nodes.
CubeSet forward_closure(const MorseGraph& mg, const TransitionGraph& g, const std::vector<int>& nodes);

/// `selected` must be closed downward in the Morse order.  The attractor is
/// every cube reachable from a selected node; the repeller is every cube
/// from which an unselected node can be reached.
AttractorRepeller attractor_repeller_split(const MorseGraph& mg, const TransitionGraph& g,
                                           const std::vector<int>& selected);

/// Exact Hausdorff distance between finite point sets.  Grid-accelerated
/// nearest-neighbor search; returns the same double as the brute force.
double hausdorff_distance(const std::vector<StateVec>& a, const std::vector<StateVec>& b);
double hausdorff_distance_brute(const std::vector<StateVec>& a, const std::vector<StateVec>& b);

std::vector<StateVec> cube_centers(const Grid& grid, const CubeSet& cubes);

struct NodeMatch {
    int from = -1;  ///< node at the earlier parameter value
    int to = -1;    ///< node at the later one, -1 when unmatched
    std::size_t overlap = 0;
    double hausdorff = 0.0;
    bool ambiguous = false;
};

struct ContinuationTrack {
    std::vector<double> params;
    std::vector<MorseGraph> graphs;
    /// matches[i] pairs nodes of graphs[i] with nodes of graphs[i + 1].
    std::vector<std::vector<NodeMatch>> matches;
};

struct EngineConfig {
    std::vector<int> depths{7, 7, 7};
    OuterMapConfig map;
    int threads = 0;
};

/// Builds a Morse graph for each parameter on one shared grid and matches
/// nodes of neighbors by largest cube overlap, then smaller Hausdorff
/// distance between cube-center clouds.  Exact ties stay unmatched.
ContinuationTrack track_continuation(const std::function<std::unique_ptr<VectorField>(double)>& model_family,
                                     const std::vector<double>& params, const Grid& grid, const EngineConfig& cfg);

/// Matching step alone, for graphs built on the same grid.
std::vector<NodeMatch> match_nodes(const MorseGraph& a, const MorseGraph& b, const Grid& grid);

struct MorseEquationReport {
    Polynomial lhs;       ///< sum over Morse sets
    Polynomial rhs_base;  ///< index of the whole
    Polynomial q;
    Polynomial remainder;
    bool valid = false;  ///< exact division and q >= 0

    /// As in "2+t=1+(1+t)".
    std::string equation() const;
};

/// sum(per_node) = global + (1 + t) Q.
MorseEquationReport morse_equations(const std::vector<Polynomial>& per_node, const Polynomial& global);

struct TravelEquations {
    MorseEquationReport repeller_attractor;  ///< (K, C) before the transition
    MorseEquationReport middle;              ///< (K u C, R)
    MorseEquationReport attractor_repeller;  ///< (K, C) after the transition
};

/// Morse equations of an attractor-repeller transition inside a global
/// attractor, from the Betti numbers of K and C alone.
TravelEquations travel_equations(const std::vector<std::int64_t>& betti_k, const std::vector<std::int64_t>& betti_c);

/// 1 + t^(k-1) + t^k = 1 + (1 + t) t^(k-1).
MorseEquationReport pitchfork_equations(int k);

void to_json(nlohmann::json& j, const MorseEquationReport& r);

struct DotOptions {
    std::vector<std::optional<Polynomial>> indices;  ///< per node, optional
};
void write_dot(std::ostream& os, const MorseGraph& mg, const DotOptions& opts = {});
nlohmann::json morse_graph_json(const MorseGraph& mg, const std::vector<std::optional<Polynomial>>& indices = {});

}  // namespace conley
