#pragma once

// End-to-end pipelines shared by the command-line tool and the reproduction
// report: Morse graphs with indices, the pitchfork normal-form demo, the
// strange-set sweep and the homology self-check.

#include "conley/homology.hpp"
#include "conley/morse.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace conley {

struct MorseRun {
    Grid grid;
    MorseGraph graph;
    /// Per node; empty when no isolating pair was found.
    std::vector<std::optional<Polynomial>> indices;
    /// Per node: "local-collar", "dual-repeller", "skipped" or the error.
    std::vector<std::string> methods;
    std::string digest;
    std::size_t edges = 0;

    /// Index strings, "?" where missing.
    std::vector<std::string> index_strings() const;
    /// Morse equation against a global index of 1; empty when an index is
    /// missing.
    std::optional<MorseEquationReport> equation() const;
};

using NodeLabeler = std::function<void(MorseGraph&, const Grid&)>;

MorseRun run_morse(const VectorField& model, Grid grid, const OuterMapConfig& cfg, int threads,
                   const NodeLabeler& label = {}, bool with_indices = true);

/// Trapping-box grid with labels origin, C1, C2.
MorseRun run_lorenz_morse(double r, const std::vector<int>& depths, double tau, int threads,
                          std::size_t budget = kDefaultCubeBudget);

nlohmann::json morse_run_json(const MorseRun& run);

/// Diameter of the union of the closed cubes.
double cubeset_diameter(const Grid& grid, const CubeSet& cubes);

struct PitchforkDemo {
    double lambda = 0.0;
    double tau = 0.0;
    std::vector<int> depths;
    MorseRun run;
    /// Union of the minimal nodes.
    CubeSet attractor;
    BettiResult attractor_betti;
    double attractor_diameter = 0.0;
    std::optional<MorseEquationReport> equation;
    std::string digest;
};

/// n = 3, k = 2 normal form on its trapping box; tau = tau_scale / lambda,
/// the time a radial solution needs to cover a fixed fraction of its way.
PitchforkDemo run_pitchfork_demo(double lambda, int threads, const std::vector<int>& depths = {6, 6, 4},
                                 double tau_scale = 2.0);

nlohmann::json pitchfork_demo_json(const PitchforkDemo& d);

struct StrangeSweep {
    std::vector<double> params;
    double reference = 0.0;
    /// d_H(node at params[i], node at reference).
    std::vector<double> distances;
    std::vector<std::size_t> cube_counts;
    std::size_t reference_cubes = 0;
    std::vector<std::string> digests;
};

/// Cube sets of the Morse node holding the origin, all on the trapping-box
/// grid of the largest r.  Throws NotFoundError when the origin lies in no
/// Morse node.
StrangeSweep run_strange_sweep(const std::vector<double>& params, double reference, const std::vector<int>& depths,
                               double tau, int threads);

struct HomologySelfCheck {
    BettiResult figure_eight;
    BettiResult saddle_pair;
    std::size_t snf_trials = 0;
    std::size_t snf_agreements = 0;
    bool boundary_squared_zero = false;
    bool euler_identity = false;
};

/// Invariant factors from gcds of k x k minors.  Exponential; small
/// matrices only.
std::vector<BigInt> determinantal_factors(const IntMatrix& m);

HomologySelfCheck homology_self_check(std::size_t snf_trials, std::uint64_t seed);

}  // namespace conley
