#pragma once

// Poincare section on z = r - 1, S/T coding of descending crossings, word
// realization counts, periodic orbits of the return map and a largest
// Lyapunov exponent estimate.

#include "conley/flow.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace conley {

enum class Direction { Descending, Ascending };

const char* to_string(Direction d);

struct SectionCrossing {
    double time = 0.0;
    StateVec state;
    Direction direction = Direction::Descending;
};

/// S marks x > 0 at a descending crossing unless the orientation is swapped.
enum class Symbol : char { S = 'S', T = 'T' };

struct SymbolSequence {
    std::vector<Symbol> symbols;
    std::vector<double> times;

    std::size_t size() const noexcept { return symbols.size(); }
    std::string str() const;
};

struct SymbolConfig {
    IntegratorConfig integrator = IntegratorConfig::precise(1e-10);
    /// Maps x > 0 to T instead of S.
    bool swap = false;
    double dead_band = 1e-9;
    /// Seeds for word realization and periodic-orbit guesses.
    std::size_t seeds = 100000;
    /// Seed line half-width in units of the x coordinate of C1.  Orbits
    /// shadowing the strange set pass close to the z axis.
    double seed_span = 0.01;
    /// Per-seed integration horizon.
    double horizon = 60.0;
    int threads = 0;

    void validate() const;
};

/// The section level r - 1.
double section_level(const LorenzModel& model);

/// Transversal crossings of z = r - 1 on [0, t_max], refined to time
/// tolerance 1e-12.  Stops early after `max_descending` descending ones.
std::vector<SectionCrossing> section_crossings(const LorenzModel& model, const StateVec& x0, double t_max,
                                               const IntegratorConfig& cfg,
                                               std::size_t max_descending = static_cast<std::size_t>(-1));

/// Requires descending crossings only.  Throws AmbiguityError when
/// |x| <= dead_band.
SymbolSequence encode_symbols(const std::vector<SectionCrossing>& crossings, bool swap = false,
                              double dead_band = 1e-9);

/// (x, y, z) -> (-x, -y, z).
StateVec lorenz_mirror(const StateVec& x);

struct WordReport {
    int length = 0;
    std::size_t words_found = 0;
    std::size_t total = 0;
    std::size_t seeds = 0;
    /// Seeds that did not produce `length` codable crossings.
    std::size_t uncoded = 0;
    std::vector<std::string> words;

    bool full_shift() const noexcept { return words_found == total; }
};

void to_json(nlohmann::json& j, const WordReport& w);

/// Seeds on the segment {y = x, z = r - 1, |x| <= seed_span * x(C1)} in van
/// der Corput order, so a run with more seeds extends one with fewer.
std::vector<StateVec> section_seeds(const LorenzModel& model, std::size_t count, double span);

/// Distinct words of the first m symbols over all seeds (m <= 8).
WordReport verify_word_realization(const LorenzModel& model, int m, const SymbolConfig& cfg);

struct PeriodicOrbitResult {
    std::string code;
    double period = 0.0;
    /// Section point carrying code[0].
    StateVec point;
    /// One section point per symbol.
    std::vector<StateVec> points;
    double residual = 0.0;
    int iterations = 0;
};

void to_json(nlohmann::json& j, const PeriodicOrbitResult& p);

/// Next descending crossing after leaving `p`, with the 2x2 derivative of
/// the return map in section coordinates (x, y).
struct ReturnHit {
    StateVec point;
    double time = 0.0;
    Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
};

ReturnHit return_map(const LorenzModel& model, const StateVec& p, const IntegratorConfig& cfg, double horizon = 60.0);

/// Multiple-shooting Newton on the return map, one unknown section point
/// per symbol.  Throws NotFoundError after 100 iterations or when no seed
/// yields a usable guess.
PeriodicOrbitResult find_periodic_orbit(const LorenzModel& model, const std::string& code, const SymbolConfig& cfg);

struct LyapunovConfig {
    IntegratorConfig integrator = IntegratorConfig::precise(1e-10);
    /// Renormalization interval.
    double segment = 1.0;
    /// Discarded initial time.
    double transient = 10.0;
};

struct LyapunovResult {
    double exponent = 0.0;
    /// Standard error of the per-segment growth rates.
    double std_error = 0.0;
    std::size_t segments = 0;
};

/// Benettin estimate of the largest exponent on [transient, t_max].
LyapunovResult largest_lyapunov(const VectorField& model, const StateVec& x0, double t_max,
                                const LyapunovConfig& cfg = {});

/// Columns t, x, y, z, direction, symbol (blank for ascending crossings).
void write_crossings_csv(std::ostream& os, const std::vector<SectionCrossing>& crossings, bool swap = false,
                         double dead_band = 1e-9);

}  // namespace conley
