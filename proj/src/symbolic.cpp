#include "conley/symbolic.hpp"
#include "conley/errors.hpp"

#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace conley {

const char* to_string(Direction d) { return d == Direction::Descending ? "descending" : "ascending"; }

std::string SymbolSequence::str() const
{
    std::string s;
    s.reserve(symbols.size());
    for (Symbol c : symbols) {
        s.push_back(static_cast<char>(c));
    }
    return s;
}

void SymbolConfig::validate() const
{
    integrator.validate();
    if (!(dead_band >= 0.0)) {
        throw ContractViolation("dead band must be non-negative");
    }
    if (!(seed_span > 0.0) || !(horizon > 0.0)) {
        throw ContractViolation("seed span and horizon must be positive");
    }
}

double section_level(const LorenzModel& model)
{
    const double r = model.params().r;
    if (!(r > 1.0)) {
        throw ContractViolation("the section z = r - 1 needs r > 1");
    }
    return r - 1.0;
}

namespace {

// Crossing scan shared by the plain and tangent integrations.
template <typename OnCross>
void scan_crossings(const VectorField& model, const StateVec& x0, double t_max, double level,
                    const IntegratorConfig& cfg, double min_time, OnCross&& on_cross)
{
    StateVec end;
    integrate_observed(
        model, x0, 0.0, t_max, cfg,
        [&](const Step& s) {
            const double g0 = s.x0[2] - level;
            const double g1 = s.x1[2] - level;
            const bool down = g0 > 0.0 && g1 <= 0.0;
            const bool up = g0 < 0.0 && g1 >= 0.0;
            if (!(down || up) || s.t1 <= min_time) {
                return true;
            }
            const PlaneCrossing pc = refine_plane_crossing(model, s, 2, level, cfg, 1e-12);
            return on_cross(pc);
        },
        end);
}

double z_rate(const LorenzModel& model, const StateVec& x)
{
    return x[0] * x[1] - model.params().b * x[2];
}

}  // namespace

std::vector<SectionCrossing> section_crossings(const LorenzModel& model, const StateVec& x0, double t_max,
                                               const IntegratorConfig& cfg, std::size_t max_descending)
{
    if (!(t_max > 0.0)) {
        throw ContractViolation("section_crossings needs t_max > 0");
    }
    const double level = section_level(model);
    std::vector<SectionCrossing> out;
    std::size_t descending = 0;
    if (max_descending == 0) {
        return out;
    }
    scan_crossings(model, x0, t_max, level, cfg, 0.0, [&](const PlaneCrossing& pc) {
        const double dz = z_rate(model, pc.state);
        if (dz == 0.0) {
            return true;
        }
        SectionCrossing c;
        c.time = pc.time;
        c.state = pc.state;
        c.state[2] = level;
        c.direction = dz < 0.0 ? Direction::Descending : Direction::Ascending;
        out.push_back(c);
        if (c.direction == Direction::Descending) {
            ++descending;
        }
        return descending < max_descending;
    });
    return out;
}

SymbolSequence encode_symbols(const std::vector<SectionCrossing>& crossings, bool swap, double dead_band)
{
    SymbolSequence seq;
    seq.symbols.reserve(crossings.size());
    seq.times.reserve(crossings.size());
    for (std::size_t i = 0; i < crossings.size(); ++i) {
        const auto& c = crossings[i];
        if (c.direction != Direction::Descending) {
            throw ContractViolation("encode_symbols accepts descending crossings only");
        }
        const double x = c.state[0];
        if (std::abs(x) <= dead_band) {
            throw AmbiguityError("crossing " + std::to_string(i) + " has |x| within the dead band", i);
        }
        const bool positive = x > 0.0;
        seq.symbols.push_back(positive != swap ? Symbol::S : Symbol::T);
        seq.times.push_back(c.time);
    }
    return seq;
}

StateVec lorenz_mirror(const StateVec& x)
{
    StateVec m = x;
    m[0] = -x[0];
    m[1] = -x[1];
    return m;
}

void to_json(nlohmann::json& j, const WordReport& w)
{
    j = nlohmann::json{{"length", w.length},
                       {"words_found", w.words_found},
                       {"total", w.total},
                       {"seeds", w.seeds},
                       {"uncoded", w.uncoded},
                       {"full_shift", w.full_shift()},
                       {"words", w.words},
                       {"note", "non-rigorous; sampled covering"}};
}

std::vector<StateVec> section_seeds(const LorenzModel& model, std::size_t count, double span)
{
    const double level = section_level(model);
    const auto& p = model.params();
    const double half = span * std::sqrt(p.b * (p.r - 1.0));
    std::vector<StateVec> seeds;
    seeds.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        // Base-2 radical inverse of i + 1.
        double u = 0.0;
        double f = 0.5;
        for (std::size_t k = i + 1; k > 0; k >>= 1, f *= 0.5) {
            if (k & 1u) {
                u += f;
            }
        }
        const double x = -half + 2.0 * half * u;
        seeds.push_back(make_state({x, x, level}));
    }
    return seeds;
}

WordReport verify_word_realization(const LorenzModel& model, int m, const SymbolConfig& cfg)
{
    cfg.validate();
    if (m < 0 || m > 8) {
        throw ContractViolation("word length must lie in [0, 8]");
    }
    WordReport rep;
    rep.length = m;
    rep.total = std::size_t{1} << m;
    const auto seeds = section_seeds(model, cfg.seeds, cfg.seed_span);
    rep.seeds = seeds.size();
    if (m == 0) {
        rep.words = {""};
        rep.words_found = 1;
        return rep;
    }
    // Word bits per seed; -1 marks an uncoded seed.
    std::vector<int> codes(seeds.size(), -1);
#ifdef _OPENMP
    const int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 64) num_threads(nthreads)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(seeds.size()); ++i) {
        try {
            auto cs = section_crossings(model, seeds[i], cfg.horizon, cfg.integrator, static_cast<std::size_t>(m));
            cs.erase(std::remove_if(cs.begin(), cs.end(),
                                    [](const SectionCrossing& c) { return c.direction != Direction::Descending; }),
                     cs.end());
            if (static_cast<int>(cs.size()) < m) {
                continue;
            }
            const SymbolSequence seq = encode_symbols(cs, cfg.swap, cfg.dead_band);
            int code = 0;
            for (int k = 0; k < m; ++k) {
                code = (code << 1) | (seq.symbols[k] == Symbol::T ? 1 : 0);
            }
            codes[i] = code;
        } catch (const NumericalFailure&) {
            // Uncodable seed: lands on the stable set of the origin or diverges.
        }
    }
    std::set<int> seen;
    for (int c : codes) {
        if (c < 0) {
            ++rep.uncoded;
        } else {
            seen.insert(c);
        }
    }
    for (int c : seen) {
        std::string w(static_cast<std::size_t>(m), 'S');
        for (int k = 0; k < m; ++k) {
            if ((c >> (m - 1 - k)) & 1) {
                w[k] = 'T';
            }
        }
        rep.words.push_back(w);
    }
    std::sort(rep.words.begin(), rep.words.end());
    rep.words_found = rep.words.size();
    return rep;
}

void to_json(nlohmann::json& j, const PeriodicOrbitResult& p)
{
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& q : p.points) {
        pts.push_back({q[0], q[1], q[2]});
    }
    j = nlohmann::json{{"code", p.code},
                       {"period", p.period},
                       {"point", {p.point[0], p.point[1], p.point[2]}},
                       {"points", pts},
                       {"residual", p.residual},
                       {"iterations", p.iterations}};
}

ReturnHit return_map(const LorenzModel& model, const StateVec& p, const IntegratorConfig& cfg, double horizon)
{
    const double level = section_level(model);
    TangentModel tm(model, 3);
    StateVec s0 = StateVec::Zero(12);
    s0.head(3) = p.head(3);
    s0[2] = level;
    s0[3] = 1.0;
    s0[7] = 1.0;
    s0[11] = 1.0;
    bool found = false;
    ReturnHit hit;
    scan_crossings(tm, s0, horizon, level, cfg, 1e-6, [&](const PlaneCrossing& pc) {
        const StateVec x = pc.state.head(3);
        if (!(z_rate(model, x) < 0.0)) {
            return true;
        }
        Eigen::Matrix3d phi;
        for (int c = 0; c < 3; ++c) {
            for (int r = 0; r < 3; ++r) {
                phi(r, c) = pc.state[3 * (1 + c) + r];
            }
        }
        const StateVec f = eval_field(model, x);
        Eigen::Matrix3d proj = Eigen::Matrix3d::Identity();
        for (int r = 0; r < 3; ++r) {
            proj(r, 2) -= f[r] / f[2];
        }
        const Eigen::Matrix3d d = proj * phi;
        hit.point = x;
        hit.point[2] = level;
        hit.time = pc.time;
        hit.jacobian = d.topLeftCorner<2, 2>();
        found = true;
        return false;
    });
    if (!found) {
        throw NoCrossingError("no descending return within the horizon");
    }
    return hit;
}

namespace {

bool symbol_matches(const StateVec& p, char want, const SymbolConfig& cfg)
{
    if (std::abs(p[0]) <= cfg.dead_band) {
        return false;
    }
    const bool s = (p[0] > 0.0) != cfg.swap;
    return (want == 'S') == s;
}

struct Guess {
    double score;
    std::vector<StateVec> points;
};

// Windows of n consecutive descending crossings along seed orbits whose
// symbols spell the code, ranked by closing distance relative to their
// distance from the nearest equilibrium off the origin.
std::vector<Guess> periodic_guesses(const LorenzModel& model, const std::string& code, const SymbolConfig& cfg)
{
    const std::size_t n = code.size();
    const auto& p = model.params();
    const double e = std::sqrt(p.b * (p.r - 1.0));
    const StateVec c1 = make_state({e, e, p.r - 1.0});
    const StateVec c2 = lorenz_mirror(c1);
    const std::size_t per_seed = n + 12;
    const auto seeds = section_seeds(model, std::min<std::size_t>(cfg.seeds, 4000), cfg.seed_span);
    std::vector<std::vector<Guess>> found(seeds.size());
#ifdef _OPENMP
    const int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(seeds.size()); ++i) {
        std::vector<SectionCrossing> cs;
        try {
            cs = section_crossings(model, seeds[i], cfg.horizon, cfg.integrator, per_seed);
        } catch (const NumericalFailure&) {
            continue;
        }
        cs.erase(std::remove_if(cs.begin(), cs.end(),
                                [](const SectionCrossing& c) { return c.direction != Direction::Descending; }),
                 cs.end());
        for (std::size_t k = 0; k + n < cs.size(); ++k) {
            bool ok = true;
            for (std::size_t j = 0; j < n && ok; ++j) {
                ok = symbol_matches(cs[k + j].state, code[j], cfg);
            }
            if (!ok) {
                continue;
            }
            const double gap = (cs[k + n].state - cs[k].state).norm();
            const double dist = std::min((cs[k].state - c1).norm(), (cs[k].state - c2).norm());
            Guess g{gap / std::max(dist, 1e-12), {}};
            for (std::size_t j = 0; j < n; ++j) {
                g.points.push_back(cs[k + j].state);
            }
            found[i].push_back(std::move(g));
        }
    }
    std::vector<Guess> all;
    for (auto& v : found) {
        for (auto& g : v) {
            all.push_back(std::move(g));
        }
    }
    std::stable_sort(all.begin(), all.end(), [](const Guess& a, const Guess& b) { return a.score < b.score; });
    return all;
}

}  // namespace

PeriodicOrbitResult find_periodic_orbit(const LorenzModel& model, const std::string& code, const SymbolConfig& cfg)
{
    cfg.validate();
    if (code.empty()) {
        throw ContractViolation("periodic orbit code must be non-empty");
    }
    for (char c : code) {
        if (c != 'S' && c != 'T') {
            throw ContractViolation("periodic orbit code uses the alphabet {S, T}");
        }
    }
    const double level = section_level(model);
    const std::size_t n = code.size();
    const int dim = static_cast<int>(2 * n);
    constexpr int kMaxIterations = 100;
    constexpr int kAttempts = 12;

    auto evaluate = [&](const Eigen::VectorXd& u, std::vector<ReturnHit>& hits, Eigen::VectorXd& res) {
        hits.resize(n);
        res.resize(dim);
        for (std::size_t i = 0; i < n; ++i) {
            const StateVec pi = make_state({u[2 * i], u[2 * i + 1], level});
            hits[i] = return_map(model, pi, cfg.integrator, cfg.horizon);
            const std::size_t j = (i + 1) % n;
            res[2 * i] = hits[i].point[0] - u[2 * j];
            res[2 * i + 1] = hits[i].point[1] - u[2 * j + 1];
        }
    };

    const auto guesses = periodic_guesses(model, code, cfg);
    int attempts = 0;
    for (const auto& g : guesses) {
        if (attempts++ >= kAttempts) {
            break;
        }
        Eigen::VectorXd u(dim);
        for (std::size_t i = 0; i < n; ++i) {
            u[2 * i] = g.points[i][0];
            u[2 * i + 1] = g.points[i][1];
        }
        try {
            std::vector<ReturnHit> hits;
            Eigen::VectorXd res;
            evaluate(u, hits, res);
            int it = 0;
            for (; it < kMaxIterations && res.norm() > 1e-12; ++it) {
                Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
                for (std::size_t i = 0; i < n; ++i) {
                    const std::size_t j = (i + 1) % n;
                    jac.block<2, 2>(2 * i, 2 * i) += hits[i].jacobian;
                    jac.block<2, 2>(2 * i, 2 * j) -= Eigen::Matrix2d::Identity();
                }
                const Eigen::VectorXd step = jac.fullPivLu().solve(-res);
                double lambda = 1.0;
                bool accepted = false;
                for (int h = 0; h < 20; ++h, lambda *= 0.5) {
                    std::vector<ReturnHit> trial_hits;
                    Eigen::VectorXd trial_res;
                    const Eigen::VectorXd trial = u + lambda * step;
                    try {
                        evaluate(trial, trial_hits, trial_res);
                    } catch (const NumericalFailure&) {
                        continue;
                    }
                    if (trial_res.norm() < res.norm()) {
                        u = trial;
                        hits = std::move(trial_hits);
                        res = std::move(trial_res);
                        accepted = true;
                        break;
                    }
                }
                if (!accepted) {
                    break;
                }
            }
            if (!(res.norm() <= 1e-9)) {
                continue;
            }
            PeriodicOrbitResult out;
            out.code = code;
            out.iterations = it;
            bool symbols_ok = true;
            for (std::size_t i = 0; i < n; ++i) {
                const StateVec pi = make_state({u[2 * i], u[2 * i + 1], level});
                symbols_ok = symbols_ok && symbol_matches(pi, code[i], cfg) && z_rate(model, pi) < 0.0;
                out.points.push_back(pi);
                out.period += hits[i].time;
            }
            if (!symbols_ok) {
                continue;
            }
            out.point = out.points.front();
            // Closing error of the composed return map from the first point.
            StateVec q = out.point;
            for (std::size_t i = 0; i < n; ++i) {
                q = return_map(model, q, cfg.integrator, cfg.horizon).point;
            }
            out.residual = (q - out.point).norm();
            return out;
        } catch (const NumericalFailure&) {
            continue;
        }
    }
    throw NotFoundError("no periodic orbit with code " + code + " found from " + std::to_string(attempts) +
                        " guesses");
}

LyapunovResult largest_lyapunov(const VectorField& model, const StateVec& x0, double t_max, const LyapunovConfig& cfg)
{
    if (!(t_max >= 100.0)) {
        throw ContractViolation("largest_lyapunov needs t_max >= 100");
    }
    if (!(cfg.segment > 0.0) || !(cfg.transient >= 0.0) || !(cfg.transient < t_max)) {
        throw ContractViolation("invalid Lyapunov segment or transient");
    }
    const int n = model.dimension();
    TangentModel tm(model, 1);
    StateVec s(2 * n);
    s.head(n) = x0;
    s.tail(n) = StateVec::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double t = 0.0;
    std::vector<double> rates;
    while (t < t_max - 1e-12) {
        const double t1 = std::min(t + cfg.segment, t_max);
        StateVec next;
        integrate_observed(tm, s, t, t1, cfg.integrator, nullptr, next);
        const double norm = next.tail(n).norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw IntegrationFailure("tangent vector degenerated", t1,
                                     std::vector<double>(next.data(), next.data() + next.size()));
        }
        next.tail(n) /= norm;
        if (t >= cfg.transient) {
            rates.push_back(std::log(norm) / (t1 - t));
        }
        s = next;
        t = t1;
    }
    LyapunovResult out;
    out.segments = rates.size();
    if (rates.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double r : rates) {
        sum += r;
    }
    out.exponent = sum / static_cast<double>(rates.size());
    if (rates.size() > 1) {
        double var = 0.0;
        for (double r : rates) {
            var += (r - out.exponent) * (r - out.exponent);
        }
        var /= static_cast<double>(rates.size() - 1);
        out.std_error = std::sqrt(var / static_cast<double>(rates.size()));
    }
    return out;
}

void write_crossings_csv(std::ostream& os, const std::vector<SectionCrossing>& crossings, bool swap,
                         double dead_band)
{
    os << "t,x,y,z,direction,symbol\n";
    os.precision(17);
    for (const auto& c : crossings) {
        std::string sym;
        if (c.direction == Direction::Descending && std::abs(c.state[0]) > dead_band) {
            sym = ((c.state[0] > 0.0) != swap) ? "S" : "T";
        }
        os << c.time << ',' << c.state[0] << ',' << c.state[1] << ',' << c.state[2] << ',' << to_string(c.direction)
           << ',' << sym << '\n';
    }
    if (!os) {
        throw IoError("failed writing crossings CSV");
    }
}

}  // namespace conley
