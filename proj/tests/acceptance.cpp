// Acceptance run: every reproduction claim at its stated tolerance, each
// re-checked here against oracles that do not go through the library, with
// one PASS/FAIL line per criterion.

#include "conley/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

using nlohmann::json;

namespace {

// Integer polynomials in t, as written in the report: "1+2t+2t^2",
// "1+(1+t)(2+2t)", "t^2".  Products are juxtaposition.
class PolyExpr {
public:
    explicit PolyExpr(std::string s) : s_(std::move(s)) {}

    std::int64_t eval(std::int64_t t)
    {
        t_ = t;
        pos_ = 0;
        const std::int64_t v = sum();
        if (pos_ != s_.size()) {
            throw std::runtime_error("trailing input in '" + s_ + "'");
        }
        return v;
    }

private:
    std::int64_t sum()
    {
        std::int64_t v = product();
        while (pos_ < s_.size() && s_[pos_] == '+') {
            ++pos_;
            v += product();
        }
        return v;
    }

    std::int64_t product()
    {
        std::int64_t v = factor();
        while (pos_ < s_.size() && (s_[pos_] == '(' || s_[pos_] == 't' || std::isdigit(s_[pos_]))) {
            v *= factor();
        }
        return v;
    }

    std::int64_t number()
    {
        std::int64_t v = 0;
        if (pos_ >= s_.size() || !std::isdigit(s_[pos_])) {
            throw std::runtime_error("expected a digit in '" + s_ + "'");
        }
        while (pos_ < s_.size() && std::isdigit(s_[pos_])) {
            v = 10 * v + (s_[pos_++] - '0');
        }
        return v;
    }

    std::int64_t factor()
    {
        if (pos_ >= s_.size()) {
            throw std::runtime_error("unexpected end of '" + s_ + "'");
        }
        if (s_[pos_] == '(') {
            ++pos_;
            const std::int64_t v = sum();
            if (pos_ >= s_.size() || s_[pos_] != ')') {
                throw std::runtime_error("unbalanced '" + s_ + "'");
            }
            ++pos_;
            return v;
        }
        if (s_[pos_] == 't') {
            ++pos_;
            std::int64_t e = 1;
            if (pos_ < s_.size() && s_[pos_] == '^') {
                ++pos_;
                e = number();
            }
            std::int64_t v = 1;
            for (std::int64_t i = 0; i < e; ++i) {
                v *= t_;
            }
            return v;
        }
        return number();
    }

    std::string s_;
    std::size_t pos_ = 0;
    std::int64_t t_ = 0;
};

const std::vector<std::int64_t> kSamples{-3, -1, 0, 1, 2, 5, 11};

bool same_polynomial(const std::string& a, const std::string& b)
{
    PolyExpr pa(a);
    PolyExpr pb(b);
    return std::all_of(kSamples.begin(), kSamples.end(), [&](std::int64_t t) { return pa.eval(t) == pb.eval(t); });
}

std::int64_t eval_at(const std::string& s, std::int64_t t) { return PolyExpr(s).eval(t); }

// "L=R" with L the sum of the node indices, R = 1 + (1+t)Q, Q >= 0
// coefficientwise and the identity L = R.
bool morse_equation_holds(const std::string& eq, const std::vector<std::string>& indices, std::string& why)
{
    const auto split = eq.find('=');
    if (split == std::string::npos) {
        why = "no '=' in " + eq;
        return false;
    }
    const std::string lhs = eq.substr(0, split);
    const std::string rhs = eq.substr(split + 1);
    if (!same_polynomial(lhs, rhs)) {
        why = "sides differ: " + eq;
        return false;
    }
    for (std::int64_t t : kSamples) {
        std::int64_t total = 0;
        for (const auto& p : indices) {
            total += eval_at(p, t);
        }
        if (total != eval_at(lhs, t)) {
            why = "left side is not the sum of the node indices";
            return false;
        }
    }
    if (rhs != "1" && rhs.rfind("1+(1+t)", 0) != 0) {
        why = "right side is not 1+(1+t)Q";
        return false;
    }
    // Q has non-negative coefficients: Q(t) for t >= 0 recovered by division.
    for (std::int64_t t : {0, 1, 2, 5}) {
        if ((eval_at(rhs, t) - 1) % (1 + t) != 0 || eval_at(rhs, t) - 1 < 0) {
            why = "Q is not a polynomial with non-negative values";
            return false;
        }
    }
    return true;
}

std::vector<std::string> strings(const json& j)
{
    std::vector<std::string> out;
    for (const auto& v : j) {
        out.push_back(v.get<std::string>());
    }
    return out;
}

bool same_multiset(std::vector<std::string> a, std::vector<std::string> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + (what.size() > 120 ? what.substr(0, 117) + "..." : what);
        }
    }
};

using Checker = std::function<void(const json& computed, Verdict& v)>;

double lorenz_residual(double x, double y, double z, double r)
{
    const double sigma = 10.0;
    const double b = 8.0 / 3.0;
    return std::sqrt(std::pow(sigma * (y - x), 2) + std::pow(r * x - y - x * z, 2) + std::pow(x * y - b * z, 2));
}

std::map<std::string, Checker> checkers()
{
    std::map<std::string, Checker> m;

    m["equilibria-r28"] = [](const json& c, Verdict& v) {
        const double b = 8.0 / 3.0;
        const double r = 28.0;
        const double s = std::sqrt(b * (r - 1.0));
        v.require(std::abs(s * s - 72.0) < 1e-12, "closed form sqrt(b(r-1)) is not sqrt(72)");
        const auto& eqs = c.at("equilibria");
        v.require(eqs.size() == 2, "expected C1 and C2");
        for (const auto& e : eqs) {
            const auto& x = e.at("state");
            const double sign = x[0].get<double>() > 0.0 ? 1.0 : -1.0;
            v.require(std::abs(x[0].get<double>() - sign * s) <= 1e-8 &&
                          std::abs(x[1].get<double>() - sign * s) <= 1e-8 &&
                          std::abs(x[2].get<double>() - (r - 1.0)) <= 1e-8,
                      "coordinates off by more than 1e-8");
            v.require(e.at("residual").get<double>() <= 1e-12, "reported Newton residual above 1e-12");
            v.require(lorenz_residual(x[0], x[1], x[2], r) <= 1e-12, "field residual above 1e-12");
        }
    };

    m["pitchfork-threshold"] = [](const json& c, Verdict& v) {
        // det of the origin linearization, sigma b (1 - r), vanishes at r = 1.
        v.require(std::abs(c.at("r_star").get<double>() - 1.0) <= 1e-8, "|r_star - 1| > 1e-8");
    };

    m["hopf-threshold"] = [](const json& c, Verdict& v) {
        const double sigma = 10.0;
        const double b = 8.0 / 3.0;
        const double routh_hurwitz = sigma * (sigma + b + 3.0) / (sigma - b - 1.0);
        v.require(std::abs(routh_hurwitz - 470.0 / 19.0) < 1e-12, "Routh-Hurwitz value is not 470/19");
        const double r = c.at("r_star").get<double>();
        v.require(std::abs(r - routh_hurwitz) <= 1e-6, "r_star differs from 470/19 by more than 1e-6");
        v.require(std::abs(r - 24.74) <= 0.005, "r_star differs from 24.74 by more than 0.005");
    };

    m["homoclinic-threshold"] = [](const json& c, Verdict& v) {
        const double lo = c.at("bracket")[0].get<double>();
        const double hi = c.at("bracket")[1].get<double>();
        v.require(lo >= 13.8 && hi <= 14.1, "bracket leaves [13.8, 14.1]");
        v.require(hi - lo <= 1e-3, "bracket wider than 1e-3");
        // 13.926... : the bracket meets [13.926, 13.927).
        v.require(lo < 13.927 && hi >= 13.926, "bracket misses 13.926...");
    };

    m["heteroclinic-threshold"] = [](const json& c, Verdict& v) {
        const double r = c.at("r_star").get<double>();
        v.require(r >= 23.9 && r <= 24.2, "r_star outside [23.9, 24.2]");
        v.require(24.06 >= 23.9 && 24.06 <= 24.2, "24.06 outside [23.9, 24.2]");
    };

    auto morse_check = [](std::size_t nodes, std::vector<std::string> want, std::string equation) {
        return [=](const json& c, Verdict& v) {
            v.require(c.at("nodes").get<std::size_t>() == nodes, "expected " + std::to_string(nodes) + " nodes, got " +
                                                                     c.at("nodes").dump());
            const auto got = strings(c.at("indices"));
            v.require(same_multiset(got, want), "indices " + c.at("indices").dump());
            const auto& eq = c.at("morse_equation");
            v.require(eq.at("equation").is_string() && eq.at("equation") == equation,
                      "equation " + eq.at("equation").dump());
            std::string why;
            v.require(eq.at("equation").is_string() && eq.at("valid").get<bool>() &&
                          morse_equation_holds(eq.at("equation").get<std::string>(), got, why),
                      "equation does not hold" + (why.empty() ? "" : ": " + why));
        };
    };
    m["morse-graph-r2"] = morse_check(3, {"t", "1", "1"}, "2+t=1+(1+t)");
    m["morse-graph-r28"] = morse_check(3, {"1+2t", "t^2", "t^2"}, "1+2t+2t^2=1+(1+t)2t");

    m["strange-set-index-r15"] = [](const json& c, Verdict& v) {
        v.require(c.at("origin_node_index") == "t", "origin node index " + c.at("origin_node_index").dump());
    };

    m["transition-equations"] = [](const json& c, Verdict& v) {
        const std::vector<std::string> stages{"2+t=1+(1+t)", "3+4t+2t^2=1+(1+t)(2+2t)", "1+2t+2t^2=1+(1+t)2t"};
        const std::vector<std::string> qs{"1", "2+2t", "2t"};
        const std::vector<std::string> keys{"stage1", "stage2", "stage3"};
        for (std::size_t i = 0; i < 3; ++i) {
            v.require(c.at(keys[i]) == stages[i], keys[i] + " is " + c.at(keys[i]).dump());
            const auto split = stages[i].find('=');
            v.require(same_polynomial(stages[i].substr(0, split), stages[i].substr(split + 1)),
                      keys[i] + " is not an identity");
            v.require(same_polynomial(c.at("q")[i].get<std::string>(), qs[i]), "Q of " + keys[i]);
            v.require(same_polynomial(stages[i].substr(0, split), "1+(1+t)(" + qs[i] + ")"),
                      keys[i] + " is not 1+(1+t)Q");
        }
    };

    m["pitchfork-demo"] = [](const json& c, Verdict& v) {
        const auto& b = c.at("attractor_betti");
        auto at = [&](std::size_t k) { return k < b.size() ? b[k].get<std::int64_t>() : 0; };
        v.require(at(0) == 1 && at(1) == 1 && at(2) == 0, "attractor Betti " + b.dump());
        v.require(c.at("equation") == "1+t+t^2=1+(1+t)t", "equation " + c.at("equation").dump());
        std::string why;
        v.require(c.at("equation").is_string() &&
                      morse_equation_holds(c.at("equation").get<std::string>(), strings(c.at("indices")), why),
                  "equation does not hold" + (why.empty() ? "" : ": " + why));
        v.require(c.at("diameter_0.01").get<double>() < c.at("diameter_0.25").get<double>(),
                  "attractor does not shrink");
    };

    m["symbolic-full-shift"] = [](const json& c, Verdict& v) {
        v.require(c.at("r15_words_len5") == 32, "r=15 length-5 words: " + c.at("r15_words_len5").dump());
        v.require(c.at("r10_words_len3").get<int>() < 8, "r=10 length-3 words: " + c.at("r10_words_len3").dump());
    };

    m["periodic-orbits-r15"] = [](const json& c, Verdict& v) {
        v.require(c.at("residual_S").get<double>() <= 1e-8, "S residual " + c.at("residual_S").dump());
        v.require(c.at("residual_T").get<double>() <= 1e-8, "T residual " + c.at("residual_T").dump());
        v.require(c.at("mirror_gap").get<double>() <= 1e-6, "mirror gap " + c.at("mirror_gap").dump());
    };

    m["hausdorff-continuity"] = [](const json& c, Verdict& v) {
        const auto& r = c.at("r");
        const auto& d = c.at("d_H");
        v.require(r == json{14.6, 14.4, 14.2, 14.05}, "sweep values " + r.dump());
        v.require(d.size() == 4, "expected four distances");
        for (std::size_t i = 1; i < d.size(); ++i) {
            v.require(d[i].get<double>() <= d[i - 1].get<double>(), "d_H increases at r=" + r[i].dump());
        }
    };

    m["homology-engine"] = [](const json& c, Verdict& v) {
        v.require(c.at("figure_eight") == json{1, 2}, "figure eight " + c.at("figure_eight").dump());
        v.require(c.at("saddle_pair") == json{0, 1}, "saddle pair " + c.at("saddle_pair").dump());
        v.require(c.at("snf_trials") == 500 && c.at("snf_agreements") == 500,
                  "SNF agreements " + c.at("snf_agreements").dump());
        v.require(c.at("boundary_squared_zero") == true, "boundary squared nonzero");
        v.require(c.at("euler_identity") == true, "Euler identity fails");
    };
    return m;
}

// Seconds on a contemporary 8-thread desktop.
const std::map<std::string, double> kBudget{
    {"equilibria-r28", 1.0},         {"pitchfork-threshold", 1.0},  {"hopf-threshold", 1.0},
    {"homoclinic-threshold", 120.0}, {"heteroclinic-threshold", 300.0}, {"morse-graph-r2", 300.0},
    {"morse-graph-r28", 600.0},      {"strange-set-index-r15", 600.0},  {"transition-equations", 0.001},
    {"pitchfork-demo", 180.0},       {"symbolic-full-shift", 300.0},    {"periodic-orbits-r15", 120.0},
    {"hausdorff-continuity", 900.0}, {"homology-engine", 60.0},
};

}  // namespace

int main()
{
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const double scale = std::max(1.0, 8.0 / hw);

    conley::RunConfig cfg;
    cfg.output_dir = "acceptance-report";
    conley::apply_environment(cfg);
    const conley::ReproductionReport rep = conley::run_suite(conley::Suite::Paper, cfg, &std::cerr);
    conley::emit_report(rep, cfg.output_dir);

    const auto check = checkers();
    int passed = 0;
    int index = 0;
    for (const auto& row : rep.rows) {
        ++index;
        Verdict v;
        v.require(row.pass, "library verdict FAIL");
        if (row.computed.contains("error")) {
            v.require(false, row.computed.at("error").get<std::string>());
        } else {
            try {
                check.at(row.id)(row.computed, v);
            } catch (const std::exception& e) {
                v.require(false, std::string("malformed row: ") + e.what());
            }
        }
        const double budget = kBudget.at(row.id) * scale;
        v.require(row.seconds <= budget, "over the runtime budget");
        passed += v.pass ? 1 : 0;
        std::printf("criterion %2d %-24s %s  %.3g s (budget %.3g s)%s%s\n", index, row.id.c_str(),
                    v.pass ? "PASS" : "FAIL", row.seconds, budget, v.detail.empty() ? "" : "  ",
                    v.detail.c_str());
    }
    std::printf("%d/%zu criteria passed (runtime budgets scaled by %.2g for %u hardware threads)\n", passed,
                rep.rows.size(), scale, hw);
    std::fflush(stdout);
    return passed == static_cast<int>(rep.rows.size()) && rep.rows.size() == 14 ? 0 : 1;
}
