#include "conley/report.hpp"
#include "conley/equilibria.hpp"
#include "conley/errors.hpp"
#include "conley/experiments.hpp"
#include "conley/homology.hpp"
#include "conley/morse.hpp"
#include "conley/symbolic.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <system_error>

namespace conley {

using nlohmann::json;

std::string to_string(ModelKind m)
{
    return m == ModelKind::Lorenz ? "lorenz" : "normal-form";
}

void RunConfig::validate() const
{
    if (model == ModelKind::Lorenz) {
        lorenz.validate();
    } else {
        normal_form.validate();
    }
    map.validate();
    const int dim = model == ModelKind::Lorenz ? 3 : normal_form.n;
    if (static_cast<int>(depths.size()) != dim) {
        throw ContractViolation("grid depths must have one entry per state coordinate");
    }
    for (int d : depths) {
        if (d < 1 || d > 15) {
            throw ContractViolation("grid depths must lie in [1, 15]");
        }
    }
    if (!(box_scale >= 1.0) || !std::isfinite(box_scale)) {
        throw ContractViolation("box_scale must be >= 1");
    }
    if (!(integrator_tol > 0.0) || integrator_tol > 1e-3) {
        throw ContractViolation("integrator_tol must lie in (0, 1e-3]");
    }
    if (threads < 0) {
        throw ContractViolation("threads must be >= 0");
    }
    if (symbol_seeds == 0) {
        throw ContractViolation("symbol_seeds must be positive");
    }
    if (output_dir.empty()) {
        throw ContractViolation("output_dir must not be empty");
    }
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!j.is_object()) {
        throw ContractViolation(where + " must be a JSON object");
    }
    for (const auto& item : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
        if (!known) {
            throw ContractViolation("unknown configuration key '" + where + item.key() + "'");
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ContractViolation("configuration key '" + where + key + "' has the wrong type");
    }
}

}  // namespace

RunConfig parse_run_config(const json& j, RunConfig c)
{
    reject_unknown(j,
                   {"model", "lorenz", "normal_form", "grid", "map", "integrator_tol", "sweep", "output_dir",
                    "threads", "seed", "symbol_seeds"},
                   "");
    if (j.contains("model")) {
        std::string m;
        read(j, "model", m, "");
        if (m == "lorenz") {
            c.model = ModelKind::Lorenz;
        } else if (m == "normal-form") {
            c.model = ModelKind::NormalForm;
        } else {
            throw ContractViolation("model must be \"lorenz\" or \"normal-form\"");
        }
    }
    if (j.contains("lorenz")) {
        const json& l = j.at("lorenz");
        reject_unknown(l, {"sigma", "b", "r"}, "lorenz.");
        read(l, "sigma", c.lorenz.sigma, "lorenz.");
        read(l, "b", c.lorenz.b, "lorenz.");
        read(l, "r", c.lorenz.r, "lorenz.");
    }
    if (j.contains("normal_form")) {
        const json& nf = j.at("normal_form");
        reject_unknown(nf, {"n", "k", "lambda"}, "normal_form.");
        read(nf, "n", c.normal_form.n, "normal_form.");
        read(nf, "k", c.normal_form.k, "normal_form.");
        read(nf, "lambda", c.normal_form.lambda, "normal_form.");
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown(g, {"depths", "box_scale"}, "grid.");
        read(g, "depths", c.depths, "grid.");
        read(g, "box_scale", c.box_scale, "grid.");
    }
    if (j.contains("map")) {
        const json& m = j.at("map");
        reject_unknown(m, {"tau", "bloat", "rk4_step"}, "map.");
        read(m, "tau", c.map.tau, "map.");
        read(m, "bloat", c.map.bloat, "map.");
        read(m, "rk4_step", c.map.rk4_step, "map.");
    }
    read(j, "integrator_tol", c.integrator_tol, "");
    read(j, "sweep", c.sweep, "");
    read(j, "output_dir", c.output_dir, "");
    read(j, "threads", c.threads, "");
    read(j, "seed", c.seed, "");
    read(j, "symbol_seeds", c.symbol_seeds, "");
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open configuration file " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ContractViolation("configuration file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_run_config(j, std::move(base));
}

void to_json(json& j, const RunConfig& c)
{
    j = json{
        {"model", to_string(c.model)},
        {"lorenz", {{"sigma", c.lorenz.sigma}, {"b", c.lorenz.b}, {"r", c.lorenz.r}}},
        {"normal_form", {{"n", c.normal_form.n}, {"k", c.normal_form.k}, {"lambda", c.normal_form.lambda}}},
        {"grid", {{"depths", c.depths}, {"box_scale", c.box_scale}}},
        {"map", {{"tau", c.map.tau}, {"bloat", c.map.bloat}, {"rk4_step", c.map.rk4_step}}},
        {"integrator_tol", c.integrator_tol},
        {"sweep", c.sweep},
        {"output_dir", c.output_dir},
        {"threads", c.threads},
        {"seed", c.seed},
        {"symbol_seeds", c.symbol_seeds},
    };
}

std::string serialize(const RunConfig& c)
{
    return json(c).dump(2) + "\n";
}

void apply_environment(RunConfig& c)
{
    if (const char* dir = std::getenv("CONLEY_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
        c.output_dir = dir;
    }
}

std::unique_ptr<VectorField> make_model(const RunConfig& c)
{
    if (c.model == ModelKind::Lorenz) {
        return std::make_unique<LorenzModel>(c.lorenz);
    }
    return std::make_unique<NormalFormModel>(c.normal_form);
}

Grid make_grid(const RunConfig& c, const VectorField& model)
{
    TrappingBox box = trapping_box(model);
    if (c.box_scale != 1.0) {
        box = box.scaled(c.box_scale);
    }
    return Grid(box, c.depths);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string());
    }
}

std::string content_hash(std::string_view bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

std::size_t ReproductionReport::failures() const
{
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const ClaimRow& r) { return !r.pass; }));
}

void to_json(json& j, const ClaimRow& r)
{
    j = json{{"id", r.id},
             {"location", r.location},
             {"computed", r.computed},
             {"expected", r.expected},
             {"tolerance", r.tolerance},
             {"pass", r.pass},
             {"metadata", r.metadata}};
}

void to_json(json& j, const ReproductionReport& r)
{
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back(row);
    }
    j = json{{"config", r.config},
             {"graph_digests", r.graph_digests},
             {"rows", rows},
             {"summary", {{"claims", r.rows.size()}, {"failures", r.failures()}}}};
}

namespace {

std::string cell(const json& v)
{
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    std::string out;
    for (char ch : s) {
        if (ch == '|') {
            out += "\\|";
        } else if (ch == '\n') {
            out += ' ';
        } else {
            out += ch;
        }
    }
    return out;
}

}  // namespace

std::string to_markdown(const ReproductionReport& r)
{
    std::ostringstream md;
    md << "# Reproduction report\n\n";
    md << r.rows.size() << " claims, " << r.failures() << " failing.\n\n";
    if (!r.rows.empty()) {
        md << "| id | location | computed | expected | tolerance | result |\n";
        md << "|---|---|---|---|---|---|\n";
        for (const auto& row : r.rows) {
            md << "| " << row.id << " | " << cell(row.location) << " | " << cell(row.computed) << " | "
               << cell(row.expected) << " | " << cell(row.tolerance) << " | " << (row.pass ? "PASS" : "FAIL")
               << " |\n";
        }
        md << "\n## Metadata\n\n";
        for (const auto& row : r.rows) {
            md << "- " << row.id << ": `" << row.metadata.dump() << "`\n";
        }
    }
    md << "\n## Transition graph digests\n\n";
    for (const auto& d : r.graph_digests) {
        md << "- `" << d << "`\n";
    }
    md << "\n## Configuration\n\n```json\n" << r.config.dump(2) << "\n```\n";
    return md.str();
}

ReportFiles emit_report(const ReproductionReport& r, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string());
    }
    ReportFiles files{dir / "report.json", dir / "report.md"};
    write_file_atomic(files.json, json(r).dump(2) + "\n");
    write_file_atomic(files.markdown, to_markdown(r));
    return files;
}

const std::vector<ClaimInfo>& claim_catalog()
{
    static const std::vector<ClaimInfo> catalog{
        {"equilibria-r28", "two additional singularities C₁ and C₂", true},
        {"pitchfork-threshold", "at r=1, a pitchfork bifurcation takes place", true},
        {"hopf-threshold", "until r=24.74", true},
        {"homoclinic-threshold", "r_H = 13.926…", false},
        {"heteroclinic-threshold", "absorbed by K_r", false},
        {"morse-graph-r2", "2+t=1+(1+t)", false},
        {"morse-graph-r28", "1+2t+2t^2=1+(1+t)2t", false},
        {"strange-set-index-r15", "cohomological Conley index of the circle", false},
        {"transition-equations", "2+t=1+(1+t); 3+4t+2t^2=1+(1+t)(2+2t); 1+2t+2t^2=1+(1+t)2t", true},
        {"pitchfork-demo", "the family A_λ shrinks to 0", false},
        {"symbolic-full-shift", "S/T bisequence coding", false},
        {"periodic-orbits-r15", "exactly one periodic orbit", false},
        {"hausdorff-continuity", "continuous in the Hausdorff metric", false},
        {"homology-engine", "cubical homology of the figure eight and of a saddle index pair", true},
    };
    return catalog;
}

namespace {

struct SuiteContext {
    const RunConfig& config;
    std::vector<std::string>& digests;
};

ClaimRow claim_equilibria()
{
    ClaimRow row;
    LorenzParams p;
    p.r = 28.0;
    const auto eqs = find_equilibria(p);
    const double s = std::sqrt(72.0);
    double err = 0.0;
    double residual = 0.0;
    json pts = json::array();
    for (const auto& e : eqs) {
        residual = std::max(residual, e.residual);
        if (e.label == EquilibriumLabel::C1 || e.label == EquilibriumLabel::C2) {
            const double sign = e.label == EquilibriumLabel::C1 ? 1.0 : -1.0;
            err = std::max({err, std::abs(e.state[0] - sign * s), std::abs(e.state[1] - sign * s),
                            std::abs(e.state[2] - 27.0)});
            pts.push_back({{"label", to_string(e.label)},
                           {"state", {e.state[0], e.state[1], e.state[2]}},
                           {"residual", e.residual}});
        }
    }
    row.computed = {{"equilibria", pts}, {"max_error", err}, {"max_residual", residual}};
    row.expected = "(±√72, ±√72, 27)";
    row.tolerance = "coordinates 1e-8, residual 1e-12";
    row.pass = pts.size() == 2 && err <= 1e-8 && residual <= 1e-12;
    row.metadata = {{"r", 28.0}, {"method", "closed form, Newton-refined"}};
    return row;
}

ClaimRow claim_pitchfork()
{
    ClaimRow row;
    const ThresholdResult t = pitchfork_threshold(1e-9);
    row.computed = {{"r_star", t.r_star}, {"bracket", {t.bracket.first, t.bracket.second}}};
    row.expected = 1.0;
    row.tolerance = "1e-8";
    row.pass = std::abs(t.r_star - 1.0) <= 1e-8;
    row.metadata = {{"bisection_tol", 1e-9}, {"criterion", "origin eigenvalue nearest zero"}};
    return row;
}

ClaimRow claim_hopf()
{
    ClaimRow row;
    const ThresholdResult t = hopf_threshold(1e-8);
    const double exact = 470.0 / 19.0;
    row.computed = {{"r_star", t.r_star}, {"bracket", {t.bracket.first, t.bracket.second}}};
    row.expected = {{"exact", exact}, {"rounded", 24.74}};
    row.tolerance = "1e-6 to 470/19, 0.005 to 24.74";
    row.pass = std::abs(t.r_star - exact) <= 1e-6 && std::abs(t.r_star - 24.74) <= 0.005;
    row.metadata = {{"bisection_tol", 1e-8}, {"criterion", "largest real part of the spectrum at C1"}};
    return row;
}

ClaimRow claim_homoclinic()
{
    ClaimRow row;
    const ThresholdResult t = homoclinic_threshold(1e-3);
    const auto [lo, hi] = t.bracket;
    const double truncated = std::floor(t.r_star * 1000.0) / 1000.0;
    row.computed = {{"r_star", t.r_star}, {"bracket", {lo, hi}}, {"width", hi - lo}};
    row.expected = {{"bracket_within", {13.8, 14.1}}, {"value", "13.926…"}};
    row.tolerance = "bracket width 1e-3";
    row.pass = lo >= 13.8 && hi <= 14.1 && hi - lo <= 1e-3 && lo <= 13.927 && hi >= 13.926 &&
               std::abs(truncated - 13.926) < 1e-9;
    row.metadata = {{"integrator_tol", 1e-12}, {"criterion", "second descending crossing of z = r - 1"}};
    return row;
}

ClaimRow claim_heteroclinic()
{
    ClaimRow row;
    const ThresholdResult t = heteroclinic_threshold(0.05);
    row.computed = {{"r_star", t.r_star}, {"bracket", {t.bracket.first, t.bracket.second}}};
    row.expected = {{"within", {23.9, 24.2}}, {"value", 24.06}};
    row.tolerance = "bracket containment";
    row.pass = t.r_star >= 23.9 && t.r_star <= 24.2 && 24.06 >= 23.9 && 24.06 <= 24.2;
    const auto opts = ThresholdOptions::defaults(ThresholdKind::Heteroclinic);
    row.metadata = {{"bisection_tol", 0.05}, {"horizon", opts.horizon}, {"settle_radius", opts.settle_radius}};
    return row;
}

std::multiset<std::string> index_multiset(const MorseRun& run)
{
    const auto v = run.index_strings();
    return {v.begin(), v.end()};
}

json equation_json(const MorseRun& run)
{
    const auto eq = run.equation();
    return eq ? json{{"equation", eq->equation()}, {"valid", eq->valid}} : json{{"equation", nullptr}, {"valid", false}};
}

bool equation_is(const MorseRun& run, const std::string& want)
{
    const auto eq = run.equation();
    return eq && eq->valid && eq->equation() == want;
}

ClaimRow claim_morse_r2(SuiteContext& ctx)
{
    ClaimRow row;
    const MorseRun run = run_lorenz_morse(2.0, {7, 7, 7}, 0.2, ctx.config.threads);
    ctx.digests.push_back(run.digest);
    row.computed = {{"nodes", run.graph.size()}, {"indices", run.index_strings()}, {"morse_equation", equation_json(run)}};
    row.expected = {{"nodes", 3}, {"indices", {"t", "1", "1"}}, {"equation", "2+t=1+(1+t)"}};
    row.tolerance = "exact";
    row.pass = run.graph.size() == 3 && index_multiset(run) == std::multiset<std::string>{"t", "1", "1"} &&
               equation_is(run, "2+t=1+(1+t)");
    row.metadata = {{"r", 2.0}, {"depths", {7, 7, 7}}, {"tau", 0.2}, {"digest", run.digest},
                    {"index_methods", run.methods}};
    return row;
}

ClaimRow claim_morse_r28(SuiteContext& ctx)
{
    ClaimRow row;
    std::optional<MorseRun> run;
    int used = 7;
    for (int depth : {7, 8}) {
        used = depth;
        const std::size_t budget = std::size_t{1} << (3 * depth);
        run.emplace(run_lorenz_morse(28.0, {depth, depth, depth}, 0.2, ctx.config.threads, budget));
        ctx.digests.push_back(run->digest);
        bool attractor_ok = false;
        for (int m : run->graph.minimal_nodes()) {
            attractor_ok = attractor_ok || (run->indices[m] && run->indices[m]->to_string() == "1+2t");
        }
        if (attractor_ok) {
            break;
        }
    }
    row.computed = {{"nodes", run->graph.size()}, {"indices", run->index_strings()},
                    {"morse_equation", equation_json(*run)}, {"depth", used}};
    row.expected = {{"nodes", 3}, {"indices", {"1+2t", "t^2", "t^2"}}, {"equation", "1+2t+2t^2=1+(1+t)2t"}};
    row.tolerance = "exact";
    row.pass = run->graph.size() == 3 &&
               index_multiset(*run) == std::multiset<std::string>{"1+2t", "t^2", "t^2"} &&
               equation_is(*run, "1+2t+2t^2=1+(1+t)2t");
    row.metadata = {{"r", 28.0}, {"depths", {used, used, used}}, {"tau", 0.2}, {"digest", run->digest},
                    {"index_methods", run->methods}};
    return row;
}

ClaimRow claim_strange_index(SuiteContext& ctx)
{
    ClaimRow row;
    const MorseRun run = run_lorenz_morse(15.0, {7, 7, 7}, 2.0, ctx.config.threads);
    ctx.digests.push_back(run.digest);
    int origin = -1;
    if (const auto cube = run.grid.locate(make_state({0.0, 0.0, 0.0}))) {
        origin = run.graph.node_of(*cube).value_or(-1);
    }
    std::string index = "none";
    std::string method = "none";
    std::string label;
    if (origin >= 0) {
        index = run.index_strings()[origin];
        method = run.methods[origin];
        label = run.graph.nodes[origin].label;
    }
    row.computed = {{"origin_node_index", index}, {"index_method", method}, {"nodes", run.graph.size()}};
    row.expected = "t";
    row.tolerance = "exact";
    row.pass = origin >= 0 && index == "t";
    row.metadata = {{"r", 15.0}, {"depths", {7, 7, 7}}, {"tau", 2.0}, {"digest", run.digest},
                    {"origin_label", label}};
    return row;
}

ClaimRow claim_transition_equations()
{
    ClaimRow row;
    const TravelEquations t = travel_equations({1, 2}, {2, 0});
    row.computed = {{"stage1", t.repeller_attractor.equation()},
                    {"stage2", t.middle.equation()},
                    {"stage3", t.attractor_repeller.equation()},
                    {"q", {t.repeller_attractor.q.to_string(), t.middle.q.to_string(),
                           t.attractor_repeller.q.to_string()}}};
    row.expected = {{"stage1", "2+t=1+(1+t)"}, {"stage2", "3+4t+2t^2=1+(1+t)(2+2t)"},
                    {"stage3", "1+2t+2t^2=1+(1+t)2t"}, {"q", {"1", "2+2t", "2t"}}};
    row.tolerance = "exact";
    row.pass = row.computed == row.expected && t.repeller_attractor.valid && t.middle.valid &&
               t.attractor_repeller.valid;
    row.metadata = {{"betti_K", {1, 2}}, {"betti_C", {2, 0}}};
    return row;
}

ClaimRow claim_pitchfork_demo(SuiteContext& ctx)
{
    ClaimRow row;
    const PitchforkDemo wide = run_pitchfork_demo(0.25, ctx.config.threads);
    const PitchforkDemo narrow = run_pitchfork_demo(0.01, ctx.config.threads);
    ctx.digests.push_back(wide.digest);
    ctx.digests.push_back(narrow.digest);
    const bool eq_ok = wide.equation && wide.equation->valid && wide.equation->equation() == "1+t+t^2=1+(1+t)t";
    row.computed = {{"attractor_betti", wide.attractor_betti.betti},
                    {"indices", wide.run.index_strings()},
                    {"equation", wide.equation ? json(wide.equation->equation()) : json(nullptr)},
                    {"diameter_0.25", wide.attractor_diameter},
                    {"diameter_0.01", narrow.attractor_diameter}};
    row.expected = {{"attractor_betti", {1, 1, 0}}, {"equation", "1+t+t^2=1+(1+t)t"},
                    {"diameter", "smaller at lambda 0.01"}};
    row.tolerance = "exact";
    const auto& b = wide.attractor_betti;
    row.pass = b.betti_at(0) == 1 && b.betti_at(1) == 1 && b.betti_at(2) == 0 &&
               eq_ok && narrow.attractor_diameter < wide.attractor_diameter;
    row.metadata = {{"n", 3}, {"k", 2}, {"lambda", {0.25, 0.01}}, {"depths", wide.depths},
                    {"tau", {wide.tau, narrow.tau}}, {"digests", {wide.digest, narrow.digest}}};
    return row;
}

ClaimRow claim_full_shift(SuiteContext& ctx)
{
    ClaimRow row;
    SymbolConfig cfg;
    cfg.seeds = 100000;
    cfg.threads = ctx.config.threads;
    LorenzParams p15;
    p15.r = 15.0;
    LorenzParams p10;
    p10.r = 10.0;
    const WordReport w15 = verify_word_realization(LorenzModel(p15), 5, cfg);
    const WordReport w10 = verify_word_realization(LorenzModel(p10), 3, cfg);
    row.computed = {{"r15_words_len5", w15.words_found}, {"r10_words_len3", w10.words_found}};
    row.expected = {{"r15_words_len5", 32}, {"r10_words_len3", "< 8"}};
    row.tolerance = "exact counts";
    row.pass = w15.words_found == 32 && w10.words_found < 8;
    row.metadata = {{"seeds", cfg.seeds}, {"seed_span", cfg.seed_span}, {"horizon", cfg.horizon},
                    {"note", "non-rigorous; sampled covering"}};
    return row;
}

ClaimRow claim_periodic(SuiteContext& ctx)
{
    ClaimRow row;
    SymbolConfig cfg;
    cfg.threads = ctx.config.threads;
    LorenzParams p;
    p.r = 15.0;
    const LorenzModel model(p);
    const PeriodicOrbitResult s = find_periodic_orbit(model, "S", cfg);
    const PeriodicOrbitResult t = find_periodic_orbit(model, "T", cfg);
    const double mirror_gap = (lorenz_mirror(s.point) - t.point).norm();
    row.computed = {{"residual_S", s.residual}, {"residual_T", t.residual}, {"period_S", s.period},
                    {"period_T", t.period}, {"mirror_gap", mirror_gap}};
    row.expected = {{"residual", "<= 1e-8"}, {"mirror_gap", "<= 1e-6"}};
    row.tolerance = "residual 1e-8, symmetry 1e-6";
    row.pass = s.residual <= 1e-8 && t.residual <= 1e-8 && mirror_gap <= 1e-6;
    row.metadata = {{"r", 15.0}, {"method", "multiple shooting on the return map"}};
    return row;
}

ClaimRow claim_hausdorff(SuiteContext& ctx)
{
    ClaimRow row;
    const StrangeSweep sweep = run_strange_sweep({14.6, 14.4, 14.2, 14.05}, 14.0, {7, 7, 7}, 2.0,
                                                 ctx.config.threads);
    for (const auto& d : sweep.digests) {
        ctx.digests.push_back(d);
    }
    bool monotone = sweep.distances.size() == 4;
    for (std::size_t i = 1; i < sweep.distances.size(); ++i) {
        monotone = monotone && sweep.distances[i] <= sweep.distances[i - 1];
    }
    row.computed = {{"r", sweep.params}, {"d_H", sweep.distances}};
    row.expected = "non-increasing as r decreases to 14.0";
    row.tolerance = "monotone, fixed grid";
    row.pass = monotone;
    row.metadata = {{"reference_r", 14.0}, {"depths", {7, 7, 7}}, {"tau", 2.0}, {"box", "trapping box at r=14.6"}};
    return row;
}

ClaimRow claim_homology(SuiteContext& ctx)
{
    ClaimRow row;
    const HomologySelfCheck h = homology_self_check(500, ctx.config.seed);
    row.computed = {{"figure_eight", h.figure_eight.betti},
                    {"saddle_pair", h.saddle_pair.betti},
                    {"snf_agreements", h.snf_agreements},
                    {"snf_trials", h.snf_trials},
                    {"boundary_squared_zero", h.boundary_squared_zero},
                    {"euler_identity", h.euler_identity}};
    row.expected = {{"figure_eight", {1, 2}}, {"saddle_pair", {0, 1}}, {"snf_agreements", 500}};
    row.tolerance = "exact";
    row.pass = h.figure_eight.betti == std::vector<std::int64_t>{1, 2} &&
               h.saddle_pair.betti == std::vector<std::int64_t>{0, 1} && h.snf_agreements == h.snf_trials &&
               h.snf_trials == 500 && h.boundary_squared_zero && h.euler_identity;
    row.metadata = {{"seed", ctx.config.seed}, {"max_matrix", "8x8"}};
    return row;
}

}  // namespace

ReproductionReport run_suite(Suite suite, const RunConfig& c, std::ostream* log)
{
    ReproductionReport rep;
    rep.config = c;
    SuiteContext ctx{c, rep.graph_digests};
    using Runner = std::function<ClaimRow()>;
    const std::vector<Runner> runners{
        [] { return claim_equilibria(); },
        [] { return claim_pitchfork(); },
        [] { return claim_hopf(); },
        [] { return claim_homoclinic(); },
        [] { return claim_heteroclinic(); },
        [&] { return claim_morse_r2(ctx); },
        [&] { return claim_morse_r28(ctx); },
        [&] { return claim_strange_index(ctx); },
        [] { return claim_transition_equations(); },
        [&] { return claim_pitchfork_demo(ctx); },
        [&] { return claim_full_shift(ctx); },
        [&] { return claim_periodic(ctx); },
        [&] { return claim_hausdorff(ctx); },
        [&] { return claim_homology(ctx); },
    };
    const auto& catalog = claim_catalog();
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        if (suite == Suite::Fast && !catalog[i].fast) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        ClaimRow row;
        if (log != nullptr) {
            *log << "running " << catalog[i].id << std::endl;
        }
        try {
            row = runners[i]();
        } catch (const std::exception& e) {
            row = ClaimRow{};
            row.computed = {{"error", e.what()}};
            row.expected = nullptr;
            row.tolerance = "n/a";
            row.pass = false;
        }
        row.id = catalog[i].id;
        row.location = catalog[i].location;
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (log != nullptr) {
            *log << (row.pass ? "PASS " : "FAIL ") << row.id << " (" << std::fixed << std::setprecision(1)
                 << row.seconds << " s)" << std::endl;
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace conley
