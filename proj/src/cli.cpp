#include "conley/cli.hpp"
#include "conley/equilibria.hpp"
#include "conley/errors.hpp"
#include "conley/experiments.hpp"
#include "conley/morse.hpp"
#include "conley/report.hpp"
#include "conley/symbolic.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace conley {

namespace {

using nlohmann::json;

// Flags shared by the subcommands.  Each is applied over the file
// configuration only when given on the command line.
struct Overrides {
    std::string config_path;
    std::string model;
    double r = 0.0;
    double sigma = 0.0;
    double b = 0.0;
    double lambda = 0.0;
    int n = 0;
    int k = 0;
    std::vector<int> depths;
    double tau = 0.0;
    double rk4_step = 0.0;
    double bloat = 0.0;
    double box_scale = 0.0;
    double integrator_tol = 0.0;
    std::vector<double> sweep;
    std::string output_dir;
    int threads = 0;
    std::uint64_t seed = 0;
    std::size_t symbol_seeds = 0;

    // One option per subcommand under each name.
    std::map<std::string, std::vector<CLI::Option*>> opts;

    bool given(const std::string& name) const
    {
        auto it = opts.find(name);
        return it != opts.end() &&
               std::any_of(it->second.begin(), it->second.end(), [](CLI::Option* o) { return o->count() > 0; });
    }
};

void add_common(CLI::App& app, Overrides& o)
{
    auto& m = o.opts;
    m["config"].push_back(app.add_option("--config", o.config_path, "JSON run configuration"));
    m["model"].push_back(app.add_option("--model", o.model, "lorenz or normal-form"));
    m["r"].push_back(app.add_option("--r", o.r, "Lorenz r"));
    m["sigma"].push_back(app.add_option("--sigma", o.sigma, "Lorenz sigma"));
    m["b"].push_back(app.add_option("--b", o.b, "Lorenz b"));
    m["lambda"].push_back(app.add_option("--lambda", o.lambda, "normal-form lambda"));
    m["n"].push_back(app.add_option("--n", o.n, "normal-form dimension"));
    m["k"].push_back(app.add_option("--k", o.k, "normal-form unstable dimension"));
    m["depths"].push_back(app.add_option("--depths", o.depths, "grid depth per axis, e.g. 7,7,7")->delimiter(','));
    m["tau"].push_back(app.add_option("--tau", o.tau, "time of the sampled map"));
    m["rk4-step"].push_back(app.add_option("--rk4-step", o.rk4_step, "fixed RK4 step of the sampled map"));
    m["bloat"].push_back(app.add_option("--bloat", o.bloat, "image inflation factor"));
    m["box-scale"].push_back(app.add_option("--box-scale", o.box_scale, "grid box = trapping box scaled by this factor"));
    m["integrator-tol"].push_back(app.add_option("--integrator-tol", o.integrator_tol, "adaptive integrator tolerance"));
    m["sweep"].push_back(app.add_option("--values", o.sweep, "sweep parameter values, e.g. 14,14.5,15")->delimiter(','));
    m["out-dir"].push_back(app.add_option("--out-dir", o.output_dir, "output directory"));
    m["threads"].push_back(app.add_option("--threads", o.threads, "thread bound, 0 for the runtime default"));
    m["seed"].push_back(app.add_option("--seed", o.seed, "seed for random sampling"));
    m["symbol-seeds"].push_back(app.add_option("--seeds", o.symbol_seeds, "section seeds for word counts"));
}

RunConfig resolve(const Overrides& o)
{
    RunConfig c;
    if (!o.config_path.empty()) {
        c = load_run_config(o.config_path);
    }
    apply_environment(c);
    if (o.given("model")) {
        if (o.model == "lorenz") {
            c.model = ModelKind::Lorenz;
        } else if (o.model == "normal-form") {
            c.model = ModelKind::NormalForm;
        } else {
            throw ContractViolation("--model must be lorenz or normal-form");
        }
    }
    if (o.given("r")) c.lorenz.r = o.r;
    if (o.given("sigma")) c.lorenz.sigma = o.sigma;
    if (o.given("b")) c.lorenz.b = o.b;
    if (o.given("lambda")) c.normal_form.lambda = o.lambda;
    if (o.given("n")) c.normal_form.n = o.n;
    if (o.given("k")) c.normal_form.k = o.k;
    if (o.given("depths")) c.depths = o.depths;
    if (o.given("tau")) c.map.tau = o.tau;
    if (o.given("rk4-step")) c.map.rk4_step = o.rk4_step;
    if (o.given("bloat")) c.map.bloat = o.bloat;
    if (o.given("box-scale")) c.box_scale = o.box_scale;
    if (o.given("integrator-tol")) c.integrator_tol = o.integrator_tol;
    if (o.given("sweep")) c.sweep = o.sweep;
    if (o.given("out-dir")) c.output_dir = o.output_dir;
    if (o.given("threads")) c.threads = o.threads;
    if (o.given("seed")) c.seed = o.seed;
    if (o.given("symbol-seeds")) c.symbol_seeds = o.symbol_seeds;
    if (c.model == ModelKind::NormalForm && !o.given("depths") && o.config_path.empty()) {
        c.depths.assign(c.normal_form.n, 6);
    }
    c.validate();
    return c;
}

// Writes to --out when given, else to the stream.
class Sink {
public:
    Sink(std::string path, std::ostream& fallback) : path_(std::move(path)), out_(fallback) {}

    void emit(const std::string& text) const
    {
        if (path_.empty()) {
            out_ << text;
            out_.flush();
        } else {
            write_file_atomic(path_, text);
        }
    }
    void emit(const json& j) const { emit(j.dump(2) + "\n"); }

private:
    std::string path_;
    std::ostream& out_;
};

json complex_json(const std::complex<double>& z)
{
    return json{{"re", z.real()}, {"im", z.imag()}};
}

json state_json(const StateVec& x)
{
    return std::vector<double>(x.begin(), x.end());
}

void require_lorenz(const RunConfig& c, const char* what)
{
    if (c.model != ModelKind::Lorenz) {
        throw ContractViolation(std::string(what) + " supports the Lorenz model only");
    }
}

int run_equilibria(const RunConfig& c, const Sink& sink)
{
    json out = json::array();
    if (c.model == ModelKind::Lorenz) {
        for (const auto& e : find_equilibria(c.lorenz)) {
            json ev = json::array();
            for (const auto& z : e.eigenvalues) {
                ev.push_back(complex_json(z));
            }
            out.push_back({{"label", to_string(e.label)},
                           {"state", state_json(e.state)},
                           {"eigenvalues", ev},
                           {"unstable_dim", e.unstable_dim},
                           {"stability", to_string(e.classification)},
                           {"residual", e.residual}});
        }
    } else {
        const Equilibrium e = normal_form_origin(c.normal_form);
        json ev = json::array();
        for (const auto& z : e.eigenvalues) {
            ev.push_back(complex_json(z));
        }
        out.push_back({{"label", to_string(e.label)},
                       {"state", state_json(e.state)},
                       {"eigenvalues", ev},
                       {"unstable_dim", e.unstable_dim},
                       {"stability", to_string(e.classification)}});
    }
    sink.emit(out);
    return kExitOk;
}

int run_thresholds(const RunConfig& c, const std::string& kind, double tol, const Sink& sink)
{
    require_lorenz(c, "thresholds");
    ThresholdKind k;
    if (kind == "pitchfork") {
        k = ThresholdKind::Pitchfork;
    } else if (kind == "hopf") {
        k = ThresholdKind::Hopf;
    } else if (kind == "homoclinic") {
        k = ThresholdKind::Homoclinic;
    } else if (kind == "heteroclinic") {
        k = ThresholdKind::Heteroclinic;
    } else {
        throw ContractViolation("--kind must be pitchfork, hopf, homoclinic or heteroclinic");
    }
    ThresholdOptions opts = ThresholdOptions::defaults(k);
    opts.base = c.lorenz;
    ThresholdResult t;
    switch (k) {
    case ThresholdKind::Pitchfork: t = pitchfork_threshold(tol, opts); break;
    case ThresholdKind::Hopf: t = hopf_threshold(tol, opts); break;
    case ThresholdKind::Homoclinic: t = homoclinic_threshold(tol, opts); break;
    case ThresholdKind::Heteroclinic: t = heteroclinic_threshold(tol, opts); break;
    }
    sink.emit(json(t));
    return kExitOk;
}

MorseRun morse_for(const RunConfig& c, bool with_indices)
{
    const auto model = make_model(c);
    Grid grid = make_grid(c, *model);
    if (c.model == ModelKind::Lorenz) {
        const LorenzParams p = c.lorenz;
        return run_morse(*model, std::move(grid), c.map, c.threads,
                         [p](MorseGraph& mg, const Grid& g) { label_lorenz_nodes(mg, g, p); }, with_indices);
    }
    return run_morse(*model, std::move(grid), c.map, c.threads,
                     [n = c.normal_form.n](MorseGraph& mg, const Grid& g) {
                         label_nodes(mg, g, {{"origin", StateVec::Zero(n)}});
                     },
                     with_indices);
}

int run_morse_cmd(const RunConfig& c, const std::string& format, bool indices, const Sink& sink)
{
    const MorseRun run = morse_for(c, indices);
    if (format == "json") {
        sink.emit(morse_run_json(run));
    } else if (format == "dot") {
        std::ostringstream dot;
        write_dot(dot, run.graph, DotOptions{run.indices});
        sink.emit(dot.str());
    } else {
        throw ContractViolation("--format must be dot or json");
    }
    return kExitOk;
}

int run_index_cmd(const RunConfig& c, int node, const Sink& sink)
{
    const MorseRun run = morse_for(c, true);
    if (node >= static_cast<int>(run.graph.size())) {
        throw ContractViolation("--node exceeds the number of Morse nodes");
    }
    json out = morse_run_json(run);
    if (node >= 0) {
        out = json{{"node", out["nodes"][node]}, {"digest", run.digest}};
    }
    sink.emit(out);
    return kExitOk;
}

int run_sweep(const RunConfig& c, const std::string& csv_path, const Sink& sink)
{
    if (c.sweep.size() < 2) {
        throw ContractViolation("sweep needs at least two parameter values (--values)");
    }
    std::vector<double> params = c.sweep;
    std::sort(params.begin(), params.end());
    EngineConfig engine;
    engine.depths = c.depths;
    engine.map = c.map;
    engine.threads = c.threads;
    std::function<std::unique_ptr<VectorField>(double)> family;
    RunConfig widest = c;
    if (c.model == ModelKind::Lorenz) {
        widest.lorenz.r = params.back();
        family = [base = c.lorenz](double r) {
            LorenzParams p = base;
            p.r = r;
            return std::unique_ptr<VectorField>(std::make_unique<LorenzModel>(p));
        };
    } else {
        widest.normal_form.lambda = params.back();
        family = [base = c.normal_form](double l) {
            NormalFormParams p = base;
            p.lambda = l;
            return std::unique_ptr<VectorField>(std::make_unique<NormalFormModel>(p));
        };
    }
    const Grid grid = make_grid(widest, *make_model(widest));
    const ContinuationTrack track = track_continuation(family, params, grid, engine);

    json steps = json::array();
    std::ostringstream csv;
    csv << "param,node,label,cubes\n";
    for (std::size_t i = 0; i < track.params.size(); ++i) {
        MorseGraph mg = track.graphs[i];
        if (c.model == ModelKind::Lorenz) {
            LorenzParams p = c.lorenz;
            p.r = track.params[i];
            label_lorenz_nodes(mg, grid, p);
        }
        json step = morse_graph_json(mg);
        step["param"] = track.params[i];
        if (i + 1 < track.params.size()) {
            json matches = json::array();
            for (const auto& m : track.matches[i]) {
                matches.push_back({{"from", m.from},
                                   {"to", m.to},
                                   {"overlap", m.overlap},
                                   {"hausdorff", m.hausdorff},
                                   {"ambiguous", m.ambiguous}});
            }
            step["matches_to_next"] = matches;
        }
        steps.push_back(step);
        for (std::size_t n = 0; n < mg.size(); ++n) {
            csv << track.params[i] << ',' << n << ',' << mg.nodes[n].label << ',' << mg.nodes[n].cubes.size() << '\n';
        }
    }
    if (!csv_path.empty()) {
        write_file_atomic(csv_path, csv.str());
    }
    sink.emit(json{{"model", to_string(c.model)}, {"depths", c.depths}, {"tau", c.map.tau}, {"steps", steps}});
    return kExitOk;
}

struct SymbolsArgs {
    int length = 5;
    std::string periodic;
    double lyapunov_time = 0.0;
    std::string crossings_csv;
    double crossings_time = 100.0;
    bool swap = false;
};

int run_symbols(const RunConfig& c, const SymbolsArgs& a, const Sink& sink)
{
    require_lorenz(c, "symbols");
    const LorenzModel model(c.lorenz);
    SymbolConfig cfg;
    cfg.integrator = IntegratorConfig::precise(c.integrator_tol);
    cfg.seeds = c.symbol_seeds;
    cfg.threads = c.threads;
    cfg.swap = a.swap;
    json out{{"r", c.lorenz.r}};
    out["words"] = verify_word_realization(model, a.length, cfg);
    if (!a.periodic.empty()) {
        out["periodic_orbit"] = find_periodic_orbit(model, a.periodic, cfg);
    }
    if (a.lyapunov_time > 0.0) {
        const auto eqs = find_equilibria(c.lorenz);
        StateVec x0 = eqs.back().state;
        x0[0] += 0.5;
        const LyapunovResult l = largest_lyapunov(model, x0, a.lyapunov_time);
        out["lyapunov"] = {{"exponent", l.exponent}, {"std_error", l.std_error}, {"segments", l.segments}};
    }
    if (!a.crossings_csv.empty()) {
        const auto seeds = section_seeds(model, 1, cfg.seed_span);
        const auto crossings = section_crossings(model, seeds.front(), a.crossings_time, cfg.integrator);
        std::ostringstream csv;
        write_crossings_csv(csv, crossings, cfg.swap, cfg.dead_band);
        write_file_atomic(a.crossings_csv, csv.str());
        out["crossings_written"] = crossings.size();
    }
    sink.emit(out);
    return kExitOk;
}

int run_pitchfork(const RunConfig& c, const std::vector<double>& lambdas, double tau_scale, bool depths_given,
                  const Sink& sink)
{
    const std::vector<int> depths = depths_given ? c.depths : std::vector<int>{6, 6, 4};
    if (depths.size() != 3) {
        throw ContractViolation("pitchfork-demo uses n = 3; give three depths");
    }
    json runs = json::array();
    for (double l : lambdas) {
        runs.push_back(pitchfork_demo_json(run_pitchfork_demo(l, c.threads, depths, tau_scale)));
    }
    sink.emit(json{{"n", 3}, {"k", 2}, {"runs", runs}});
    return kExitOk;
}

int run_report(const RunConfig& c, const std::string& suite_name, std::ostream& err)
{
    Suite suite;
    if (suite_name == "paper") {
        suite = Suite::Paper;
    } else if (suite_name == "fast") {
        suite = Suite::Fast;
    } else {
        throw ContractViolation("--suite must be paper or fast");
    }
    const ReproductionReport rep = run_suite(suite, c, &err);
    const ReportFiles files = emit_report(rep, c.output_dir);
    err << "wrote " << files.json.string() << " and " << files.markdown.string() << "\n";
    return rep.failures() == 0 ? kExitOk : kExitClaimFailure;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Conley index and Morse decomposition toolkit for the Lorenz system", "conley"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    Overrides common;
    std::string out_path;
    auto with_common = [&](CLI::App* sub) {
        add_common(*sub, common);
        sub->add_option("--out", out_path, "write the result to this file instead of stdout");
        return sub;
    };

    auto* eq = with_common(app.add_subcommand("equilibria", "equilibria and their linearizations"));

    std::string kind = "hopf";
    double tol = 1e-6;
    auto* th = with_common(app.add_subcommand("thresholds", "bifurcation thresholds by bisection"));
    th->add_option("--kind", kind, "pitchfork, hopf, homoclinic or heteroclinic")->required();
    th->add_option("--tol", tol, "bracket width");

    std::string csv_path;
    auto* sw = with_common(app.add_subcommand("sweep", "Morse graphs over parameter values, nodes matched"));
    sw->add_option("--csv", csv_path, "node table as CSV");

    std::string format = "dot";
    bool indices = false;
    auto* mo = with_common(app.add_subcommand("morse", "Morse graph of the sampled time-tau map"));
    mo->add_option("--format", format, "dot or json");
    mo->add_flag("--indices", indices, "compute Conley indices of the nodes");

    int node = -1;
    auto* ix = with_common(app.add_subcommand("index", "Conley index polynomials of the Morse nodes"));
    ix->add_option("--node", node, "report one node only");

    SymbolsArgs sym;
    auto* sy = with_common(app.add_subcommand("symbols", "S/T coding, word counts, periodic orbits"));
    sy->add_option("--length", sym.length, "word length (at most 8)");
    sy->add_option("--periodic", sym.periodic, "symbol code of a periodic orbit to find, e.g. ST");
    sy->add_option("--lyapunov", sym.lyapunov_time, "largest Lyapunov exponent over this time");
    sy->add_option("--crossings-csv", sym.crossings_csv, "section crossings of one seed as CSV");
    sy->add_option("--crossings-time", sym.crossings_time, "integration time for --crossings-csv");
    sy->add_flag("--swap", sym.swap, "code x > 0 as T");

    std::vector<double> lambdas{0.25, 0.01};
    double tau_scale = 2.0;
    auto* pf = with_common(app.add_subcommand("pitchfork-demo", "normal-form pitchfork attractors"));
    pf->add_option("--lambdas", lambdas, "lambda values")->delimiter(',');
    pf->add_option("--tau-scale", tau_scale, "tau = tau_scale / lambda");

    std::string suite = "paper";
    auto* rp = with_common(app.add_subcommand("report", "reproduction report as JSON and Markdown"));
    rp->add_option("--suite", suite, "paper or fast");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        const RunConfig c = resolve(common);
        const Sink sink(out_path, out);
        if (eq->parsed()) return run_equilibria(c, sink);
        if (th->parsed()) return run_thresholds(c, kind, tol, sink);
        if (sw->parsed()) return run_sweep(c, csv_path, sink);
        if (mo->parsed()) return run_morse_cmd(c, format, indices, sink);
        if (ix->parsed()) return run_index_cmd(c, node, sink);
        if (sy->parsed()) return run_symbols(c, sym, sink);
        if (pf->parsed()) return run_pitchfork(c, lambdas, tau_scale, common.given("depths"), sink);
        if (rp->parsed()) return run_report(c, suite, err);
    } catch (const Error& e) {
        switch (e.category()) {
        case Error::Category::Contract:
            err << "usage error: " << e.what() << "\n\n" << app.help();
            return kExitUsage;
        case Error::Category::Numerical:
            err << "numerical failure: " << e.what() << "\n";
            return kExitNumerical;
        case Error::Category::Io:
            err << "i/o error: " << e.what() << "\n";
            return kExitNumerical;
        }
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}

}  // namespace conley
