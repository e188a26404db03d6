#pragma once

// Run configuration, atomic artifact writes and reproduction reports.

#include "conley/cubical.hpp"
#include "conley/flow.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace conley {

enum class ModelKind { Lorenz, NormalForm };

std::string to_string(ModelKind m);

struct RunConfig {
    ModelKind model = ModelKind::Lorenz;
    LorenzParams lorenz;
    NormalFormParams normal_form;
    std::vector<int> depths{7, 7, 7};
    OuterMapConfig map;
    /// Grid box = trapping box scaled by this factor about its center.
    double box_scale = 1.0;
    double integrator_tol = 1e-10;
    /// Parameter values for `sweep` (r for Lorenz, lambda for the normal form).
    std::vector<double> sweep;
    std::string output_dir = "conley-out";
    int threads = 0;
    std::uint64_t seed = 1;
    std::size_t symbol_seeds = 100000;

    void validate() const;
};

/// Unknown keys throw ContractViolation; missing keys keep `base`.
RunConfig parse_run_config(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
void to_json(nlohmann::json& j, const RunConfig& c);
/// Pretty-printed JSON with a trailing newline.
std::string serialize(const RunConfig& c);

/// CONLEY_OUTPUT_DIR, when set and non-empty, replaces output_dir.
void apply_environment(RunConfig& c);

std::unique_ptr<VectorField> make_model(const RunConfig& c);
Grid make_grid(const RunConfig& c, const VectorField& model);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a, as 16 hex digits.
std::string content_hash(std::string_view bytes);

struct ClaimRow {
    std::string id;
    /// Quoted phrase the claim rests on.
    std::string location;
    nlohmann::json computed;
    nlohmann::json expected;
    std::string tolerance;
    bool pass = false;
    /// Grid, tolerance and method details.
    nlohmann::json metadata = nlohmann::json::object();
    /// Wall time; kept out of the JSON so reruns stay byte-identical.
    double seconds = 0.0;
};

struct ReproductionReport {
    nlohmann::json config = nlohmann::json::object();
    std::vector<ClaimRow> rows;
    /// Digests of every transition graph the rows consumed.
    std::vector<std::string> graph_digests;

    std::size_t failures() const;
};

void to_json(nlohmann::json& j, const ClaimRow& r);
void to_json(nlohmann::json& j, const ReproductionReport& r);
std::string to_markdown(const ReproductionReport& r);

struct ReportFiles {
    std::filesystem::path json;
    std::filesystem::path markdown;
};

/// report.json and report.md under `dir`, created if missing.
ReportFiles emit_report(const ReproductionReport& r, const std::filesystem::path& dir);

struct ClaimInfo {
    std::string id;
    std::string location;
    /// Runs in the fast suite.
    bool fast = false;
};

/// One entry per acceptance claim, in order.
const std::vector<ClaimInfo>& claim_catalog();

enum class Suite { Paper, Fast };

/// Runs the claims of the suite.  A claim that throws becomes a failing row
/// carrying the error message.  Progress lines go to `log` when non-null.
ReproductionReport run_suite(Suite suite, const RunConfig& c, std::ostream* log = nullptr);

}  // namespace conley
