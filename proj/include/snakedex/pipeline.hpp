#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "snakedex/design_io.hpp"
#include "snakedex/dexterity.hpp"
#include "snakedex/diff_evolution.hpp"
#include "snakedex/scene.hpp"
#include "snakedex/stats.hpp"
#include "snakedex/voxel_grid.hpp"

namespace snakedex {

inline constexpr const char* kToolName = "snakedex";
inline constexpr const char* kToolVersion = "0.1.0";

std::string hash_hex(uint64_t hash);

// ---- gen-scene ----

struct GenSceneOptions {
    std::string preset = "cavity-wall-shelf";
    std::array<int, 3> dims = {20, 20, 20};
    double edge_mm = 2.0;
    uint64_t seed = 1;
    std::filesystem::path out_path;
};

struct GenSceneResult {
    VoxelGrid grid;
    std::string scene_hash;
};

GenSceneResult run_gen_scene(const GenSceneOptions& opt);

// ---- eval ----

struct EvalOptions {
    std::filesystem::path grid_path;
    std::optional<DesignParams> design;     // resolved design wins over the two below
    std::filesystem::path design_path;      // key-value design file
    std::string preset;                     // rigid | single | double
    EvalSettings settings;
    std::filesystem::path out_dir;
    bool write_ply = true;
    std::string expected_grid_hash;         // set on manifest replay; checked on load
};

struct EvalResult {
    FitnessReport report;
    DesignParams design;
    std::string scene_hash;
    std::filesystem::path report_path;
    std::filesystem::path field_csv_path;
    std::filesystem::path field_ply_path; // empty when not written
    std::filesystem::path manifest_path;
};

EvalResult run_eval(const EvalOptions& opt);

// Rebuilds the options recorded in an eval manifest; out_dir must be supplied
// by the caller. The grid file hash is re-checked on load.
EvalOptions eval_options_from_manifest(const std::filesystem::path& manifest_path);

// ---- optimize ----

struct OptimizeOptions {
    std::filesystem::path grid_path;
    int segments = 1;
    int population = 0;       // 0 -> 10 * 3 * segments
    double de_f = 0.8;
    double de_cr = 0.7;
    int generations = 50;
    double time_budget_s = 600.0;
    int repeats = 10;
    uint64_t seed = 1;        // repeat r evaluates with fitness seed = seed + r
    EvalSettings fitness_settings; // seed field is overridden per repeat
    int workers = 1;
    std::filesystem::path out_dir;
};

struct OptimizeResult {
    RunTrace trace;
    DesignParams best_design;
    FitnessReport best_report;
    std::string scene_hash;
    std::filesystem::path trace_path;
    std::filesystem::path summary_path;
    std::filesystem::path best_design_path;
    std::filesystem::path best_report_path;
    std::filesystem::path manifest_path;
};

OptimizeResult run_optimize(const OptimizeOptions& opt);

// ---- report ----

struct ReportOptions {
    std::vector<std::filesystem::path> inputs; // eval reports, optimize summaries, traces
    std::filesystem::path out_dir;
};

struct ReportResult {
    std::string table_text;
    std::filesystem::path table_csv_path;
    std::vector<std::filesystem::path> convergence_csv_paths;
    std::optional<ComparisonReport> comparison;
    std::filesystem::path comparison_path; // empty when no comparison ran
};

ReportResult run_report(const ReportOptions& opt);

} // namespace snakedex
