#include "snakedex/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace snakedex {

using nlohmann::json;

namespace {

std::string format_g(double v, int precision = 9)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json design_to_json(const DesignParams& d)
{
    json segments = json::array();
    for (const SegmentSpec& seg : d.segments)
        segments.push_back({{"alpha", seg.alpha}, {"d", seg.d}, {"n", seg.n}});
    return {{"segments", segments},
            {"w", d.width},
            {"tool_length", d.tool_length},
            {"shaft_clearance", d.shaft_clearance},
            {"port_cone", d.port_cone_rad}};
}

DesignParams design_from_json(const json& j)
{
    DesignParams d;
    d.width = j.at("w").get<double>();
    d.tool_length = j.at("tool_length").get<double>();
    d.shaft_clearance = j.at("shaft_clearance").get<double>();
    d.port_cone_rad = j.value("port_cone", d.port_cone_rad);
    for (const json& seg : j.at("segments"))
        d.segments.push_back(
            {seg.at("alpha").get<double>(), seg.at("d").get<double>(), seg.at("n").get<int>()});
    d.validate();
    return d;
}

json settings_to_json(const EvalSettings& s)
{
    return {{"sample_size", s.sample_size},
            {"n_theta", s.n_theta},
            {"n_h", s.n_h},
            {"seed", s.seed},
            {"dilation_radius_mm", s.dilation_radius_mm}};
}

EvalSettings settings_from_json(const json& j)
{
    EvalSettings s;
    s.sample_size = j.at("sample_size").get<uint64_t>();
    s.n_theta = j.at("n_theta").get<int>();
    s.n_h = j.at("n_h").get<int>();
    s.seed = j.at("seed").get<uint64_t>();
    s.dilation_radius_mm = j.at("dilation_radius_mm").get<double>();
    return s;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// Field rows in x-fastest voxel order.
std::string field_to_csv(const DexterityField& field, const VoxelGrid& grid)
{
    std::vector<VoxelIndex> keys;
    keys.reserve(field.size());
    for (const auto& [v, dex] : field)
        keys.push_back(v);
    std::sort(keys.begin(), keys.end(), [](const VoxelIndex& a, const VoxelIndex& b) {
        return std::tie(a.iz, a.iy, a.ix) < std::tie(b.iz, b.iy, b.ix);
    });

    std::string out = "ix,iy,iz,cx_mm,cy_mm,cz_mm,dex\n";
    for (const VoxelIndex& v : keys) {
        const Eigen::Vector3d c = grid.voxel_center(v);
        out += std::to_string(v.ix) + "," + std::to_string(v.iy) + "," + std::to_string(v.iz)
            + "," + format_g(c.x()) + "," + format_g(c.y()) + "," + format_g(c.z()) + ","
            + format_g(field.at(v)) + "\n";
    }
    return out;
}

std::string field_to_ply(const DexterityField& field, const VoxelGrid& grid)
{
    std::vector<VoxelIndex> keys;
    for (const auto& [v, dex] : field)
        keys.push_back(v);
    std::sort(keys.begin(), keys.end(), [](const VoxelIndex& a, const VoxelIndex& b) {
        return std::tie(a.iz, a.iy, a.ix) < std::tie(b.iz, b.iy, b.ix);
    });

    std::string out = "ply\nformat ascii 1.0\ncomment dexterity field, one vertex per ROI voxel\n";
    out += "element vertex " + std::to_string(keys.size()) + "\n";
    out += "property float x\nproperty float y\nproperty float z\nproperty float dex\n";
    out += "end_header\n";
    for (const VoxelIndex& v : keys) {
        const Eigen::Vector3d c = grid.voxel_center(v);
        out += format_g(c.x()) + " " + format_g(c.y()) + " " + format_g(c.z()) + " "
            + format_g(field.at(v)) + "\n";
    }
    return out;
}

json report_to_json(const FitnessReport& report, const DesignParams& design,
                    const EvalSettings& settings, const std::string& scene_hash)
{
    // Deliberately excludes wall time and worker count: the file must be
    // byte-identical for any worker count and on replay.
    return {{"model", design_label(design)},
            {"design", design_to_json(design)},
            {"fitness", report.fitness},
            {"mean_dexterity", report.mean_dexterity},
            {"max_dexterity", report.max_dexterity},
            {"n_roi_voxels", report.field.size()},
            {"samples_accepted", report.samples_accepted},
            {"samples_total", report.samples_total},
            {"scene_hash", scene_hash},
            {"settings", settings_to_json(settings)}};
}

std::string genome_to_param_string(const Genome& genome)
{
    if (genome.empty())
        return "NA";
    std::string out;
    for (std::size_t i = 0; i < genome.size(); ++i) {
        if (i)
            out += ", ";
        out += format_g(genome[i], 4);
    }
    return out;
}

} // namespace

std::string hash_hex(uint64_t hash)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

GenSceneResult run_gen_scene(const GenSceneOptions& opt)
{
    if (opt.out_path.empty())
        throw std::invalid_argument("gen-scene: output path required");
    const SceneSpec spec = scene_preset(opt.preset, opt.dims, opt.edge_mm);
    GenSceneResult result;
    result.grid = gen_synthetic_scene(spec, opt.seed);
    if (opt.out_path.has_parent_path())
        std::filesystem::create_directories(opt.out_path.parent_path());
    save_grid(result.grid, opt.out_path);
    result.scene_hash = hash_hex(grid_content_hash(result.grid));
    return result;
}

EvalResult run_eval(const EvalOptions& opt)
{
    if (opt.out_dir.empty())
        throw std::invalid_argument("eval: output directory required");
    opt.settings.validate();

    DesignParams design;
    if (opt.design)
        design = *opt.design;
    else if (!opt.design_path.empty())
        design = load_design(opt.design_path);
    else if (!opt.preset.empty())
        design = design_preset(opt.preset);
    else
        throw std::invalid_argument("eval: provide a design file or a preset");

    const VoxelGrid loaded = load_grid(opt.grid_path);
    const std::string scene_hash = hash_hex(grid_content_hash(loaded));
    if (!opt.expected_grid_hash.empty() && opt.expected_grid_hash != scene_hash)
        throw std::runtime_error("eval: grid hash mismatch: manifest recorded "
                                 + opt.expected_grid_hash + " but " + opt.grid_path.string()
                                 + " hashes to " + scene_hash);
    const VoxelGrid grid = preprocess_grid(loaded, opt.settings.dilation_radius_mm);

    EvalResult result;
    result.design = design;
    result.scene_hash = scene_hash;
    result.report = evaluate_fitness(design, grid, opt.settings);

    std::filesystem::create_directories(opt.out_dir);
    result.report_path = opt.out_dir / "report.json";
    write_text_file(result.report_path,
                    dump_json(report_to_json(result.report, design, opt.settings, scene_hash)));
    result.field_csv_path = opt.out_dir / "field.csv";
    write_text_file(result.field_csv_path, field_to_csv(result.report.field, grid));
    if (opt.write_ply) {
        result.field_ply_path = opt.out_dir / "field.ply";
        write_text_file(result.field_ply_path, field_to_ply(result.report.field, grid));
    }

    json manifest = {{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                     {"command", "eval"},
                     {"grid", {{"path", opt.grid_path.string()}, {"hash", scene_hash}}},
                     {"design", design_to_json(design)},
                     {"settings", settings_to_json(opt.settings)},
                     {"workers", opt.settings.workers},
                     {"write_ply", opt.write_ply}};
    result.manifest_path = opt.out_dir / "manifest.json";
    write_text_file(result.manifest_path, dump_json(manifest));
    return result;
}

EvalOptions eval_options_from_manifest(const std::filesystem::path& manifest_path)
{
    const json manifest = json::parse(read_text_file(manifest_path));
    if (manifest.at("command").get<std::string>() != "eval")
        throw std::invalid_argument("manifest replay: not an eval manifest: "
                                    + manifest_path.string());
    EvalOptions opt;
    opt.grid_path = manifest.at("grid").at("path").get<std::string>();
    opt.design = design_from_json(manifest.at("design"));
    opt.settings = settings_from_json(manifest.at("settings"));
    opt.settings.workers = manifest.at("workers").get<int>();
    opt.write_ply = manifest.at("write_ply").get<bool>();
    opt.expected_grid_hash = manifest.at("grid").at("hash").get<std::string>();
    return opt;
}

OptimizeResult run_optimize(const OptimizeOptions& opt)
{
    if (opt.out_dir.empty())
        throw std::invalid_argument("optimize: output directory required");
    if (opt.segments < 1)
        throw std::invalid_argument("optimize: segments must be >= 1");
    if (opt.generations < 1)
        throw std::invalid_argument("optimize: generation budget must be >= 1");

    const VoxelGrid loaded = load_grid(opt.grid_path);
    const std::string scene_hash = hash_hex(grid_content_hash(loaded));
    const VoxelGrid grid = preprocess_grid(loaded, opt.fitness_settings.dilation_radius_mm);

    DEConfig cfg;
    cfg.f_weight = opt.de_f;
    cfg.cr = opt.de_cr;
    cfg.population = opt.population;
    cfg.bounds = default_design_bounds(opt.segments);
    cfg.integer_genes = integer_gene_indices(opt.segments);
    cfg.max_generations = opt.generations;
    cfg.time_budget_s = opt.time_budget_s;
    cfg.seed = opt.seed;
    cfg.repeats = opt.repeats;
    cfg.workers = opt.workers;

    const std::vector<int> integer_genes = cfg.integer_genes;
    EvalSettings fitness_settings = opt.fitness_settings;
    fitness_settings.workers = 1; // DE parallelizes across trials instead
    const uint64_t base_seed = opt.seed;
    const FitnessFn fitness = [&grid, fitness_settings, integer_genes,
                               base_seed](const Genome& genome, int repeat) {
        EvalSettings settings = fitness_settings;
        settings.seed = base_seed + static_cast<uint64_t>(repeat);
        const DesignParams design = decode_design(genome, integer_genes);
        return evaluate_fitness(design, grid, settings).fitness;
    };

    OptimizeResult result;
    result.scene_hash = scene_hash;
    result.trace = run(fitness, cfg);

    std::filesystem::create_directories(opt.out_dir);

    // Trace: generation records in repeat order, then that repeat's summary.
    std::string trace_text;
    for (const RepeatResult& rep : result.trace.repeats) {
        for (const GenerationRecord& rec : result.trace.generations) {
            if (rec.repeat != rep.repeat)
                continue;
            const json line = {{"repeat", rec.repeat},     {"gen", rec.gen},
                               {"best_F", rec.best_f},     {"mean_F", rec.mean_f},
                               {"best_genome", rec.best_genome}, {"elapsed_s", rec.elapsed_s}};
            trace_text += line.dump() + "\n";
        }
        const json line = {{"repeat", rep.repeat},
                           {"summary", true},
                           {"best_F", rep.best_f},
                           {"best_genome", rep.best_genome},
                           {"generations_run", rep.generations_run},
                           {"elapsed_s", rep.elapsed_s}};
        trace_text += line.dump() + "\n";
    }
    result.trace_path = opt.out_dir / "trace.jsonl";
    write_text_file(result.trace_path, trace_text);

    const RepeatResult& best = result.trace.overall_best();
    result.best_design = decode_design(best.best_genome, integer_genes);
    result.best_design_path = opt.out_dir / "best.design";
    save_design(result.best_design, result.best_design_path);

    // Full evaluation of the winner, reusable as an eval-style report.
    EvalSettings best_settings = opt.fitness_settings;
    best_settings.seed = base_seed + static_cast<uint64_t>(best.repeat);
    best_settings.workers = opt.workers;
    result.best_report = evaluate_fitness(result.best_design, grid, best_settings);
    result.best_report_path = opt.out_dir / "best_report.json";
    write_text_file(result.best_report_path,
                    dump_json(report_to_json(result.best_report, result.best_design,
                                             best_settings, scene_hash)));

    json repeats = json::array();
    for (const RepeatResult& rep : result.trace.repeats) {
        repeats.push_back({{"repeat", rep.repeat},
                           {"fitness_seed", base_seed + static_cast<uint64_t>(rep.repeat)},
                           {"best_F", rep.best_f},
                           {"best_mean_dexterity", rep.best_f == 0.0 ? 0.0 : -rep.best_f},
                           {"best_genome", rep.best_genome},
                           {"generations_run", rep.generations_run}});
    }
    const json summary = {{"command", "optimize"},
                          {"scene_hash", scene_hash},
                          {"segments", opt.segments},
                          {"de",
                           {{"f_weight", cfg.f_weight},
                            {"cr", cfg.cr},
                            {"population", cfg.resolved_population()},
                            {"generations", cfg.max_generations},
                            {"time_budget_s", cfg.time_budget_s},
                            {"seed", cfg.seed},
                            {"repeats", cfg.repeats}}},
                          {"fitness_settings", settings_to_json(opt.fitness_settings)},
                          {"repeats", repeats},
                          {"overall_best",
                           {{"repeat", best.repeat},
                            {"best_F", best.best_f},
                            {"genome", best.best_genome},
                            {"design", design_to_json(result.best_design)}}}};
    result.summary_path = opt.out_dir / "summary.json";
    write_text_file(result.summary_path, dump_json(summary));

    EvalSettings recorded_settings = opt.fitness_settings;
    recorded_settings.seed = opt.seed; // repeat r evaluates with seed + r
    const json manifest = {{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                           {"command", "optimize"},
                           {"grid", {{"path", opt.grid_path.string()}, {"hash", scene_hash}}},
                           {"segments", opt.segments},
                           {"de", summary.at("de")},
                           {"fitness_settings", settings_to_json(recorded_settings)},
                           {"workers", opt.workers}};
    result.manifest_path = opt.out_dir / "manifest.json";
    write_text_file(result.manifest_path, dump_json(manifest));
    return result;
}

namespace {

struct TableRow {
    std::string model;
    std::string parameters;
    double mean_dexterity = 0.0;
    double max_dexterity = 0.0;
};

struct SummaryInput {
    std::filesystem::path path;
    std::vector<double> repeat_dexterities;
};

} // namespace

ReportResult run_report(const ReportOptions& opt)
{
    if (opt.inputs.empty())
        throw std::invalid_argument("report: at least one input file required");
    std::filesystem::create_directories(opt.out_dir);

    std::vector<TableRow> rows;
    std::vector<SummaryInput> summaries;
    std::vector<std::pair<std::string, std::filesystem::path>> hashes;
    std::vector<std::filesystem::path> traces;

    for (const std::filesystem::path& input : opt.inputs) {
        if (input.extension() == ".jsonl") {
            traces.push_back(input);
            continue;
        }
        const json j = json::parse(read_text_file(input));
        if (j.contains("repeats")) { // optimize summary
            hashes.emplace_back(j.at("scene_hash").get<std::string>(), input);
            SummaryInput s;
            s.path = input;
            for (const json& rep : j.at("repeats"))
                s.repeat_dexterities.push_back(rep.at("best_mean_dexterity").get<double>());
            summaries.push_back(std::move(s));
            TableRow row;
            const json& best = j.at("overall_best");
            row.model = design_label(design_from_json(best.at("design")));
            row.parameters = genome_to_param_string(best.at("genome").get<Genome>());
            row.mean_dexterity = -best.at("best_F").get<double>();
            // Max dexterity comes from the optimizer's best_report when the
            // caller includes it as a separate eval-report input.
            row.max_dexterity = std::nan("");
            rows.push_back(std::move(row));
        } else if (j.contains("mean_dexterity")) { // eval report
            hashes.emplace_back(j.at("scene_hash").get<std::string>(), input);
            TableRow row;
            const DesignParams design = design_from_json(j.at("design"));
            row.model = j.value("model", design_label(design));
            row.parameters = genome_to_param_string(encode_design(design));
            row.mean_dexterity = j.at("mean_dexterity").get<double>();
            row.max_dexterity = j.at("max_dexterity").get<double>();
            rows.push_back(std::move(row));
        } else {
            throw std::invalid_argument("report: unrecognized input " + input.string());
        }
    }

    for (std::size_t i = 1; i < hashes.size(); ++i)
        if (hashes[i].first != hashes[0].first)
            throw std::invalid_argument("report: scene hash mismatch: " + hashes[0].first + " ("
                                        + hashes[0].second.string() + ") vs " + hashes[i].first
                                        + " (" + hashes[i].second.string() + ")");

    std::stable_sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) {
        return a.mean_dexterity > b.mean_dexterity;
    });

    ReportResult result;

    std::string table_csv = "model,parameters,mean_dexterity,max_dexterity\n";
    std::string text = "Model             Parameters                          Mean Dex   Max Dex\n";
    for (const TableRow& row : rows) {
        const std::string max_str = std::isnan(row.max_dexterity) ? "" : format_g(row.max_dexterity, 6);
        table_csv += row.model + ",\"" + row.parameters + "\"," + format_g(row.mean_dexterity, 6)
            + "," + max_str + "\n";
        char line[256];
        std::snprintf(line, sizeof(line), "%-17s %-35s %-10s %-10s\n", row.model.c_str(),
                      row.parameters.c_str(), format_g(row.mean_dexterity, 6).c_str(),
                      max_str.empty() ? "-" : max_str.c_str());
        text += line;
    }
    result.table_csv_path = opt.out_dir / "summary_table.csv";
    write_text_file(result.table_csv_path, table_csv);

    int conv_idx = 0;
    for (const std::filesystem::path& trace_path : traces) {
        std::istringstream in(read_text_file(trace_path));
        std::map<int, std::vector<double>> best_by_gen;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            const json rec = json::parse(line);
            if (rec.value("summary", false))
                continue;
            best_by_gen[rec.at("gen").get<int>()].push_back(rec.at("best_F").get<double>());
        }
        std::string csv = "gen,mean_best_F,std_best_F,n_repeats\n";
        for (const auto& [gen, values] : best_by_gen) {
            double mean = 0.0;
            for (double v : values)
                mean += v;
            mean /= static_cast<double>(values.size());
            double var = 0.0;
            for (double v : values)
                var += (v - mean) * (v - mean);
            const double stddev =
                values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
            csv += std::to_string(gen) + "," + format_g(mean) + "," + format_g(stddev) + ","
                + std::to_string(values.size()) + "\n";
        }
        const std::filesystem::path out =
            opt.out_dir / ("convergence_" + std::to_string(++conv_idx) + ".csv");
        write_text_file(out, csv);
        result.convergence_csv_paths.push_back(out);
    }

    if (summaries.size() == 2) {
        result.comparison =
            mann_whitney_z(summaries[0].repeat_dexterities, summaries[1].repeat_dexterities);
        const ComparisonReport& cmp = *result.comparison;
        const json cmp_json = {{"group_a", summaries[0].path.string()},
                               {"group_b", summaries[1].path.string()},
                               {"samples_a", cmp.samples_a},
                               {"samples_b", cmp.samples_b},
                               {"u_statistic", cmp.u_statistic},
                               {"z_score", cmp.z_score},
                               {"threshold_z", cmp.threshold_z},
                               {"significant", cmp.significant},
                               {"verdict", cmp.verdict}};
        result.comparison_path = opt.out_dir / "comparison.json";
        write_text_file(result.comparison_path, dump_json(cmp_json));
        text += "\nMann-Whitney (" + summaries[0].path.filename().string() + " vs "
            + summaries[1].path.filename().string() + "): U=" + format_g(cmp.u_statistic, 6)
            + ", Z=" + format_g(cmp.z_score, 6) + " -> " + cmp.verdict + "\n";
    } else if (summaries.size() > 2) {
        throw std::invalid_argument("report: Mann-Whitney comparison needs exactly two repeat "
                                    "sets; got "
                                    + std::to_string(summaries.size()));
    }

    result.table_text = text;
    write_text_file(opt.out_dir / "summary_table.txt", text);
    return result;
}

} // namespace snakedex
