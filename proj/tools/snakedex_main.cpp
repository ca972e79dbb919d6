#include <cstdio>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "snakedex/pipeline.hpp"

namespace {

int default_workers()
{
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"snakedex: dexterity-optimized snake manipulator design pipeline"};
    app.require_subcommand(1);

    // gen-scene
    snakedex::GenSceneOptions gen;
    std::vector<int> gen_dims = {20, 20, 20};
    std::string gen_out;
    CLI::App* cmd_gen = app.add_subcommand("gen-scene", "generate a synthetic voxel scene");
    cmd_gen->add_option("--preset", gen.preset, "scene preset (cavity-wall-shelf, toy-shelf)")
        ->capture_default_str();
    cmd_gen->add_option("--dims", gen_dims, "grid dims nx ny nz")->expected(3);
    cmd_gen->add_option("--edge", gen.edge_mm, "voxel edge, mm")->capture_default_str();
    cmd_gen->add_option("--seed", gen.seed, "scene seed")->capture_default_str();
    cmd_gen->add_option("--out", gen_out, "output grid file")->required();

    // eval
    snakedex::EvalOptions eva;
    std::string eval_grid, eval_design, eval_preset, eval_out, eval_manifest;
    eva.settings.workers = default_workers();
    bool no_ply = false;
    CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate a design's dexterity on a scene");
    cmd_eval->add_option("--grid", eval_grid, "voxel grid file");
    cmd_eval->add_option("--design", eval_design, "design file");
    cmd_eval->add_option("--preset", eval_preset, "design preset (rigid, single, double)");
    cmd_eval->add_option("--samples", eva.settings.sample_size, "Monte-Carlo sample count")
        ->capture_default_str();
    cmd_eval->add_option("--ntheta", eva.settings.n_theta, "service sphere longitude bands")
        ->capture_default_str();
    cmd_eval->add_option("--nh", eva.settings.n_h, "service sphere latitude bands")
        ->capture_default_str();
    cmd_eval->add_option("--seed", eva.settings.seed, "sampling seed")->capture_default_str();
    cmd_eval->add_option("--dilation", eva.settings.dilation_radius_mm,
                         "obstacle dilation radius, mm (default: robot half-width)")
        ->capture_default_str();
    cmd_eval->add_option("--workers", eva.settings.workers, "worker threads")
        ->capture_default_str();
    cmd_eval->add_flag("--no-ply", no_ply, "skip the PLY point-cloud export");
    cmd_eval->add_option("--from-manifest", eval_manifest,
                         "replay a recorded run; other flags except --out are ignored");
    cmd_eval->add_option("--out", eval_out, "output directory")->required();

    // optimize
    snakedex::OptimizeOptions opti;
    std::string opt_grid, opt_out;
    opti.workers = default_workers();
    CLI::App* cmd_opt = app.add_subcommand("optimize", "optimize a design with differential evolution");
    cmd_opt->add_option("--grid", opt_grid, "voxel grid file")->required();
    cmd_opt->add_option("--segments", opti.segments, "snake segment count s (genome length 3s)")
        ->capture_default_str();
    cmd_opt->add_option("--pop", opti.population, "population NP (default 10*3*segments)");
    cmd_opt->add_option("--de-f", opti.de_f, "differential weight F")->capture_default_str();
    cmd_opt->add_option("--de-cr", opti.de_cr, "crossover rate CR")->capture_default_str();
    cmd_opt->add_option("--generations", opti.generations, "generation budget")
        ->capture_default_str();
    cmd_opt->add_option("--time-budget-s", opti.time_budget_s,
                        "wall-clock budget per repeat, seconds (0 = unlimited)")
        ->capture_default_str();
    cmd_opt->add_option("--repeats", opti.repeats, "independent optimization repeats")
        ->capture_default_str();
    cmd_opt->add_option("--seed", opti.seed, "base seed; repeat r uses seed+r")
        ->capture_default_str();
    cmd_opt->add_option("--samples", opti.fitness_settings.sample_size,
                        "Monte-Carlo samples per fitness evaluation")
        ->capture_default_str();
    cmd_opt->add_option("--ntheta", opti.fitness_settings.n_theta, "service sphere longitude bands")
        ->capture_default_str();
    cmd_opt->add_option("--nh", opti.fitness_settings.n_h, "service sphere latitude bands")
        ->capture_default_str();
    cmd_opt->add_option("--dilation", opti.fitness_settings.dilation_radius_mm,
                        "obstacle dilation radius, mm")
        ->capture_default_str();
    cmd_opt->add_option("--workers", opti.workers, "worker threads")->capture_default_str();
    cmd_opt->add_option("--out", opt_out, "output directory")->required();

    // report
    snakedex::ReportOptions rep;
    std::vector<std::string> rep_inputs;
    std::string rep_out;
    CLI::App* cmd_rep = app.add_subcommand("report", "summarize reports, traces and comparisons");
    cmd_rep->add_option("inputs", rep_inputs, "eval reports, optimize summaries, trace files")
        ->required();
    cmd_rep->add_option("--out", rep_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_gen->parsed()) {
            gen.dims = {gen_dims[0], gen_dims[1], gen_dims[2]};
            gen.out_path = gen_out;
            const auto result = snakedex::run_gen_scene(gen);
            std::printf("scene %s: %d x %d x %d voxels, edge %.3g mm, %zu obstacle, %zu ROI\n",
                        gen_out.c_str(), result.grid.dims[0], result.grid.dims[1],
                        result.grid.dims[2], result.grid.edge,
                        result.grid.count(snakedex::VoxelLabel::Obstacle),
                        result.grid.count(snakedex::VoxelLabel::RegionOfInterest));
            std::printf("scene hash %s\n", result.scene_hash.c_str());
        } else if (cmd_eval->parsed()) {
            if (!eval_manifest.empty()) {
                const int workers_override = eva.settings.workers;
                eva = snakedex::eval_options_from_manifest(eval_manifest);
                if (cmd_eval->count("--workers"))
                    eva.settings.workers = workers_override;
            } else {
                eva.grid_path = eval_grid;
                eva.design_path = eval_design;
                eva.preset = eval_preset;
                eva.write_ply = !no_ply;
                if (eval_grid.empty())
                    throw std::invalid_argument("eval: --grid is required (or --from-manifest)");
            }
            eva.out_dir = eval_out;
            const auto result = snakedex::run_eval(eva);
            std::printf("%s: mean dexterity %.6g, max %.6g, fitness %.6g\n",
                        snakedex::design_label(result.design).c_str(),
                        result.report.mean_dexterity, result.report.max_dexterity,
                        result.report.fitness);
            std::printf("accepted %llu of %llu samples in %.2f s\n",
                        static_cast<unsigned long long>(result.report.samples_accepted),
                        static_cast<unsigned long long>(result.report.samples_total),
                        result.report.wall_time_s);
            std::printf("wrote %s\n", result.report_path.string().c_str());
        } else if (cmd_opt->parsed()) {
            opti.grid_path = opt_grid;
            opti.out_dir = opt_out;
            const auto result = snakedex::run_optimize(opti);
            const auto& best = result.trace.overall_best();
            std::printf("best design (repeat %d): F=%.6g, mean dexterity %.6g, max %.6g\n",
                        best.repeat, best.best_f, result.best_report.mean_dexterity,
                        result.best_report.max_dexterity);
            std::printf("wrote %s\n", result.summary_path.string().c_str());
        } else if (cmd_rep->parsed()) {
            rep.inputs.assign(rep_inputs.begin(), rep_inputs.end());
            rep.out_dir = rep_out;
            const auto result = snakedex::run_report(rep);
            std::fputs(result.table_text.c_str(), stdout);
            std::printf("wrote %s\n", result.table_csv_path.string().c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
