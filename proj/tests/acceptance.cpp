// Acceptance suite: one test case per criterion, each printing a single
// [ACCEPT] pass/fail line. Heavier experiments write into a temp directory.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include "snakedex/pipeline.hpp"

using namespace snakedex;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

int workers()
{
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(8u, hw));
}

void accept_line(int criterion, const std::string& name, bool pass)
{
    std::printf("[ACCEPT] criterion %d (%s): %s\n", criterion, name.c_str(),
                pass ? "PASS" : "FAIL");
    std::fflush(stdout);
}

fs::path fresh_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("snakedex_accept_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool traces_monotone(const RunTrace& trace)
{
    for (const RepeatResult& rep : trace.repeats) {
        double prev = std::numeric_limits<double>::infinity();
        for (const GenerationRecord& rec : trace.generations) {
            if (rec.repeat != rep.repeat)
                continue;
            if (rec.best_f > prev)
                return false;
            prev = rec.best_f;
        }
    }
    return true;
}

} // namespace

TEST_CASE("criterion 1: ordering reproduction on the default scene")
{
    const fs::path dir = fresh_dir("ordering");
    GenSceneOptions gen;
    gen.out_path = dir / "scene.voxgrid"; // default cavity-wall-shelf, seed 1
    run_gen_scene(gen);

    EvalSettings settings;
    settings.sample_size = 100000;
    settings.seed = 1;
    settings.workers = workers();

    EvalOptions rigid;
    rigid.grid_path = gen.out_path;
    rigid.preset = "rigid";
    rigid.settings = settings;
    rigid.out_dir = dir / "rigid";
    const double rigid_dex = run_eval(rigid).report.mean_dexterity;

    auto optimize = [&](int segments) {
        OptimizeOptions opt;
        opt.grid_path = gen.out_path;
        opt.segments = segments;
        opt.generations = 50;
        opt.time_budget_s = 0.0;
        opt.repeats = 5;
        opt.seed = 1; // repeats use fitness seeds 1..5
        opt.fitness_settings = settings;
        opt.workers = workers();
        opt.out_dir = dir / ("opt_s" + std::to_string(segments));
        return run_optimize(opt);
    };
    const OptimizeResult one_seg = optimize(1);
    const OptimizeResult two_seg = optimize(2);

    auto repeat_dexterities = [](const OptimizeResult& r) {
        std::vector<double> out;
        for (const RepeatResult& rep : r.trace.repeats)
            out.push_back(rep.best_f == 0.0 ? 0.0 : -rep.best_f);
        return out;
    };
    const std::vector<double> dex1 = repeat_dexterities(one_seg);
    const std::vector<double> dex2 = repeat_dexterities(two_seg);
    const double med1 = median(dex1);
    const double med2 = median(dex2);
    const ComparisonReport cmp = mann_whitney_z(dex2, dex1);

    const bool monotone = traces_monotone(one_seg.trace) && traces_monotone(two_seg.trace);
    const bool pass = med2 > med1 && med1 > rigid_dex && cmp.z_score > 2.326 && monotone;
    std::printf("  rigid=%.5f  median 1-seg=%.5f  median 2-seg=%.5f  MW Z=%.4f\n", rigid_dex,
                med1, med2, cmp.z_score);
    accept_line(1, "Table-1 ordering, 2v1 Mann-Whitney Z > 2.326", pass);
    CHECK(med1 > rigid_dex);
    CHECK(med2 > med1);
    CHECK(cmp.z_score > 2.326);
    CHECK(monotone);
}

TEST_CASE("criterion 2: Monte-Carlo dexterity matches the exhaustive joint-grid oracle")
{
    const VoxelGrid grid = preprocess_grid(gen_synthetic_scene(toy_shelf_spec(), 1), 2.0);

    DesignParams design;
    design.segments.push_back({0.9, 3.0, 1}); // 1-segment, n=1 toy design: 4 DOF
    const double tool = design.tool_length;
    const double disk_d = design.segments[0].d;

    // ---- exhaustive oracle: hand-rolled kinematics over a 201^4 lattice ----
    const int kGridPoints = 201;
    const double insertion_max = grid.dims[2] * grid.edge;
    const double pan_limit = std::min(2.0 * design.segments[0].alpha, kPi);
    const std::vector<VoxelIndex> roi = grid.voxels_with(VoxelLabel::RegionOfInterest);
    std::vector<int32_t> roi_slot(grid.voxel_count(), -1);
    for (std::size_t i = 0; i < roi.size(); ++i)
        roi_slot[grid.flat_index(roi[i])] = static_cast<int32_t>(i);
    const int n_patches = 18 * 9;

    const int n_workers = workers();
    std::vector<std::vector<uint8_t>> sphere_bits(
        n_workers, std::vector<uint8_t>(roi.size() * n_patches, 0));

    auto lattice = [&](int j, double lo, double hi) {
        return lo + (hi - lo) * j / (kGridPoints - 1);
    };
    auto voxel_label = [&](double x, double y, double z) -> int {
        const int ix = static_cast<int>(std::floor((x - grid.origin.x()) / grid.edge));
        const int iy = static_cast<int>(std::floor((y - grid.origin.y()) / grid.edge));
        const int iz = static_cast<int>(std::floor((z - grid.origin.z()) / grid.edge));
        if (ix < 0 || ix >= grid.dims[0] || iy < 0 || iy >= grid.dims[1] || iz < 0
            || iz >= grid.dims[2])
            return -1;
        return static_cast<int>(
            grid.labels[(static_cast<std::size_t>(iz) * grid.dims[1] + iy) * grid.dims[0] + ix]);
    };
    // chord walk with the same ceil(dist / (edge/2)) stepping rule
    auto chord_ok = [&](const double a[3], const double b[3]) {
        const double dx = b[0] - a[0], dy = b[1] - a[1], dz = b[2] - a[2];
        const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
        const int steps = std::max(1, static_cast<int>(std::ceil(dist / (grid.edge / 2.0))));
        for (int s = 0; s <= steps; ++s) {
            const double t = static_cast<double>(s) / steps;
            const int label = voxel_label(a[0] + t * dx, a[1] + t * dy, a[2] + t * dz);
            if (label == -1 || label == static_cast<int>(VoxelLabel::Obstacle))
                return false;
        }
        return true;
    };

    auto oracle_worker = [&](int w, int pan_begin, int pan_end) {
        std::vector<uint8_t>& bits = sphere_bits[w];
        for (int jp = pan_begin; jp < pan_end; ++jp) {
            const double base_pan = lattice(jp, -kPi / 3, kPi / 3);
            const double cp = std::cos(base_pan), sp = std::sin(base_pan);
            for (int jt = 0; jt < kGridPoints; ++jt) {
                const double base_tilt = lattice(jt, -kPi / 3, kPi / 3);
                const double ct = std::cos(base_tilt), st = std::sin(base_tilt);
                // R = Rx(base_pan) * Ry(base_tilt), written out by hand
                const double R[3][3] = {{ct, 0, st},
                                        {sp * st, cp, -sp * ct},
                                        {-cp * st, sp, cp * ct}};
                for (int js = 0; js < kGridPoints; ++js) {
                    const double seg_pan = lattice(js, -pan_limit, pan_limit);
                    const double ch = std::cos(seg_pan / 2), sh = std::sin(seg_pan / 2);
                    // disk: Rx(t/2) Tz(d) Rx(t/2); translation Rx(t/2)*(0,0,d)
                    const double disk_t[3] = {0.0, -sh * disk_d, ch * disk_d};
                    const double c2 = std::cos(seg_pan), s2 = std::sin(seg_pan);
                    // tool offset in pre-disk frame: disk_t + Rx(seg_pan)*(0,0,tool)
                    const double local_tip[3] = {0.0, disk_t[1] - s2 * tool,
                                                 disk_t[2] + c2 * tool};
                    // tool axis direction: R * Rx(seg_pan) * e_z
                    const double axis_local[3] = {0.0, -s2, c2};
                    double p_z[3];
                    for (int r = 0; r < 3; ++r)
                        p_z[r] = R[r][0] * axis_local[0] + R[r][1] * axis_local[1]
                            + R[r][2] * axis_local[2];
                    // patch indices, same conventions as the library
                    int theta_idx = static_cast<int>(
                                        std::floor((std::atan2(p_z[1], p_z[0]) + kPi)
                                                   / (2.0 * kPi / 18.0)))
                        % 18;
                    if (theta_idx < 0)
                        theta_idx += 18;
                    int h_idx = static_cast<int>(std::floor((p_z[2] + 1.0) / (2.0 / 9.0)));
                    h_idx = std::clamp(h_idx, 0, 8);
                    const int patch = theta_idx * 9 + h_idx;

                    double tip_world[3], disk_world[3];
                    for (int r = 0; r < 3; ++r) {
                        tip_world[r] = R[r][0] * local_tip[0] + R[r][1] * local_tip[1]
                            + R[r][2] * local_tip[2];
                        disk_world[r] = R[r][0] * disk_t[0] + R[r][1] * disk_t[1]
                            + R[r][2] * disk_t[2];
                    }
                    const double axis_world[3] = {R[0][2], R[1][2], R[2][2]};
                    for (int ji = 0; ji < kGridPoints; ++ji) {
                        const double insertion = lattice(ji, 0.0, insertion_max);
                        const double tip[3] = {tip_world[0] + axis_world[0] * insertion,
                                               tip_world[1] + axis_world[1] * insertion,
                                               tip_world[2] + axis_world[2] * insertion};
                        const int ix =
                            static_cast<int>(std::floor((tip[0] - grid.origin.x()) / grid.edge));
                        const int iy =
                            static_cast<int>(std::floor((tip[1] - grid.origin.y()) / grid.edge));
                        const int iz =
                            static_cast<int>(std::floor((tip[2] - grid.origin.z()) / grid.edge));
                        if (ix < 0 || ix >= grid.dims[0] || iy < 0 || iy >= grid.dims[1] || iz < 0
                            || iz >= grid.dims[2])
                            continue;
                        const int32_t slot =
                            roi_slot[(static_cast<std::size_t>(iz) * grid.dims[1] + iy)
                                         * grid.dims[0]
                                     + ix];
                        if (slot < 0)
                            continue;
                        // skeleton chords: port -> shaft end -> disk end -> tip
                        const double origin[3] = {0, 0, 0};
                        const double shaft_end[3] = {axis_world[0] * insertion,
                                                     axis_world[1] * insertion,
                                                     axis_world[2] * insertion};
                        const double disk_end[3] = {shaft_end[0] + disk_world[0],
                                                    shaft_end[1] + disk_world[1],
                                                    shaft_end[2] + disk_world[2]};
                        if (!chord_ok(origin, shaft_end) || !chord_ok(shaft_end, disk_end)
                            || !chord_ok(disk_end, tip))
                            continue;
                        bits[static_cast<std::size_t>(slot) * n_patches + patch] = 1;
                    }
                }
            }
        }
    };

    std::vector<std::thread> threads;
    const int chunk = (kGridPoints + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w)
        threads.emplace_back(oracle_worker, w, w * chunk,
                             std::min(kGridPoints, (w + 1) * chunk));
    for (std::thread& t : threads)
        t.join();

    double oracle_covered = 0;
    for (std::size_t p = 0; p < roi.size() * static_cast<std::size_t>(n_patches); ++p) {
        uint8_t hit = 0;
        for (int w = 0; w < n_workers; ++w)
            hit |= sphere_bits[w][p];
        oracle_covered += hit;
    }
    const double oracle_mean = oracle_covered / (static_cast<double>(roi.size()) * n_patches);

    // ---- Monte-Carlo estimate through the library path ----
    EvalSettings settings;
    settings.sample_size = 1000000;
    settings.seed = 12345;
    settings.workers = workers();
    const FitnessReport mc = evaluate_fitness(design, grid, settings);

    const double rel = std::abs(mc.mean_dexterity - oracle_mean) / oracle_mean;
    std::printf("  oracle mean=%.6f  MC mean=%.6f  relative diff=%.3f%%\n", oracle_mean,
                mc.mean_dexterity, 100.0 * rel);
    const bool pass = rel <= 0.10;
    accept_line(2, "MC dexterity within 10% of exhaustive grid oracle", pass);
    CHECK(oracle_mean > 0.0);
    CHECK(rel <= 0.10);
}

TEST_CASE("criterion 3: patch partition geometry")
{
    // midpoint quadrature of area in (theta, z=cos phi) coordinates
    auto patch_area = [](int h_idx, int n_theta, int n_h) {
        const double d_theta = 2.0 * kPi / n_theta;
        const double z0 = -1.0 + 2.0 * static_cast<double>(h_idx) / n_h;
        const double z1 = -1.0 + 2.0 * static_cast<double>(h_idx + 1) / n_h;
        const double phi0 = std::acos(std::clamp(z1, -1.0, 1.0));
        const double phi1 = std::acos(std::clamp(z0, -1.0, 1.0));
        const int steps = 4000;
        const double h = (phi1 - phi0) / steps;
        double area = 0;
        for (int i = 0; i < steps; ++i)
            area += std::sin(phi0 + (i + 0.5) * h) * h;
        return area * d_theta;
    };
    const double expected = 4.0 * kPi / (18.0 * 9.0);
    bool area_ok = true;
    for (int h_idx : {0, 4, 8})
        area_ok = area_ok && std::abs(patch_area(h_idx, 18, 9) - expected) < 1e-6;

    bool mapping_ok = true;
    SplitMix64 rng(777);
    for (int i = 0; i < 1000000 && mapping_ok; ++i) {
        double x, y, z, s;
        do {
            x = rng.uniform(-1, 1);
            y = rng.uniform(-1, 1);
            z = rng.uniform(-1, 1);
            s = x * x + y * y + z * z;
        } while (s < 1e-6 || s > 1.0);
        const double inv = 1.0 / std::sqrt(s);
        const auto [t, h] = nearest_patch({x * inv, y * inv, z * inv}, 18, 9);
        mapping_ok = t >= 0 && t < 18 && h >= 0 && h < 9;
    }

    accept_line(3, "equal-area patches and total unit-sphere coverage", area_ok && mapping_ok);
    CHECK(area_ok);
    CHECK(mapping_ok);
}

TEST_CASE("criterion 4: forward kinematics correctness")
{
    bool straight_ok = true;
    for (const char* preset : {"single", "double"}) {
        const DesignParams p = design_preset(preset);
        const JointLimits limits = joint_limits(p, 40.0);
        JointConfig q = zero_config(p);
        q.q[2] = 11.5;
        double expected_z = 11.5 + p.tool_length;
        for (const SegmentSpec& seg : p.segments)
            expected_z += seg.n * seg.d;
        // Position is pinned by the closed form; the inter-segment roll zeta
        // may leave a rotation about z, so only the tool axis is checked.
        const RigidTransform tip = forward_kinematics(q, p, limits, 2.0);
        straight_ok = straight_ok
            && (tip.translation - Eigen::Vector3d(0, 0, expected_z)).norm() < 1e-9
            && (tip.tool_axis() - Eigen::Vector3d(0, 0, 1)).norm() < 1e-9;
    }

    // single-pan-segment bend telescopes to exactly seg_pan
    DesignParams bendy;
    bendy.segments.push_back({1.3, 2.0, 5});
    const JointLimits bend_limits = joint_limits(bendy, 40.0);
    SplitMix64 rng(1010);
    bool bend_ok = true;
    for (int i = 0; i < 1000; ++i) {
        JointConfig q = zero_config(bendy);
        q.q[3] = rng.uniform(bend_limits.dofs[3].lo, bend_limits.dofs[3].hi);
        const RigidTransform tip = forward_kinematics_frames(q, bendy, bend_limits, nullptr);
        const double bend = std::acos(std::clamp(tip.tool_axis().z(), -1.0, 1.0));
        bend_ok = bend_ok && std::abs(bend - std::abs(q.q[3])) < 1e-9;
    }

    DesignParams wiggly;
    wiggly.segments.push_back({1.2, 2.5, 5});
    wiggly.segments.push_back({0.9, 1.5, 4});
    const JointLimits wiggle_limits = joint_limits(wiggly, 40.0);
    bool ortho_ok = true;
    for (int i = 0; i < 10000; ++i) {
        const JointConfig q = sample_config(wiggle_limits, rng);
        const RigidTransform tip = forward_kinematics_frames(q, wiggly, wiggle_limits, nullptr);
        ortho_ok = ortho_ok && std::abs(tip.rotation.determinant() - 1.0) < 1e-9
            && (tip.rotation.transpose() * tip.rotation - Eigen::Matrix3d::Identity())
                    .cwiseAbs()
                    .maxCoeff()
                < 1e-9;
    }

    accept_line(4, "straight-config closed form, bend telescoping, orthonormality",
                straight_ok && bend_ok && ortho_ok);
    CHECK(straight_ok);
    CHECK(bend_ok);
    CHECK(ortho_ok);
}

TEST_CASE("criterion 5: DE sphere benchmark and trace monotonicity")
{
    int converged = 0;
    bool monotone = true;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        DEConfig cfg;
        cfg.bounds.assign(3, {-5.0, 5.0});
        cfg.population = 30;
        cfg.max_generations = 200;
        cfg.time_budget_s = 0.0;
        cfg.seed = seed;
        const RunTrace trace = run(
            [](const Genome& g, int) {
                double sum = 0;
                for (double v : g)
                    sum += v * v;
                return sum;
            },
            cfg);
        converged += trace.repeats[0].best_f < 1e-6;
        monotone = monotone && traces_monotone(trace);
    }
    std::printf("  sphere converged in %d/10 runs\n", converged);
    accept_line(5, "sphere best < 1e-6 in 10/10, traces monotone", converged == 10 && monotone);
    CHECK(converged == 10);
    CHECK(monotone);
}

TEST_CASE("criterion 6: byte-identical reports across worker counts and manifest replay")
{
    const fs::path dir = fresh_dir("determinism");
    GenSceneOptions gen;
    gen.out_path = dir / "scene.voxgrid";
    run_gen_scene(gen);

    EvalOptions opt;
    opt.grid_path = gen.out_path;
    opt.preset = "single";
    opt.settings.sample_size = 100000;
    opt.settings.seed = 42;
    opt.settings.workers = 1;
    opt.out_dir = dir / "w1";
    const EvalResult w1 = run_eval(opt);
    opt.settings.workers = 8;
    opt.out_dir = dir / "w8";
    const EvalResult w8 = run_eval(opt);

    const bool workers_identical = slurp(w1.report_path) == slurp(w8.report_path)
        && slurp(w1.field_csv_path) == slurp(w8.field_csv_path)
        && slurp(w1.field_ply_path) == slurp(w8.field_ply_path);

    EvalOptions replay = eval_options_from_manifest(w8.manifest_path);
    replay.out_dir = dir / "replay";
    const EvalResult again = run_eval(replay);
    const bool replay_identical = slurp(w8.report_path) == slurp(again.report_path)
        && slurp(w8.field_csv_path) == slurp(again.field_csv_path)
        && slurp(w8.field_ply_path) == slurp(again.field_ply_path)
        && slurp(w8.manifest_path) == slurp(again.manifest_path);

    accept_line(6, "workers=1 vs workers=8 and manifest replay byte-identical",
                workers_identical && replay_identical);
    CHECK(workers_identical);
    CHECK(replay_identical);
}

TEST_CASE("criterion 7: preprocessing properties on random scenes")
{
    SplitMix64 rng(4711);
    bool idempotent = true, connected = true, dilation_equiv = true;
    for (int trial = 0; trial < 100; ++trial) {
        VoxelGrid g;
        g.dims = {3 + static_cast<int>(rng.below(8)), 3 + static_cast<int>(rng.below(8)),
                  3 + static_cast<int>(rng.below(8))};
        g.edge = 2.0;
        g.labels.assign(g.voxel_count(), VoxelLabel::Free);
        for (VoxelLabel& l : g.labels) {
            const uint64_t r = rng.below(10);
            l = r < 6 ? VoxelLabel::Free
                      : (r < 9 ? VoxelLabel::Obstacle : VoxelLabel::RegionOfInterest);
        }
        g.port_voxel = {static_cast<int>(rng.below(g.dims[0])),
                        static_cast<int>(rng.below(g.dims[1])),
                        static_cast<int>(rng.below(g.dims[2]))};
        g.at(g.port_voxel) = VoxelLabel::Free;

        const VoxelGrid once = fill_unreachable_voids(g);
        idempotent = idempotent && fill_unreachable_voids(once).labels == once.labels;

        // independent connectivity sweep: repeated relaxation from the port
        std::vector<uint8_t> reach(once.voxel_count(), 0);
        reach[once.flat_index(once.port_voxel)] = 1;
        bool changed = true;
        while (changed) {
            changed = false;
            for (int iz = 0; iz < once.dims[2]; ++iz)
                for (int iy = 0; iy < once.dims[1]; ++iy)
                    for (int ix = 0; ix < once.dims[0]; ++ix) {
                        const VoxelIndex v{ix, iy, iz};
                        if (reach[once.flat_index(v)] || once.at(v) != VoxelLabel::Free)
                            continue;
                        const VoxelIndex nbs[6] = {{ix + 1, iy, iz}, {ix - 1, iy, iz},
                                                   {ix, iy + 1, iz}, {ix, iy - 1, iz},
                                                   {ix, iy, iz + 1}, {ix, iy, iz - 1}};
                        for (const VoxelIndex& nb : nbs)
                            if (once.in_bounds(nb) && reach[once.flat_index(nb)]
                                && (once.at(nb) == VoxelLabel::Free || nb == once.port_voxel)) {
                                reach[once.flat_index(v)] = 1;
                                changed = true;
                                break;
                            }
                    }
        }
        for (std::size_t i = 0; i < once.labels.size(); ++i)
            if (once.labels[i] == VoxelLabel::Free && !reach[i])
                connected = false;

        for (double radius : {0.0, 2.0, 4.0}) {
            const VoxelGrid direct = dilate_obstacles(g, radius);
            VoxelGrid stepped = g;
            const int k = radius == 0.0 ? 0 : static_cast<int>(std::ceil(radius / g.edge));
            for (int i = 0; i < k; ++i)
                stepped = dilate_obstacles(stepped, g.edge);
            dilation_equiv = dilation_equiv && direct.labels == stepped.labels;
        }
    }
    accept_line(7, "void-fill idempotence, port connectivity, dilation k-step equivalence",
                idempotent && connected && dilation_equiv);
    CHECK(idempotent);
    CHECK(connected);
    CHECK(dilation_equiv);
}

TEST_CASE("criterion 8: Mann-Whitney reference values")
{
    std::vector<double> a, b;
    for (int i = 0; i < 10; ++i) {
        a.push_back(100.0 + i);
        b.push_back(1.0 + i);
    }
    const ComparisonReport dominant = mann_whitney_z(a, b);
    const ComparisonReport equal = mann_whitney_z(a, a);
    const bool pass = std::abs(dominant.u_statistic - 100.0) < 1e-12
        && std::abs(dominant.z_score - 3.7796) < 1e-4 && std::abs(equal.z_score) < 1e-12;
    accept_line(8, "U=100 and Z=3.7796 on dominance, Z=0 on identical lists", pass);
    CHECK(pass);
}
