#include "snakedex/dexterity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "snakedex/rng.hpp"

namespace snakedex {

namespace {

constexpr double kPi = std::numbers::pi;

// Voxel lookup without going through std::optional on the hot path.
struct GridView {
    const VoxelGrid& grid;
    Eigen::Vector3d origin;
    double inv_edge;
    int nx, ny, nz;

    explicit GridView(const VoxelGrid& g)
        : grid(g), origin(g.origin), inv_edge(1.0 / g.edge), nx(g.dims[0]), ny(g.dims[1]),
          nz(g.dims[2])
    {
    }

    // Returns the label, or nullopt when out of bounds.
    std::optional<VoxelLabel> label_at(const Eigen::Vector3d& p) const
    {
        const int ix = static_cast<int>(std::floor((p.x() - origin.x()) * inv_edge));
        const int iy = static_cast<int>(std::floor((p.y() - origin.y()) * inv_edge));
        const int iz = static_cast<int>(std::floor((p.z() - origin.z()) * inv_edge));
        if (ix < 0 || ix >= nx || iy < 0 || iy >= ny || iz < 0 || iz >= nz)
            return std::nullopt;
        return grid.labels[(static_cast<std::size_t>(iz) * ny + iy) * nx + ix];
    }
};

} // namespace

int ServiceSphere::covered() const
{
    return static_cast<int>(std::count(patches.begin(), patches.end(), uint8_t{1}));
}

void EvalSettings::validate() const
{
    if (sample_size < 1)
        throw std::invalid_argument("EvalSettings: sample_size must be >= 1");
    if (n_theta < 1 || n_h < 1)
        throw std::invalid_argument("EvalSettings: n_theta and n_h must be >= 1");
    if (dilation_radius_mm < 0.0)
        throw std::invalid_argument("EvalSettings: dilation radius must be >= 0");
    if (workers < 1)
        throw std::invalid_argument("EvalSettings: workers must be >= 1");
}

std::pair<int, int> nearest_patch(const Eigen::Vector3d& p_z, int n_theta, int n_h)
{
    if (n_theta < 1 || n_h < 1)
        throw std::invalid_argument("nearest_patch: patch counts must be >= 1");
    if (std::abs(p_z.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("nearest_patch: direction is not a unit vector");

    const double d_theta = 2.0 * kPi / n_theta;
    const double d_h = 2.0 / n_h;
    int theta_idx =
        static_cast<int>(std::floor((std::atan2(p_z.y(), p_z.x()) + kPi) / d_theta)) % n_theta;
    if (theta_idx < 0)
        theta_idx += n_theta;
    int h_idx = static_cast<int>(std::floor((p_z.z() + 1.0) / d_h));
    h_idx = std::clamp(h_idx, 0, n_h - 1);
    return {theta_idx, h_idx};
}

bool tubular_path_plan(const JointConfig&, const JointConfig&, const Skeleton& skeleton,
                       const VoxelGrid& grid)
{
    const GridView view(grid);
    for (const Eigen::Vector3d& p : skeleton.points) {
        const auto label = view.label_at(p);
        if (!label || *label == VoxelLabel::Obstacle)
            return false;
    }
    return true;
}

std::tuple<double, double, DexterityField>
aggregate_dexterity(const std::map<VoxelIndex, ServiceSphere>& spheres, int n_theta, int n_h)
{
    if (spheres.empty())
        throw std::invalid_argument("aggregate_dexterity: empty ROI voxel set");
    const double patches_per_sphere = static_cast<double>(n_theta) * n_h;

    DexterityField field;
    double covered_total = 0.0;
    double max_dex = 0.0;
    for (const auto& [voxel, sphere] : spheres) {
        const double covered = sphere.covered();
        const double dex = covered / patches_per_sphere;
        field[voxel] = dex;
        covered_total += covered;
        max_dex = std::max(max_dex, dex);
    }
    const double mean = covered_total / (static_cast<double>(spheres.size()) * patches_per_sphere);
    return {mean, max_dex, field};
}

FitnessReport evaluate_fitness(const DesignParams& params, const VoxelGrid& grid,
                               const EvalSettings& settings, const PathPlanPolicy& policy)
{
    const auto t_start = std::chrono::steady_clock::now();
    params.validate();
    settings.validate();
    grid.validate();

    const std::vector<VoxelIndex> roi = grid.voxels_with(VoxelLabel::RegionOfInterest);
    if (roi.empty())
        throw std::invalid_argument("evaluate_fitness: grid has no RegionOfInterest voxels");
    if (grid.at(grid.port_voxel) != VoxelLabel::Free)
        throw std::invalid_argument("evaluate_fitness: port voxel is not Free (grid preprocessed?)");

    // ROI voxel -> contiguous slot.
    std::vector<int32_t> roi_slot(grid.voxel_count(), -1);
    for (std::size_t i = 0; i < roi.size(); ++i)
        roi_slot[grid.flat_index(roi[i])] = static_cast<int32_t>(i);

    const JointLimits limits = joint_limits(params, grid.dims[2] * grid.edge);
    const std::size_t n_dof = limits.dofs.size();
    const JointConfig q0 = zero_config(params);
    const int patch_count = settings.n_theta * settings.n_h;
    const std::size_t words_per_voxel = (static_cast<std::size_t>(patch_count) + 63) / 64;
    const GridView view(grid);
    const double max_spacing = grid.edge / 2.0;

    const int workers =
        static_cast<int>(std::min<uint64_t>(settings.workers, settings.sample_size));
    std::vector<std::vector<uint64_t>> worker_bits(
        workers, std::vector<uint64_t>(roi.size() * words_per_voxel, 0));
    std::vector<uint64_t> worker_accepts(workers, 0);
    std::vector<std::exception_ptr> worker_errors(workers);

    auto worker_fn = [&](int w, uint64_t begin, uint64_t end) {
        try {
            std::vector<uint64_t>& bits = worker_bits[w];
            JointConfig q;
            q.q.resize(n_dof);
            Skeleton skeleton;
            uint64_t accepted = 0;
            for (uint64_t i = begin; i < end; ++i) {
                SplitMix64 stream(derive_seed(settings.seed, i));
                for (std::size_t dof = 0; dof < n_dof; ++dof)
                    q.q[dof] = stream.uniform(limits.dofs[dof].lo, limits.dofs[dof].hi);

                const RigidTransform tip =
                    forward_kinematics_frames(q, params, limits, &skeleton);

                // Tip must land in an ROI voxel before any shape checks run.
                const auto tip_voxel = point_to_voxel(tip.translation, grid);
                if (!tip_voxel || grid.at(*tip_voxel) != VoxelLabel::RegionOfInterest)
                    continue;

                densify_skeleton(skeleton, max_spacing);
                if (policy) {
                    bool hits_obstacle = false;
                    for (const Eigen::Vector3d& p : skeleton.points) {
                        const auto label = view.label_at(p);
                        if (label && *label == VoxelLabel::Obstacle) {
                            hits_obstacle = true;
                            break;
                        }
                    }
                    if (hits_obstacle || !policy(q0, q, skeleton, grid))
                        continue;
                } else {
                    // Fused tubular policy: in bounds and obstacle-free subsumes
                    // the shape condition.
                    if (!tubular_path_plan(q0, q, skeleton, grid))
                        continue;
                }

                ++accepted;
                const auto [theta_idx, h_idx] =
                    nearest_patch(tip.tool_axis(), settings.n_theta, settings.n_h);
                const std::size_t patch = static_cast<std::size_t>(theta_idx) * settings.n_h + h_idx;
                const std::size_t slot = roi_slot[grid.flat_index(*tip_voxel)];
                bits[slot * words_per_voxel + patch / 64] |= uint64_t{1} << (patch % 64);
            }
            worker_accepts[w] = accepted;
        } catch (...) {
            worker_errors[w] = std::current_exception();
        }
    };

    if (workers <= 1) {
        worker_fn(0, 0, settings.sample_size);
    } else {
        std::vector<std::thread> threads;
        const uint64_t chunk = (settings.sample_size + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const uint64_t begin = w * chunk;
            const uint64_t end = std::min<uint64_t>(begin + chunk, settings.sample_size);
            threads.emplace_back(worker_fn, w, begin, end);
        }
        for (std::thread& t : threads)
            t.join();
    }
    for (const std::exception_ptr& err : worker_errors)
        if (err)
            std::rethrow_exception(err);

    // Union merge; bitwise OR is order-independent, so the result does not
    // depend on how samples were scheduled.
    std::vector<uint64_t>& merged = worker_bits[0];
    for (int w = 1; w < workers; ++w)
        for (std::size_t j = 0; j < merged.size(); ++j)
            merged[j] |= worker_bits[w][j];

    std::map<VoxelIndex, ServiceSphere> spheres;
    for (std::size_t i = 0; i < roi.size(); ++i) {
        ServiceSphere sphere(settings.n_theta, settings.n_h);
        for (int patch = 0; patch < patch_count; ++patch)
            if (merged[i * words_per_voxel + patch / 64] & (uint64_t{1} << (patch % 64)))
                sphere.patches[patch] = 1;
        spheres.emplace(roi[i], std::move(sphere));
    }

    FitnessReport report;
    std::tie(report.mean_dexterity, report.max_dexterity, report.field) =
        aggregate_dexterity(spheres, settings.n_theta, settings.n_h);
    report.fitness = report.mean_dexterity == 0.0 ? 0.0 : -report.mean_dexterity;
    report.samples_accepted =
        std::accumulate(worker_accepts.begin(), worker_accepts.end(), uint64_t{0});
    report.samples_total = settings.sample_size;
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

} // namespace snakedex
