#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <tuple>
#include <utility>

#include <Eigen/Core>

#include "snakedex/snake_model.hpp"
#include "snakedex/voxel_grid.hpp"

namespace snakedex {

// Unit sphere attached to a voxel, discretized into n_theta longitude bands
// times n_h latitude bands of equal spherical area; records which tool-axis
// directions have touched the voxel.
struct ServiceSphere {
    int n_theta = 18;
    int n_h = 9;
    std::vector<uint8_t> patches; // n_theta * n_h entries, theta-major

    ServiceSphere() = default;
    ServiceSphere(int nt, int nh) : n_theta(nt), n_h(nh), patches(nt * nh, 0) {}

    bool test(int theta_idx, int h_idx) const { return patches[theta_idx * n_h + h_idx] != 0; }
    void set(int theta_idx, int h_idx) { patches[theta_idx * n_h + h_idx] = 1; }
    int covered() const;
};

struct EvalSettings {
    uint64_t sample_size = 100000;
    int n_theta = 18;
    int n_h = 9;
    uint64_t seed = 1;
    double dilation_radius_mm = 2.0; // robot half-width w/2
    int workers = 1;

    void validate() const;
};

using DexterityField = std::map<VoxelIndex, double>;

struct FitnessReport {
    double fitness = 0.0;       // F = -Dex(V_roi), in [-1, 0]
    double mean_dexterity = 0.0;
    double max_dexterity = 0.0;
    DexterityField field;       // keyed by exactly the ROI voxel set
    uint64_t samples_accepted = 0;
    uint64_t samples_total = 0;
    double wall_time_s = 0.0;   // informational; never serialized into reports
};

// Patch of the service sphere containing the unit direction p_z:
//   theta_idx = floor((atan2(y,x)+pi)/dtheta) mod n_theta
//   h_idx     = min(floor((z+1)/dh), n_h-1)
// Throws if |p_z| deviates from 1 by more than 1e-6.
std::pair<int, int> nearest_patch(const Eigen::Vector3d& p_z, int n_theta, int n_h);

// Replaceable path-plan policy for the q0 -> q feasibility check.
using PathPlanPolicy = std::function<bool(const JointConfig& q0, const JointConfig& q,
                                          const Skeleton& skeleton, const VoxelGrid& grid)>;

// Default tubular policy: the final shape stands in for the whole motion, so
// the plan is feasible iff every skeleton point is in bounds and not inside an
// obstacle voxel.
bool tubular_path_plan(const JointConfig& q0, const JointConfig& q, const Skeleton& skeleton,
                       const VoxelGrid& grid);

// Mean and max dexterity plus the per-voxel field, from accumulated spheres.
// Keys of `spheres` must be the ROI voxel set; throws when empty.
std::tuple<double, double, DexterityField>
aggregate_dexterity(const std::map<VoxelIndex, ServiceSphere>& spheres, int n_theta, int n_h);

// Monte-Carlo dexterity evaluation over the preprocessed grid. Sample i draws
// its configuration from a counter-based stream keyed by (seed, i), so the
// report is identical for any worker count. A null policy selects the fused
// tubular check. Throws when the grid has no ROI voxels.
FitnessReport evaluate_fitness(const DesignParams& params, const VoxelGrid& grid,
                               const EvalSettings& settings,
                               const PathPlanPolicy& policy = nullptr);

} // namespace snakedex
