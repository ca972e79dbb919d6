#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace snakedex {

enum class VoxelLabel : uint8_t {
    Free = 0,
    Obstacle = 1,
    RegionOfInterest = 2,
};

struct VoxelIndex {
    int ix = 0;
    int iy = 0;
    int iz = 0;

    friend bool operator==(const VoxelIndex&, const VoxelIndex&) = default;
    friend auto operator<=>(const VoxelIndex&, const VoxelIndex&) = default;
};

// Raised by the grid file reader/writer; messages carry "path:line:".
class GridIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Axis-aligned labelled occupancy grid. Coordinates are millimetres in the
// port frame; `origin` is the minimum corner and `edge` the cube side.
// Labels are stored x-fastest: flat = (iz*ny + iy)*nx + ix.
struct VoxelGrid {
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    double edge = 2.0;
    std::array<int, 3> dims = {0, 0, 0};
    std::vector<VoxelLabel> labels;
    VoxelIndex port_voxel;

    std::size_t voxel_count() const
    {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }

    bool in_bounds(const VoxelIndex& v) const
    {
        return v.ix >= 0 && v.ix < dims[0] && v.iy >= 0 && v.iy < dims[1] && v.iz >= 0
            && v.iz < dims[2];
    }

    std::size_t flat_index(const VoxelIndex& v) const
    {
        return (static_cast<std::size_t>(v.iz) * dims[1] + v.iy) * dims[0] + v.ix;
    }

    VoxelLabel at(const VoxelIndex& v) const { return labels[flat_index(v)]; }
    VoxelLabel& at(const VoxelIndex& v) { return labels[flat_index(v)]; }

    Eigen::Vector3d voxel_center(const VoxelIndex& v) const
    {
        return origin + edge * Eigen::Vector3d(v.ix + 0.5, v.iy + 0.5, v.iz + 0.5);
    }

    std::size_t count(VoxelLabel label) const;

    // All voxels with the given label, in x-fastest order.
    std::vector<VoxelIndex> voxels_with(VoxelLabel label) const;

    // Throws std::invalid_argument on any structural invariant violation.
    void validate() const;
};

// Maps a Cartesian point (mm, port frame) to its voxel; nullopt when outside
// the grid. Points exactly on a shared face belong to the higher-index cell.
std::optional<VoxelIndex> point_to_voxel(const Eigen::Vector3d& p_mm, const VoxelGrid& grid);

// Chebyshev dilation: k = ceil(radius/edge) passes of one-step 26-neighbourhood
// growth. RegionOfInterest voxels are never relabelled and block propagation.
VoxelGrid dilate_obstacles(const VoxelGrid& grid, double radius_mm);

// 6-connected flood fill of Free voxels from the port; unreached Free voxels
// become Obstacle. ROI voxels are opaque to the fill.
VoxelGrid fill_unreachable_voids(const VoxelGrid& grid);

// Standard preprocessing before evaluation: dilate then fill voids.
VoxelGrid preprocess_grid(const VoxelGrid& grid, double dilation_radius_mm);

// "VOXGRID 1" ASCII format, run-length label lines. load(save(g)) == g.
std::string grid_to_string(const VoxelGrid& grid);
VoxelGrid grid_from_string(const std::string& text, const std::string& origin_name = "<string>");
void save_grid(const VoxelGrid& grid, const std::filesystem::path& path);
VoxelGrid load_grid(const std::filesystem::path& path);

// FNV-1a over the canonical serialization; identifies the scene in reports.
uint64_t grid_content_hash(const VoxelGrid& grid);

} // namespace snakedex
