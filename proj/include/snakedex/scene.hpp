#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "snakedex/voxel_grid.hpp"

namespace snakedex {

// Axis-aligned box of voxels, inclusive corners. Boxes are painted in order,
// so a later Free box can carve an aperture out of an earlier Obstacle wall.
struct SceneBox {
    VoxelIndex lo;
    VoxelIndex hi;
    VoxelLabel label = VoxelLabel::Obstacle;
    bool jitter = false; // seeded per-axis shift of up to SceneSpec::jitter_voxels
};

struct SceneSpec {
    std::array<int, 3> extents = {20, 20, 20};
    double edge_mm = 2.0;
    std::vector<SceneBox> boxes;
    VoxelIndex port;        // port frame origin sits at this voxel's centre
    int jitter_voxels = 0;

    void validate() const;
};

// Desk-scale stand-ins for a segmented anatomy scan.
//   cavity-wall-shelf : free cavity, partial obstacle wall with an off-axis
//                       aperture between port and ROI, ROI shelf behind it.
//   toy-shelf         : small open grid with a floating ROI shelf; used by the
//                       exhaustive-oracle checks.
SceneSpec cavity_wall_shelf_spec(std::array<int, 3> extents = {20, 20, 20}, double edge_mm = 2.0);
SceneSpec toy_shelf_spec(std::array<int, 3> extents = {10, 10, 10}, double edge_mm = 2.0);
SceneSpec scene_preset(const std::string& name, std::array<int, 3> extents, double edge_mm);

// Deterministic for a fixed (spec, seed). Boxes are clipped to the extents;
// throws if the ROI is empty after clipping or the port voxel is not Free.
VoxelGrid gen_synthetic_scene(const SceneSpec& spec, uint64_t seed);

} // namespace snakedex
