#include "snakedex/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snakedex/rng.hpp"

namespace snakedex {

void SceneSpec::validate() const
{
    if (extents[0] < 1 || extents[1] < 1 || extents[2] < 1)
        throw std::invalid_argument("SceneSpec: extents must all be >= 1");
    if (!(edge_mm > 0.0))
        throw std::invalid_argument("SceneSpec: edge must be > 0");
    if (port.ix < 0 || port.ix >= extents[0] || port.iy < 0 || port.iy >= extents[1]
        || port.iz < 0 || port.iz >= extents[2])
        throw std::invalid_argument("SceneSpec: port outside extents");
    if (jitter_voxels < 0)
        throw std::invalid_argument("SceneSpec: jitter must be >= 0");
    for (const SceneBox& b : boxes)
        if (b.hi.ix < b.lo.ix || b.hi.iy < b.lo.iy || b.hi.iz < b.lo.iz)
            throw std::invalid_argument("SceneSpec: box with hi < lo");
}

SceneSpec cavity_wall_shelf_spec(std::array<int, 3> extents, double edge_mm)
{
    const int nx = extents[0], ny = extents[1], nz = extents[2];
    const int cx = nx / 2, cy = ny / 2;
    const int wall_z = std::max(1, static_cast<int>(std::lround(0.45 * nz)));
    const int shelf_z0 = std::min(nz - 2, static_cast<int>(std::lround(0.70 * nz)));

    SceneSpec spec;
    spec.extents = extents;
    spec.edge_mm = edge_mm;
    spec.port = {cx, cy, 0};
    spec.jitter_voxels = 1;
    // Partial wall across the cavity between port and shelf.
    spec.boxes.push_back({{0, 0, wall_z}, {nx - 1, ny - 1, wall_z}, VoxelLabel::Obstacle, false});
    // Aperture carved through the wall, offset from the port axis so straight
    // rays from the port only see the near strip of the shelf. Kept fixed:
    // jittering it against the shelf can close that sight line entirely.
    spec.boxes.push_back(
        {{cx - 3, cy - 4, wall_z}, {cx + 2, cy, wall_z}, VoxelLabel::Free, false});
    // ROI shelf floating behind the wall.
    spec.boxes.push_back({{cx - 1, cy - 2, shelf_z0},
                          {cx + 2, cy + 1, std::min(nz - 1, shelf_z0 + 1)},
                          VoxelLabel::RegionOfInterest,
                          true});
    return spec;
}

SceneSpec toy_shelf_spec(std::array<int, 3> extents, double edge_mm)
{
    const int nx = extents[0], ny = extents[1], nz = extents[2];
    const int cx = nx / 2, cy = ny / 2;
    const int shelf_z0 = std::max(1, static_cast<int>(std::lround(0.60 * nz)));

    SceneSpec spec;
    spec.extents = extents;
    spec.edge_mm = edge_mm;
    spec.port = {cx, cy, 0};
    spec.jitter_voxels = 0;
    spec.boxes.push_back({{cx - 2, cy - 2, shelf_z0},
                          {cx + 1, cy + 1, std::min(nz - 1, shelf_z0 + 1)},
                          VoxelLabel::RegionOfInterest,
                          false});
    return spec;
}

SceneSpec scene_preset(const std::string& name, std::array<int, 3> extents, double edge_mm)
{
    if (name == "cavity-wall-shelf")
        return cavity_wall_shelf_spec(extents, edge_mm);
    if (name == "toy-shelf")
        return toy_shelf_spec(extents, edge_mm);
    throw std::invalid_argument("unknown scene preset '" + name
                                + "' (expected cavity-wall-shelf or toy-shelf)");
}

VoxelGrid gen_synthetic_scene(const SceneSpec& spec, uint64_t seed)
{
    spec.validate();

    VoxelGrid grid;
    grid.dims = spec.extents;
    grid.edge = spec.edge_mm;
    grid.port_voxel = spec.port;
    grid.origin = -spec.edge_mm
        * Eigen::Vector3d(spec.port.ix + 0.5, spec.port.iy + 0.5, spec.port.iz + 0.5);
    grid.labels.assign(grid.voxel_count(), VoxelLabel::Free);

    SplitMix64 rng(derive_seed(seed, 0x5CE4E));
    for (const SceneBox& box : spec.boxes) {
        // Jitter moves boxes laterally only; a z shift could separate an
        // aperture from the wall it carves.
        int off[3] = {0, 0, 0};
        if (box.jitter && spec.jitter_voxels > 0)
            for (int a = 0; a < 2; ++a)
                off[a] = static_cast<int>(rng.below(2 * spec.jitter_voxels + 1))
                    - spec.jitter_voxels;
        const int x0 = std::max(0, box.lo.ix + off[0]);
        const int x1 = std::min(grid.dims[0] - 1, box.hi.ix + off[0]);
        const int y0 = std::max(0, box.lo.iy + off[1]);
        const int y1 = std::min(grid.dims[1] - 1, box.hi.iy + off[1]);
        const int z0 = std::max(0, box.lo.iz + off[2]);
        const int z1 = std::min(grid.dims[2] - 1, box.hi.iz + off[2]);
        for (int iz = z0; iz <= z1; ++iz)
            for (int iy = y0; iy <= y1; ++iy)
                for (int ix = x0; ix <= x1; ++ix)
                    grid.at({ix, iy, iz}) = box.label;
    }

    if (grid.at(grid.port_voxel) != VoxelLabel::Free)
        throw std::invalid_argument("gen_synthetic_scene: port voxel is not Free");
    if (grid.count(VoxelLabel::RegionOfInterest) == 0)
        throw std::invalid_argument("gen_synthetic_scene: ROI empty after clipping");
    grid.validate();
    return grid;
}

} // namespace snakedex
