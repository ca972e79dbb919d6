#include "snakedex/voxel_grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace snakedex {

std::size_t VoxelGrid::count(VoxelLabel label) const
{
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

std::vector<VoxelIndex> VoxelGrid::voxels_with(VoxelLabel label) const
{
    std::vector<VoxelIndex> out;
    std::size_t flat = 0;
    for (int iz = 0; iz < dims[2]; ++iz)
        for (int iy = 0; iy < dims[1]; ++iy)
            for (int ix = 0; ix < dims[0]; ++ix, ++flat)
                if (labels[flat] == label)
                    out.push_back({ix, iy, iz});
    return out;
}

void VoxelGrid::validate() const
{
    if (!(edge > 0.0))
        throw std::invalid_argument("VoxelGrid: edge must be > 0");
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
        throw std::invalid_argument("VoxelGrid: dims must all be >= 1");
    if (labels.size() != voxel_count())
        throw std::invalid_argument("VoxelGrid: label count does not match dims");
    if (!in_bounds(port_voxel))
        throw std::invalid_argument("VoxelGrid: port voxel out of bounds");
    for (VoxelLabel l : labels)
        if (l != VoxelLabel::Free && l != VoxelLabel::Obstacle && l != VoxelLabel::RegionOfInterest)
            throw std::invalid_argument("VoxelGrid: unknown label value");
}

std::optional<VoxelIndex> point_to_voxel(const Eigen::Vector3d& p_mm, const VoxelGrid& grid)
{
    VoxelIndex v;
    v.ix = static_cast<int>(std::floor((p_mm.x() - grid.origin.x()) / grid.edge));
    v.iy = static_cast<int>(std::floor((p_mm.y() - grid.origin.y()) / grid.edge));
    v.iz = static_cast<int>(std::floor((p_mm.z() - grid.origin.z()) / grid.edge));
    if (!grid.in_bounds(v))
        return std::nullopt;
    return v;
}

VoxelGrid dilate_obstacles(const VoxelGrid& grid, double radius_mm)
{
    if (radius_mm < 0.0)
        throw std::invalid_argument("dilate_obstacles: radius must be >= 0");
    grid.validate();

    const int steps = radius_mm == 0.0 ? 0 : static_cast<int>(std::ceil(radius_mm / grid.edge));
    VoxelGrid out = grid;
    std::vector<VoxelLabel> prev;
    for (int s = 0; s < steps; ++s) {
        prev = out.labels;
        std::size_t flat = 0;
        for (int iz = 0; iz < grid.dims[2]; ++iz) {
            for (int iy = 0; iy < grid.dims[1]; ++iy) {
                for (int ix = 0; ix < grid.dims[0]; ++ix, ++flat) {
                    if (prev[flat] != VoxelLabel::Free)
                        continue;
                    bool near_obstacle = false;
                    for (int dz = -1; dz <= 1 && !near_obstacle; ++dz)
                        for (int dy = -1; dy <= 1 && !near_obstacle; ++dy)
                            for (int dx = -1; dx <= 1; ++dx) {
                                if (dx == 0 && dy == 0 && dz == 0)
                                    continue;
                                VoxelIndex nb{ix + dx, iy + dy, iz + dz};
                                if (out.in_bounds(nb)
                                    && prev[out.flat_index(nb)] == VoxelLabel::Obstacle) {
                                    near_obstacle = true;
                                    break;
                                }
                            }
                    if (near_obstacle)
                        out.labels[flat] = VoxelLabel::Obstacle;
                }
            }
        }
    }
    return out;
}

VoxelGrid fill_unreachable_voids(const VoxelGrid& grid)
{
    grid.validate();
    if (grid.at(grid.port_voxel) != VoxelLabel::Free)
        throw std::invalid_argument("fill_unreachable_voids: port voxel is not Free");

    VoxelGrid out = grid;
    std::vector<uint8_t> reached(grid.voxel_count(), 0);
    std::vector<VoxelIndex> queue;
    queue.push_back(grid.port_voxel);
    reached[grid.flat_index(grid.port_voxel)] = 1;
    static constexpr int kFaceSteps[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                             {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
    while (!queue.empty()) {
        VoxelIndex v = queue.back();
        queue.pop_back();
        for (const auto& step : kFaceSteps) {
            VoxelIndex nb{v.ix + step[0], v.iy + step[1], v.iz + step[2]};
            if (!grid.in_bounds(nb))
                continue;
            std::size_t flat = grid.flat_index(nb);
            if (reached[flat] || grid.labels[flat] != VoxelLabel::Free)
                continue;
            reached[flat] = 1;
            queue.push_back(nb);
        }
    }
    for (std::size_t flat = 0; flat < out.labels.size(); ++flat)
        if (out.labels[flat] == VoxelLabel::Free && !reached[flat])
            out.labels[flat] = VoxelLabel::Obstacle;
    return out;
}

VoxelGrid preprocess_grid(const VoxelGrid& grid, double dilation_radius_mm)
{
    return fill_unreachable_voids(dilate_obstacles(grid, dilation_radius_mm));
}

namespace {

char label_to_char(VoxelLabel l)
{
    switch (l) {
    case VoxelLabel::Free:
        return '.';
    case VoxelLabel::Obstacle:
        return '#';
    case VoxelLabel::RegionOfInterest:
        return 'R';
    }
    return '?';
}

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void io_fail(const std::string& origin, int line, const std::string& msg)
{
    throw GridIoError(origin + ":" + std::to_string(line) + ": " + msg);
}

} // namespace

std::string grid_to_string(const VoxelGrid& grid)
{
    grid.validate();
    std::ostringstream out;
    out << "VOXGRID 1\n";
    out << "dims " << grid.dims[0] << " " << grid.dims[1] << " " << grid.dims[2] << "\n";
    out << "origin " << format_double(grid.origin.x()) << " " << format_double(grid.origin.y())
        << " " << format_double(grid.origin.z()) << "\n";
    out << "edge " << format_double(grid.edge) << "\n";
    out << "port " << grid.port_voxel.ix << " " << grid.port_voxel.iy << " " << grid.port_voxel.iz
        << "\n";
    std::size_t i = 0;
    while (i < grid.labels.size()) {
        std::size_t run = 1;
        while (i + run < grid.labels.size() && grid.labels[i + run] == grid.labels[i])
            ++run;
        out << run << label_to_char(grid.labels[i]) << "\n";
        i += run;
    }
    return out.str();
}

VoxelGrid grid_from_string(const std::string& text, const std::string& origin_name)
{
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line))
            io_fail(origin_name, line_no + 1, std::string("unexpected end of file, expected ") + what);
        ++line_no;
    };

    VoxelGrid grid;
    next_line("magic header");
    if (line != "VOXGRID 1")
        io_fail(origin_name, line_no, "bad magic, expected 'VOXGRID 1'");

    next_line("dims");
    {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key >> grid.dims[0] >> grid.dims[1] >> grid.dims[2]) || key != "dims")
            io_fail(origin_name, line_no, "malformed dims line");
        if (grid.dims[0] < 1 || grid.dims[1] < 1 || grid.dims[2] < 1)
            io_fail(origin_name, line_no, "dims must all be >= 1");
    }
    next_line("origin");
    {
        std::istringstream ls(line);
        std::string key;
        double x, y, z;
        if (!(ls >> key >> x >> y >> z) || key != "origin")
            io_fail(origin_name, line_no, "malformed origin line");
        grid.origin = Eigen::Vector3d(x, y, z);
    }
    next_line("edge");
    {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key >> grid.edge) || key != "edge")
            io_fail(origin_name, line_no, "malformed edge line");
        if (!(grid.edge > 0.0))
            io_fail(origin_name, line_no, "edge must be > 0");
    }
    next_line("port");
    {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key >> grid.port_voxel.ix >> grid.port_voxel.iy >> grid.port_voxel.iz)
            || key != "port")
            io_fail(origin_name, line_no, "malformed port line");
        if (!grid.in_bounds(grid.port_voxel))
            io_fail(origin_name, line_no, "port voxel out of bounds");
    }

    const std::size_t total = grid.voxel_count();
    grid.labels.reserve(total);
    while (std::getline(in, line)) {
        ++line_no;
        std::string tok;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c)))
                tok += c;
        if (tok.empty())
            continue;
        char label_char = tok.back();
        std::size_t run = 1;
        if (tok.size() > 1) {
            std::string count_str = tok.substr(0, tok.size() - 1);
            if (!std::all_of(count_str.begin(), count_str.end(),
                             [](unsigned char c) { return std::isdigit(c); }))
                io_fail(origin_name, line_no, "malformed run-length count '" + count_str + "'");
            run = std::stoull(count_str);
            if (run == 0)
                io_fail(origin_name, line_no, "run-length count must be >= 1");
        }
        VoxelLabel label;
        switch (label_char) {
        case '.':
            label = VoxelLabel::Free;
            break;
        case '#':
            label = VoxelLabel::Obstacle;
            break;
        case 'R':
            label = VoxelLabel::RegionOfInterest;
            break;
        default:
            io_fail(origin_name, line_no,
                    std::string("unknown label code '") + label_char + "'");
        }
        if (grid.labels.size() + run > total)
            io_fail(origin_name, line_no,
                    "label count exceeds dims (" + std::to_string(total) + " voxels expected)");
        grid.labels.insert(grid.labels.end(), run, label);
    }
    if (grid.labels.size() != total)
        io_fail(origin_name, line_no,
                "label count mismatch: got " + std::to_string(grid.labels.size()) + ", expected "
                    + std::to_string(total));
    grid.validate();
    return grid;
}

void save_grid(const VoxelGrid& grid, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw GridIoError("cannot open for writing: " + path.string());
    out << grid_to_string(grid);
    if (!out)
        throw GridIoError("write failed: " + path.string());
}

VoxelGrid load_grid(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw GridIoError("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return grid_from_string(buf.str(), path.string());
}

uint64_t grid_content_hash(const VoxelGrid& grid)
{
    const std::string text = grid_to_string(grid);
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace snakedex
