#pragma once

#include <filesystem>
#include <string>

#include "snakedex/snake_model.hpp"

namespace snakedex {

// Key-value design file, e.g.
//   segments=1
//   w=4
//   tool_length=5
//   shaft_clearance=0
//   segment.1.alpha=1.24
//   segment.1.d=1.62
//   segment.1.n=3
std::string design_to_string(const DesignParams& params);
DesignParams design_from_string(const std::string& text, const std::string& origin_name = "<string>");
void save_design(const DesignParams& params, const std::filesystem::path& path);
DesignParams load_design(const std::filesystem::path& path);

// rigid : zero segments, the conventional straight tool pivoting at the port.
// single / double : the published one- and two-segment optima.
DesignParams design_preset(const std::string& name);

std::string design_label(const DesignParams& params); // "Rigid Tool", "Single Segment", ...

} // namespace snakedex
