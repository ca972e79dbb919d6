#include "snakedex/design_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace snakedex {

namespace {

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg)
{
    throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
}

} // namespace

std::string design_to_string(const DesignParams& params)
{
    params.validate();
    std::ostringstream out;
    out << "segments=" << params.segments.size() << "\n";
    out << "w=" << fmt(params.width) << "\n";
    out << "tool_length=" << fmt(params.tool_length) << "\n";
    out << "shaft_clearance=" << fmt(params.shaft_clearance) << "\n";
    out << "port_cone=" << fmt(params.port_cone_rad) << "\n";
    for (std::size_t i = 0; i < params.segments.size(); ++i) {
        const std::string prefix = "segment." + std::to_string(i + 1) + ".";
        out << prefix << "alpha=" << fmt(params.segments[i].alpha) << "\n";
        out << prefix << "d=" << fmt(params.segments[i].d) << "\n";
        out << prefix << "n=" << params.segments[i].n << "\n";
    }
    return out.str();
}

DesignParams design_from_string(const std::string& text, const std::string& origin_name)
{
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::map<std::string, std::pair<std::string, int>> entries; // key -> (value, line)
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos)
            continue;
        const auto eq = line.find('=', start);
        if (eq == std::string::npos)
            fail(origin_name, line_no, "expected key=value");
        const std::string key = line.substr(start, eq - start);
        const std::string value = line.substr(eq + 1);
        if (entries.count(key))
            fail(origin_name, line_no, "duplicate key '" + key + "'");
        entries[key] = {value, line_no};
    }

    auto take = [&](const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end())
            fail(origin_name, line_no, "missing key '" + key + "'");
        auto res = it->second;
        entries.erase(it);
        return res;
    };
    auto parse_double = [&](const std::string& key) {
        auto [value, at] = take(key);
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(value, &pos);
        } catch (const std::exception&) {
            fail(origin_name, at, "bad number for '" + key + "'");
        }
        if (pos != value.size())
            fail(origin_name, at, "trailing junk after number for '" + key + "'");
        return v;
    };
    auto parse_int = [&](const std::string& key) {
        auto [value, at] = take(key);
        std::size_t pos = 0;
        long v = 0;
        try {
            v = std::stol(value, &pos);
        } catch (const std::exception&) {
            fail(origin_name, at, "bad integer for '" + key + "'");
        }
        if (pos != value.size())
            fail(origin_name, at, "trailing junk after integer for '" + key + "'");
        return static_cast<int>(v);
    };

    DesignParams params;
    const int segments = parse_int("segments");
    if (segments < 0)
        fail(origin_name, 1, "segments must be >= 0");
    params.width = parse_double("w");
    params.tool_length = parse_double("tool_length");
    params.shaft_clearance = parse_double("shaft_clearance");
    if (entries.count("port_cone"))
        params.port_cone_rad = parse_double("port_cone");
    for (int i = 1; i <= segments; ++i) {
        const std::string prefix = "segment." + std::to_string(i) + ".";
        SegmentSpec seg;
        seg.alpha = parse_double(prefix + "alpha");
        seg.d = parse_double(prefix + "d");
        seg.n = parse_int(prefix + "n");
        params.segments.push_back(seg);
    }
    if (!entries.empty())
        fail(origin_name, entries.begin()->second.second,
             "unknown key '" + entries.begin()->first + "'");
    params.validate();
    return params;
}

void save_design(const DesignParams& params, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    out << design_to_string(params);
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

DesignParams load_design(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return design_from_string(buf.str(), path.string());
}

DesignParams design_preset(const std::string& name)
{
    DesignParams params;
    if (name == "rigid")
        return params;
    if (name == "single") {
        params.segments.push_back({1.24, 1.62, 3});
        return params;
    }
    if (name == "double") {
        params.segments.push_back({1.34, 6.0, 1});
        params.segments.push_back({1.18, 0.41, 3});
        return params;
    }
    throw std::invalid_argument("unknown design preset '" + name
                                + "' (expected rigid, single or double)");
}

std::string design_label(const DesignParams& params)
{
    switch (params.segments.size()) {
    case 0:
        return "Rigid Tool";
    case 1:
        return "Single Segment";
    case 2:
        return "Double Segment";
    default:
        return std::to_string(params.segments.size()) + "-Segment";
    }
}

} // namespace snakedex
