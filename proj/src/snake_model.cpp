#include "snakedex/snake_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace snakedex {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix3d rot_x(double a)
{
    const double c = std::cos(a), s = std::sin(a);
    Eigen::Matrix3d m;
    m << 1, 0, 0, 0, c, -s, 0, s, c;
    return m;
}

Eigen::Matrix3d rot_y(double a)
{
    const double c = std::cos(a), s = std::sin(a);
    Eigen::Matrix3d m;
    m << c, 0, s, 0, 1, 0, -s, 0, c;
    return m;
}

Eigen::Matrix3d rot_z(double a)
{
    const double c = std::cos(a), s = std::sin(a);
    Eigen::Matrix3d m;
    m << c, -s, 0, s, c, 0, 0, 0, 1;
    return m;
}

int pan_disks(int n) { return (n + 1) / 2; }
int tilt_disks(int n) { return n / 2; }

} // namespace

int DesignParams::dof_count() const
{
    int dof = 3; // base pan, base tilt, insertion
    for (const SegmentSpec& seg : segments)
        dof += seg.n >= 2 ? 2 : 1;
    return dof;
}

void DesignParams::validate() const
{
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const SegmentSpec& seg = segments[i];
        const std::string at = "segment " + std::to_string(i + 1);
        if (!(seg.alpha > 0.0) || seg.alpha > kPi / 2.0)
            throw std::invalid_argument(at + ": alpha must be in (0, pi/2]");
        if (!(seg.d > 0.0))
            throw std::invalid_argument(at + ": d must be > 0");
        if (seg.n < 1)
            throw std::invalid_argument(at + ": n must be >= 1");
    }
    if (!(width > 0.0))
        throw std::invalid_argument("width must be > 0");
    if (!(port_cone_rad > 0.0) || port_cone_rad > kPi / 2.0)
        throw std::invalid_argument("port_cone_rad must be in (0, pi/2]");
    if (tool_length < 0.0)
        throw std::invalid_argument("tool_length must be >= 0");
    if (shaft_clearance < 0.0)
        throw std::invalid_argument("shaft_clearance must be >= 0");
}

JointLimits joint_limits(const DesignParams& params, double insertion_max_mm)
{
    params.validate();
    if (insertion_max_mm < 0.0)
        throw std::invalid_argument("joint_limits: insertion_max must be >= 0");

    JointLimits limits;
    limits.dofs.push_back({"base_pan", -params.port_cone_rad, params.port_cone_rad});
    limits.dofs.push_back({"base_tilt", -params.port_cone_rad, params.port_cone_rad});
    limits.dofs.push_back({"insertion", 0.0, insertion_max_mm});
    for (std::size_t i = 0; i < params.segments.size(); ++i) {
        const SegmentSpec& seg = params.segments[i];
        const std::string tag = "seg" + std::to_string(i + 1);
        const double pan_total = std::min(2.0 * seg.alpha * pan_disks(seg.n), kPi);
        limits.dofs.push_back({tag + "_pan", -pan_total, pan_total});
        if (seg.n >= 2) {
            const double tilt_total = std::min(2.0 * seg.alpha * tilt_disks(seg.n), kPi);
            limits.dofs.push_back({tag + "_tilt", -tilt_total, tilt_total});
        }
    }
    return limits;
}

JointConfig zero_config(const DesignParams& params)
{
    JointConfig q;
    q.q.assign(params.dof_count(), 0.0);
    return q;
}

JointConfig sample_config(const JointLimits& limits, SplitMix64& stream)
{
    JointConfig q;
    q.q.resize(limits.dofs.size());
    for (std::size_t i = 0; i < limits.dofs.size(); ++i)
        q.q[i] = stream.uniform(limits.dofs[i].lo, limits.dofs[i].hi);
    return q;
}

RigidTransform rolling_joint_transform(JointAxis axis, double theta, double d_mm)
{
    const Eigen::Matrix3d half = axis == JointAxis::Pan ? rot_x(theta / 2.0) : rot_y(theta / 2.0);
    RigidTransform t;
    t.rotation = half * half;
    t.translation = half * Eigen::Vector3d(0.0, 0.0, d_mm);
    return t;
}

RigidTransform forward_kinematics_frames(const JointConfig& q, const DesignParams& params,
                                         const JointLimits& limits, Skeleton* frames)
{
    if (q.q.size() != limits.dofs.size()
        || limits.dofs.size() != static_cast<std::size_t>(params.dof_count()))
        throw std::invalid_argument("forward_kinematics: configuration size mismatch");
    for (std::size_t i = 0; i < q.q.size(); ++i)
        if (q.q[i] < limits.dofs[i].lo || q.q[i] > limits.dofs[i].hi)
            throw std::invalid_argument("forward_kinematics: " + limits.dofs[i].name
                                        + " outside joint limits");

    if (frames) {
        frames->points.clear();
        frames->points.emplace_back(0.0, 0.0, 0.0); // port pivot
    }

    RigidTransform t;
    t.rotation = rot_x(q.q[0]) * rot_y(q.q[1]);
    t.translation = t.rotation * Eigen::Vector3d(0.0, 0.0, q.q[2] + params.shaft_clearance);
    if (frames)
        frames->points.push_back(t.translation);

    std::size_t qi = 3;
    const int seg_count = static_cast<int>(params.segments.size());
    for (int s = 0; s < seg_count; ++s) {
        const SegmentSpec& seg = params.segments[s];
        const int n_pan = pan_disks(seg.n);
        const int n_tilt = tilt_disks(seg.n);
        const double pan_total = q.q[qi++];
        const double tilt_total = n_tilt > 0 ? q.q[qi++] : 0.0;
        const RigidTransform pan_disk =
            rolling_joint_transform(JointAxis::Pan, pan_total / n_pan, seg.d);
        const RigidTransform tilt_disk = n_tilt > 0
            ? rolling_joint_transform(JointAxis::Tilt, tilt_total / n_tilt, seg.d)
            : RigidTransform{};
        for (int disk = 0; disk < seg.n; ++disk) {
            t = t * (disk % 2 == 0 ? pan_disk : tilt_disk);
            if (frames)
                frames->points.push_back(t.translation);
        }
        if (s + 1 < seg_count) {
            // Transition roll keeps the tendon paths of the next segment
            // evenly spaced; the translation is already folded into the
            // previous disk (sigma = d_proximal).
            RigidTransform zeta;
            zeta.rotation = rot_z(-kPi / seg_count);
            t = t * zeta;
        }
    }

    RigidTransform tool;
    tool.translation = Eigen::Vector3d(0.0, 0.0, params.tool_length);
    t = t * tool;
    if (frames)
        frames->points.push_back(t.translation);
    return t;
}

void densify_skeleton(Skeleton& skeleton, double max_spacing_mm)
{
    if (!(max_spacing_mm > 0.0))
        throw std::invalid_argument("densify_skeleton: spacing must be > 0");
    if (skeleton.points.size() < 2)
        return;

    thread_local std::vector<Eigen::Vector3d> scratch;
    scratch.clear();
    scratch.push_back(skeleton.points.front());
    for (std::size_t i = 1; i < skeleton.points.size(); ++i) {
        const Eigen::Vector3d& a = skeleton.points[i - 1];
        const Eigen::Vector3d& b = skeleton.points[i];
        const double dist = (b - a).norm();
        if (dist <= 1e-12)
            continue;
        const int steps = static_cast<int>(std::ceil(dist / max_spacing_mm));
        for (int s = 1; s <= steps; ++s)
            scratch.push_back(a + (static_cast<double>(s) / steps) * (b - a));
    }
    skeleton.points.assign(scratch.begin(), scratch.end());
}

RigidTransform forward_kinematics(const JointConfig& q, const DesignParams& params,
                                  const JointLimits& limits, double grid_edge_mm,
                                  Skeleton* skeleton)
{
    if (!(grid_edge_mm > 0.0))
        throw std::invalid_argument("forward_kinematics: grid edge must be > 0");
    RigidTransform tip = forward_kinematics_frames(q, params, limits, skeleton);
    if (skeleton)
        densify_skeleton(*skeleton, grid_edge_mm / 2.0);
    return tip;
}

} // namespace snakedex
