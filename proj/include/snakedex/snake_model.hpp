#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "snakedex/rng.hpp"

namespace snakedex {

// One snake segment of the variable neutral-line mechanism: n rolling disk
// joints of height d, each able to roll by up to 2*alpha. Disks alternate
// pan, tilt, pan, ... so a 1-disk segment is a single pan joint.
struct SegmentSpec {
    double alpha = 0.5; // rad, half the rolling joint angle of curvature
    double d = 2.0;     // mm, disk joint height
    int n = 1;          // number of disk joints
};

struct DesignParams {
    std::vector<SegmentSpec> segments;
    double width = 4.0;          // mm, shared across segments
    double tool_length = 5.0;    // mm, rigid tool at the end-effector
    double shaft_clearance = 0.0; // mm, straight shaft from port pivot to first disk
    double port_cone_rad = 1.0471975511965976; // +-pi/3 pivot cone at the incision

    int dof_count() const;
    void validate() const; // throws std::invalid_argument
};

struct DofLimit {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
};

struct JointLimits {
    std::vector<DofLimit> dofs;
};

// Base DOFs are the port pivot (pan/tilt, +-pi/3 cone) and insertion along the
// port axis, [0, insertion_max_mm] (the grid depth). Segment totals are
// +-2*alpha*n_pan / +-2*alpha*n_tilt, capped at +-pi.
JointLimits joint_limits(const DesignParams& params, double insertion_max_mm);

// Configuration vector, ordered [base_pan, base_tilt, insertion,
// seg1_pan(, seg1_tilt), seg2_pan(, seg2_tilt), ...].
struct JointConfig {
    std::vector<double> q;
};

JointConfig zero_config(const DesignParams& params);

// One uniform draw per DOF within its limits; deterministic given the stream.
JointConfig sample_config(const JointLimits& limits, SplitMix64& stream);

struct RigidTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    RigidTransform operator*(const RigidTransform& rhs) const
    {
        return {rotation * rhs.rotation, rotation * rhs.translation + translation};
    }
    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
    // P_z, the tool axis direction.
    Eigen::Vector3d tool_axis() const { return rotation.col(2); }
};

enum class JointAxis { Pan, Tilt };

// Rolling-contact joint: Rot_axis(theta/2) * Trans_z(d) * Rot_axis(theta/2).
// Pan rotates about x, tilt about y. theta=0 gives a pure z translation.
RigidTransform rolling_joint_transform(JointAxis axis, double theta, double d_mm);

// Centre-line skeleton from port to tool tip, in port-frame millimetres.
struct Skeleton {
    std::vector<Eigen::Vector3d> points;
};

// Frame-origin chain only (port, post-insertion, each disk, tool tip), no
// densification. Throws if q is outside the supplied limits.
RigidTransform forward_kinematics_frames(const JointConfig& q, const DesignParams& params,
                                         const JointLimits& limits, Skeleton* frames);

// Inserts interpolated points so consecutive spacing is <= max_spacing_mm.
void densify_skeleton(Skeleton& skeleton, double max_spacing_mm);

// Full forward kinematics; the skeleton (when requested) is densified to
// grid_edge_mm/2 spacing as the collision checks require.
RigidTransform forward_kinematics(const JointConfig& q, const DesignParams& params,
                                  const JointLimits& limits, double grid_edge_mm,
                                  Skeleton* skeleton = nullptr);

} // namespace snakedex
