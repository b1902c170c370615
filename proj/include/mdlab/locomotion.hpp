#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mdlab/common.hpp"
#include "mdlab/random.hpp"

namespace mdlab {

inline constexpr std::size_t kBodyPoints = 17;

struct DistortionParams {
    double height_lo_m = 1.6;
    double height_hi_m = 2.0;
    double accel_std_mps2 = 0.008;
    double direction_std_rad = 0.03;
    /// Correlation time of the heading jitter (AR(1) process). Zero gives an
    /// i.i.d. stream; positive values keep body rotation rates physical.
    double direction_corr_time_s = 0.5;
    bool enabled = false;

    void validate() const;
};

struct PedestrianParams {
    double height_m = 1.8;
    double speed_mps = 1.0;
    double direction_deg = 0.0;
    Vec3 start_position_m = Vec3(100.0, 0.0, 0.0);
    DistortionParams distortion;

    /// Throws ParameterError on non-positive height/speed; wraps direction.
    void validate();
};

/// Semi-axes of one body-part ellipsoid. `axial` lies along the segment,
/// `lateral` along the walker's left axis (projected), `normal` completes
/// the frame.
struct EllipsoidAxes {
    double lateral_m;
    double normal_m;
    double axial_m;
};

/// Ellipsoid table for the 17 scatterers, indexed like BodyPart.
struct BodyModel {
    std::array<EllipsoidAxes, kBodyPoints> parts;
    static BodyModel default_model();
};

enum class BodyPart : std::size_t {
    head = 0, torso, pelvis,
    shoulder_l, shoulder_r, upper_arm_l, upper_arm_r, forearm_l, forearm_r, hand_l, hand_r,
    thigh_l, thigh_r, shin_l, shin_r, foot_l, foot_r,
};

const char* body_part_name(std::size_t q);

/// Timing of one walk cycle (left heel strike to left heel strike).
struct GaitCycle {
    double thigh_height_m;       ///< hip joint height used for normalization
    double relative_velocity;    ///< speed in thigh heights per second
    double cycle_length_m;
    double cycle_duration_s;
    double support_fraction;     ///< support duration over cycle duration
};

/// Hip-joint height as a fraction of stature.
inline constexpr double kThighHeightRatio = 0.53;

GaitCycle gait_cycle(double height_m, double speed_mps);

/// Joint positions and scatterer ellipsoid frames in the walker frame
/// (x forward, y left, z up, origin on the ground below the nominal pelvis).
struct BodyPose {
    std::array<Vec3, kBodyPoints> center;
    std::array<Vec3, kBodyPoints> axis;     ///< unit, along the segment
    std::array<Vec3, kBodyPoints> lateral;  ///< unit, orthogonal to axis
};

/// Pose at normalized cycle phase (any real; only the fractional part matters).
BodyPose body_pose(double height_m, double speed_mps, double phase);

/// Effective per-timestep (height, speed, heading) streams.
struct DistortionStreams {
    double height_m = 0.0;
    std::vector<double> speed_mps;
    std::vector<double> direction_rad;
};

DistortionStreams apply_distortions(const PedestrianParams& base, std::size_t steps, double timestep_s, Rng& rng);

/// Monostatic RCS of an ellipsoid, `los` given in the ellipsoid frame
/// (components along the lateral, normal, axial semi-axes).
double rcs_ellipsoid(const EllipsoidAxes& axes, const Vec3& los);

/// Time series of positions, velocities and reflectivities for the 17 scatterers.
class TrajectoryTensor {
public:
    TrajectoryTensor() = default;
    TrajectoryTensor(std::size_t steps, double timestep_s);

    std::size_t steps() const { return steps_; }
    std::size_t scatterers() const { return kBodyPoints; }
    double timestep_s() const { return timestep_s_; }
    double duration_s() const { return static_cast<double>(steps_) * timestep_s_; }

    auto position(std::size_t t, std::size_t q) { return positions_.col(t * kBodyPoints + q); }
    auto position(std::size_t t, std::size_t q) const { return positions_.col(t * kBodyPoints + q); }
    auto velocity(std::size_t t, std::size_t q) { return velocities_.col(t * kBodyPoints + q); }
    auto velocity(std::size_t t, std::size_t q) const { return velocities_.col(t * kBodyPoints + q); }
    cdouble& reflectivity(std::size_t t, std::size_t q) { return reflectivity_(t * kBodyPoints + q); }
    cdouble reflectivity(std::size_t t, std::size_t q) const { return reflectivity_(t * kBodyPoints + q); }

    Vec3 centroid(std::size_t t) const;

    /// Free-form provenance tag (gait model variant, seed, ...).
    std::string model_tag;
    double truth_direction_deg = 0.0;

private:
    std::size_t steps_ = 0;
    double timestep_s_ = 0.0;
    Eigen::Matrix3Xd positions_;
    Eigen::Matrix3Xd velocities_;
    Eigen::VectorXcd reflectivity_;
};

inline constexpr const char* kGaitModelTag = "boulic-cycle+sinusoidal-limbs";

/// Synthesizes a walk. The random stream drives the distortion streams and
/// the per-scatterer reflectivity phases.
TrajectoryTensor synth_walk(const PedestrianParams& params, double duration_s, double timestep_s, Rng& rng,
                            const Vec3& radar_position = Vec3::Zero(),
                            const BodyModel& body = BodyModel::default_model());

}  // namespace mdlab
