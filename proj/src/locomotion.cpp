#include "mdlab/locomotion.hpp"

#include <algorithm>
#include <cmath>

namespace mdlab {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Anthropometric proportions (fraction of stature).
constexpr double kHipHalfWidth = 0.055;
constexpr double kThigh = 0.245;
constexpr double kShank = 0.246;
constexpr double kFoot = 0.11;
constexpr double kTorso = 0.288;
constexpr double kNeckToHead = 0.117;
constexpr double kShoulderHalfWidth = 0.129;
constexpr double kUpperArm = 0.186;
constexpr double kForearm = 0.146;
constexpr double kHand = 0.108;

// Smooth periodic bump centred at `c` on the unit cycle, peak value 1.
double bump(double t, double c, double kappa) {
    return std::exp(kappa * (std::cos(kTwoPi * (t - c)) - 1.0));
}

Eigen::Matrix3d yaw(double rad) {
    return Eigen::AngleAxisd(rad, Vec3::UnitZ()).toRotationMatrix();
}

// Direction of a limb hanging from its proximal joint, rotated forward by
// `flex_deg` in the sagittal plane.
Vec3 hanging(double flex_deg) {
    const double a = deg2rad(flex_deg);
    return {std::sin(a), 0.0, -std::cos(a)};
}

struct LimbAngles {
    double hip, knee, ankle_plantar, shoulder, elbow;
};

// Joint angles (degrees) for one side at cycle phase t in [0, 1).
LimbAngles limb_angles(double rv, double t) {
    const double s = std::min(std::sqrt(rv), 1.2);
    const double ks = std::min(1.0, 0.6 + 0.4 * rv);
    const double shoulder_amp = 9.88 * rv;
    return LimbAngles{
        10.0 + 20.0 * s * std::cos(kTwoPi * t),
        5.0 + 15.0 * ks * bump(t, 0.15, 12.0) + 55.0 * ks * bump(t, 0.72, 10.0),
        -5.0 + 20.0 * ks * bump(t, 0.62, 8.0),
        3.0 - shoulder_amp / 2.0 - shoulder_amp * std::cos(kTwoPi * t),
        15.0 + 10.0 * std::min(rv, 1.5) * 0.5 * (1.0 - std::cos(kTwoPi * t)),
    };
}

}  // namespace

void DistortionParams::validate() const {
    require(height_lo_m <= height_hi_m, "distortion height range must satisfy lo <= hi");
    require(height_lo_m > 0.0, "distortion height range must be positive");
    require(accel_std_mps2 >= 0.0, "acceleration std must be >= 0");
    require(direction_std_rad >= 0.0, "direction std must be >= 0");
    require(direction_corr_time_s >= 0.0, "direction correlation time must be >= 0");
}

void PedestrianParams::validate() {
    if (!(height_m > 0.0)) throw ParameterError("pedestrian height must be positive");
    if (!(speed_mps > 0.0)) throw ParameterError("pedestrian speed must be positive (gait undefined at rest)");
    direction_deg = wrap_degrees(direction_deg);
    distortion.validate();
}

BodyModel BodyModel::default_model() {
    BodyModel m;
    auto& p = m.parts;
    using B = BodyPart;
    auto set = [&](B part, EllipsoidAxes e) { p[static_cast<std::size_t>(part)] = e; };
    set(B::head, {0.10, 0.10, 0.10});
    set(B::torso, {0.15, 0.15, 0.30});
    set(B::pelvis, {0.10, 0.10, 0.17});
    for (B b : {B::shoulder_l, B::shoulder_r}) set(b, {0.04, 0.04, 0.08});
    for (B b : {B::upper_arm_l, B::upper_arm_r}) set(b, {0.05, 0.05, 0.15});
    for (B b : {B::forearm_l, B::forearm_r}) set(b, {0.04, 0.04, 0.13});
    for (B b : {B::hand_l, B::hand_r}) set(b, {0.03, 0.03, 0.05});
    for (B b : {B::thigh_l, B::thigh_r}) set(b, {0.07, 0.07, 0.20});
    for (B b : {B::shin_l, B::shin_r}) set(b, {0.05, 0.05, 0.20});
    for (B b : {B::foot_l, B::foot_r}) set(b, {0.04, 0.03, 0.10});
    return m;
}

const char* body_part_name(std::size_t q) {
    static constexpr const char* names[kBodyPoints] = {
        "head",      "torso",       "pelvis",      "shoulder_l", "shoulder_r", "upper_arm_l",
        "upper_arm_r", "forearm_l", "forearm_r",   "hand_l",     "hand_r",     "thigh_l",
        "thigh_r",   "shin_l",      "shin_r",      "foot_l",     "foot_r"};
    return q < kBodyPoints ? names[q] : "?";
}

GaitCycle gait_cycle(double height_m, double speed_mps) {
    if (!(height_m > 0.0) || !(speed_mps > 0.0))
        throw ParameterError("gait cycle requires positive height and speed");
    GaitCycle g{};
    g.thigh_height_m = kThighHeightRatio * height_m;
    g.relative_velocity = speed_mps / g.thigh_height_m;
    const double relative_length = 1.346 * std::sqrt(g.relative_velocity);
    g.cycle_length_m = relative_length * g.thigh_height_m;
    g.cycle_duration_s = relative_length / g.relative_velocity;
    const double support_s = 0.752 * g.cycle_duration_s - 0.143;
    g.support_fraction = support_s / g.cycle_duration_s;
    return g;
}

BodyPose body_pose(double height_m, double speed_mps, double phase) {
    const GaitCycle g = gait_cycle(height_m, speed_mps);
    const double rv = g.relative_velocity;
    const double ht = g.thigh_height_m;
    const double h = height_m;
    const double t = phase - std::floor(phase);

    // Pelvis translations (thigh-height units).
    const double av = 0.015 * rv;
    const double al = rv > 0.5 ? -0.032 : -0.128 * rv * rv + 0.128 * rv;
    const double as = rv > 0.5 ? -0.021 : -0.084 * rv * rv + 0.084 * rv;
    const double shift = 0.625 - g.support_fraction;
    const double vert = -av + av * std::sin(kTwoPi * (2.0 * t - 0.35));
    const double lat = al * std::sin(kTwoPi * (t - 0.1));
    const double fwd = as * std::sin(kTwoPi * (2.0 * t + 2.0 * shift));

    // Pelvis/thorax rotations (degrees).
    const double tilt_amp = rv > 0.5 ? 2.0 : -8.0 * rv * rv + 8.0 * rv;
    const double lean = 3.0 - tilt_amp + tilt_amp * std::sin(kTwoPi * (2.0 * t - 0.1));
    const double pelvis_yaw = -4.0 * rv * std::cos(kTwoPi * t);
    const double thorax_yaw = -0.5 * pelvis_yaw;

    const Eigen::Matrix3d rp = yaw(deg2rad(pelvis_yaw));
    const Eigen::Matrix3d rt = yaw(deg2rad(thorax_yaw));

    const Vec3 pelvis(fwd * ht, lat * ht, ht + vert * ht);
    const double lean_rad = deg2rad(lean);
    const Vec3 torso_dir = rt * Vec3(std::sin(lean_rad), 0.0, std::cos(lean_rad));
    const Vec3 neck = pelvis + kTorso * h * torso_dir;
    const Vec3 head = neck + kNeckToHead * h * torso_dir;

    BodyPose pose;
    auto put = [&](BodyPart part, const Vec3& a, const Vec3& b) {
        const auto q = static_cast<std::size_t>(part);
        pose.center[q] = 0.5 * (a + b);
        Vec3 axis = b - a;
        const double n = axis.norm();
        axis = n > 0.0 ? Vec3(axis / n) : Vec3::UnitZ();
        Vec3 lateral = rp * Vec3::UnitY();
        lateral -= lateral.dot(axis) * axis;
        if (lateral.norm() < 1e-6) {
            lateral = rp * Vec3::UnitX();
            lateral -= lateral.dot(axis) * axis;
        }
        pose.axis[q] = axis;
        pose.lateral[q] = lateral.normalized();
    };

    {
        const auto q = static_cast<std::size_t>(BodyPart::head);
        pose.center[q] = head;
        pose.axis[q] = torso_dir;
        Vec3 lateral = rt * Vec3::UnitY();
        lateral -= lateral.dot(torso_dir) * torso_dir;
        pose.lateral[q] = lateral.normalized();
    }
    put(BodyPart::torso, pelvis, neck);

    const Vec3 hip_l = pelvis + rp * Vec3(0.0, kHipHalfWidth * h, 0.0);
    const Vec3 hip_r = pelvis + rp * Vec3(0.0, -kHipHalfWidth * h, 0.0);
    put(BodyPart::pelvis, hip_r, hip_l);

    struct Side {
        double phase;
        double sign;
        BodyPart shoulder, upper_arm, forearm, hand, thigh, shin, foot;
    };
    const Side sides[2] = {
        {t, 1.0, BodyPart::shoulder_l, BodyPart::upper_arm_l, BodyPart::forearm_l, BodyPart::hand_l,
         BodyPart::thigh_l, BodyPart::shin_l, BodyPart::foot_l},
        {t + 0.5, -1.0, BodyPart::shoulder_r, BodyPart::upper_arm_r, BodyPart::forearm_r, BodyPart::hand_r,
         BodyPart::thigh_r, BodyPart::shin_r, BodyPart::foot_r},
    };
    for (const Side& s : sides) {
        const double ts = s.phase - std::floor(s.phase);
        const LimbAngles ang = limb_angles(rv, ts);

        const Vec3 hip = s.sign > 0 ? hip_l : hip_r;
        const Vec3 knee = hip + kThigh * h * (rp * hanging(ang.hip));
        const double shank_flex = ang.hip - ang.knee;
        const Vec3 ankle = knee + kShank * h * (rp * hanging(shank_flex));
        const double foot_rad = deg2rad(shank_flex - ang.ankle_plantar);
        const Vec3 toe = ankle + kFoot * h * (rp * Vec3(std::cos(foot_rad), 0.0, std::sin(foot_rad)));
        put(s.thigh, hip, knee);
        put(s.shin, knee, ankle);
        put(s.foot, ankle, toe);

        const Vec3 shoulder = neck + rt * Vec3(0.0, s.sign * kShoulderHalfWidth * h, 0.0);
        const Vec3 elbow = shoulder + kUpperArm * h * (rt * hanging(ang.shoulder));
        const Vec3 wrist = elbow + kForearm * h * (rt * hanging(ang.shoulder + ang.elbow));
        const Vec3 fingertip = wrist + kHand * h * (rt * hanging(ang.shoulder + ang.elbow));
        put(s.shoulder, neck, shoulder);
        put(s.upper_arm, shoulder, elbow);
        put(s.forearm, elbow, wrist);
        put(s.hand, wrist, fingertip);
    }
    return pose;
}

DistortionStreams apply_distortions(const PedestrianParams& base, std::size_t steps, double timestep_s, Rng& rng) {
    require(timestep_s > 0.0, "timestep must be positive");
    const DistortionParams& d = base.distortion;
    const double theta0 = deg2rad(base.direction_deg);
    DistortionStreams out;
    out.height_m = base.height_m;
    out.speed_mps.assign(steps, base.speed_mps);
    out.direction_rad.assign(steps, theta0);
    if (!d.enabled || steps == 0) return out;
    d.validate();

    if (d.height_hi_m > d.height_lo_m) {
        std::uniform_real_distribution<double> uh(d.height_lo_m, d.height_hi_m);
        out.height_m = uh(rng);
    } else {
        out.height_m = d.height_lo_m;
    }

    std::normal_distribution<double> unit(0.0, 1.0);
    const double rho = d.direction_corr_time_s > 0.0 ? std::exp(-timestep_s / d.direction_corr_time_s) : 0.0;
    const double innovation = std::sqrt(1.0 - rho * rho) * d.direction_std_rad;
    constexpr double kMinSpeed = 0.05;

    double dev = d.direction_std_rad * unit(rng);
    out.direction_rad[0] = theta0 + dev;
    for (std::size_t k = 1; k < steps; ++k) {
        const double accel = d.accel_std_mps2 * unit(rng);
        out.speed_mps[k] = std::max(kMinSpeed, out.speed_mps[k - 1] + accel * timestep_s);
        dev = rho * dev + innovation * unit(rng);
        out.direction_rad[k] = theta0 + dev;
    }
    return out;
}

double rcs_ellipsoid(const EllipsoidAxes& axes, const Vec3& los) {
    const double a = axes.lateral_m, b = axes.normal_m, c = axes.axial_m;
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0)) throw ParameterError("ellipsoid semi-axes must be positive");
    const double n = los.norm();
    if (std::abs(n - 1.0) > 1e-6) throw ParameterError("line-of-sight must be a unit vector");
    // a^2 sin^2(th) cos^2(ph) + b^2 sin^2(th) sin^2(ph) + c^2 cos^2(th), with the
    // direction cosines of the LOS taking the place of the trig products.
    const double den = a * a * los.x() * los.x() + b * b * los.y() * los.y() + c * c * los.z() * los.z();
    return kPi * a * a * b * b * c * c / (den * den);
}

TrajectoryTensor::TrajectoryTensor(std::size_t steps, double timestep_s)
    : steps_(steps),
      timestep_s_(timestep_s),
      positions_(3, steps * kBodyPoints),
      velocities_(3, steps * kBodyPoints),
      reflectivity_(steps * kBodyPoints) {}

Vec3 TrajectoryTensor::centroid(std::size_t t) const {
    return positions_.middleCols(t * kBodyPoints, kBodyPoints).rowwise().mean();
}

TrajectoryTensor synth_walk(const PedestrianParams& params_in, double duration_s, double timestep_s, Rng& rng,
                            const Vec3& radar_position, const BodyModel& body) {
    PedestrianParams params = params_in;
    params.validate();
    require(timestep_s > 0.0, "timestep must be positive");
    const GaitCycle nominal = gait_cycle(params.height_m, params.speed_mps);
    require(duration_s + 1e-12 >= nominal.cycle_duration_s, "duration must cover at least one gait cycle");

    const auto steps = static_cast<std::size_t>(std::llround(duration_s / timestep_s));
    // One guard sample on each side for central differences.
    const std::size_t padded = steps + 2;
    const DistortionStreams streams = apply_distortions(params, padded, timestep_s, rng);

    std::uniform_real_distribution<double> uphase(0.0, 2.0 * kPi);
    std::array<cdouble, kBodyPoints> phasor;
    for (auto& p : phasor) p = std::polar(1.0, uphase(rng));

    // Integrate gait phase and the reference point along the heading stream.
    // Index 1 of the padded streams corresponds to t = 0.
    std::vector<double> phase(padded);
    std::vector<Vec3> origin(padded);
    phase[1] = 0.0;
    origin[1] = params.start_position_m;
    auto advance = [&](std::size_t k) -> Vec3 {
        return Vec3(std::cos(streams.direction_rad[k]), std::sin(streams.direction_rad[k]), 0.0) *
               (streams.speed_mps[k] * timestep_s);
    };
    auto phase_rate = [&](std::size_t k) {
        return timestep_s / gait_cycle(streams.height_m, streams.speed_mps[k]).cycle_duration_s;
    };
    phase[0] = -phase_rate(0);
    origin[0] = origin[1] - advance(0);
    for (std::size_t k = 2; k < padded; ++k) {
        phase[k] = phase[k - 1] + phase_rate(k - 1);
        origin[k] = origin[k - 1] + advance(k - 1);
    }

    Eigen::Matrix3Xd pos(3, padded * kBodyPoints);
    TrajectoryTensor traj(steps, timestep_s);
    traj.model_tag = kGaitModelTag;
    traj.truth_direction_deg = params.direction_deg;

    for (std::size_t k = 0; k < padded; ++k) {
        const BodyPose pose = body_pose(streams.height_m, streams.speed_mps[k], phase[k]);
        const Eigen::Matrix3d rot = yaw(streams.direction_rad[k]);
        for (std::size_t q = 0; q < kBodyPoints; ++q) {
            const Vec3 world = origin[k] + rot * pose.center[q];
            pos.col(k * kBodyPoints + q) = world;
            if (k == 0 || k == padded - 1) continue;
            const std::size_t t = k - 1;
            const Vec3 axis = rot * pose.axis[q];
            const Vec3 lateral = rot * pose.lateral[q];
            const Vec3 normal = axis.cross(lateral);
            Vec3 los = world - radar_position;
            los.normalize();
            const Vec3 local(los.dot(lateral), los.dot(normal), los.dot(axis));
            const double sigma = rcs_ellipsoid(body.parts[q], local.normalized());
            traj.reflectivity(t, q) = std::sqrt(sigma) * phasor[q];
        }
    }

    const double inv2dt = 1.0 / (2.0 * timestep_s);
    for (std::size_t t = 0; t < steps; ++t) {
        const std::size_t k = t + 1;
        for (std::size_t q = 0; q < kBodyPoints; ++q) {
            traj.position(t, q) = pos.col(k * kBodyPoints + q);
            traj.velocity(t, q) = (pos.col((k + 1) * kBodyPoints + q) - pos.col((k - 1) * kBodyPoints + q)) * inv2dt;
        }
    }
    return traj;
}

}  // namespace mdlab
