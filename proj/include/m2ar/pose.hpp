#pragma once

#include <cmath>
#include <optional>

namespace m2ar::scene {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// Rotation quaternion in (x, y, z, w) component order.
struct Quat {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double w = 1.0;

    friend bool operator==(const Quat&, const Quat&) = default;
};

inline Vec3 add(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }

/// Componentwise (Hadamard) product, used for scale.
inline Vec3 hadamard(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }

inline double norm(const Quat& q) {
    return std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z + q.w * q.w);
}

inline Quat normalized(const Quat& q) {
    const double n = norm(q);
    return {q.x / n, q.y / n, q.z / n, q.w / n};
}

/// Hamilton product a * b (apply b first, then a).
inline Quat multiply(const Quat& a, const Quat& b) {
    return {
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
    };
}

/// Rotate v by unit quaternion q: v + q.w*t + q.xyz x t with t = 2 (q.xyz x v).
/// Exact for the identity quaternion (t is then the zero vector).
inline Vec3 rotate(const Quat& q, const Vec3& v) {
    const double tx = 2.0 * (q.y * v.z - q.z * v.y);
    const double ty = 2.0 * (q.z * v.x - q.x * v.z);
    const double tz = 2.0 * (q.x * v.y - q.y * v.x);
    return {
        v.x + q.w * tx + (q.y * tz - q.z * ty),
        v.y + q.w * ty + (q.z * tx - q.x * tz),
        v.z + q.w * tz + (q.x * ty - q.y * tx),
    };
}

/// Position (meters), unit rotation and componentwise scale of an element.
struct Pose {
    Vec3 position{0.0, 0.0, 0.0};
    Quat rotation{0.0, 0.0, 0.0, 1.0};
    Vec3 scale{1.0, 1.0, 1.0};

    friend bool operator==(const Pose&, const Pose&) = default;
};

inline Pose identity_pose() { return Pose{}; }

/// True when |rotation| = 1 within tol and all scale components are positive.
inline bool pose_invariants_hold(const Pose& p, double tol = 1e-9) {
    return std::fabs(norm(p.rotation) - 1.0) <= tol && p.scale.x > 0.0 && p.scale.y > 0.0 &&
           p.scale.z > 0.0;
}

/// Rigid-transform composition parent ∘ local:
///   position = parent.position + parent.rotation · (parent.scale ⊙ local.position)
///   rotation = parent.rotation · local.rotation, renormalized
///   scale    = parent.scale ⊙ local.scale
/// Non-uniform scale composes componentwise; shear introduced by rotating a
/// non-uniformly scaled frame is not represented (common scene-graph
/// approximation, exact on the uniform-scale subgroup).
inline Pose compose(const Pose& parent, const Pose& local) {
    Pose out;
    out.position = add(parent.position, rotate(parent.rotation, hadamard(parent.scale, local.position)));
    out.rotation = normalized(multiply(parent.rotation, local.rotation));
    out.scale = hadamard(parent.scale, local.scale);
    return out;
}

/// Per-channel overwrite carried by a Statechange Reference. Absent channels
/// leave the target untouched.
struct ChangeList {
    std::optional<bool> visible;
    std::optional<Vec3> position;
    std::optional<Quat> rotation;
    std::optional<Vec3> scale;

    bool empty() const { return !visible && !position && !rotation && !scale; }

    friend bool operator==(const ChangeList&, const ChangeList&) = default;
};

}  // namespace m2ar::scene
