#pragma once

#include <cmath>

namespace iroplan {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
  friend Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
};

inline double planar_distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline bool approx_equal(const Vec3& a, const Vec3& b, double tol = 1e-9) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol &&
         std::abs(a.z - b.z) <= tol;
}

/// End-effector pose: translation plus roll/pitch/yaw in radians.
struct Pose {
  Vec3 position;
  Vec3 rpy;

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Landmarks carry no orientation, so composing a landmark frame with an
/// offset is a pure translation of the offset.
inline Pose compose(const Vec3& frame_origin, const Pose& offset) {
  return {frame_origin + offset.position, offset.rpy};
}

}  // namespace iroplan
