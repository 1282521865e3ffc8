// Copyright 2026 The trackfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRACKFUSE__GEOMETRY_HPP_
#define TRACKFUSE__GEOMETRY_HPP_

#include <Eigen/Core>

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace trackfuse
{

struct Vec2
{
  double x{0.0};
  double y{0.0};
};

/// Oriented 3D box in the ego frame. Heading is stored as (sin, cos) about
/// the vertical axis; the constructor renormalizes the pair.
struct Box3D
{
  double x{0.0}, y{0.0}, z{0.0};
  double l{1.0}, w{1.0}, h{1.0};
  double sin_yaw{0.0}, cos_yaw{1.0};

  Box3D() = default;
  /// Throws std::invalid_argument on non-positive extents or a zero heading vector.
  Box3D(
    double x, double y, double z, double l, double w, double h, double sin_yaw,
    double cos_yaw);

  static Box3D from_yaw(double x, double y, double z, double l, double w, double h, double yaw);

  double yaw() const;
  Vec2 bev_center() const { return {x, y}; }
};

bool operator==(const Box3D & a, const Box3D & b);

/// BEV footprint, corners counter-clockwise.
struct BevRect
{
  std::array<Vec2, 4> corners;

  Vec2 centroid() const;
  double area() const;
};

struct ImageRect
{
  double u_min{0.0}, v_min{0.0}, u_max{0.0}, v_max{0.0};

  double area() const;
};

/// Pinhole intrinsics plus a rigid ego->camera transform. Camera frame is
/// x right, y down, z forward.
struct CameraModel
{
  double fx{1000.0}, fy{1000.0};
  double cx{800.0}, cy{450.0};
  Eigen::Matrix4d ego_to_cam{Eigen::Matrix4d::Identity()};
  double image_width{1600.0};
  double image_height{900.0};

  /// Throws std::invalid_argument if focal lengths are non-positive or the
  /// rotation block is not orthonormal within 1e-6.
  void validate() const;

  /// Forward-looking camera mounted `height` meters above the ego origin,
  /// with ego x forward, y left, z up.
  static CameraModel forward_facing(double height = 1.6);
};

inline constexpr double kDepthEpsilon = 0.1;
inline constexpr double kAreaEpsilon = 1e-9;

BevRect bev_footprint(const Box3D & box);

/// Area of the intersection of two convex CCW polygons (Sutherland-Hodgman).
double convex_intersection_area(std::span<const Vec2> subject, std::span<const Vec2> clip);

double bev_iou(const BevRect & a, const BevRect & b);

/// 1 - IoU + rho^2 / c^2, with c the diagonal of the axis-aligned box
/// enclosing all eight corners.
double diou(const BevRect & a, const BevRect & b);

std::optional<ImageRect> project_box(const Box3D & box, const CameraModel & cam);

double rect_iou(const ImageRect & a, const ImageRect & b);

/// Fraction of `a` covered by `b`. Zero when `a` is degenerate.
double overlap_fraction(const ImageRect & a, const ImageRect & b);

/// Absolute shoelace area; 0 for fewer than three points.
double polygon_area(std::span<const Vec2> points);

double bev_distance(const Box3D & a, const Box3D & b);

}  // namespace trackfuse

#endif  // TRACKFUSE__GEOMETRY_HPP_
