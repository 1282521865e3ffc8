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

#include "trackfuse/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trackfuse
{

Box3D::Box3D(
  double x_, double y_, double z_, double l_, double w_, double h_, double sin_yaw_,
  double cos_yaw_)
: x(x_), y(y_), z(z_), l(l_), w(w_), h(h_)
{
  if (!(l > 0.0 && w > 0.0 && h > 0.0)) {
    throw std::invalid_argument("Box3D: extents must be positive");
  }
  const double norm = std::hypot(sin_yaw_, cos_yaw_);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("Box3D: heading vector must be non-zero");
  }
  // Leave already-unit pairs bit-exact so parsing a serialized box is lossless.
  const double scale = std::abs(norm - 1.0) <= 1e-12 ? 1.0 : norm;
  sin_yaw = sin_yaw_ / scale;
  cos_yaw = cos_yaw_ / scale;
}

Box3D Box3D::from_yaw(double x, double y, double z, double l, double w, double h, double yaw)
{
  return Box3D(x, y, z, l, w, h, std::sin(yaw), std::cos(yaw));
}

double Box3D::yaw() const { return std::atan2(sin_yaw, cos_yaw); }

bool operator==(const Box3D & a, const Box3D & b)
{
  return a.x == b.x && a.y == b.y && a.z == b.z && a.l == b.l && a.w == b.w && a.h == b.h &&
         a.sin_yaw == b.sin_yaw && a.cos_yaw == b.cos_yaw;
}

Vec2 BevRect::centroid() const
{
  Vec2 c;
  for (const auto & p : corners) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= 4.0;
  c.y /= 4.0;
  return c;
}

double BevRect::area() const { return polygon_area(corners); }

double ImageRect::area() const
{
  return std::max(0.0, u_max - u_min) * std::max(0.0, v_max - v_min);
}

void CameraModel::validate() const
{
  if (!(fx > 0.0 && fy > 0.0)) {
    throw std::invalid_argument("CameraModel: fx and fy must be positive");
  }
  if (!(image_width > 0.0 && image_height > 0.0)) {
    throw std::invalid_argument("CameraModel: image size must be positive");
  }
  const Eigen::Matrix3d r = ego_to_cam.topLeftCorner<3, 3>();
  const double err = (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(err <= 1e-6)) {
    throw std::invalid_argument("CameraModel: ego_to_cam rotation is not orthonormal");
  }
}

CameraModel CameraModel::forward_facing(double height)
{
  CameraModel cam;
  // cam_x = -ego_y, cam_y = height - ego_z, cam_z = ego_x
  cam.ego_to_cam << 0.0, -1.0, 0.0, 0.0,  //
    0.0, 0.0, -1.0, height,               //
    1.0, 0.0, 0.0, 0.0,                   //
    0.0, 0.0, 0.0, 1.0;
  return cam;
}

BevRect bev_footprint(const Box3D & box)
{
  const double hl = 0.5 * box.l;
  const double hw = 0.5 * box.w;
  const std::array<Vec2, 4> local{{{hl, -hw}, {hl, hw}, {-hl, hw}, {-hl, -hw}}};
  BevRect rect;
  for (std::size_t i = 0; i < 4; ++i) {
    rect.corners[i] = {
      box.x + box.cos_yaw * local[i].x - box.sin_yaw * local[i].y,
      box.y + box.sin_yaw * local[i].x + box.cos_yaw * local[i].y};
  }
  return rect;
}

namespace
{

double cross(const Vec2 & o, const Vec2 & a, const Vec2 & b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

Vec2 segment_line_intersection(const Vec2 & p, const Vec2 & q, const Vec2 & a, const Vec2 & b)
{
  const double dp = cross(a, b, p);
  const double dq = cross(a, b, q);
  const double t = dp / (dp - dq);
  return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
}

}  // namespace

double convex_intersection_area(std::span<const Vec2> subject, std::span<const Vec2> clip)
{
  std::vector<Vec2> output(subject.begin(), subject.end());
  std::vector<Vec2> input;
  const std::size_t n = clip.size();
  for (std::size_t e = 0; e < n && !output.empty(); ++e) {
    const Vec2 & a = clip[e];
    const Vec2 & b = clip[(e + 1) % n];
    input.swap(output);
    output.clear();
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Vec2 & cur = input[i];
      const Vec2 & prev = input[(i + input.size() - 1) % input.size()];
      const bool cur_in = cross(a, b, cur) >= 0.0;
      const bool prev_in = cross(a, b, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) {
          output.push_back(segment_line_intersection(prev, cur, a, b));
        }
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(segment_line_intersection(prev, cur, a, b));
      }
    }
  }
  const double area = polygon_area(output);
  return area < kAreaEpsilon ? 0.0 : area;
}

double bev_iou(const BevRect & a, const BevRect & b)
{
  const double inter = convex_intersection_area(a.corners, b.corners);
  if (inter <= 0.0) {
    return 0.0;
  }
  const double uni = a.area() + b.area() - inter;
  if (uni < kAreaEpsilon) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

double diou(const BevRect & a, const BevRect & b)
{
  const Vec2 ca = a.centroid();
  const Vec2 cb = b.centroid();
  const double rho2 = (ca.x - cb.x) * (ca.x - cb.x) + (ca.y - cb.y) * (ca.y - cb.y);

  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (const auto * rect : {&a, &b}) {
    for (const auto & p : rect->corners) {
      min_x = std::min(min_x, p.x);
      min_y = std::min(min_y, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
  }
  const double c2 = (max_x - min_x) * (max_x - min_x) + (max_y - min_y) * (max_y - min_y);
  const double penalty = c2 > 0.0 ? rho2 / c2 : 0.0;
  return std::max(0.0, 1.0 - bev_iou(a, b) + penalty);
}

std::optional<ImageRect> project_box(const Box3D & box, const CameraModel & cam)
{
  const double hl = 0.5 * box.l;
  const double hw = 0.5 * box.w;
  const double hh = 0.5 * box.h;

  double u_min = std::numeric_limits<double>::infinity();
  double v_min = u_min;
  double u_max = -u_min;
  double v_max = -u_min;
  bool any_visible = false;
  for (int corner = 0; corner < 8; ++corner) {
    const double lx = (corner & 1) ? hl : -hl;
    const double ly = (corner & 2) ? hw : -hw;
    const double lz = (corner & 4) ? hh : -hh;
    const Eigen::Vector4d ego{
      box.x + box.cos_yaw * lx - box.sin_yaw * ly, box.y + box.sin_yaw * lx + box.cos_yaw * ly,
      box.z + lz, 1.0};
    const Eigen::Vector4d c = cam.ego_to_cam * ego;
    if (c.z() <= kDepthEpsilon) {
      continue;
    }
    any_visible = true;
    const double u = cam.fx * c.x() / c.z() + cam.cx;
    const double v = cam.fy * c.y() / c.z() + cam.cy;
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
    v_min = std::min(v_min, v);
    v_max = std::max(v_max, v);
  }
  if (!any_visible) {
    return std::nullopt;
  }
  ImageRect rect{
    std::clamp(u_min, 0.0, cam.image_width), std::clamp(v_min, 0.0, cam.image_height),
    std::clamp(u_max, 0.0, cam.image_width), std::clamp(v_max, 0.0, cam.image_height)};
  if (!(rect.u_min < rect.u_max) || !(rect.v_min < rect.v_max)) {
    return std::nullopt;
  }
  return rect;
}

namespace
{

double intersection_area(const ImageRect & a, const ImageRect & b)
{
  const double w = std::min(a.u_max, b.u_max) - std::max(a.u_min, b.u_min);
  const double h = std::min(a.v_max, b.v_max) - std::max(a.v_min, b.v_min);
  if (w <= 0.0 || h <= 0.0) {
    return 0.0;
  }
  return w * h;
}

}  // namespace

double rect_iou(const ImageRect & a, const ImageRect & b)
{
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) {
    return 0.0;
  }
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

double overlap_fraction(const ImageRect & a, const ImageRect & b)
{
  const double area = a.area();
  if (area <= 0.0) {
    return 0.0;
  }
  return std::clamp(intersection_area(a, b) / area, 0.0, 1.0);
}

double polygon_area(std::span<const Vec2> points)
{
  if (points.size() < 3) {
    return 0.0;
  }
  // Shoelace relative to the first vertex keeps the sum translation-stable.
  const Vec2 o = points.front();
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    twice += cross(o, points[i], points[i + 1]);
  }
  return 0.5 * std::abs(twice);
}

double bev_distance(const Box3D & a, const Box3D & b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace trackfuse
