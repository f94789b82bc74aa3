// Copyright 2026 The Sociobot Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sociobot/sim/camera.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace sociobot::sim {
namespace {

struct Drawable {
  double depth;
  std::size_t order;  // tie-break so equal depths still render deterministically
  const Shape* shape;
  kin::Pose pose_cam;
  Rgb8 color;
};

void fill_disk(Image& img, const CameraModel& cam, const kin::Vec3& center, double radius,
               Rgb8 color) {
  const auto uv = project(cam, center);
  if (!uv) {
    return;
  }
  const double rx = cam.fx * radius / center.x();
  const double ry = cam.fy * radius / center.x();
  const int u0 = std::max(0, static_cast<int>(std::floor((*uv)[0] - rx)));
  const int u1 = std::min(img.width() - 1, static_cast<int>(std::ceil((*uv)[0] + rx)));
  const int v0 = std::max(0, static_cast<int>(std::floor((*uv)[1] - ry)));
  const int v1 = std::min(img.height() - 1, static_cast<int>(std::ceil((*uv)[1] + ry)));
  for (int v = v0; v <= v1; ++v) {
    for (int u = u0; u <= u1; ++u) {
      const double du = (u - (*uv)[0]) / rx;
      const double dv = (v - (*uv)[1]) / ry;
      if (du * du + dv * dv <= 1.0) {
        img.set(u, v, color);
      }
    }
  }
}

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew's monotone chain, counter-clockwise in (u, v).
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) {
      --k;
    }
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  hull.resize(k > 0 ? k - 1 : 0);
  return hull;
}

void fill_box(Image& img, const CameraModel& cam, const kin::Pose& pose_cam,
              const kin::Vec3& half, Rgb8 color) {
  std::vector<Eigen::Vector2d> corners;
  for (int i = 0; i < 8; ++i) {
    const kin::Vec3 local((i & 1) ? half.x() : -half.x(), (i & 2) ? half.y() : -half.y(),
                          (i & 4) ? half.z() : -half.z());
    const auto uv = project(cam, pose_cam * local);
    if (!uv) {
      return;  // straddles the near plane: culled whole
    }
    corners.push_back(*uv);
  }
  const std::vector<Eigen::Vector2d> hull = convex_hull(corners);
  if (hull.size() < 3) {
    return;
  }
  double umin = hull[0].x(), umax = umin, vmin = hull[0].y(), vmax = vmin;
  for (const auto& p : hull) {
    umin = std::min(umin, p.x());
    umax = std::max(umax, p.x());
    vmin = std::min(vmin, p.y());
    vmax = std::max(vmax, p.y());
  }
  const int u0 = std::max(0, static_cast<int>(std::ceil(umin)));
  const int u1 = std::min(img.width() - 1, static_cast<int>(std::floor(umax)));
  const int v0 = std::max(0, static_cast<int>(std::ceil(vmin)));
  const int v1 = std::min(img.height() - 1, static_cast<int>(std::floor(vmax)));
  for (int v = v0; v <= v1; ++v) {
    for (int u = u0; u <= u1; ++u) {
      const Eigen::Vector2d p(u, v);
      bool inside = true;
      for (std::size_t e = 0; e < hull.size() && inside; ++e) {
        inside = cross(hull[e], hull[(e + 1) % hull.size()], p) >= 0;
      }
      if (inside) {
        img.set(u, v, color);
      }
    }
  }
}

}  // namespace

void CameraModel::validate() const {
  if (width <= 0 || height <= 0 || !(fx > 0.0) || !(fy > 0.0) || !(near > 0.0) ||
      !(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw SimError(SimErrc::kInvalidArgument, "camera model out of range");
  }
}

std::optional<Eigen::Vector2d> project(const CameraModel& cam, const kin::Vec3& p) {
  if (p.x() < cam.near) {
    return std::nullopt;
  }
  return Eigen::Vector2d(cam.cx - cam.fx * p.y() / p.x(), cam.cy - cam.fy * p.z() / p.x());
}

bool inside_image(const CameraModel& cam, const Eigen::Vector2d& uv) {
  return uv.x() >= 0.0 && uv.x() <= cam.width - 1 && uv.y() >= 0.0 && uv.y() <= cam.height - 1;
}

Image render(const CameraModel& cam, const kin::Pose& camera_pose,
             std::span<const SceneObject> objects, std::span<const Avatar> avatars) {
  Image img(cam.width, cam.height, kBackground);
  const kin::Pose world_to_cam = camera_pose.inverse();
  static const Shape kHead = Sphere{kAvatarHeadRadius};

  std::vector<Drawable> items;
  std::size_t order = 0;
  for (const SceneObject& o : objects) {
    const kin::Pose p = world_to_cam * o.pose;
    items.push_back({p.position.x(), order++, &o.shape, p, o.color});
  }
  for (const Avatar& a : avatars) {
    const kin::Pose p = world_to_cam * a.pose;
    items.push_back({p.position.x(), order++, &kHead, p, kSkin});
  }
  std::sort(items.begin(), items.end(), [](const Drawable& a, const Drawable& b) {
    return a.depth > b.depth || (a.depth == b.depth && a.order < b.order);
  });
  for (const Drawable& d : items) {
    if (d.depth < cam.near) {
      continue;
    }
    if (const auto* s = std::get_if<Sphere>(d.shape)) {
      fill_disk(img, cam, d.pose_cam.position, s->radius, d.color);
    } else {
      fill_box(img, cam, d.pose_cam, std::get<Box>(*d.shape).half_extents, d.color);
    }
  }
  return img;
}

}  // namespace sociobot::sim
