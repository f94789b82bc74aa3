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

#include "sociobot/behaviors/vision.hpp"

#include <algorithm>
#include <cstdlib>

namespace sociobot::behaviors {

bool matches_color(sim::Rgb8 p, sim::Rgb8 r, int tolerance) {
  return std::abs(p.r - r.r) <= tolerance && std::abs(p.g - r.g) <= tolerance &&
         std::abs(p.b - r.b) <= tolerance;
}

std::vector<Detection> color_segment(const sim::Image& image, sim::ColorClass color,
                                     const SegmentOptions& options) {
  const int w = image.width();
  const int h = image.height();
  const sim::Rgb8 reference = sim::reference_color(color);
  std::vector<char> state(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      state[static_cast<std::size_t>(v * w + u)] =
          matches_color(image.at(u, v), reference, options.tolerance) ? 1 : 0;
    }
  }
  std::vector<Detection> out;
  std::vector<int> stack;
  for (int start = 0; start < w * h; ++start) {
    if (state[static_cast<std::size_t>(start)] != 1) {
      continue;
    }
    state[static_cast<std::size_t>(start)] = 2;
    stack.assign(1, start);
    long long su = 0, sv = 0;
    int area = 0;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int u = p % w;
      const int v = p / w;
      su += u;
      sv += v;
      ++area;
      const int neighbors[4][2] = {{u - 1, v}, {u + 1, v}, {u, v - 1}, {u, v + 1}};
      for (const auto& n : neighbors) {
        if (n[0] < 0 || n[0] >= w || n[1] < 0 || n[1] >= h) {
          continue;
        }
        const auto idx = static_cast<std::size_t>(n[1] * w + n[0]);
        if (state[idx] == 1) {
          state[idx] = 2;
          stack.push_back(n[1] * w + n[0]);
        }
      }
    }
    if (area >= options.min_area) {
      out.push_back({color,
                     Eigen::Vector2d(static_cast<double>(su) / area, static_cast<double>(sv) / area),
                     area});
    }
  }
  std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    if (a.area != b.area) return a.area > b.area;
    if (a.centroid.y() != b.centroid.y()) return a.centroid.y() < b.centroid.y();
    return a.centroid.x() < b.centroid.x();
  });
  return out;
}

}  // namespace sociobot::behaviors
