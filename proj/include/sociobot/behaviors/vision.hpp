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

#ifndef SOCIOBOT_BEHAVIORS_VISION_HPP_
#define SOCIOBOT_BEHAVIORS_VISION_HPP_

#include <vector>

#include <Eigen/Core>

#include "sociobot/sim/image.hpp"

namespace sociobot::behaviors {

struct Detection {
  sim::ColorClass color;
  Eigen::Vector2d centroid;  // px, mean of member pixel coordinates
  int area = 0;              // px
};

struct SegmentOptions {
  int tolerance = 60;  // per channel, inclusive
  int min_area = 20;   // px
};

bool matches_color(sim::Rgb8 pixel, sim::Rgb8 reference, int tolerance);

// 4-connected components of pixels within tolerance of the class color,
// largest first (ties by centroid v then u).
std::vector<Detection> color_segment(const sim::Image& image, sim::ColorClass color,
                                     const SegmentOptions& options = {});

}  // namespace sociobot::behaviors

#endif  // SOCIOBOT_BEHAVIORS_VISION_HPP_
