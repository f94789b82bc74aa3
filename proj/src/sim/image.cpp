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

#include "sociobot/sim/image.hpp"

#include <stdexcept>

namespace sociobot::sim {

Rgb8 reference_color(ColorClass c) {
  switch (c) {
    case ColorClass::kRed:
      return {220, 40, 40};
    case ColorClass::kGreen:
      return {40, 200, 40};
    case ColorClass::kBlue:
      return {40, 60, 220};
    case ColorClass::kYellow:
      return {230, 220, 40};
  }
  return kBackground;
}

std::string_view to_string(ColorClass c) {
  switch (c) {
    case ColorClass::kRed:
      return "red";
    case ColorClass::kGreen:
      return "green";
    case ColorClass::kBlue:
      return "blue";
    case ColorClass::kYellow:
      return "yellow";
  }
  return "?";
}

std::optional<ColorClass> parse_color_class(std::string_view name) {
  for (ColorClass c : kColorClasses) {
    if (to_string(c) == name) {
      return c;
    }
  }
  return std::nullopt;
}

Image::Image(int width, int height, Rgb8 fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  bytes_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < bytes_.size(); i += 3) {
    bytes_[i] = fill.r;
    bytes_[i + 1] = fill.g;
    bytes_[i + 2] = fill.b;
  }
}

Rgb8 Image::at(int u, int v) const {
  const std::size_t i = (static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
                         static_cast<std::size_t>(u)) * 3;
  return {bytes_[i], bytes_[i + 1], bytes_[i + 2]};
}

void Image::set(int u, int v, Rgb8 color) {
  const std::size_t i = (static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
                         static_cast<std::size_t>(u)) * 3;
  bytes_[i] = color.r;
  bytes_[i + 1] = color.g;
  bytes_[i + 2] = color.b;
}

}  // namespace sociobot::sim
