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

#ifndef SOCIOBOT_SIM_IMAGE_HPP_
#define SOCIOBOT_SIM_IMAGE_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sociobot::sim {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb8&) const = default;
};

inline constexpr Rgb8 kBackground{40, 40, 40};
inline constexpr Rgb8 kSkin{200, 160, 130};

// The four trackable color classes and their reference colors.
enum class ColorClass { kRed, kGreen, kBlue, kYellow };

inline constexpr ColorClass kColorClasses[] = {ColorClass::kRed, ColorClass::kGreen,
                                               ColorClass::kBlue, ColorClass::kYellow};

Rgb8 reference_color(ColorClass c);
std::string_view to_string(ColorClass c);
std::optional<ColorClass> parse_color_class(std::string_view name);

// Row-major RGB8 raster.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb8 fill = kBackground);

  int width() const { return width_; }
  int height() const { return height_; }

  Rgb8 at(int u, int v) const;
  void set(int u, int v, Rgb8 color);

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bytes_;
};

}  // namespace sociobot::sim

#endif  // SOCIOBOT_SIM_IMAGE_HPP_
