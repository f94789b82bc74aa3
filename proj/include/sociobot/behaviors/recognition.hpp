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

#ifndef SOCIOBOT_BEHAVIORS_RECOGNITION_HPP_
#define SOCIOBOT_BEHAVIORS_RECOGNITION_HPP_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sociobot/sim/faces.hpp"

namespace sociobot::behaviors {

enum class BehaviorErrc {
  kEmptyGallery,
  kBadGallery,
  kBadClip,
  kClipBusy,
  kInvalidArgument,
};

std::string_view to_string(BehaviorErrc code);

class BehaviorError : public std::runtime_error {
 public:
  BehaviorError(BehaviorErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  BehaviorErrc code() const noexcept { return code_; }

 private:
  BehaviorErrc code_;
};

struct FaceGalleryEntry {
  std::string id;
  std::string name;
  sim::Descriptor descriptor;
  std::string notes;
};

using Gallery = std::vector<FaceGalleryEntry>;

// JSON list of {"id", "name", "descriptor"?: [16], "notes"?}. A missing
// descriptor is derived from the id exactly as the scene loader does, so
// scene avatars and gallery entries with the same id match. Throws
// BehaviorError(kBadGallery).
Gallery parse_gallery(std::string_view json_text);
Gallery load_gallery(const std::filesystem::path& path);

struct FaceMatch {
  std::string id;
  double similarity = 0.0;
};

inline constexpr double kRecognitionThreshold = 0.80;

// Best cosine match if it reaches `threshold`, ties to the smallest id;
// nullopt means Unknown. Throws BehaviorError(kEmptyGallery).
std::optional<FaceMatch> recognize_face(const sim::Descriptor& descriptor, const Gallery& gallery,
                                        double threshold = kRecognitionThreshold);

// Nearest of the 7 prototypes by cosine similarity. A tie for the best
// similarity resolves to neutral.
sim::Expression classify_expression(const sim::Descriptor& descriptor);

}  // namespace sociobot::behaviors

#endif  // SOCIOBOT_BEHAVIORS_RECOGNITION_HPP_
