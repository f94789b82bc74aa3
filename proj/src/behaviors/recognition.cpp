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

#include "sociobot/behaviors/recognition.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sociobot::behaviors {

using nlohmann::json;

std::string_view to_string(BehaviorErrc code) {
  switch (code) {
    case BehaviorErrc::kEmptyGallery:
      return "EmptyGallery";
    case BehaviorErrc::kBadGallery:
      return "BadGallery";
    case BehaviorErrc::kBadClip:
      return "BadClip";
    case BehaviorErrc::kClipBusy:
      return "ClipBusy";
    case BehaviorErrc::kInvalidArgument:
      return "InvalidArgument";
  }
  return "?";
}

Gallery parse_gallery(std::string_view json_text) {
  const auto bad = [](const std::string& where, const std::string& what) {
    return BehaviorError(BehaviorErrc::kBadGallery, where + ": " + what);
  };
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw bad("gallery", e.what());
  }
  if (!doc.is_array()) {
    throw bad("gallery", "top level must be a list");
  }
  Gallery gallery;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "gallery[" + std::to_string(i) + "]";
    const json& e = doc[i];
    if (!e.is_object() || !e.contains("id") || !e["id"].is_string() ||
        e["id"].get<std::string>().empty()) {
      throw bad(where, "missing string 'id'");
    }
    FaceGalleryEntry entry;
    entry.id = e["id"].get<std::string>();
    if (!ids.insert(entry.id).second) {
      throw bad(where, "duplicate id " + entry.id);
    }
    entry.name = e.value("name", entry.id);
    entry.notes = e.value("notes", "");
    if (e.contains("descriptor")) {
      const json& d = e["descriptor"];
      if (!d.is_array() || d.size() != sim::kDescriptorDim) {
        throw bad(where, "descriptor must have 16 numbers");
      }
      for (int k = 0; k < sim::kDescriptorDim; ++k) {
        const json& x = d[static_cast<std::size_t>(k)];
        if (!x.is_number() || !std::isfinite(x.get<double>())) {
          throw bad(where, "descriptor entries must be finite numbers");
        }
        entry.descriptor[k] = x.get<double>();
      }
      if (entry.descriptor.norm() < 1e-9) {
        throw bad(where, "descriptor must be non-zero");
      }
      entry.descriptor.normalize();
    } else {
      entry.descriptor = sim::derived_descriptor(entry.id);
    }
    gallery.push_back(std::move(entry));
  }
  return gallery;
}

Gallery load_gallery(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw BehaviorError(BehaviorErrc::kBadGallery, "cannot open gallery " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_gallery(text.str());
}

std::optional<FaceMatch> recognize_face(const sim::Descriptor& descriptor, const Gallery& gallery,
                                        double threshold) {
  if (gallery.empty()) {
    throw BehaviorError(BehaviorErrc::kEmptyGallery, "face gallery is empty");
  }
  const sim::Descriptor query = descriptor.normalized();
  const FaceGalleryEntry* best = nullptr;
  double best_similarity = -2.0;
  for (const FaceGalleryEntry& entry : gallery) {
    const double s = query.dot(entry.descriptor);
    if (s > best_similarity || (s == best_similarity && entry.id < best->id)) {
      best_similarity = s;
      best = &entry;
    }
  }
  if (best_similarity < threshold) {
    return std::nullopt;
  }
  return FaceMatch{best->id, best_similarity};
}

sim::Expression classify_expression(const sim::Descriptor& descriptor) {
  const sim::Descriptor query = descriptor.normalized();
  sim::Expression best = sim::Expression::kNeutral;
  double best_similarity = -2.0;
  bool tied = false;
  for (sim::Expression e : sim::kExpressions) {
    const double s = query.dot(sim::expression_prototype(e));
    if (s > best_similarity) {
      best_similarity = s;
      best = e;
      tied = false;
    } else if (s == best_similarity) {
      tied = true;
    }
  }
  return tied ? sim::Expression::kNeutral : best;
}

}  // namespace sociobot::behaviors
