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

#include "sociobot/behaviors/command.hpp"

#include <cctype>
#include <vector>

namespace sociobot::behaviors {
namespace {

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) {
        words.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) {
    words.push_back(std::move(current));
  }
  if (!words.empty()) {
    std::string& last = words.back();
    while (!last.empty() && (last.back() == '.' || last.back() == '!' || last.back() == '?')) {
      last.pop_back();
    }
    if (last.empty()) {
      words.pop_back();
    }
  }
  return words;
}

std::string lower(std::string s) {
  for (char& c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

bool is(const std::vector<std::string>& w, std::initializer_list<std::string_view> expected) {
  if (w.size() != expected.size()) {
    return false;
  }
  std::size_t i = 0;
  for (std::string_view e : expected) {
    if (w[i++] != e) {
      return false;
    }
  }
  return true;
}

}  // namespace

Intent parse_command(std::string_view text) {
  const std::vector<std::string> original = words_of(text);
  std::vector<std::string> w;
  for (const std::string& word : original) {
    w.push_back(lower(word));
  }
  const Unknown unknown{std::string(text)};
  if (w.empty()) {
    return unknown;
  }
  if (is(w, {"look", "at", "me"})) {
    return TrackFace{};
  }
  if (is(w, {"stop"}) || is(w, {"stop", "tracking"})) {
    return StopTracking{};
  }
  if (is(w, {"put", "it", "down"})) {
    return Place{};
  }
  if (w[0] == "track") {
    std::string color;
    if (w.size() == 4 && w[1] == "the" && w[3] == "object") {
      color = w[2];
    } else if (w.size() == 2) {
      color = w[1];
    }
    if (const auto c = sim::parse_color_class(color)) {
      return TrackColor{*c};
    }
    return unknown;
  }
  if ((w[0] == "show" || w[0] == "be") && w.size() == 2) {
    if (const auto e = sim::parse_expression(w[1])) {
      return Express{*e};
    }
    return unknown;
  }
  if (w.size() >= 3 && w[0] == "pick" && w[1] == "up") {
    if (w.size() == 4 && w[2] == "the") {
      return Pick{w[3]};
    }
    if (w.size() == 3) {
      return Pick{w[2]};
    }
    return unknown;
  }
  if (w[0] == "say" && w.size() >= 2) {
    std::string said = original[1];
    for (std::size_t i = 2; i < original.size(); ++i) {
      said += ' ' + original[i];
    }
    return Say{said};
  }
  return unknown;
}

std::string describe(const Intent& intent) {
  struct Visitor {
    std::string operator()(const TrackColor& i) const {
      return "TrackColor(" + std::string(sim::to_string(i.color)) + ")";
    }
    std::string operator()(const TrackFace&) const { return "TrackFace"; }
    std::string operator()(const StopTracking&) const { return "StopTracking"; }
    std::string operator()(const Express& i) const {
      return "Express(" + std::string(sim::to_string(i.label)) + ")";
    }
    std::string operator()(const Pick& i) const { return "Pick(" + i.object_id + ")"; }
    std::string operator()(const Place&) const { return "Place"; }
    std::string operator()(const Say& i) const { return "Say(" + i.text + ")"; }
    std::string operator()(const Unknown& i) const { return "Unknown(" + i.text + ")"; }
  };
  return std::visit(Visitor{}, intent);
}

}  // namespace sociobot::behaviors
