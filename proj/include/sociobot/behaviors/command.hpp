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

#ifndef SOCIOBOT_BEHAVIORS_COMMAND_HPP_
#define SOCIOBOT_BEHAVIORS_COMMAND_HPP_

#include <string>
#include <string_view>
#include <variant>

#include "sociobot/sim/faces.hpp"
#include "sociobot/sim/image.hpp"

namespace sociobot::behaviors {

struct TrackColor {
  sim::ColorClass color;
  bool operator==(const TrackColor&) const = default;
};
struct TrackFace {
  bool operator==(const TrackFace&) const = default;
};
struct StopTracking {
  bool operator==(const StopTracking&) const = default;
};
struct Express {
  sim::Expression label;
  bool operator==(const Express&) const = default;
};
struct Pick {
  std::string object_id;
  bool operator==(const Pick&) const = default;
};
struct Place {
  bool operator==(const Place&) const = default;
};
struct Say {
  std::string text;
  bool operator==(const Say&) const = default;
};
struct Unknown {
  std::string text;
  bool operator==(const Unknown&) const = default;
};

using Intent = std::variant<TrackColor, TrackFace, StopTracking, Express, Pick, Place, Say, Unknown>;

// Case-insensitive keyword grammar; surrounding whitespace and trailing
// . ! ? are ignored, inner whitespace runs count as one space.
//   look at me                          -> TrackFace
//   track the <color> object | track <color>   -> TrackColor
//   stop | stop tracking                -> StopTracking
//   show <label> | be <label>           -> Express
//   pick up the <id> | pick up <id>     -> Pick
//   put it down                         -> Place
//   say <text>                          -> Say (text keeps its case)
// Anything else, including an unknown color or label, is Unknown(text).
Intent parse_command(std::string_view text);

std::string describe(const Intent& intent);

}  // namespace sociobot::behaviors

#endif  // SOCIOBOT_BEHAVIORS_COMMAND_HPP_
