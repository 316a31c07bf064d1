#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace besense {

/// The two micro-gestures. Keystrokes are reported as "typing".
enum class GestureKind { Typing = 0, MouseMove = 1 };

inline constexpr std::array<GestureKind, 2> kGestureKinds{GestureKind::Typing,
                                                          GestureKind::MouseMove};

constexpr std::string_view to_string(GestureKind k) {
  return k == GestureKind::Typing ? "typing" : "mouse";
}

std::optional<GestureKind> parse_gesture_kind(std::string_view s);

/// Composite behaviors. Static is a simulator profile only; it is never a
/// classification target.
enum class Behavior { Surfing = 0, Working = 1, Gaming = 2, Static = 3 };

/// Classification targets in tie-break order.
inline constexpr std::array<Behavior, 3> kBehaviors{Behavior::Surfing, Behavior::Working,
                                                    Behavior::Gaming};

constexpr std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::Surfing: return "surfing";
    case Behavior::Working: return "working";
    case Behavior::Gaming: return "gaming";
    case Behavior::Static: return "static";
  }
  return "?";
}

std::optional<Behavior> parse_behavior(std::string_view s);

}  // namespace besense
