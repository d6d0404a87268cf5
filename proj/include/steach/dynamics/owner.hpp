#pragma once

#include <string_view>

namespace steach::dynamics {

enum class Owner { Teacher, Student };

inline std::string_view to_string(Owner owner) {
  return owner == Owner::Teacher ? "teacher" : "student";
}

}  // namespace steach::dynamics
