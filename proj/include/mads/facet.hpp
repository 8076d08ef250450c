#pragma once

// The five facets of acoustic diversity.

#include <cstdint>
#include <string>

#include "mads/error.hpp"

namespace mads {

enum class facet : std::uint8_t { voice = 0, gender = 1, emotion = 2, accent = 3, noise = 4 };

inline const char* facet_name(facet f) {
  switch (f) {
    case facet::voice: return "voice";
    case facet::gender: return "gender";
    case facet::emotion: return "emotion";
    case facet::accent: return "accent";
    case facet::noise: return "noise";
  }
  return "?";
}

inline facet facet_from_name(const std::string& name) {
  for (facet f : {facet::voice, facet::gender, facet::emotion, facet::accent, facet::noise}) {
    if (name == facet_name(f)) return f;
  }
  fail(errc::parse_error, "unknown facet '" + name + "'");
}

}  // namespace mads
