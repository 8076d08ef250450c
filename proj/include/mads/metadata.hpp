#pragma once

// Utterance metadata ingestion. Pools arrive as JSON Lines, one record per
// line, with fields utterance_id, speaker_id, gender ("F"|"M"), emotion,
// accent, noise_classes. Diagnostics carry the source name and line number.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mads/binio.hpp"
#include "mads/error.hpp"
#include "mads/facet.hpp"

namespace mads {

enum class gender : std::uint8_t { female, male };

inline const char* gender_name(gender g) { return g == gender::female ? "F" : "M"; }

struct utterance_record {
  std::string utterance_id;
  std::string speaker_id;
  std::optional<gender> speaker_gender;
  std::optional<std::string> emotion;
  std::optional<std::string> accent;
  std::optional<std::vector<std::string>> noise_classes;
  std::optional<std::size_t> embedding_ref;  // bound lazily against a store
};

using utterance_pool = std::vector<utterance_record>;

namespace detail {

inline utterance_record parse_record(const nlohmann::json& j, const std::string& where) {
  utterance_record rec;
  if (!j.is_object()) fail(errc::parse_error, where + ": record is not a JSON object");
  if (!j.contains("utterance_id") || !j["utterance_id"].is_string()) {
    fail(errc::parse_error, where + ": missing string field 'utterance_id'");
  }
  rec.utterance_id = j["utterance_id"].get<std::string>();
  if (!j.contains("speaker_id") || !j["speaker_id"].is_string()) {
    fail(errc::parse_error, where + ": missing string field 'speaker_id'");
  }
  rec.speaker_id = j["speaker_id"].get<std::string>();

  if (j.contains("gender") && !j["gender"].is_null()) {
    const std::string g = j["gender"].get<std::string>();
    if (g == "F") {
      rec.speaker_gender = gender::female;
    } else if (g == "M") {
      rec.speaker_gender = gender::male;
    } else {
      fail(errc::parse_error, where + ": gender must be \"F\" or \"M\", got \"" + g + "\"");
    }
  }
  if (j.contains("emotion") && !j["emotion"].is_null()) {
    rec.emotion = j["emotion"].get<std::string>();
  }
  if (j.contains("accent") && !j["accent"].is_null()) {
    rec.accent = j["accent"].get<std::string>();
  }
  if (j.contains("noise_classes") && !j["noise_classes"].is_null()) {
    if (!j["noise_classes"].is_array()) {
      fail(errc::parse_error, where + ": noise_classes must be an array");
    }
    std::vector<std::string> tags;
    for (const auto& t : j["noise_classes"]) tags.push_back(t.get<std::string>());
    rec.noise_classes = std::move(tags);
  }
  return rec;
}

}  // namespace detail

inline utterance_pool pool_from_jsonl(std::istream& in, const std::string& source) {
  utterance_pool pool;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(errc::parse_error, where + ": invalid JSON");
    try {
      pool.push_back(detail::parse_record(j, where));
    } catch (const nlohmann::json::exception& e) {
      fail(errc::parse_error, where + ": " + e.what());
    }
  }
  return pool;
}

inline utterance_pool pool_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_failure, "cannot open " + path);
  return pool_from_jsonl(in, path);
}

inline std::string record_to_jsonl(const utterance_record& rec) {
  nlohmann::json j;
  j["utterance_id"] = rec.utterance_id;
  j["speaker_id"] = rec.speaker_id;
  if (rec.speaker_gender) j["gender"] = gender_name(*rec.speaker_gender);
  if (rec.emotion) j["emotion"] = *rec.emotion;
  if (rec.accent) j["accent"] = *rec.accent;
  if (rec.noise_classes) j["noise_classes"] = *rec.noise_classes;
  return j.dump();
}

inline void pool_write(const std::string& path, const utterance_pool& pool) {
  std::ostringstream out;
  for (const auto& rec : pool) out << record_to_jsonl(rec) << '\n';
  write_file_atomic(path, out.str());
}

// Class label of a record for one facet; nullopt when the record lacks it.
// Noise uses the single non-"Speech" tag, matching the benchmark filter.
inline std::optional<std::string> facet_label(const utterance_record& rec, facet f) {
  switch (f) {
    case facet::voice:
      return rec.speaker_id.empty() ? std::nullopt : std::optional(rec.speaker_id);
    case facet::gender:
      if (!rec.speaker_gender) return std::nullopt;
      return std::string(gender_name(*rec.speaker_gender));
    case facet::emotion:
      return rec.emotion;
    case facet::accent:
      return rec.accent;
    case facet::noise: {
      if (!rec.noise_classes) return std::nullopt;
      std::optional<std::string> tag;
      for (const auto& t : *rec.noise_classes) {
        if (t == "Speech") continue;
        if (tag) return std::nullopt;  // more than one background class
        tag = t;
      }
      return tag;
    }
  }
  return std::nullopt;
}

}  // namespace mads
