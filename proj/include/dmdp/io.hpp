// Copyright 2026 The dmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Instance files (JSON, format_version 1) and the seeded instance generator.

#ifndef DMDP_IO_HPP_
#define DMDP_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dmdp/core.hpp"
#include "dmdp/error.hpp"
#include "json.hpp"

namespace dmdp {

inline constexpr int kFormatVersion = 1;

/// Malformed instance document. `key` names the offending field when the
/// document parsed as JSON; `line` is set for syntax errors.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string key, std::size_t line = 0)
      : Error(what), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

using nlohmann::json;

inline const json& require_key(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    throw ParseError(std::string("missing key '") + key + "'", key);
  }
  return *it;
}

inline std::size_t read_count(const json& doc, const char* key) {
  const json& v = require_key(doc, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(std::string("'") + key + "' must be a nonnegative integer",
                     key);
  }
  return v.get<std::size_t>();
}

inline double read_real(const json& doc, const char* key) {
  const json& v = require_key(doc, key);
  if (!v.is_number()) {
    throw ParseError(std::string("'") + key + "' must be a number", key);
  }
  return v.get<double>();
}

/// Flattens a 3-level nested array with the given extents.
inline std::vector<double> read_cube(const json& doc, const char* key,
                                     std::size_t n0, std::size_t n1,
                                     std::size_t n2) {
  const json& cube = require_key(doc, key);
  auto shape_error = [&](const std::string& where) {
    return ParseError(std::string("'") + key + "' has wrong shape at " + where +
                          " (expected " + std::to_string(n0) + "x" +
                          std::to_string(n1) + "x" + std::to_string(n2) + ")",
                      key);
  };
  if (!cube.is_array() || cube.size() != n0) throw shape_error(key);
  std::vector<double> out;
  out.reserve(n0 * n1 * n2);
  for (std::size_t i = 0; i < n0; ++i) {
    const json& plane = cube[i];
    const std::string where_i = std::string(key) + "[" + std::to_string(i) + "]";
    if (!plane.is_array() || plane.size() != n1) throw shape_error(where_i);
    for (std::size_t j = 0; j < n1; ++j) {
      const json& line = plane[j];
      const std::string where_j = where_i + "[" + std::to_string(j) + "]";
      if (!line.is_array() || line.size() != n2) throw shape_error(where_j);
      for (std::size_t k = 0; k < n2; ++k) {
        if (!line[k].is_number()) {
          throw ParseError(where_j + "[" + std::to_string(k) +
                               "] is not a number",
                           key);
        }
        out.push_back(line[k].get<double>());
      }
    }
  }
  return out;
}

inline json write_cube(std::span<const double> data, std::size_t n0,
                       std::size_t n1, std::size_t n2) {
  json cube = json::array();
  for (std::size_t i = 0; i < n0; ++i) {
    json plane = json::array();
    for (std::size_t j = 0; j < n1; ++j) {
      json line = json::array();
      for (std::size_t k = 0; k < n2; ++k) {
        line.push_back(data[(i * n1 + j) * n2 + k]);
      }
      plane.push_back(std::move(line));
    }
    cube.push_back(std::move(plane));
  }
  return cube;
}

inline std::size_t line_of_offset(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace detail

/// Decodes an instance document without validating it.
inline DmdpInstance instance_from_json(const nlohmann::json& doc) {
  using detail::read_count;
  if (!doc.is_object()) throw ParseError("document is not an object", "");
  const nlohmann::json& version = detail::require_key(doc, "format_version");
  if (!version.is_number_integer() || version.get<int>() != kFormatVersion) {
    throw ParseError("unsupported format_version " + version.dump(),
                     "format_version");
  }
  const std::size_t S = read_count(doc, "num_states");
  const std::size_t A = read_count(doc, "num_actions");
  const std::size_t T = read_count(doc, "horizon");
  const double gamma = detail::read_real(doc, "gamma");
  const double r_max = detail::read_real(doc, "r_max");

  SignMode sign_mode = SignMode::kAny;
  if (auto it = doc.find("sign_mode"); it != doc.end()) {
    auto parsed = it->is_string() ? parse_sign_mode(it->get<std::string>())
                                  : std::nullopt;
    if (!parsed) {
      throw ParseError("sign_mode must be \"any\" or \"nonpositive\"",
                       "sign_mode");
    }
    sign_mode = *parsed;
  }

  InstanceMetadata metadata;
  if (auto it = doc.find("metadata"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("metadata must be an object", "metadata");
    if (auto name = it->find("name"); name != it->end()) {
      if (!name->is_string()) throw ParseError("metadata.name must be a string", "metadata.name");
      metadata.name = name->get<std::string>();
    }
    if (auto seed = it->find("seed"); seed != it->end()) {
      if (!seed->is_number_unsigned()) {
        throw ParseError("metadata.seed must be a nonnegative integer",
                         "metadata.seed");
      }
      metadata.seed = seed->get<std::uint64_t>();
    }
  }

  std::vector<double> transition = detail::read_cube(doc, "transition", S, A, S);
  std::vector<double> reward = detail::read_cube(doc, "reward", T, S, A);
  return DmdpInstance(S, A, T, gamma, r_max, std::move(transition),
                      std::move(reward), sign_mode, std::move(metadata));
}

inline nlohmann::json instance_to_json(const DmdpInstance& instance) {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["num_states"] = instance.num_states();
  doc["num_actions"] = instance.num_actions();
  doc["horizon"] = instance.horizon();
  doc["gamma"] = instance.gamma();
  doc["r_max"] = instance.r_max();
  doc["sign_mode"] = to_string(instance.sign_mode());
  doc["transition"] =
      detail::write_cube(instance.transition_data(), instance.num_states(),
                         instance.num_actions(), instance.num_states());
  doc["reward"] =
      detail::write_cube(instance.reward_data(), instance.horizon(),
                         instance.num_states(), instance.num_actions());
  const InstanceMetadata& meta = instance.metadata();
  if (meta.name || meta.seed) {
    nlohmann::json m = nlohmann::json::object();
    if (meta.name) m["name"] = *meta.name;
    if (meta.seed) m["seed"] = *meta.seed;
    doc["metadata"] = std::move(m);
  }
  return doc;
}

/// Canonical text form: sorted keys, two-space indent, trailing newline.
/// Reals use the shortest decimal that reads back to the same double.
inline std::string serialize_instance(const DmdpInstance& instance) {
  return instance_to_json(instance).dump(2) + "\n";
}

inline DmdpInstance parse_instance(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t line = detail::line_of_offset(text, e.byte);
    throw ParseError("line " + std::to_string(line) + ": " + e.what(), "", line);
  }
  return instance_from_json(doc);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Reads an instance and validates it against its declared sign mode.
inline DmdpInstance load(const std::string& path) {
  DmdpInstance instance = parse_instance(read_text_file(path));
  require_valid(instance, instance.sign_mode());
  return instance;
}

inline void save(const DmdpInstance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << serialize_instance(instance);
  if (!out) throw IoError("write to '" + path + "' failed");
}

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Digest of the canonical serialization.
inline std::string instance_digest(const DmdpInstance& instance) {
  return fnv1a_hex(serialize_instance(instance));
}

// Generator streams. Every (s, a) transition row and every (t, s) reward
// row draws from its own xorshift64* stream seeded through splitmix64, so
// a row's numbers do not depend on the order rows are generated in.

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class XorShift64Star {
 public:
  explicit constexpr XorShift64Star(std::uint64_t state)
      : state_(state == 0 ? 0x9E3779B97F4A7C15ULL : state) {}

  /// Stream `id` of the generator seeded with `seed`.
  static constexpr XorShift64Star stream(std::uint64_t seed, std::uint64_t id) {
    return XorShift64Star(splitmix64(seed ^ splitmix64(id)));
  }

  constexpr std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform on [0, 1) with 53 bits.
  constexpr double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Seeded random instance: transition rows are normalized draws from
/// (0, 1], rewards are uniform on (-1, 0], r_max = 1.
///
/// Stream ids: transition row (s, a) uses id s*A + a; reward row (t, s)
/// uses id S*A + t*S + s and draws one value per action.
///
/// With zero_fraction > 0 each transition entry is additionally zeroed when
/// a draw from stream S*A + T*S + s*A + a falls below zero_fraction; if a
/// whole row is zeroed its largest weight is kept. zero_fraction = 0 draws
/// nothing from these streams.
inline DmdpInstance generate(std::uint64_t seed, std::size_t num_states,
                             std::size_t num_actions, std::size_t horizon,
                             double gamma, double zero_fraction = 0.0) {
  const std::size_t S = num_states;
  const std::size_t A = num_actions;
  std::vector<double> transition(S * A * S);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      XorShift64Star rng = XorShift64Star::stream(seed, s * A + a);
      double* row = &transition[(s * A + a) * S];
      for (std::size_t k = 0; k < S; ++k) row[k] = 1.0 - rng.uniform();
      if (zero_fraction > 0.0) {
        XorShift64Star mask =
            XorShift64Star::stream(seed, S * A + horizon * S + s * A + a);
        std::size_t keep = 0;
        for (std::size_t k = 1; k < S; ++k) {
          if (row[k] > row[keep]) keep = k;
        }
        bool any = false;
        std::vector<bool> drop(S);
        for (std::size_t k = 0; k < S; ++k) {
          drop[k] = mask.uniform() < zero_fraction;
          any = any || !drop[k];
        }
        for (std::size_t k = 0; k < S; ++k) {
          if (drop[k] && (any || k != keep)) row[k] = 0.0;
        }
      }
      double total = 0.0;
      for (std::size_t k = 0; k < S; ++k) total += row[k];
      for (std::size_t k = 0; k < S; ++k) row[k] /= total;
    }
  }
  std::vector<double> reward(horizon * S * A);
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      XorShift64Star rng = XorShift64Star::stream(seed, S * A + t * S + s);
      for (std::size_t a = 0; a < A; ++a) {
        reward[(t * S + s) * A + a] = 0.0 - rng.uniform();
      }
    }
  }
  return DmdpInstance(S, A, horizon, gamma, 1.0, std::move(transition),
                      std::move(reward), SignMode::kNonpositive,
                      InstanceMetadata{std::nullopt, seed});
}

}  // namespace dmdp

#endif  // DMDP_IO_HPP_
