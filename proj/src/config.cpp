// Copyright 2026 The pada Authors
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

#include "pada/config.hpp"

#include <fstream>
#include <sstream>

#include "pada/errors.hpp"

namespace pada::io {

namespace {
std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_string(buf.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      PADA_REQUIRE(line.back() == ']',
                   "config: malformed section at line " +
                       std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      PADA_REQUIRE(!section.empty(), "config: empty section name at line " +
                                         std::to_string(lineno));
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    PADA_REQUIRE(eq != std::string::npos,
                 "config: expected key=value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    PADA_REQUIRE(!key.empty(), "config: empty key at line " +
                                   std::to_string(lineno));
    PADA_REQUIRE(!section.empty(), "config: key '" + key +
                                       "' outside any section at line " +
                                       std::to_string(lineno));
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  sections_[section][key] = value;
}

std::optional<std::string> Config::get(const std::string& section,
                                       const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string Config::get_str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  auto v = get(section, key);
  return v ? *v : fallback;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    return std::stod(*v);
  } catch (const std::exception&) {
    throw ValidationError("config: [" + section + "] " + key +
                          " is not a number: " + *v);
  }
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    return std::stoll(*v);
  } catch (const std::exception&) {
    throw ValidationError("config: [" + section + "] " + key +
                          " is not an integer: " + *v);
  }
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  throw ValidationError("config: [" + section + "] " + key +
                        " is not a boolean: " + *v);
}

void Config::validate(
    const std::map<std::string, std::set<std::string>>& schema) const {
  for (const auto& [section, kv] : sections_) {
    auto s = schema.find(section);
    PADA_REQUIRE(s != schema.end(), "config: unknown section [" + section + "]");
    for (const auto& [key, _] : kv)
      PADA_REQUIRE(s->second.count(key),
                   "config: unknown key '" + key + "' in [" + section + "]");
  }
}

}  // namespace pada::io
