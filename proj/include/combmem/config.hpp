// Copyright 2026 The combmem Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace combmem {

/// Evaluates an arithmetic expression: numbers, + - * / ^, parentheses,
/// implicit multiplication (`2pi`, `80 MHz`), the constant `pi`, unit
/// suffixes (Hz, kHz, MHz, GHz, s, ms, us, ns) and the given variables.
/// Throws ConfigError on any syntax error or unknown name.
double evaluate_expression(std::string_view text,
                           const std::map<std::string, double>& variables = {});

/// Comma-separated expression list. An item `a:b:step` expands to the
/// inclusive arithmetic range a, a+step, ... up to b.
std::vector<double> evaluate_list(std::string_view text,
                                  const std::map<std::string, double>& variables = {});

/// Sectioned `key = value` text. `#` starts a comment, blank lines are
/// ignored, keys before any `[section]` header land in the "" section.
class ConfigFile {
 public:
  using Section = std::map<std::string, std::string>;

  static ConfigFile parse(std::string_view text);
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& section) const { return sections_.count(section) != 0; }
  bool has(const std::string& section, const std::string& key) const;
  /// Raw value text; throws ConfigError when absent.
  const std::string& raw(const std::string& section, const std::string& key) const;
  const Section& section(const std::string& name) const;
  const std::map<std::string, Section>& sections() const { return sections_; }

  void set(const std::string& section, const std::string& key, std::string value);

  /// Sorted sections and keys, one `key = value` per line.
  std::string canonical_text() const;
  /// FNV-1a (64 bit) of canonical_text(), as 16 hex digits.
  std::string hash() const;

  /// Directory used to resolve relative file references.
  std::filesystem::path base_dir;

 private:
  std::map<std::string, Section> sections_;
};

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace combmem
