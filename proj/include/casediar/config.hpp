// casediar/config.hpp

// Copyright 2026  case-diar authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CASEDIAR_CONFIG_HPP_
#define CASEDIAR_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace casediar {
namespace config {

/// Flat `key = value` text with `[section]` headers; keys address as
/// "section.key". Unknown keys are tolerated; every lookup carries its
/// default.
class Config {
 public:
  static Config parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string t = trim(strip_comment(line));
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']') {
          throw std::invalid_argument("config: bad section header on line " +
                                      std::to_string(line_no));
        }
        section = trim(t.substr(1, t.size() - 2));
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("config: missing '=' on line " + std::to_string(line_no));
      }
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) {
        throw std::invalid_argument("config: empty key on line " + std::to_string(line_no));
      }
      cfg.values_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw std::invalid_argument("config: '" + key + "' is not a number: " + it->second);
    }
  }

  long long get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stoll(it->second);
    } catch (const std::exception&) {
      throw std::invalid_argument("config: '" + key + "' is not an integer: " + it->second);
    }
  }

  std::size_t get_size(const std::string& key, std::size_t fallback) const {
    const long long v = get_int(key, static_cast<long long>(fallback));
    if (v < 0) throw std::invalid_argument("config: '" + key + "' must be >= 0");
    return static_cast<std::size_t>(v);
  }

  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return static_cast<std::uint64_t>(std::stoull(it->second));
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: '" + key + "' is not a boolean: " + v);
  }

  std::vector<std::string> get_list(const std::string& key,
                                    const std::string& fallback) const {
    const std::string raw = get_string(key, fallback);
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(raw);
    while (std::getline(in, item, ',')) {
      const std::string t = trim(item);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

  std::vector<double> get_double_list(const std::string& key,
                                      const std::string& fallback) const {
    std::vector<double> out;
    for (const std::string& s : get_list(key, fallback)) out.push_back(std::stod(s));
    return out;
  }

  std::vector<std::size_t> get_size_list(const std::string& key,
                                         const std::string& fallback) const {
    std::vector<std::size_t> out;
    for (const std::string& s : get_list(key, fallback)) {
      out.push_back(static_cast<std::size_t>(std::stoull(s)));
    }
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static std::string strip_comment(const std::string& s) {
    const auto pos = s.find('#');
    return pos == std::string::npos ? s : s.substr(0, pos);
  }

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace config
}  // namespace casediar

#endif  // CASEDIAR_CONFIG_HPP_
