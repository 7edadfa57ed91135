// Copyright 2026 The rollover-deepc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RDEEPC_UTIL_CONFIG_HPP_
#define RDEEPC_UTIL_CONFIG_HPP_

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdeepc::util {

/// Flat `key = value` file; `#` and `;` start comments.
class Config {
 public:
  Config() = default;

  static Config load(const std::filesystem::path& path) {
    Config c;
    try {
      boost::property_tree::ini_parser::read_ini(path.string(), c.tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw std::runtime_error("config " + path.string() + ": " + e.message());
    }
    c.dir_ = path.parent_path();
    c.source_ = path.string();
    return c;
  }

  static Config parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, c.tree_);
    return c;
  }

  bool has(const std::string& key) const { return tree_.get_optional<std::string>(path(key)).has_value(); }

  std::string get_string(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(path(key));
    if (!v) throw std::runtime_error(where() + "missing key '" + key + "'");
    return *v;
  }
  std::string get_string(const std::string& key, const std::string& fallback) const {
    return tree_.get<std::string>(path(key), fallback);
  }

  double get_double(const std::string& key) const { return to_double(key, get_string(key)); }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  int get_int(const std::string& key) const {
    const double v = get_double(key);
    if (v != static_cast<int>(v)) throw std::runtime_error(where() + "key '" + key + "' is not an integer");
    return static_cast<int>(v);
  }
  int get_int(const std::string& key, int fallback) const { return has(key) ? get_int(key) : fallback; }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::runtime_error(where() + "key '" + key + "' is not a boolean");
  }

  /// Whitespace- or comma-separated list of numbers.
  std::vector<double> get_list(const std::string& key) const {
    std::string s = get_string(key);
    for (char& ch : s) if (ch == ',') ch = ' ';
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_double(key, tok));
    return out;
  }

  /// Paths inside a config are relative to the file that names them.
  std::filesystem::path resolve(const std::string& relative) const {
    const std::filesystem::path p(relative);
    return p.is_absolute() ? p : dir_ / p;
  }

  void set(const std::string& key, const std::string& value) { tree_.put(path(key), value); }
  const std::string& source() const { return source_; }

 private:
  static boost::property_tree::ptree::path_type path(const std::string& key) {
    return boost::property_tree::ptree::path_type(key, '/');
  }
  std::string where() const { return source_.empty() ? "config: " : "config " + source_ + ": "; }
  double to_double(const std::string& key, const std::string& text) const {
    try {
      size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error(where() + "key '" + key + "' has non-numeric value '" + text + "'");
    }
  }

  boost::property_tree::ptree tree_;
  std::filesystem::path dir_;
  std::string source_;
};

}  // namespace rdeepc::util

#endif  // RDEEPC_UTIL_CONFIG_HPP_
