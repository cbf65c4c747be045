// Copyright 2026 The amlgraph Authors
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

#include "amlgraph/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace aml {
namespace {

Error BadValue(const std::string& section, const std::string& key,
               const std::string& value, const char* want) {
  return Error(ErrorCode::kConfig, "[" + section + "] " + key + " = '" + value +
                                       "' is not a valid " + want);
}

}  // namespace

bool ConfigSection::Has(const std::string& key) const {
  return tree_.find(key) != tree_.not_found();
}

std::vector<std::string> ConfigSection::Keys() const {
  std::vector<std::string> keys;
  for (const auto& [k, v] : tree_) {
    if (v.empty()) keys.push_back(k);
  }
  return keys;
}

std::string ConfigSection::GetString(const std::string& key) const {
  auto it = tree_.find(key);
  if (it == tree_.not_found()) {
    throw Error(ErrorCode::kConfig,
                "missing required key '" + key + "' in [" + name_ + "]");
  }
  return it->second.data();
}

std::string ConfigSection::GetString(const std::string& key,
                                     const std::string& fallback) const {
  return Has(key) ? GetString(key) : fallback;
}

double ConfigSection::GetDouble(const std::string& key) const {
  const std::string s = GetString(key);
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw BadValue(name_, key, s, "number");
  }
  return v;
}

double ConfigSection::GetDouble(const std::string& key, double fallback) const {
  return Has(key) ? GetDouble(key) : fallback;
}

std::uint64_t ConfigSection::GetUint(const std::string& key) const {
  const std::string s = GetString(key);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw BadValue(name_, key, s, "unsigned integer");
  }
  return v;
}

std::uint64_t ConfigSection::GetUint(const std::string& key,
                                     std::uint64_t fallback) const {
  return Has(key) ? GetUint(key) : fallback;
}

void ConfigSection::Set(const std::string& key, const std::string& value) {
  tree_.put(boost::property_tree::ptree::path_type(key, '\0'), value);
}

ConfigFile ConfigFile::Parse(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, cfg.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::kConfig, std::string("config parse error: ") + e.what());
  }
  return cfg;
}

ConfigFile ConfigFile::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ConfigFile cfg = Parse(ss.str());
  cfg.origin_ = path;
  return cfg;
}

ConfigSection ConfigFile::Root() const {
  boost::property_tree::ptree root;
  for (const auto& [k, v] : tree_) {
    if (v.empty()) root.push_back({k, v});
  }
  return ConfigSection("", root);
}

ConfigSection ConfigFile::Section(const std::string& name) const {
  auto it = tree_.find(name);
  if (it == tree_.not_found() || it->second.empty()) {
    return ConfigSection(name, {});
  }
  return ConfigSection(name, it->second);
}

bool ConfigFile::HasSection(const std::string& name) const {
  auto it = tree_.find(name);
  return it != tree_.not_found() && !it->second.empty();
}

std::vector<std::string> ConfigFile::SectionsWithPrefix(
    const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : tree_) {
    if (!v.empty() && k.rfind(prefix, 0) == 0) out.push_back(k);
  }
  return out;
}

}  // namespace aml
