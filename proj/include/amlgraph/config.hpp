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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "amlgraph/common.hpp"

namespace aml {

// One `[section]` of a line-oriented key=value configuration file. A file
// without section headers is a single unnamed section.
class ConfigSection {
 public:
  ConfigSection() = default;
  ConfigSection(std::string name, boost::property_tree::ptree tree)
      : name_(std::move(name)), tree_(std::move(tree)) {}

  const std::string& name() const { return name_; }
  bool Has(const std::string& key) const;
  std::vector<std::string> Keys() const;

  std::string GetString(const std::string& key) const;
  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  double GetDouble(const std::string& key) const;
  std::uint64_t GetUint(const std::string& key, std::uint64_t fallback) const;
  std::uint64_t GetUint(const std::string& key) const;

  void Set(const std::string& key, const std::string& value);

 private:
  std::string name_;
  boost::property_tree::ptree tree_;
};

class ConfigFile {
 public:
  static ConfigFile Load(const std::filesystem::path& path);
  static ConfigFile Parse(const std::string& text);

  // Top-level keys that precede any section header.
  ConfigSection Root() const;
  // Missing sections come back empty, so every key takes its default.
  ConfigSection Section(const std::string& name) const;
  bool HasSection(const std::string& name) const;
  // Section names starting with `prefix`, in file order.
  std::vector<std::string> SectionsWithPrefix(const std::string& prefix) const;

  const std::filesystem::path& origin() const { return origin_; }

 private:
  boost::property_tree::ptree tree_;
  std::filesystem::path origin_;
};

}  // namespace aml
