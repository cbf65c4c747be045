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

// Minimal comma-separated IO for the artifact files. No quoting: none of the
// written fields can contain commas or newlines.

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "amlgraph/common.hpp"

namespace aml::csv {

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    buffer_.reserve(1 << 20);
  }
  ~Writer() {
    if (out_.is_open()) Flush();
  }

  void Line(std::string_view line) {
    buffer_.append(line);
    buffer_.push_back('\n');
    if (buffer_.size() > (1 << 20)) Flush();
  }

  template <typename... Fields>
  void Row(const Fields&... fields) {
    bool first = true;
    (Append(fields, first), ...);
    Line({});
  }

  void Close() {
    Flush();
    out_.close();
    if (!out_) throw Error(ErrorCode::kIo, "error writing " + path_.string());
  }

 private:
  template <typename T>
  void Append(const T& value, bool& first) {
    if (!first) buffer_.push_back(',');
    first = false;
    if constexpr (std::is_arithmetic_v<T>) {
      char tmp[32];
      auto [p, ec] = std::to_chars(tmp, tmp + sizeof(tmp), value);
      buffer_.append(tmp, p);
    } else {
      buffer_.append(std::string_view(value));
    }
  }

  void Flush() {
    out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    buffer_.clear();
  }

  std::filesystem::path path_;
  std::ofstream out_;
  std::string buffer_;
};

class Reader {
 public:
  Reader(const std::filesystem::path& path, std::string_view expected_header)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::kIo, "cannot open " + path.string());
    std::string header;
    if (!std::getline(in_, header)) {
      throw Error(ErrorCode::kIo, path.string() + ": missing header");
    }
    StripCr(header);
    if (header != expected_header) {
      throw Error(ErrorCode::kIo, path.string() + ": unexpected header '" + header +
                                      "', expected '" + std::string(expected_header) + "'");
    }
    line_no_ = 1;
  }

  // Reads the next non-empty row into `fields`; false at end of file.
  bool Next(std::vector<std::string_view>& fields, std::size_t expected) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      StripCr(line_);
      if (line_.empty()) continue;
      Split(line_, fields);
      if (fields.size() != expected) {
        throw Error(ErrorCode::kIo, Where() + ": expected " + std::to_string(expected) +
                                        " fields, got " + std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  static void Split(std::string_view line, std::vector<std::string_view>& fields) {
    fields.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string_view::npos) {
        fields.push_back(line.substr(start));
        return;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
  }

  std::string Where() const { return path_.string() + ":" + std::to_string(line_no_); }

  template <typename T = std::uint64_t>
  T ToUint(std::string_view s) const {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      throw Error(ErrorCode::kIo, Where() + ": bad integer '" + std::string(s) + "'");
    }
    return v;
  }

  std::int64_t ToInt(std::string_view s) const { return ToUint<std::int64_t>(s); }

 private:
  static void StripCr(std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  }

  std::filesystem::path path_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

}  // namespace aml::csv
