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

#include "amlgraph/common.hpp"

#include <charconv>
#include <cstdio>

namespace aml {

Money Money::Parse(std::string_view text) {
  auto fail = [&]() {
    return Error(ErrorCode::kInvalidArgument,
                 "malformed amount '" + std::string(text) + "'");
  };
  if (text.empty()) throw fail();
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  std::string_view frac =
      dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() || frac.size() > 2) throw fail();
  if (dot != std::string_view::npos && frac.empty()) throw fail();

  std::int64_t units = 0;
  auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), units);
  if (ec != std::errc{} || p != whole.data() + whole.size() || units < 0) {
    throw fail();
  }
  std::int64_t cents = 0;
  if (!frac.empty()) {
    auto [q, ec2] = std::from_chars(frac.data(), frac.data() + frac.size(), cents);
    if (ec2 != std::errc{} || q != frac.data() + frac.size()) throw fail();
    if (frac.size() == 1) cents *= 10;
  }
  return Money(units * 100 + cents);
}

std::string Money::ToString() const {
  char buf[32];
  const std::int64_t a = cents_ < 0 ? -cents_ : cents_;
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", cents_ < 0 ? "-" : "",
                static_cast<long long>(a / 100), static_cast<long long>(a % 100));
  return buf;
}

std::uint64_t SubSeed(std::uint64_t master, std::string_view stage) {
  // FNV-1a over the stage name, then mixed with the master seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stage) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Mix64(master ^ Mix64(h));
}

std::uint64_t SubSeed(std::uint64_t master, std::uint64_t index) {
  return Mix64(master ^ Mix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace aml
