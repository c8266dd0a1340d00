// Copyright 2026 The closedie Authors.
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

#ifndef CLOSEDIE_UTIL_H_
#define CLOSEDIE_UTIL_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace closedie {

// True for 1-4 ASCII digits, the form dates take once mapped to years.
bool IsYearLiteral(std::string_view s);

// Splits on every occurrence of `sep`; empty fields are kept.
std::vector<std::string_view> Split(std::string_view s, char sep);

// Strips ASCII whitespace from both ends.
std::string_view Trim(std::string_view s);

// Number of whitespace-delimited tokens.
size_t CountWords(std::string_view text);

// Number of code points in a UTF-8 string.
size_t Utf8Length(std::string_view s);

// Byte offset of code point `index`, or nullopt past the end. `index` equal
// to the code point count maps to s.size().
std::optional<size_t> Utf8ByteOffset(std::string_view s, size_t index);

// Reads a whole file; throws LoadError if it cannot be opened.
std::string ReadFile(const std::string &path);

// Writes a whole file atomically enough for batch use; throws Error.
void WriteFile(const std::string &path, std::string_view contents);

// Reads a file as lines with trailing '\r' removed. A final empty line
// produced by a trailing newline is not returned.
std::vector<std::string> ReadLines(const std::string &path);

// Seeded generator whose output sequence is fixed across platforms.
// std::mt19937_64 is fully specified by the standard; the distributions in
// <random> are not, so sampling helpers live here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, n). n must be positive.
  uint64_t Below(uint64_t n);

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void Shuffle(std::vector<T> &v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // `k` distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<size_t> SampleIndices(size_t n, size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace closedie

#endif  // CLOSEDIE_UTIL_H_
