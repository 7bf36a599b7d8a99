/*
 * Copyright 2026 The ODT Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ODT_RATIONAL_H_
#define ODT_RATIONAL_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace odt {

// Non-negative rational kept in lowest terms. Used for class weights and
// rate floors so that ceil(rate * count) is computed exactly.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  static Rational Of(int64_t num, int64_t den = 1);

  // Accepts "3", "3/2" and plain decimals such as "0.95".
  static Rational Parse(std::string_view text);

  double ToDouble() const { return static_cast<double>(num) / den; }
  std::string ToString() const;

  // ceil(*this * count) without floating point.
  int64_t CeilTimes(int64_t count) const;

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
};

}  // namespace odt

#endif  // ODT_RATIONAL_H_
