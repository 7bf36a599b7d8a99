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

#include "odt/rational.h"

#include <cctype>
#include <numeric>

#include "odt/errors.h"

namespace odt {
namespace {

int64_t ParseDigits(std::string_view text, std::string_view whole) {
  if (text.empty() || text.size() > 15) {
    throw Error(ErrorCode::kInvalidConfig,
                "cannot parse rational '" + std::string(whole) + "'");
  }
  int64_t value = 0;
  for (char ch : text) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      throw Error(ErrorCode::kInvalidConfig,
                  "cannot parse rational '" + std::string(whole) + "'");
    }
    value = value * 10 + (ch - '0');
  }
  return value;
}

}  // namespace

Rational Rational::Of(int64_t num, int64_t den) {
  if (den <= 0 || num < 0) {
    throw Error(ErrorCode::kInvalidConfig, "rational must be non-negative "
                                           "with positive denominator");
  }
  const int64_t g = std::gcd(num, den);
  return Rational{num / g, den / g};
}

Rational Rational::Parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Of(ParseDigits(text.substr(0, slash), text),
              ParseDigits(text.substr(slash + 1), text));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    int64_t den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    const int64_t int_part = whole.empty() ? 0 : ParseDigits(whole, text);
    const int64_t frac_part = frac.empty() ? 0 : ParseDigits(frac, text);
    return Of(int_part * den + frac_part, den);
  }
  return Of(ParseDigits(text, text), 1);
}

std::string Rational::ToString() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

int64_t Rational::CeilTimes(int64_t count) const {
  const __int128 product = static_cast<__int128>(num) * count;
  return static_cast<int64_t>((product + den - 1) / den);
}

}  // namespace odt
