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

#ifndef ODT_ERRORS_H_
#define ODT_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace odt {

enum class ErrorCode {
  kMalformedRow,
  kNonBinaryLabel,
  kEmptyTable,
  kUnknownCategory,
  kUnknownTopology,
  kMalformedTopology,
  kEmptyClass,
  kInvalidConfig,
  kNameOverflow,
  kParseError,
  kInfeasible,
  kUnbounded,
  kNumericalFailure,
  kTimeLimitNoIncumbent,
  kFractionalSelection,
  kBudgetExceeded,
  kDimensionMismatch,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type; callers
// dispatch on code() rather than on the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace odt

#endif  // ODT_ERRORS_H_
