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

#include "odt/errors.h"

namespace odt {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kNonBinaryLabel: return "NonBinaryLabel";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kUnknownTopology: return "UnknownTopology";
    case ErrorCode::kMalformedTopology: return "MalformedTopology";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kNameOverflow: return "NameOverflow";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kUnbounded: return "Unbounded";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kTimeLimitNoIncumbent: return "TimeLimitNoIncumbent";
    case ErrorCode::kFractionalSelection: return "FractionalSelection";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace odt
