// Copyright 2026 The steerlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace steerlab {

enum class ErrorCode {
    DimensionMismatch,
    NotHermitian,
    NotOrthonormal,
    NotDensity,
    NotUnitary,
    NonFinite,
    InvalidEnsemble,
    InvalidObservable,
    DegenerateOutcome,
    DomainError,
    AgreeViolation,
    BobTooSmall,
    MarginalMismatch,
    NotADecomposition,
    ResidualOutcome,
    ConfigConflict,
    ParseError,
};

inline std::string_view error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NotOrthonormal: return "NotOrthonormal";
        case ErrorCode::NotDensity: return "NotDensity";
        case ErrorCode::NotUnitary: return "NotUnitary";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::InvalidEnsemble: return "InvalidEnsemble";
        case ErrorCode::InvalidObservable: return "InvalidObservable";
        case ErrorCode::DegenerateOutcome: return "DegenerateOutcome";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::AgreeViolation: return "AgreeViolation";
        case ErrorCode::BobTooSmall: return "BobTooSmall";
        case ErrorCode::MarginalMismatch: return "MarginalMismatch";
        case ErrorCode::NotADecomposition: return "NotADecomposition";
        case ErrorCode::ResidualOutcome: return "ResidualOutcome";
        case ErrorCode::ConfigConflict: return "ConfigConflict";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {
    }

    ErrorCode code() const noexcept {
        return code_;
    }

   private:
    ErrorCode code_;
};

}  // namespace steerlab
