// Copyright 2026 The Migrant Authors
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

#include "migrant/error.hpp"

namespace migrant {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedFrame: return "MalformedFrame";
    case ErrorCode::kUnknownType: return "UnknownType";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kUnknownIdentity: return "UnknownIdentity";
    case ErrorCode::kUnknownEmbodiment: return "UnknownEmbodiment";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kUnknownSlot: return "UnknownSlot";
    case ErrorCode::kNotCurrent: return "NotCurrent";
    case ErrorCode::kTargetUnavailable: return "TargetUnavailable";
    case ErrorCode::kAckTimeout: return "AckTimeout";
    case ErrorCode::kCorruptLog: return "CorruptLog";
    case ErrorCode::kTurnImbalance: return "TurnImbalance";
    case ErrorCode::kUnknownSlotRef: return "UnknownSlotRef";
    case ErrorCode::kEmptyScript: return "EmptyScript";
    case ErrorCode::kScriptExhausted: return "ScriptExhausted";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kWrongArity: return "WrongArity";
    case ErrorCode::kOutOfScale: return "OutOfScale";
    case ErrorCode::kEmptyItems: return "EmptyItems";
    case ErrorCode::kDegenerateVariance: return "DegenerateVariance";
    case ErrorCode::kProviderFailure: return "ProviderFailure";
    case ErrorCode::kTooFew: return "TooFew";
    case ErrorCode::kMissingData: return "MissingData";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace migrant
