/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include "hetadapt/common/error.hpp"

namespace hetadapt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownDescriptor: return "UnknownDescriptor";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::CapabilityMismatch: return "CapabilityMismatch";
    case ErrorCode::PortBusy: return "PortBusy";
    case ErrorCode::FlowTypeMismatch: return "FlowTypeMismatch";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::UnknownTarget: return "UnknownTarget";
    case ErrorCode::InvalidTransition: return "InvalidTransition";
    case ErrorCode::RouteUnavailable: return "RouteUnavailable";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::NoRoute: return "NoRoute";
    case ErrorCode::NoCorrespondent: return "NoCorrespondent";
    case ErrorCode::ClosedWorldViolation: return "ClosedWorldViolation";
    case ErrorCode::UnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::InvalidConfiguration: return "InvalidConfiguration";
    case ErrorCode::UnboundNode: return "UnboundNode";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::MalformedLog: return "MalformedLog";
  }
  return "Unknown";
}

}  // namespace hetadapt
