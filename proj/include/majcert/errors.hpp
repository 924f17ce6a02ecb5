// Copyright 2026 The majcert Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace majcert {

/// Thrown when an argument violates an operation's precondition.
class RejectedInput : public std::invalid_argument {
 public:
  explicit RejectedInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an enumeration or search exceeds its hard budget.
class CapExceeded : public std::runtime_error {
 public:
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// A solver or sampler could not reach a verified result within its retry
/// schedule. The message names the stage that gave up.
class SolverFailure : public std::runtime_error {
 public:
  explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw RejectedInput(what);
}

}  // namespace majcert
