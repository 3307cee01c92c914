/*
 Copyright 2026 The Box-iLQR Authors

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

#ifndef BOX_ILQR_TYPES_HPP
#define BOX_ILQR_TYPES_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace boxilqr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Which side of a box a variable violated.
enum class BoundSide { kLower, kUpper };

/// Whether a constrained component belongs to the state or the control.
enum class VariableKind { kState, kControl };

inline const char* to_string(BoundSide side) {
  return side == BoundSide::kLower ? "lower" : "upper";
}

inline const char* to_string(VariableKind kind) {
  return kind == VariableKind::kState ? "state" : "control";
}

/// A constrained component, identified by its index in the full state or
/// control vector.
struct ConstraintIndex {
  VariableKind kind = VariableKind::kControl;
  int index = 0;

  friend bool operator==(const ConstraintIndex&, const ConstraintIndex&) = default;
};

/// Raised when a log barrier is evaluated on or outside its bound.
class InfeasiblePoint : public std::runtime_error {
 public:
  InfeasiblePoint(VariableKind kind, int index, BoundSide side)
      : std::runtime_error(std::string(to_string(kind)) + " component " +
                           std::to_string(index) + " is not strictly inside its " +
                           to_string(side) + " bound"),
        kind_(kind),
        index_(index),
        side_(side) {}

  VariableKind kind() const { return kind_; }
  int index() const { return index_; }
  BoundSide side() const { return side_; }

 private:
  VariableKind kind_;
  int index_;
  BoundSide side_;
};

/// Raised when integration of the dynamics produces non-finite values.
class StepFailure : public std::runtime_error {
 public:
  explicit StepFailure(int time_index)
      : std::runtime_error("dynamics step produced a non-finite state at t=" +
                           std::to_string(time_index)),
        time_index_(time_index) {}

  int time_index() const { return time_index_; }

 private:
  int time_index_;
};

}  // namespace boxilqr

#endif  // BOX_ILQR_TYPES_HPP
