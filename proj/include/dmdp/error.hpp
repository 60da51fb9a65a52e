// Copyright 2026 The dmdp Authors
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

#ifndef DMDP_ERROR_HPP_
#define DMDP_ERROR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dmdp {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array shapes disagree with the instance they are used with.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A concatenation or evaluation would exceed the instance horizon.
class HorizonOverflow : public Error {
 public:
  using Error::Error;
};

/// An enumeration would produce more items than the configured cap.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& what, std::uint64_t required, std::uint64_t cap)
      : Error(what + ": requires " + std::to_string(required) +
              " items, cap is " + std::to_string(cap)),
        required_(required),
        cap_(cap) {}

  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t required_;
  std::uint64_t cap_;
};

/// A search ran out of node budget before the queue drained.
class BudgetExhausted : public Error {
 public:
  explicit BudgetExhausted(std::uint64_t budget)
      : Error("node budget exhausted after " + std::to_string(budget) +
              " pops"),
        budget_(budget) {}

  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t budget_;
};

/// An iterative method did not converge within its iteration limit.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Search or solver configuration is unusable.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A runtime self-check (verify mode) found a broken invariant.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace dmdp

#endif  // DMDP_ERROR_HPP_
