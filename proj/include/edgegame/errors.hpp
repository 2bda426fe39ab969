/*
 Copyright 2026 The edgegame Authors

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

#pragma once

#include <stdexcept>
#include <string>

namespace edgegame {

/// A share that appears in a denominator is zero while the matching
/// provider still has compute to hand out.
class ZeroShare : public std::domain_error {
 public:
  explicit ZeroShare(const std::string& what) : std::domain_error(what) {}
};

/// State magnitude left the representable range during integration.
class BlowUp : public std::runtime_error {
 public:
  explicit BlowUp(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario document failed schema or invariant checks. `field()` names the
/// offending entry.
class InvalidScenario : public std::invalid_argument {
 public:
  InvalidScenario(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace edgegame
