// Copyright 2026 The eiei Authors. All Rights Reserved.
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

#ifndef EIEI_ERRORS_HPP
#define EIEI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace eiei {

// Covariance matrix could not be factorized even at the top of the
// jitter ladder.
class SingularModelError : public std::runtime_error {
 public:
  explicit SingularModelError(const std::string& what) : std::runtime_error(what) {}
};

// Benchmark-level failure (excessive per-path failures, unbalanced records).
class BenchmarkError : public std::runtime_error {
 public:
  explicit BenchmarkError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eiei

#endif  // EIEI_ERRORS_HPP
