/*
 * Copyright 2026 The hlvfair Authors.
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

#ifndef HLVFAIR_ERROR_H_
#define HLVFAIR_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hlvfair {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent dataset input. `line()` is 1-based, 0 when the
// problem is not tied to a single line.
class DatasetError : public Error {
 public:
  DatasetError(const std::string& message, std::size_t line = 0)
      : Error(line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Training produced a non-finite loss or could not start.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace hlvfair

#endif  // HLVFAIR_ERROR_H_
