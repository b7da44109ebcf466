// Copyright 2026 The MPU Sketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MPU_ERRORS_H_
#define MPU_ERRORS_H_

#include <stdexcept>
#include <string>

namespace mpu {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A slot or timestamp lies outside the configured epoch.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized sketch, ensemble, trace or group-map input.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Two sketches cannot be combined (different parameters or seeds).
class IncompatibleSketch : public Error {
 public:
  using Error::Error;
};

// The ingest target rejected a record; carries the 1-based trace line.
class IngestError : public Error {
 public:
  IngestError(const std::string& what, unsigned long long line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  unsigned long long line() const { return line_; }

 private:
  unsigned long long line_;
};

// A requested allocation exceeds the configured memory cap.
class MemoryCapExceeded : public Error {
 public:
  MemoryCapExceeded(const std::string& what, unsigned long long bytes)
      : Error(what), bytes_(bytes) {}
  unsigned long long bytes() const { return bytes_; }

 private:
  unsigned long long bytes_;
};

}  // namespace mpu

#endif  // MPU_ERRORS_H_
