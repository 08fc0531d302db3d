// Copyright 2026 The EDDA Authors.
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

#ifndef EDDA_ERROR_HPP_
#define EDDA_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edda {

// Base class of every exception thrown by the core library. The C API maps
// each subclass onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed an argument that violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Input data is malformed or inconsistent with the model/config.
class DataError : public Error {
 public:
  using Error::Error;
};

// A malformed line in an interaction file. `line` is 1-based.
class IngestError : public DataError {
 public:
  IngestError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Training produced a NaN/Inf loss.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A checkpoint or pair file does not match the dataset/split it is used with.
class MismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace edda

#endif  // EDDA_ERROR_HPP_
