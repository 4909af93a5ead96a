// Copyright 2026 The streamopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STREAMOPT_ERROR_HPP
#define STREAMOPT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace streamopt {

// Values match the CLI exit codes.
enum class ErrorKind {
  usage = 1,
  data = 2,
  infeasible = 3,
  io = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace streamopt

#endif  // STREAMOPT_ERROR_HPP
