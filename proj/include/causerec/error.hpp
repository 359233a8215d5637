// Copyright 2026 The causerec Authors.
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

namespace causerec {

enum class ErrorKind {
    Dimension,
    Domain,
    Index,
    Parse,
    Config,
    Data,
    Format,
    Singularity,
    UndefinedMetric,
    Divergence,
};

/// Single exception type for the library; `kind()` tells callers (and the
/// CLI exit-code mapping) what went wrong.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

const char* to_string(ErrorKind kind);

/// CLI exit code for an error kind: 2 config, 3 data, 4 divergence.
int exit_code(ErrorKind kind);

}  // namespace causerec
