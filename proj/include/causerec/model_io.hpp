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

// Text persistence for EmbeddingSet:
//
//   cause-embeddings v1 <dim> <num_users> <num_items> <mode> <variant>
//   gamma_t rows, gamma_c rows, theta_t rows, theta_c rows
//   <calib_scale> <calib_bias>
//
// One matrix row per line, values as %.17g so a save/load round trip is
// bit-exact. Aliased matrices are written in full and must match on load.

#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "causerec/datamodel.hpp"

namespace causerec {

inline constexpr const char* kModelMagic = "cause-embeddings";
inline constexpr const char* kModelVersion = "v1";

void write_model(std::ostream& out, const EmbeddingSet& model);
EmbeddingSet read_model(const std::string& text);

void save_model(const std::filesystem::path& path, const EmbeddingSet& model);
EmbeddingSet load_model(const std::filesystem::path& path);

}  // namespace causerec
