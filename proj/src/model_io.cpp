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

#include "causerec/model_io.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace causerec {

namespace {

void write_matrix(std::ostream& out, const Matrix& m) {
    char buf[32];
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
            if (c > 0) out << ' ';
            out << buf;
        }
        out << '\n';
    }
}

// Whitespace tokenizer that remembers byte offsets for error messages.
class Tokens {
public:
    explicit Tokens(const std::string& text) : text_(text) {}

    std::string next(const char* what) {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        if (pos_ >= text_.size()) {
            throw Error(ErrorKind::Format, std::string("model file truncated at byte offset ") +
                                               std::to_string(pos_) + " while reading " + what);
        }
        start_ = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        return text_.substr(start_, pos_ - start_);
    }

    double number(const char* what) {
        std::string tok = next(what);
        errno = 0;
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size() || errno == ERANGE) {
            throw Error(ErrorKind::Format, "bad number '" + tok + "' at byte offset " +
                                               std::to_string(start_) + " while reading " + what);
        }
        return v;
    }

    std::size_t count(const char* what) {
        std::string tok = next(what);
        std::size_t v = 0;
        for (char c : tok) {
            if (c < '0' || c > '9') {
                throw Error(ErrorKind::Format, "bad count '" + tok + "' at byte offset " +
                                                   std::to_string(start_));
            }
            v = v * 10 + static_cast<std::size_t>(c - '0');
        }
        return v;
    }

    bool at_end() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        return pos_ >= text_.size();
    }

    std::size_t offset() const { return pos_; }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    std::size_t start_ = 0;
};

void read_matrix(Tokens& tokens, Matrix& m, const char* name) {
    for (double& v : m.values()) v = tokens.number(name);
}

}  // namespace

void write_model(std::ostream& out, const EmbeddingSet& model) {
    out << kModelMagic << ' ' << kModelVersion << ' ' << model.dim() << ' ' << model.num_users()
        << ' ' << model.num_items() << ' ' << to_string(model.mode()) << ' '
        << to_string(model.tag) << '\n';
    write_matrix(out, model.gamma_t());
    write_matrix(out, model.gamma_c());
    write_matrix(out, model.theta_t());
    write_matrix(out, model.theta_c());
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", model.calib_scale, model.calib_bias);
    out << buf;
}

EmbeddingSet read_model(const std::string& text) {
    Tokens tokens(text);
    if (tokens.next("header") != kModelMagic) {
        throw Error(ErrorKind::Format, "not a cause-embeddings model file");
    }
    std::string version = tokens.next("header");
    if (version != kModelVersion) {
        throw Error(ErrorKind::Format, "unsupported model version '" + version + "' (expected " +
                                           kModelVersion + ")");
    }
    const std::size_t dim = tokens.count("dim");
    const std::size_t users = tokens.count("num_users");
    const std::size_t items = tokens.count("num_items");
    const EmbeddingMode mode = parse_embedding_mode(tokens.next("mode"));
    const ModelTag tag = parse_model_tag(tokens.next("variant"));
    if (dim == 0) throw Error(ErrorKind::Format, "model dim must be positive");

    EmbeddingSet model(mode, users, items, dim);
    model.tag = tag;
    Matrix gamma_t(users, dim), theta_t(items, dim);
    read_matrix(tokens, gamma_t, "gamma_t");
    read_matrix(tokens, model.gamma_c(), "gamma_c");
    read_matrix(tokens, theta_t, "theta_t");
    read_matrix(tokens, model.theta_c(), "theta_c");
    model.calib_scale = tokens.number("calibration");
    model.calib_bias = tokens.number("calibration");
    if (!tokens.at_end()) {
        throw Error(ErrorKind::Format,
                    "trailing data at byte offset " + std::to_string(tokens.offset()));
    }

    if (model.users_duplicated()) {
        model.gamma_t() = std::move(gamma_t);
    } else if (!(gamma_t == model.gamma_c())) {
        throw Error(ErrorKind::Format, "gamma_t must equal gamma_c in mode " +
                                           std::string(to_string(mode)));
    }
    if (model.items_duplicated()) {
        model.theta_t() = std::move(theta_t);
    } else if (!(theta_t == model.theta_c())) {
        throw Error(ErrorKind::Format, "theta_t must equal theta_c in mode " +
                                           std::string(to_string(mode)));
    }
    return model;
}

void save_model(const std::filesystem::path& path, const EmbeddingSet& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Data, "cannot write model file " + path.string());
    write_model(out, model);
    if (!out) throw Error(ErrorKind::Data, "failed writing model file " + path.string());
}

EmbeddingSet load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Data, "cannot open model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_model(buf.str());
}

}  // namespace causerec
