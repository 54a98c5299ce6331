// Copyright 2026 The opfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OPFUZZ_LEXER_H_
#define OPFUZZ_LEXER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "opfuzz/dtype.h"

namespace opfuzz {

struct Token {
  enum class Kind { kIdent, kInt, kFloat, kString, kPunct, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;  // identifier, punctuation, or unescaped string body
  int64_t int_value = 0;
  double float_value = 0;
  int line = 1;
  int column = 1;
};

// Tokenizer shared by the descriptor, kernel, test-script and constraint-tree
// readers. `#` and `//` start line comments.
std::vector<Token> Tokenize(std::string_view text, const std::string &file);

// Cursor over a token vector with position-aware diagnostics.
class TokenStream {
 public:
  TokenStream(std::vector<Token> tokens, std::string file)
      : tokens_(std::move(tokens)), file_(std::move(file)) {}

  const Token &Peek(size_t ahead = 0) const;
  Token Next();
  bool AtEnd() const { return Peek().kind == Token::Kind::kEnd; }
  bool IsPunct(std::string_view p, size_t ahead = 0) const;
  bool IsIdent(std::string_view id, size_t ahead = 0) const;
  bool ConsumePunct(std::string_view p);
  bool ConsumeIdent(std::string_view id);
  void ExpectPunct(std::string_view p);
  void ExpectKeyword(std::string_view id);
  std::string ExpectIdent();
  std::string ExpectString();
  [[noreturn]] void Fail(const std::string &msg) const;
  [[noreturn]] void FailAt(const Token &t, const std::string &msg) const;
  const std::string &file() const { return file_; }

 private:
  std::vector<Token> tokens_;
  size_t pos_ = 0;
  std::string file_;
};

}  // namespace opfuzz

#endif  // OPFUZZ_LEXER_H_
