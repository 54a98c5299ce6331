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

#include "opfuzz/lexer.h"

#include <cctype>
#include <cerrno>
#include <cstdlib>

namespace opfuzz {

namespace {
constexpr std::string_view kTwoCharPuncts[] = {"..", "==", "!=", "<=", ">=",
                                               "&&", "||"};
}  // namespace

std::vector<Token> Tokenize(std::string_view text, const std::string &file) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      t.kind = Token::Kind::kIdent;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      bool is_float = false;
      if (c == '0' && i + 1 < text.size() && (text[i + 1] == 'x' || text[i + 1] == 'X')) {
        j += 2;
        while (j < text.size() && std::isxdigit(static_cast<unsigned char>(text[j]))) ++j;
      } else {
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        // A single '.' followed by a digit is a fraction; ".." is a range.
        if (j + 1 < text.size() && text[j] == '.' && text[j + 1] != '.') {
          is_float = true;
          ++j;
          while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
        if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
          is_float = true;
          ++j;
          if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
          while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
      }
      t.text = std::string(text.substr(i, j - i));
      errno = 0;
      if (is_float) {
        t.kind = Token::Kind::kFloat;
        t.float_value = std::strtod(t.text.c_str(), nullptr);
      } else {
        t.kind = Token::Kind::kInt;
        t.int_value = static_cast<int64_t>(std::strtoull(t.text.c_str(), nullptr, 0));
        if (errno == ERANGE || std::strtoull(t.text.c_str(), nullptr, 0) >
                                   static_cast<unsigned long long>(INT64_MAX))
          throw ParseError(file, line, col, "integer literal out of range: " + t.text);
      }
      advance(j - i);
    } else if (c == '"') {
      size_t j = i + 1;
      std::string body;
      while (j < text.size() && text[j] != '"') {
        if (text[j] == '\n') throw ParseError(file, line, col, "unterminated string");
        if (text[j] == '\\' && j + 1 < text.size()) {
          char e = text[j + 1];
          body += e == 'n' ? '\n' : e == 't' ? '\t' : e;
          j += 2;
        } else {
          body += text[j++];
        }
      }
      if (j >= text.size()) throw ParseError(file, line, col, "unterminated string");
      t.kind = Token::Kind::kString;
      t.text = std::move(body);
      advance(j + 1 - i);
    } else {
      t.kind = Token::Kind::kPunct;
      t.text = std::string(1, c);
      for (std::string_view p : kTwoCharPuncts) {
        if (text.substr(i, 2) == p) {
          t.text = std::string(p);
          break;
        }
      }
      if (std::string_view("{}()[]<>:;,=+-*/%!.|&").find(c) == std::string_view::npos)
        throw ParseError(file, line, col, std::string("unexpected character '") + c + "'");
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

const Token &TokenStream::Peek(size_t ahead) const {
  size_t p = pos_ + ahead;
  return p < tokens_.size() ? tokens_[p] : tokens_.back();
}

Token TokenStream::Next() {
  Token t = Peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

bool TokenStream::IsPunct(std::string_view p, size_t ahead) const {
  const Token &t = Peek(ahead);
  return t.kind == Token::Kind::kPunct && t.text == p;
}

bool TokenStream::IsIdent(std::string_view id, size_t ahead) const {
  const Token &t = Peek(ahead);
  return t.kind == Token::Kind::kIdent && t.text == id;
}

bool TokenStream::ConsumePunct(std::string_view p) {
  if (!IsPunct(p)) return false;
  Next();
  return true;
}

bool TokenStream::ConsumeIdent(std::string_view id) {
  if (!IsIdent(id)) return false;
  Next();
  return true;
}

void TokenStream::ExpectPunct(std::string_view p) {
  if (!ConsumePunct(p)) Fail("expected '" + std::string(p) + "'");
}

void TokenStream::ExpectKeyword(std::string_view id) {
  if (!ConsumeIdent(id)) Fail("expected '" + std::string(id) + "'");
}

std::string TokenStream::ExpectIdent() {
  if (Peek().kind != Token::Kind::kIdent) Fail("expected identifier");
  return Next().text;
}

std::string TokenStream::ExpectString() {
  if (Peek().kind != Token::Kind::kString) Fail("expected string literal");
  return Next().text;
}

void TokenStream::Fail(const std::string &msg) const { FailAt(Peek(), msg); }

void TokenStream::FailAt(const Token &t, const std::string &msg) const {
  std::string got = t.kind == Token::Kind::kEnd ? "end of input" : "'" + t.text + "'";
  throw ParseError(file_, t.line, t.column, msg + ", got " + got);
}

}  // namespace opfuzz
