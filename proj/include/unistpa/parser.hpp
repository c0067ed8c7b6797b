/*
 * Copyright 2026 The unistpa Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file parser.hpp
 * @brief Lexer, parser and canonical renderer for `.ustpa` model files.
 *
 * The format is line oriented: one statement per line, a statement keyword
 * followed by an identifier, `key=value` attributes and a quoted description.
 *
 *     model "NOA highway"
 *     loss L1 "Bodily injury"
 *     hazard H1 "Lane keeping failure" losses=[L1 L2]
 *     node perception stage=LT kind=technical "Perception"
 *     edge control world_model -> perception "state"
 *     action A1 controller=perception "Perception module training"
 *     uca U1 action=A1 mode=not_provided hazards=[H1] "..."
 *     scenario CS1 uca=U1 stage=LT "..."
 *     requirement SR1 scenarios=[CS1] "..."
 *
 * Columns in SourceSpan count bytes from 1.
 */

#ifndef UNISTPA_PARSER_HPP
#define UNISTPA_PARSER_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "unistpa/model.hpp"

namespace unistpa {

struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct ParseDiagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;
};

/// "LINE:COL: error: message"
std::string format_diagnostic(const ParseDiagnostic& diagnostic);

bool has_errors(const std::vector<ParseDiagnostic>& diagnostics);

enum class TokenKind {
  Keyword,  ///< statement keyword or attribute name
  Ident,
  Number,
  String,   ///< text holds the unescaped contents
  Equals,
  Arrow,
  List,     ///< `[ a b c ]`; items hold the identifiers
  LBrace,
  RBrace,
};

struct ListItem {
  std::string text;
  SourceSpan span;
};

struct Token {
  TokenKind kind;
  std::string text;
  SourceSpan span;
  std::vector<ListItem> items;
};

struct TokenStream {
  std::vector<Token> tokens;
  std::vector<ParseDiagnostic> diagnostics;
};

/// Splits text into tokens, skipping whitespace and `#` comments. Lexical
/// errors are collected and lexing continues past them.
TokenStream tokenize(std::string_view text);

bool is_statement_keyword(std::string_view word);

struct ModelDocument {
  std::vector<RawDeclaration> declarations;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
};

/// Parses a whole document. A statement with errors contributes no
/// declaration; parsing resumes at the next statement keyword.
ModelDocument parse_document(std::string_view text);

/// Quotes and escapes `text` as a DSL string literal.
std::string quote_string(std::string_view text);

/// Deterministic text form of a model; parsing it rebuilds an equal model.
std::string render_canonical(const SafetyModel& model);

}  // namespace unistpa

#endif  // UNISTPA_PARSER_HPP
