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

#include "unistpa/parser.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>

namespace unistpa {

std::string format_diagnostic(const ParseDiagnostic& d) {
  return std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": " +
         (d.severity == Severity::Error ? "error: " : "warning: ") + d.message;
}

bool has_errors(const std::vector<ParseDiagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const ParseDiagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

constexpr std::array<std::string_view, 9> kStatementKeywords = {
    "model", "loss", "hazard", "node", "edge", "action", "uca", "scenario", "requirement"};

constexpr std::array<std::string_view, 8> kAttributeKeywords = {
    "losses", "critical", "stage", "kind", "controller", "mode", "hazards", "scenarios"};

bool is_keyword(std::string_view word) {
  return is_statement_keyword(word) ||
         std::find(kAttributeKeywords.begin(), kAttributeKeywords.end(), word) !=
             kAttributeKeywords.end();
}

bool is_alpha(unsigned char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_word_char(unsigned char c) {
  return is_alpha(c) || is_digit(c) || c == '_' || c == '.' || c == '-';
}

// Length of the well-formed UTF-8 sequence starting at `pos`, or 0.
std::size_t utf8_length(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return 1;
  std::size_t len = 0;
  std::uint32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (pos + len > s.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  // overlong forms, surrogates, out of range
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
      (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
    return 0;
  }
  return len;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  TokenStream run() {
    while (!at_end()) {
      const unsigned char c = peek();
      if (c == '\n' || c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '#') {
        skip_comment();
      } else if (c == '"') {
        lex_string();
      } else if (c == '[') {
        lex_list();
      } else if (c == '=') {
        single(TokenKind::Equals);
      } else if (c == '{') {
        single(TokenKind::LBrace);
      } else if (c == '}') {
        single(TokenKind::RBrace);
      } else if (c == '-' && peek(1) == '>') {
        Token t{TokenKind::Arrow, "->", here(2), {}};
        advance();
        advance();
        out_.tokens.push_back(std::move(t));
      } else if (is_alpha(c)) {
        auto [text, span] = lex_word();
        out_.tokens.push_back({is_keyword(text) ? TokenKind::Keyword : TokenKind::Ident,
                               std::move(text), span, {}});
      } else if (is_digit(c)) {
        SourceSpan span = here(0);
        std::string text;
        while (!at_end() && is_digit(peek())) {
          text += static_cast<char>(peek());
          advance();
        }
        span.length = text.size();
        out_.tokens.push_back({TokenKind::Number, std::move(text), span, {}});
      } else {
        illegal_character("illegal character");
      }
    }
    return std::move(out_);
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }

  unsigned char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? static_cast<unsigned char>(src_[pos_ + ahead]) : 0;
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  SourceSpan here(std::size_t length) const { return {line_, column_, std::max<std::size_t>(length, 1)}; }

  void error(std::string message, SourceSpan span) {
    out_.diagnostics.push_back({Severity::Error, std::move(message), span});
  }

  void single(TokenKind kind) {
    out_.tokens.push_back({kind, std::string(1, src_[pos_]), here(1), {}});
    advance();
  }

  void skip_comment() {
    while (!at_end() && peek() != '\n') advance();
  }

  bool at_line_break() const { return peek() == '\n' || (peek() == '\r' && peek(1) == '\n'); }

  // Reports the character at the cursor and skips it (a whole UTF-8
  // sequence when well formed, one byte otherwise).
  void illegal_character(std::string_view what) {
    const std::size_t len = utf8_length(src_, pos_);
    if (len == 0) {
      error("invalid UTF-8 byte", here(1));
      advance();
      return;
    }
    std::string shown(src_.substr(pos_, len));
    error(std::string(what) + " '" + shown + "'", here(len));
    for (std::size_t i = 0; i < len; ++i) advance();
  }

  std::pair<std::string, SourceSpan> lex_word() {
    SourceSpan span = here(0);
    const std::size_t start = pos_;
    while (!at_end() && is_word_char(peek())) {
      if (peek() == '-' && peek(1) == '>') break;
      advance();
    }
    span.length = pos_ - start;
    return {std::string(src_.substr(start, pos_ - start)), span};
  }

  void lex_string() {
    const SourceSpan open = here(1);
    const std::size_t start = pos_;
    advance();
    std::string value;
    while (true) {
      if (at_end() || at_line_break()) {
        SourceSpan span = open;
        span.length = std::max<std::size_t>(pos_ - start, 1);
        error("unterminated string literal", span);
        return;
      }
      const unsigned char c = peek();
      if (c == '"') {
        advance();
        SourceSpan span = open;
        span.length = pos_ - start;
        out_.tokens.push_back({TokenKind::String, std::move(value), span, {}});
        return;
      }
      if (c == '\\') {
        const unsigned char next = peek(1);
        if (next == '"' || next == '\\' || next == 'n' || next == 'r') {
          value += next == 'n' ? '\n' : next == 'r' ? '\r' : static_cast<char>(next);
          advance();
          advance();
          continue;
        }
        if (pos_ + 1 >= src_.size() || next == '\n' || next == '\r') {
          advance();  // the unterminated branch reports it
          continue;
        }
        const std::size_t len = utf8_length(src_, pos_ + 1);
        error("invalid escape sequence '\\" +
                  std::string(src_.substr(pos_ + 1, std::max<std::size_t>(len, 1))) + "'",
              here(1 + std::max<std::size_t>(len, 1)));
        advance();
        for (std::size_t i = 0; i < std::max<std::size_t>(len, 1); ++i) advance();
        continue;
      }
      if (c >= 0x80) {
        const std::size_t len = utf8_length(src_, pos_);
        if (len == 0) {
          error("invalid UTF-8 byte", here(1));
          advance();
          continue;
        }
        value.append(src_.substr(pos_, len));
        for (std::size_t i = 0; i < len; ++i) advance();
        continue;
      }
      value += static_cast<char>(c);
      advance();
    }
  }

  void lex_list() {
    Token list{TokenKind::List, "[", here(1), {}};
    const std::size_t start = pos_;
    advance();
    while (true) {
      if (at_end()) {
        error("unterminated id list", list.span);
        break;
      }
      const unsigned char c = peek();
      if (c == ']') {
        advance();
        list.span.length = pos_ - start;
        break;
      }
      if (c == '\n' || c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '#') {
        skip_comment();
      } else if (is_alpha(c)) {
        auto [text, span] = lex_word();
        list.items.push_back({std::move(text), span});
      } else {
        illegal_character("unexpected character in id list");
      }
    }
    out_.tokens.push_back(std::move(list));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  TokenStream out_;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::Keyword:
    case TokenKind::Ident: return "'" + t.text + "'";
    case TokenKind::Number: return "number " + t.text;
    case TokenKind::String: return "string";
    case TokenKind::Equals: return "'='";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::List: return "id list";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
  }
  return "token";
}

bool is_word(const Token& t) { return t.kind == TokenKind::Keyword || t.kind == TokenKind::Ident; }

struct Attribute {
  const Token* key;
  const Token* value;
};

// A statement's tokens sorted into the shapes the grammar uses.
struct Statement {
  const Token* keyword = nullptr;
  std::vector<const Token*> words;  // positional identifiers, in order
  std::vector<const Token*> strings;
  std::vector<const Token*> arrows;
  std::vector<Attribute> attributes;
};

enum class ValueKind { Word, List };

struct AttributeSpec {
  std::string_view name;
  ValueKind kind;
  bool required;
};

class Parser {
 public:
  explicit Parser(const TokenStream& stream) : tokens_(stream.tokens) {
    doc_.diagnostics = stream.diagnostics;
  }

  ModelDocument run() {
    std::size_t i = 0;
    bool reported_junk = false;
    while (i < tokens_.size()) {
      if (!starts_statement(i)) {
        if (!reported_junk) {
          error("expected a statement keyword, found " + describe(tokens_[i]), tokens_[i].span);
          reported_junk = true;
        }
        ++i;
        continue;
      }
      reported_junk = false;
      std::size_t end = i + 1;
      while (end < tokens_.size() && !starts_statement(end)) ++end;
      parse_statement(i, end);
      i = end;
    }
    return std::move(doc_);
  }

 private:
  bool starts_statement(std::size_t i) const {
    const Token& t = tokens_[i];
    if (t.kind != TokenKind::Keyword || !is_statement_keyword(t.text)) return false;
    if (i + 1 < tokens_.size() && tokens_[i + 1].kind == TokenKind::Equals) return false;
    // Only the first token of a line opens a statement, so ids may spell keywords.
    if (i > 0 && tokens_[i - 1].span.line == t.span.line) return false;
    return true;
  }

  void error(std::string message, const SourceSpan& span) {
    doc_.diagnostics.push_back({Severity::Error, std::move(message), span});
    ++statement_errors_;
  }

  Statement classify(std::size_t begin, std::size_t end) {
    Statement st;
    st.keyword = &tokens_[begin];
    for (std::size_t i = begin + 1; i < end; ++i) {
      const Token& t = tokens_[i];
      const bool has_next = i + 1 < end;
      if ((is_word(t) || t.kind == TokenKind::Number) && has_next &&
          tokens_[i + 1].kind == TokenKind::Equals) {
        const Token* value = nullptr;
        if (i + 2 < end) {
          const Token& v = tokens_[i + 2];
          if (is_word(v) || v.kind == TokenKind::Number || v.kind == TokenKind::String ||
              v.kind == TokenKind::List) {
            value = &v;
          }
        }
        if (value == nullptr) {
          error("missing value for attribute '" + t.text + "'", tokens_[i + 1].span);
          i += 1;
          continue;
        }
        st.attributes.push_back({&t, value});
        i += 2;
        continue;
      }
      switch (t.kind) {
        case TokenKind::Keyword:
        case TokenKind::Ident: st.words.push_back(&t); break;
        case TokenKind::String: st.strings.push_back(&t); break;
        case TokenKind::Arrow: st.arrows.push_back(&t); break;
        default: error("unexpected " + describe(t), t.span); break;
      }
    }
    return st;
  }

  // Checks attribute names against `specs`; returns the first occurrence of
  // each known attribute or nullptr when absent.
  std::map<std::string_view, const Attribute*> match_attributes(
      const Statement& st, std::initializer_list<AttributeSpec> specs) {
    std::map<std::string_view, const Attribute*> found;
    const std::string& kw = st.keyword->text;
    for (const auto& spec : specs) found[spec.name] = nullptr;
    for (const auto& attr : st.attributes) {
      auto spec = std::find_if(specs.begin(), specs.end(),
                               [&](const AttributeSpec& s) { return s.name == attr.key->text; });
      if (spec == specs.end()) {
        error("unknown attribute '" + attr.key->text + "' for " + kw, attr.key->span);
        continue;
      }
      if (found[spec->name] != nullptr) {
        error("duplicate attribute '" + attr.key->text + "'", attr.key->span);
        continue;
      }
      found[spec->name] = &attr;
      const bool is_list = attr.value->kind == TokenKind::List;
      if (spec->kind == ValueKind::List && !is_list) {
        error("attribute '" + attr.key->text + "' expects an id list, found " +
                  describe(*attr.value),
              attr.value->span);
        found[spec->name] = nullptr;
        missing_reported_.insert(spec->name);
      } else if (spec->kind == ValueKind::Word && !is_word(*attr.value)) {
        error("attribute '" + attr.key->text + "' expects an identifier, found " +
                  describe(*attr.value),
              attr.value->span);
        found[spec->name] = nullptr;
        missing_reported_.insert(spec->name);
      }
    }
    for (const auto& spec : specs) {
      if (spec.required && found[spec.name] == nullptr && !missing_reported_.count(spec.name)) {
        error("missing required attribute '" + std::string(spec.name) + "' in " + kw +
                  " statement",
              st.keyword->span);
      }
    }
    return found;
  }

  std::optional<Identifier> single_id(const Statement& st) {
    if (st.words.empty()) {
      error("expected an identifier after '" + st.keyword->text + "'", st.keyword->span);
      return std::nullopt;
    }
    for (std::size_t i = 1; i < st.words.size(); ++i) {
      error("unexpected identifier '" + st.words[i]->text + "'", st.words[i]->span);
    }
    return Identifier(st.words.front()->text);
  }

  std::optional<std::string> description(const Statement& st, bool required) {
    for (std::size_t i = 1; i < st.strings.size(); ++i) {
      error("unexpected extra string", st.strings[i]->span);
    }
    if (st.strings.empty()) {
      if (required) error("missing description string in " + st.keyword->text + " statement",
                          st.keyword->span);
      return required ? std::nullopt : std::optional<std::string>(std::string());
    }
    return st.strings.front()->text;
  }

  void no_arrows(const Statement& st) {
    for (const Token* a : st.arrows) error("unexpected '->'", a->span);
  }

  IdList ids_of(const Attribute* attr) {
    IdList out;
    if (attr == nullptr) return out;
    for (const auto& item : attr->value->items) out.emplace_back(item.text);
    return out;
  }

  template <typename T>
  std::optional<T> keyword_value(const Attribute* attr, std::optional<T> (*parse)(std::string_view),
                                 std::string_view what, std::string_view legal) {
    if (attr == nullptr) return std::nullopt;
    auto parsed = parse(attr->value->text);
    if (!parsed) {
      error("unknown " + std::string(what) + " '" + attr->value->text + "' (expected one of: " +
                std::string(legal) + ")",
            attr->value->span);
    }
    return parsed;
  }

  static std::optional<Stage> stage_value(std::string_view s) { return parse_stage(s); }
  static std::optional<FailureMode> mode_value(std::string_view s) { return parse_mode(s); }
  static std::optional<NodeKind> node_kind_value(std::string_view s) {
    if (s == "technical") return NodeKind::Technical;
    if (s == "human") return NodeKind::Human;
    return std::nullopt;
  }
  static std::optional<bool> bool_value(std::string_view s) {
    if (s == "true") return true;
    if (s == "false") return false;
    return std::nullopt;
  }

  static constexpr std::string_view kStages = "IG, DP, LT, VF, DT";
  static constexpr std::string_view kModes =
      "not_provided, provided_improperly, mistimed, inappropriate_duration";

  void parse_statement(std::size_t begin, std::size_t end) {
    statement_errors_ = 0;
    missing_reported_.clear();
    const Statement st = classify(begin, end);
    const std::string& kw = st.keyword->text;
    const std::size_t line = st.keyword->span.line;

    if (kw == "model") {
      if (seen_header_) error("duplicate model header", st.keyword->span);
    } else if (!seen_header_ && !reported_header_) {
      error("expected 'model' header before the first statement", st.keyword->span);
      reported_header_ = true;
    }

    std::optional<Declaration> decl;
    if (kw == "model") {
      match_attributes(st, {});
      no_arrows(st);
      for (const Token* w : st.words) error("unexpected identifier '" + w->text + "'", w->span);
      auto name = description(st, true);
      if (name) decl = ModelHeader{*name};
      seen_header_ = true;
    } else if (kw == "loss") {
      auto attrs = match_attributes(st, {{"critical", ValueKind::Word, false}});
      no_arrows(st);
      auto id = single_id(st);
      auto text = description(st, true);
      bool critical = true;
      if (attrs["critical"] != nullptr) {
        auto v = keyword_value<bool>(attrs["critical"], bool_value, "boolean", "true, false");
        critical = v.value_or(true);
      }
      if (id && text) decl = Loss{*id, *text, critical};
    } else if (kw == "hazard") {
      auto attrs = match_attributes(st, {{"losses", ValueKind::List, true}});
      no_arrows(st);
      auto id = single_id(st);
      auto text = description(st, true);
      if (id && text) decl = Hazard{*id, *text, ids_of(attrs["losses"])};
    } else if (kw == "node") {
      auto attrs = match_attributes(
          st, {{"stage", ValueKind::Word, true}, {"kind", ValueKind::Word, true}});
      no_arrows(st);
      auto id = single_id(st);
      auto stage = keyword_value<Stage>(attrs["stage"], stage_value, "stage", kStages);
      auto kind =
          keyword_value<NodeKind>(attrs["kind"], node_kind_value, "node kind", "technical, human");
      auto text = description(st, true);
      if (id && stage && kind && text) decl = Node{*id, *stage, *kind, *text};
    } else if (kw == "edge") {
      match_attributes(st, {});
      decl = parse_edge(st);
    } else if (kw == "action") {
      auto attrs = match_attributes(st, {{"controller", ValueKind::Word, true}});
      no_arrows(st);
      auto id = single_id(st);
      auto text = description(st, true);
      if (id && text && attrs["controller"]) {
        decl = ControlAction{*id, Identifier(attrs["controller"]->value->text), *text};
      }
    } else if (kw == "uca") {
      auto attrs = match_attributes(st, {{"action", ValueKind::Word, true},
                                         {"mode", ValueKind::Word, true},
                                         {"hazards", ValueKind::List, true}});
      no_arrows(st);
      auto id = single_id(st);
      auto mode = keyword_value<FailureMode>(attrs["mode"], mode_value, "failure mode", kModes);
      auto text = description(st, true);
      if (id && mode && text && attrs["action"] && attrs["hazards"]) {
        decl = Uca{*id, Identifier(attrs["action"]->value->text), *mode,
                   ids_of(attrs["hazards"]), *text};
      }
    } else if (kw == "scenario") {
      auto attrs = match_attributes(
          st, {{"uca", ValueKind::Word, true}, {"stage", ValueKind::Word, true}});
      no_arrows(st);
      auto id = single_id(st);
      auto stage = keyword_value<Stage>(attrs["stage"], stage_value, "stage", kStages);
      auto text = description(st, true);
      if (id && stage && text && attrs["uca"]) {
        decl = CausalScenario{*id, Identifier(attrs["uca"]->value->text), *stage, *text};
      }
    } else if (kw == "requirement") {
      auto attrs = match_attributes(st, {{"scenarios", ValueKind::List, true}});
      no_arrows(st);
      auto id = single_id(st);
      auto text = description(st, true);
      if (id && text && attrs["scenarios"]) {
        decl = SafetyRequirement{*id, ids_of(attrs["scenarios"]), *text};
      }
    }

    if (decl && statement_errors_ == 0) {
      doc_.declarations.push_back({std::move(*decl), line});
    }
  }

  std::optional<Declaration> parse_edge(const Statement& st) {
    // edge (control|feedback) FROM -> TO [STRING]
    const auto& w = st.words;
    std::optional<EdgeKind> kind;
    if (w.empty()) {
      error("expected 'control' or 'feedback' after 'edge'", st.keyword->span);
      return std::nullopt;
    }
    if (w[0]->text == "control") {
      kind = EdgeKind::Control;
    } else if (w[0]->text == "feedback") {
      kind = EdgeKind::Feedback;
    } else {
      error("unknown edge kind '" + w[0]->text + "' (expected one of: control, feedback)",
            w[0]->span);
    }
    if (w.size() < 3 || st.arrows.size() != 1) {
      error("expected 'FROM -> TO' in edge statement", st.keyword->span);
      return std::nullopt;
    }
    for (std::size_t i = 3; i < w.size(); ++i) {
      error("unexpected identifier '" + w[i]->text + "'", w[i]->span);
    }
    const Token* arrow = st.arrows.front();
    auto before = [](const Token* a, const Token* b) {
      return a->span.line < b->span.line ||
             (a->span.line == b->span.line && a->span.column < b->span.column);
    };
    if (!before(w[1], arrow) || !before(arrow, w[2])) {
      error("expected 'FROM -> TO' in edge statement", arrow->span);
      return std::nullopt;
    }
    auto label = description(st, false);
    if (!kind || !label) return std::nullopt;
    return Edge{Identifier(w[1]->text), Identifier(w[2]->text), *kind, *label};
  }

  const std::vector<Token>& tokens_;
  ModelDocument doc_;
  bool seen_header_ = false;
  bool reported_header_ = false;
  std::size_t statement_errors_ = 0;
  std::set<std::string_view> missing_reported_;
};

}  // namespace

bool is_statement_keyword(std::string_view word) {
  return std::find(kStatementKeywords.begin(), kStatementKeywords.end(), word) !=
         kStatementKeywords.end();
}

TokenStream tokenize(std::string_view text) { return Lexer(text).run(); }

ModelDocument parse_document(std::string_view text) {
  const TokenStream stream = tokenize(text);
  return Parser(stream).run();
}

std::string quote_string(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c; break;
    }
  }
  out += '"';
  return out;
}

namespace {

std::string id_list(const IdList& ids) {
  std::string out = "[";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ' ';
    out += ids[i].str();
  }
  return out + "]";
}

}  // namespace

std::string render_canonical(const SafetyModel& model) {
  std::string out = "model " + quote_string(model.name()) + "\n";
  for (const auto& l : model.losses()) {
    out += "loss " + l.id.str() + " " + quote_string(l.description);
    if (!l.safety_critical) out += " critical=false";
    out += "\n";
  }
  for (const auto& h : model.hazards()) {
    out += "hazard " + h.id.str() + " " + quote_string(h.description) +
           " losses=" + id_list(h.losses) + "\n";
  }
  for (const auto& n : model.nodes()) {
    out += "node " + n.id.str() + " stage=" + std::string(stage_tag(n.stage)) +
           " kind=" + std::string(node_kind_keyword(n.kind)) + " " + quote_string(n.label) + "\n";
  }
  for (const auto& e : model.edges()) {
    out += "edge " + std::string(edge_kind_keyword(e.kind)) + " " + e.from.str() + " -> " +
           e.to.str();
    if (!e.label.empty()) out += " " + quote_string(e.label);
    out += "\n";
  }
  for (const auto& a : model.actions()) {
    out += "action " + a.id.str() + " controller=" + a.controller.str() + " " +
           quote_string(a.name) + "\n";
  }
  for (const auto& u : model.ucas()) {
    out += "uca " + u.id.str() + " action=" + u.action.str() +
           " mode=" + std::string(mode_keyword(u.mode)) + " hazards=" + id_list(u.hazards) + " " +
           quote_string(u.description) + "\n";
  }
  for (const auto& s : model.scenarios()) {
    out += "scenario " + s.id.str() + " uca=" + s.uca.str() +
           " stage=" + std::string(stage_tag(s.stage)) + " " + quote_string(s.description) + "\n";
  }
  for (const auto& r : model.requirements()) {
    out += "requirement " + r.id.str() + " scenarios=" + id_list(r.scenarios) + " " +
           quote_string(r.description) + "\n";
  }
  return out;
}

}  // namespace unistpa
