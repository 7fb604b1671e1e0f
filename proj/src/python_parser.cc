// Copyright 2026 The Pickleward Authors
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

#include <algorithm>
#include <array>
#include <cstring>
#include <unordered_set>

#include "python_ast.h"

namespace pickleward::py {
namespace {

enum class Tok { kName, kNumber, kString, kOp, kNewline, kIndent, kDedent, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;   // source text; decoded value for strings
  bool bytes = false;  // string prefix flags
  bool fstring = false;
  int line = 0;
};

bool IsIdentStart(unsigned char c) { return c == '_' || std::isalpha(c) || c >= 0x80; }
bool IsIdentChar(unsigned char c) { return IsIdentStart(c) || std::isdigit(c); }

void AppendUtf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string DecodeEscapes(std::string_view body) {
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c != '\\' || i + 1 >= body.size()) {
      out.push_back(c);
      continue;
    }
    char e = body[++i];
    auto hex = [&](std::size_t n) -> std::uint32_t {
      std::uint32_t v = 0;
      for (std::size_t k = 0; k < n && i + 1 < body.size() && std::isxdigit(static_cast<unsigned char>(body[i + 1])); ++k) {
        char h = body[++i];
        v = v * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(h)) ? h - '0' : (std::tolower(h) - 'a' + 10));
      }
      return v;
    };
    switch (e) {
      case '\n': break;
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      case '0': case '1': case '2': case '3': case '4': case '5': case '6': case '7': {
        std::uint32_t v = static_cast<std::uint32_t>(e - '0');
        for (int k = 0; k < 2 && i + 1 < body.size() && body[i + 1] >= '0' && body[i + 1] <= '7'; ++k) {
          v = v * 8 + static_cast<std::uint32_t>(body[++i] - '0');
        }
        AppendUtf8(out, v);
        break;
      }
      case 'x': AppendUtf8(out, hex(2)); break;
      case 'u': AppendUtf8(out, hex(4)); break;
      case 'U': AppendUtf8(out, hex(8)); break;
      case 'a': out.push_back('\a'); break;
      case 'b': out.push_back('\b'); break;
      case 'f': out.push_back('\f'); break;
      case 'v': out.push_back('\v'); break;
      case '\\': case '\'': case '"': out.push_back(e); break;
      default:
        out.push_back('\\');
        out.push_back(e);
    }
  }
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> Run() {
    indents_.push_back(0);
    at_line_start_ = true;
    while (true) {
      if (at_line_start_ && depth_ == 0) {
        if (!StartLine()) break;
      }
      SkipSpaces();
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '\\') {
        std::size_t p = pos_ + 1;
        if (p < src_.size() && src_[p] == '\r') ++p;
        if (p < src_.size() && src_[p] == '\n') {
          pos_ = p + 1;
          ++line_;
          continue;
        }
        throw SyntaxError(line_, "unexpected character after line continuation");
      }
      if (c == '\n' || c == '\r') {
        if (c == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') ++pos_;
        ++pos_;
        if (depth_ == 0) {
          Emit(Tok::kNewline, "");
          at_line_start_ = true;
        }
        ++line_;
        continue;
      }
      if (IsStringStart()) {
        LexString();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        LexNumber();
        continue;
      }
      if (IsIdentStart(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && IsIdentChar(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        Emit(Tok::kName, std::string(src_.substr(start, pos_ - start)));
        continue;
      }
      LexOperator();
    }
    if (depth_ > 0) throw SyntaxError(open_lines_.front(), "'" + open_chars_.substr(0, 1) + "' was never closed");
    if (!tokens_.empty() && tokens_.back().kind != Tok::kNewline &&
        tokens_.back().kind != Tok::kDedent) {
      Emit(Tok::kNewline, "");
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      Emit(Tok::kDedent, "");
    }
    Emit(Tok::kEnd, "");
    return std::move(tokens_);
  }

 private:
  void Emit(Tok kind, std::string text) {
    tokens_.push_back(Token{kind, std::move(text), false, false, line_});
  }

  void SkipSpaces() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\f')) ++pos_;
  }

  // Measures indentation; returns false at end of input. Blank and
  // comment-only lines produce nothing.
  bool StartLine() {
    while (pos_ < src_.size()) {
      int col = 0;
      std::size_t p = pos_;
      while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t' || src_[p] == '\f')) {
        col = src_[p] == '\t' ? (col / 8 + 1) * 8 : (src_[p] == ' ' ? col + 1 : 0);
        ++p;
      }
      if (p >= src_.size()) {
        pos_ = p;
        return false;
      }
      char c = src_[p];
      if (c == '#' || c == '\n' || c == '\r') {
        while (p < src_.size() && src_[p] != '\n') ++p;
        if (p < src_.size()) ++p;
        pos_ = p;
        ++line_;
        continue;
      }
      if (c == '\\' && p + 1 < src_.size() && src_[p + 1] == '\n') {
        // A continuation right after the indentation.
        pos_ = p;
        at_line_start_ = false;
        return true;
      }
      pos_ = p;
      at_line_start_ = false;
      if (col > indents_.back()) {
        indents_.push_back(col);
        Emit(Tok::kIndent, "");
      } else {
        while (col < indents_.back()) {
          indents_.pop_back();
          Emit(Tok::kDedent, "");
        }
        if (col != indents_.back()) throw SyntaxError(line_, "unindent does not match any outer indentation level");
      }
      return true;
    }
    return false;
  }

  bool IsStringStart() const {
    std::size_t p = pos_;
    std::size_t n = 0;
    while (p < src_.size() && n < 2 && std::strchr("rRbBuUfF", src_[p]) != nullptr) {
      ++p;
      ++n;
    }
    return p < src_.size() && (src_[p] == '\'' || src_[p] == '"');
  }

  void LexString() {
    bool raw = false;
    bool bytes = false;
    bool fstr = false;
    while (src_[pos_] != '\'' && src_[pos_] != '"') {
      char c = static_cast<char>(std::tolower(src_[pos_]));
      raw |= c == 'r';
      bytes |= c == 'b';
      fstr |= c == 'f';
      ++pos_;
    }
    char q = src_[pos_];
    bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q;
    int start_line = line_;
    pos_ += triple ? 3 : 1;
    std::size_t body_start = pos_;
    while (true) {
      if (pos_ >= src_.size()) throw SyntaxError(start_line, "unterminated string literal");
      char c = src_[pos_];
      if (c == '\\') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') ++line_;
        pos_ += 2;
        continue;
      }
      if (c == '\n') {
        if (!triple) throw SyntaxError(start_line, "unterminated string literal");
        ++line_;
      }
      if (c == q) {
        if (!triple) break;
        if (pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q) break;
      }
      ++pos_;
    }
    std::string_view body = src_.substr(body_start, pos_ - body_start);
    pos_ += triple ? 3 : 1;
    Token t{Tok::kString, raw ? std::string(body) : DecodeEscapes(body), bytes, fstr, start_line};
    tokens_.push_back(std::move(t));
  }

  void LexNumber() {
    std::size_t start = pos_;
    auto digits = [&](auto pred) {
      while (pos_ < src_.size() && (pred(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    };
    auto is_dec = [](unsigned char c) { return std::isdigit(c) != 0; };
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() && std::strchr("xXoObB", src_[pos_ + 1]) && src_[pos_ + 1] != '\0') {
      pos_ += 2;
      digits([](unsigned char c) { return std::isxdigit(c) != 0; });
    } else {
      digits(is_dec);
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        digits(is_dec);
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t p = pos_ + 1;
        if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
        if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
          pos_ = p;
          digits(is_dec);
        }
      }
      if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) ++pos_;
    }
    if (pos_ < src_.size() && IsIdentStart(static_cast<unsigned char>(src_[pos_]))) {
      throw SyntaxError(line_, "invalid number literal");
    }
    Emit(Tok::kNumber, std::string(src_.substr(start, pos_ - start)));
  }

  void LexOperator() {
    static const std::array<const char*, 47> kOps = {
        "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=", ">=",
        "==",  "!=",  "+=",  "-=",  "*=",  "/=", "%=", "&=", "|=", "^=", "@=", "+",  "-",
        "*",   "/",   "%",   "@",   "&",   "|",  "^",  "~",  "<",  ">",  "(",  ")",  "[",
        "]",   "{",   "}",   ",",   ":",   ".",  ";",  "="};
    for (const char* op : kOps) {
      std::size_t n = std::strlen(op);
      if (src_.substr(pos_, n) == op) {
        pos_ += n;
        if (n == 1 && std::strchr("([{", op[0])) {
          ++depth_;
          open_lines_.push_back(line_);
          open_chars_.push_back(op[0]);
        }
        if (n == 1 && std::strchr(")]}", op[0])) {
          if (depth_ == 0) throw SyntaxError(line_, std::string("unmatched '") + op + "'");
          --depth_;
          open_lines_.pop_back();
          open_chars_.pop_back();
        }
        Emit(Tok::kOp, op);
        return;
      }
    }
    throw SyntaxError(line_, std::string("invalid character '") + src_[pos_] + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  std::vector<int> indents_;
  std::vector<int> open_lines_;
  std::string open_chars_;
  std::vector<Token> tokens_;
};

const std::unordered_set<std::string>& Keywords() {
  static const std::unordered_set<std::string> k = {
      "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
      "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global",
      "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return",
      "try", "while", "with", "yield"};
  return k;
}

ExprPtr Make(ExprKind kind, int line, std::string text = {}) {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->line = line;
  e->text = std::move(text);
  return e;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : t_(std::move(tokens)) {}

  std::vector<StmtPtr> Module() {
    std::vector<StmtPtr> out;
    while (Peek().kind != Tok::kEnd) {
      if (Peek().kind == Tok::kNewline) {
        Next();
        continue;
      }
      Statement(out);
    }
    return out;
  }

  ExprPtr SingleExpression() {
    while (Peek().kind == Tok::kNewline || Peek().kind == Tok::kIndent) Next();
    ExprPtr e = StarExpressions();
    while (Peek().kind == Tok::kNewline || Peek().kind == Tok::kDedent) Next();
    if (Peek().kind != Tok::kEnd) Fail("unexpected trailing tokens");
    return e;
  }

 private:
  const Token& Peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(i_ + ahead, t_.size() - 1);
    return t_[i];
  }
  const Token& Next() {
    const Token& t = t_[i_];
    if (i_ + 1 < t_.size()) ++i_;
    return t;
  }
  bool IsOp(const char* op, std::size_t ahead = 0) const {
    const Token& t = Peek(ahead);
    return t.kind == Tok::kOp && t.text == op;
  }
  bool IsKw(const char* kw, std::size_t ahead = 0) const {
    const Token& t = Peek(ahead);
    return t.kind == Tok::kName && t.text == kw;
  }
  bool AcceptOp(const char* op) {
    if (!IsOp(op)) return false;
    Next();
    return true;
  }
  bool AcceptKw(const char* kw) {
    if (!IsKw(kw)) return false;
    Next();
    return true;
  }
  [[noreturn]] void Fail(const std::string& message) const {
    const Token& t = Peek();
    std::string near = t.kind == Tok::kNewline ? "end of line"
                       : t.kind == Tok::kEnd    ? "end of file"
                       : t.kind == Tok::kIndent ? "indent"
                       : t.kind == Tok::kDedent ? "dedent"
                                                : "'" + t.text + "'";
    throw SyntaxError(t.line, message + " near " + near);
  }
  void ExpectOp(const char* op) {
    if (!AcceptOp(op)) Fail(std::string("expected '") + op + "'");
  }
  void ExpectKw(const char* kw) {
    if (!AcceptKw(kw)) Fail(std::string("expected '") + kw + "'");
  }
  std::string ExpectName() {
    const Token& t = Peek();
    if (t.kind != Tok::kName || Keywords().count(t.text)) Fail("expected a name");
    return Next().text;
  }
  void ExpectNewline() {
    if (Peek().kind == Tok::kEnd) return;
    if (Peek().kind != Tok::kNewline) Fail("expected end of statement");
    Next();
  }

  // ---- statements ----

  void Statement(std::vector<StmtPtr>& out) {
    const Token& t = Peek();
    if (t.kind == Tok::kIndent) Fail("unexpected indent");
    if (t.kind == Tok::kOp && t.text == "@") {
      std::vector<ExprPtr> decorators;
      while (AcceptOp("@")) {
        decorators.push_back(NamedExpression());
        ExpectNewline();
      }
      AcceptKw("async");
      StmtPtr s;
      if (IsKw("def")) {
        s = FunctionDef();
      } else if (IsKw("class")) {
        s = ClassDef();
      } else {
        Fail("expected 'def' or 'class' after decorator");
      }
      s->decorators = std::move(decorators);
      out.push_back(std::move(s));
      return;
    }
    if (t.kind == Tok::kName) {
      const std::string& w = t.text;
      if (w == "def") return out.push_back(FunctionDef());
      if (w == "class") return out.push_back(ClassDef());
      if (w == "if" || w == "while" || w == "for" || w == "try" || w == "with") {
        return out.push_back(Compound());
      }
      if (w == "async" && (IsKw("def", 1) || IsKw("for", 1) || IsKw("with", 1))) {
        Next();
        if (IsKw("def")) return out.push_back(FunctionDef());
        return out.push_back(Compound());
      }
      if (w == "match" && LooksLikeMatch()) return out.push_back(Match());
    }
    SimpleStatements(out);
  }

  // The logical line starting at the cursor ends with ':' and opens a block.
  bool LooksLikeMatch() const {
    std::size_t k = i_ + 1;
    if (t_[k].kind == Tok::kNewline) return false;
    if (t_[k].kind == Tok::kOp && (t_[k].text == "=" || t_[k].text == "." || t_[k].text == ":" ||
                                   t_[k].text == ",")) {
      return false;
    }
    while (k < t_.size() && t_[k].kind != Tok::kNewline && t_[k].kind != Tok::kEnd) ++k;
    return k + 1 < t_.size() && t_[k - 1].kind == Tok::kOp && t_[k - 1].text == ":" &&
           t_[k + 1].kind == Tok::kIndent;
  }

  StmtPtr Match() {
    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::kBlock;
    s->line = Next().line;
    SkipHeader();
    ExpectNewline();
    if (Peek().kind != Tok::kIndent) Fail("expected an indented block");
    Next();
    while (Peek().kind != Tok::kDedent && Peek().kind != Tok::kEnd) {
      if (!AcceptKw("case")) Fail("expected 'case'");
      SkipHeader();
      Suite(s->body);
    }
    if (Peek().kind == Tok::kDedent) Next();
    return s;
  }

  // Skips tokens through the ':' that ends a block header.
  void SkipHeader() {
    while (!(Peek().kind == Tok::kOp && Peek().text == ":" &&
             (Peek(1).kind == Tok::kNewline || Peek(1).kind == Tok::kEnd))) {
      if (Peek().kind == Tok::kNewline || Peek().kind == Tok::kEnd) Fail("expected ':'");
      Next();
    }
    Next();
  }

  void Suite(std::vector<StmtPtr>& body) {
    if (Peek().kind == Tok::kNewline) {
      Next();
      if (Peek().kind != Tok::kIndent) Fail("expected an indented block");
      Next();
      while (Peek().kind != Tok::kDedent && Peek().kind != Tok::kEnd) {
        if (Peek().kind == Tok::kNewline) {
          Next();
          continue;
        }
        Statement(body);
      }
      if (Peek().kind == Tok::kDedent) Next();
    } else {
      SimpleStatements(body);
    }
  }

  void BlockTail(Stmt& s) {
    ExpectOp(":");
    Suite(s.body);
  }

  StmtPtr Compound() {
    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::kBlock;
    s->line = Peek().line;
    std::string w = Next().text;
    if (w == "if" || w == "while") {
      NamedExpression();
      BlockTail(*s);
      while (w == "if" && AcceptKw("elif")) {
        NamedExpression();
        BlockTail(*s);
      }
      if (AcceptKw("else")) BlockTail(*s);
    } else if (w == "for") {
      TargetList();
      ExpectKw("in");
      StarExpressions();
      BlockTail(*s);
      if (AcceptKw("else")) BlockTail(*s);
    } else if (w == "try") {
      BlockTail(*s);
      bool handlers = false;
      while (AcceptKw("except")) {
        handlers = true;
        AcceptOp("*");
        if (!IsOp(":")) {
          Expression();
          if (AcceptOp(",")) Expression();
          if (AcceptKw("as")) ExpectName();
        }
        BlockTail(*s);
      }
      if (handlers && AcceptKw("else")) BlockTail(*s);
      bool final = false;
      if (AcceptKw("finally")) {
        final = true;
        BlockTail(*s);
      }
      if (!handlers && !final) Fail("expected 'except' or 'finally'");
    } else {  // with
      if (!ParenthesizedWithItems()) WithItems();
      BlockTail(*s);
    }
    return s;
  }

  bool ParenthesizedWithItems() {
    if (!IsOp("(")) return false;
    std::size_t save = i_;
    try {
      Next();
      WithItems();
      ExpectOp(")");
      if (!IsOp(":")) throw SyntaxError(0, "");
      return true;
    } catch (const SyntaxError&) {
      i_ = save;
      return false;
    }
  }

  void WithItems() {
    do {
      if (IsOp(")")) break;
      Expression();
      if (AcceptKw("as")) Target();
    } while (AcceptOp(","));
  }

  StmtPtr FunctionDef() {
    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::kFunctionDef;
    s->line = Next().line;
    s->name = ExpectName();
    if (IsOp("[")) SkipBrackets();
    ExpectOp("(");
    Params(s->params, ")", true);
    ExpectOp(")");
    if (AcceptOp("->")) Expression();
    BlockTail(*s);
    return s;
  }

  void SkipBrackets() {
    int depth = 0;
    do {
      if (IsOp("[") || IsOp("(")) ++depth;
      if (IsOp("]") || IsOp(")")) --depth;
      Next();
    } while (depth > 0);
  }

  void Params(std::vector<Param>& out, const char* close, bool annotations) {
    while (!IsOp(close)) {
      Param p;
      if (AcceptOp("/")) {
      } else if (AcceptOp("**")) {
        p.name = "**" + ExpectName();
        if (annotations && AcceptOp(":")) p.annotation = Expression();
      } else if (AcceptOp("*")) {
        if (!IsOp(",") && !IsOp(close)) {
          p.name = "*" + ExpectName();
          if (annotations && AcceptOp(":")) p.annotation = IsOp("*") ? (Next(), Expression()) : Expression();
        }
      } else {
        p.name = ExpectName();
        if (annotations && AcceptOp(":")) p.annotation = Expression();
        if (AcceptOp("=")) p.default_value = Expression();
      }
      if (!p.name.empty()) out.push_back(std::move(p));
      if (!AcceptOp(",")) break;
    }
  }

  StmtPtr ClassDef() {
    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::kClassDef;
    s->line = Next().line;
    s->name = ExpectName();
    if (IsOp("[")) SkipBrackets();
    if (AcceptOp("(")) {
      while (!IsOp(")")) {
        if (AcceptOp("**")) {
          s->exprs.push_back(Expression());
          s->keywords.push_back("**");
        } else if (AcceptOp("*")) {
          s->exprs.push_back(Expression());
          s->keywords.push_back("*");
        } else if (Peek().kind == Tok::kName && IsOp("=", 1)) {
          s->keywords.push_back(Next().text);
          Next();
          s->exprs.push_back(Expression());
        } else {
          s->exprs.push_back(Expression());
          s->keywords.push_back("");
        }
        if (!AcceptOp(",")) break;
      }
      ExpectOp(")");
    }
    BlockTail(*s);
    return s;
  }

  void SimpleStatements(std::vector<StmtPtr>& out) {
    while (true) {
      out.push_back(SmallStatement());
      if (!AcceptOp(";")) break;
      if (Peek().kind == Tok::kNewline || Peek().kind == Tok::kEnd) break;
    }
    ExpectNewline();
  }

  StmtPtr SmallStatement() {
    auto s = std::make_unique<Stmt>();
    s->line = Peek().line;
    const Token& t = Peek();
    if (t.kind == Tok::kName) {
      const std::string& w = t.text;
      if (w == "pass" || w == "break" || w == "continue") {
        Next();
        return s;
      }
      if (w == "return") {
        Next();
        s->kind = StmtKind::kReturn;
        if (!AtStatementEnd()) s->exprs.push_back(StarExpressions());
        return s;
      }
      if (w == "raise") {
        Next();
        if (!AtStatementEnd()) {
          Expression();
          if (AcceptKw("from")) Expression();
        }
        return s;
      }
      if (w == "global" || w == "nonlocal") {
        Next();
        do ExpectName(); while (AcceptOp(","));
        return s;
      }
      if (w == "del") {
        Next();
        TargetList();
        return s;
      }
      if (w == "assert") {
        Next();
        Expression();
        if (AcceptOp(",")) Expression();
        return s;
      }
      if (w == "import") {
        Next();
        s->kind = StmtKind::kImport;
        do {
          ImportName n{DottedName(), ""};
          if (AcceptKw("as")) n.asname = ExpectName();
          s->names.push_back(std::move(n));
        } while (AcceptOp(","));
        return s;
      }
      if (w == "from") {
        Next();
        s->kind = StmtKind::kImportFrom;
        while (IsOp(".") || IsOp("...")) s->level += static_cast<int>(Next().text.size());
        if (!IsKw("import")) s->name = DottedName();
        if (s->level == 0 && s->name.empty()) Fail("expected a module name");
        ExpectKw("import");
        if (AcceptOp("*")) {
          s->names.push_back(ImportName{"*", ""});
          return s;
        }
        bool paren = AcceptOp("(");
        do {
          if (paren && IsOp(")")) break;
          ImportName n{ExpectName(), ""};
          if (AcceptKw("as")) n.asname = ExpectName();
          s->names.push_back(std::move(n));
        } while (AcceptOp(","));
        if (paren) ExpectOp(")");
        return s;
      }
      if (w == "type" && Peek(1).kind == Tok::kName && (IsOp("=", 2) || IsOp("[", 2))) {
        Next();
        Next();
        if (IsOp("[")) SkipBrackets();
        ExpectOp("=");
        Expression();
        return s;
      }
    }
    ExprPtr first = IsKw("yield") ? Yield() : StarExpressions();
    if (AcceptOp(":")) {
      s->kind = StmtKind::kAnnAssign;
      s->exprs.push_back(std::move(first));
      s->exprs.push_back(Expression());
      if (AcceptOp("=")) s->exprs.push_back(IsKw("yield") ? Yield() : StarExpressions());
      return s;
    }
    static const char* kAug[] = {"+=", "-=", "*=", "/=", "//=", "%=", "@=", "&=", "|=", "^=", ">>=", "<<=", "**="};
    for (const char* op : kAug) {
      if (AcceptOp(op)) {
        s->kind = StmtKind::kAugAssign;
        s->exprs.push_back(std::move(first));
        s->exprs.push_back(IsKw("yield") ? Yield() : StarExpressions());
        return s;
      }
    }
    if (IsOp("=")) {
      s->kind = StmtKind::kAssign;
      s->exprs.push_back(std::move(first));
      while (AcceptOp("=")) s->exprs.push_back(IsKw("yield") ? Yield() : StarExpressions());
      return s;
    }
    return s;
  }

  bool AtStatementEnd() const {
    return Peek().kind == Tok::kNewline || Peek().kind == Tok::kEnd || IsOp(";");
  }

  std::string DottedName() {
    std::string name = ExpectName();
    while (AcceptOp(".")) name += "." + ExpectName();
    return name;
  }

  // ---- expressions ----

  ExprPtr Target() {
    if (AcceptOp("*")) {
      auto e = Make(ExprKind::kStarred, Peek().line);
      e->children.push_back(BitOr());
      return e;
    }
    return BitOr();
  }

  ExprPtr TargetList() {
    int line = Peek().line;
    ExprPtr first = Target();
    if (!IsOp(",")) return first;
    auto tuple = Make(ExprKind::kTuple, line);
    tuple->children.push_back(std::move(first));
    while (AcceptOp(",")) {
      if (IsKw("in") || IsOp("=") || AtStatementEnd()) break;
      tuple->children.push_back(Target());
    }
    return tuple;
  }

  ExprPtr StarExpressions() {
    int line = Peek().line;
    ExprPtr first = StarExpression();
    if (!IsOp(",")) return first;
    auto tuple = Make(ExprKind::kTuple, line);
    tuple->children.push_back(std::move(first));
    while (AcceptOp(",")) {
      if (!StartsExpression()) break;
      tuple->children.push_back(StarExpression());
    }
    return tuple;
  }

  bool StartsExpression() const {
    const Token& t = Peek();
    switch (t.kind) {
      case Tok::kName:
        return !Keywords().count(t.text) || t.text == "None" || t.text == "True" ||
               t.text == "False" || t.text == "not" || t.text == "lambda" || t.text == "await" ||
               t.text == "yield";
      case Tok::kNumber:
      case Tok::kString:
        return true;
      case Tok::kOp:
        return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" ||
               t.text == "+" || t.text == "~" || t.text == "*" || t.text == "..." || t.text == "**";
      default:
        return false;
    }
  }

  ExprPtr StarExpression() {
    if (IsOp("*")) {
      auto e = Make(ExprKind::kStarred, Next().line);
      e->children.push_back(BitOr());
      return e;
    }
    return NamedExpression();
  }

  ExprPtr NamedExpression() {
    if (Peek().kind == Tok::kName && IsOp(":=", 1)) {
      auto e = Make(ExprKind::kOther, Peek().line, "walrus");
      Next();
      Next();
      e->children.push_back(Expression());
      return e;
    }
    return Expression();
  }

  ExprPtr Yield() {
    auto e = Make(ExprKind::kOther, Next().line, "yield");
    if (AcceptKw("from")) {
      e->children.push_back(Expression());
    } else if (StartsExpression()) {
      e->children.push_back(StarExpressions());
    }
    return e;
  }

  ExprPtr Expression() {
    if (IsKw("lambda")) {
      auto e = Make(ExprKind::kLambda, Next().line);
      std::vector<Param> params;
      Params(params, ":", false);
      ExpectOp(":");
      e->children.push_back(Expression());
      return e;
    }
    int line = Peek().line;
    ExprPtr body = Disjunction();
    if (!IsKw("if")) return body;
    Next();
    auto e = Make(ExprKind::kIfExp, line);
    e->children.push_back(std::move(body));
    e->children.push_back(Disjunction());
    ExpectKw("else");
    e->children.push_back(Expression());
    return e;
  }

  ExprPtr Disjunction() { return BoolChain("or", &Parser::Conjunction); }
  ExprPtr Conjunction() { return BoolChain("and", &Parser::Inversion); }

  ExprPtr BoolChain(const char* op, ExprPtr (Parser::*next)()) {
    int line = Peek().line;
    ExprPtr first = (this->*next)();
    if (!IsKw(op)) return first;
    auto e = Make(ExprKind::kBoolOp, line, op);
    e->children.push_back(std::move(first));
    while (AcceptKw(op)) e->children.push_back((this->*next)());
    return e;
  }

  ExprPtr Inversion() {
    if (IsKw("not")) {
      auto e = Make(ExprKind::kUnary, Next().line, "not");
      e->children.push_back(Inversion());
      return e;
    }
    return Comparison();
  }

  bool AcceptCompareOp() {
    static const char* kOps[] = {"<", ">", "==", ">=", "<=", "!="};
    for (const char* op : kOps) {
      if (AcceptOp(op)) return true;
    }
    if (AcceptKw("in")) return true;
    if (IsKw("not") && IsKw("in", 1)) {
      Next();
      Next();
      return true;
    }
    if (AcceptKw("is")) {
      AcceptKw("not");
      return true;
    }
    return false;
  }

  ExprPtr Comparison() {
    int line = Peek().line;
    ExprPtr first = BitOr();
    if (!AcceptCompareOp()) return first;
    auto e = Make(ExprKind::kCompare, line);
    e->children.push_back(std::move(first));
    do e->children.push_back(BitOr());
    while (AcceptCompareOp());
    return e;
  }

  ExprPtr Binary(std::initializer_list<const char*> ops, ExprPtr (Parser::*next)()) {
    int line = Peek().line;
    ExprPtr left = (this->*next)();
    while (true) {
      const char* hit = nullptr;
      for (const char* op : ops) {
        if (IsOp(op)) hit = op;
      }
      if (!hit) return left;
      Next();
      auto e = Make(ExprKind::kBinOp, line, hit);
      e->children.push_back(std::move(left));
      e->children.push_back((this->*next)());
      left = std::move(e);
    }
  }

  ExprPtr BitOr() { return Binary({"|"}, &Parser::BitXor); }
  ExprPtr BitXor() { return Binary({"^"}, &Parser::BitAnd); }
  ExprPtr BitAnd() { return Binary({"&"}, &Parser::Shift); }
  ExprPtr Shift() { return Binary({"<<", ">>"}, &Parser::Sum); }
  ExprPtr Sum() { return Binary({"+", "-"}, &Parser::Term); }
  ExprPtr Term() { return Binary({"*", "/", "//", "%", "@"}, &Parser::Factor); }

  ExprPtr Factor() {
    if (IsOp("+") || IsOp("-") || IsOp("~")) {
      const Token& t = Next();
      auto e = Make(ExprKind::kUnary, t.line, t.text);
      e->children.push_back(Factor());
      return e;
    }
    return Power();
  }

  ExprPtr Power() {
    int line = Peek().line;
    ExprPtr base = AwaitPrimary();
    if (!AcceptOp("**")) return base;
    auto e = Make(ExprKind::kBinOp, line, "**");
    e->children.push_back(std::move(base));
    e->children.push_back(Factor());
    return e;
  }

  ExprPtr AwaitPrimary() {
    if (IsKw("await")) {
      auto e = Make(ExprKind::kOther, Next().line, "await");
      e->children.push_back(Primary());
      return e;
    }
    return Primary();
  }

  ExprPtr Primary() {
    ExprPtr e = Atom();
    while (true) {
      int line = Peek().line;
      if (AcceptOp(".")) {
        auto a = Make(ExprKind::kAttribute, line, ExpectName());
        a->children.push_back(std::move(e));
        e = std::move(a);
      } else if (AcceptOp("(")) {
        auto c = Make(ExprKind::kCall, line);
        c->children.push_back(std::move(e));
        Arguments(*c);
        ExpectOp(")");
        e = std::move(c);
      } else if (AcceptOp("[")) {
        auto s = Make(ExprKind::kSubscript, line);
        s->children.push_back(std::move(e));
        s->children.push_back(Slices());
        ExpectOp("]");
        e = std::move(s);
      } else {
        return e;
      }
    }
  }

  void Arguments(Expr& call) {
    while (!IsOp(")")) {
      if (AcceptOp("**")) {
        call.children.push_back(Expression());
        call.keywords.push_back("**");
      } else if (AcceptOp("*")) {
        call.children.push_back(Expression());
        call.keywords.push_back("*");
      } else if (Peek().kind == Tok::kName && IsOp("=", 1)) {
        call.keywords.push_back(Next().text);
        Next();
        call.children.push_back(Expression());
      } else {
        ExprPtr arg = NamedExpression();
        if (IsKw("for") || (IsKw("async") && IsKw("for", 1))) arg = Comprehension(std::move(arg));
        call.children.push_back(std::move(arg));
        call.keywords.push_back("");
      }
      if (!AcceptOp(",")) break;
    }
  }

  ExprPtr Slices() {
    int line = Peek().line;
    ExprPtr first = Slice();
    if (!IsOp(",")) return first;
    auto tuple = Make(ExprKind::kTuple, line);
    tuple->children.push_back(std::move(first));
    while (AcceptOp(",")) {
      if (IsOp("]")) break;
      tuple->children.push_back(Slice());
    }
    return tuple;
  }

  ExprPtr Slice() {
    int line = Peek().line;
    ExprPtr lower;
    if (!IsOp(":")) {
      lower = StarExpression();
      if (!IsOp(":")) return lower;
    }
    auto s = Make(ExprKind::kSlice, line);
    while (AcceptOp(":")) {
      if (!IsOp(":") && !IsOp("]") && !IsOp(",")) s->children.push_back(Expression());
    }
    return s;
  }

  ExprPtr Comprehension(ExprPtr element) {
    auto e = Make(ExprKind::kComprehension, element->line);
    e->children.push_back(std::move(element));
    while (IsKw("for") || (IsKw("async") && IsKw("for", 1))) {
      AcceptKw("async");
      Next();
      TargetList();
      ExpectKw("in");
      e->children.push_back(Disjunction());
      while (AcceptKw("if")) Disjunction();
    }
    return e;
  }

  ExprPtr Atom() {
    const Token& t = Peek();
    int line = t.line;
    switch (t.kind) {
      case Tok::kName: {
        if (t.text == "None" || t.text == "True" || t.text == "False") {
          auto e = Make(ExprKind::kConstant, line, t.text);
          e->const_kind = t.text == "None" ? ConstKind::kNone
                          : t.text == "True" ? ConstKind::kTrue
                                             : ConstKind::kFalse;
          Next();
          return e;
        }
        if (Keywords().count(t.text)) Fail("invalid syntax");
        return Make(ExprKind::kName, line, Next().text);
      }
      case Tok::kNumber: {
        auto e = Make(ExprKind::kConstant, line, Next().text);
        const std::string& n = e->text;
        bool hex = n.size() > 1 && n[0] == '0' && std::strchr("xXoObB", n[1]);
        if (!hex && (n.back() == 'j' || n.back() == 'J')) {
          e->const_kind = ConstKind::kComplex;
        } else if (!hex && n.find_first_of(".eE") != std::string::npos) {
          e->const_kind = ConstKind::kFloat;
        } else {
          e->const_kind = ConstKind::kInt;
        }
        return e;
      }
      case Tok::kString: {
        auto e = Make(ExprKind::kConstant, line);
        e->const_kind = t.bytes ? ConstKind::kBytes : ConstKind::kStr;
        bool fstring = false;
        while (Peek().kind == Tok::kString) {
          fstring |= Peek().fstring;
          e->text += Next().text;
        }
        if (fstring) e->kind = ExprKind::kJoinedStr;
        return e;
      }
      case Tok::kOp:
        break;
      default:
        Fail("invalid syntax");
    }
    if (AcceptOp("...")) {
      auto e = Make(ExprKind::kConstant, line, "...");
      e->const_kind = ConstKind::kEllipsis;
      return e;
    }
    if (AcceptOp("(")) {
      if (AcceptOp(")")) return Make(ExprKind::kTuple, line);
      if (IsKw("yield")) {
        ExprPtr y = Yield();
        ExpectOp(")");
        return y;
      }
      ExprPtr first = StarExpression();
      if (IsKw("for") || (IsKw("async") && IsKw("for", 1))) {
        ExprPtr c = Comprehension(std::move(first));
        ExpectOp(")");
        return c;
      }
      if (!IsOp(",")) {
        ExpectOp(")");
        return first;
      }
      auto tuple = Make(ExprKind::kTuple, line);
      tuple->children.push_back(std::move(first));
      while (AcceptOp(",")) {
        if (IsOp(")")) break;
        tuple->children.push_back(StarExpression());
      }
      ExpectOp(")");
      return tuple;
    }
    if (AcceptOp("[")) {
      auto list = Make(ExprKind::kList, line);
      if (AcceptOp("]")) return list;
      ExprPtr first = StarExpression();
      if (IsKw("for") || (IsKw("async") && IsKw("for", 1))) {
        ExprPtr c = Comprehension(std::move(first));
        ExpectOp("]");
        return c;
      }
      list->children.push_back(std::move(first));
      while (AcceptOp(",")) {
        if (IsOp("]")) break;
        list->children.push_back(StarExpression());
      }
      ExpectOp("]");
      return list;
    }
    if (AcceptOp("{")) {
      if (AcceptOp("}")) return Make(ExprKind::kDict, line);
      ExprPtr key;
      ExprPtr value;
      if (AcceptOp("**")) {
        value = BitOr();
      } else {
        key = StarExpression();
        if (!AcceptOp(":")) {
          // A set.
          if (IsKw("for") || (IsKw("async") && IsKw("for", 1))) {
            ExprPtr c = Comprehension(std::move(key));
            ExpectOp("}");
            return c;
          }
          auto set = Make(ExprKind::kSet, line);
          set->children.push_back(std::move(key));
          while (AcceptOp(",")) {
            if (IsOp("}")) break;
            set->children.push_back(StarExpression());
          }
          ExpectOp("}");
          return set;
        }
        value = Expression();
        if (IsKw("for") || (IsKw("async") && IsKw("for", 1))) {
          ExprPtr c = Comprehension(std::move(value));
          ExpectOp("}");
          return c;
        }
      }
      auto dict = Make(ExprKind::kDict, line);
      dict->children.push_back(std::move(key));
      dict->children.push_back(std::move(value));
      while (AcceptOp(",")) {
        if (IsOp("}")) break;
        if (AcceptOp("**")) {
          dict->children.push_back(nullptr);
          dict->children.push_back(BitOr());
        } else {
          dict->children.push_back(Expression());
          ExpectOp(":");
          dict->children.push_back(Expression());
        }
      }
      ExpectOp("}");
      return dict;
    }
    Fail("invalid syntax");
  }

  std::vector<Token> t_;
  std::size_t i_ = 0;
};

}  // namespace

std::vector<StmtPtr> ParseModule(std::string_view source) {
  if (source.substr(0, 3) == "\xEF\xBB\xBF") source.remove_prefix(3);
  return Parser(Lexer(source).Run()).Module();
}

ExprPtr ParseExpression(std::string_view source) {
  return Parser(Lexer(source).Run()).SingleExpression();
}

}  // namespace pickleward::py
