#include "levinforge/parse.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace levinforge {

namespace {

constexpr int kMaxNesting = 4096;

struct Token {
  enum Kind { LParen, RParen, Symbol, Int, HoleName, End } kind = End;
  std::string text;
  int64_t value = 0;
  size_t pos = 0;
};

class Lexer {
 public:
  Lexer(std::string_view text, bool allow_holes)
      : text_(text), allow_holes_(allow_holes) {
    scan();
  }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    scan();
    return t;
  }

  // Lookahead for "(define" without consuming.
  bool at_define() const {
    if (tok_.kind != Token::LParen) return false;
    size_t i = i_;
    while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
    return text_.compare(i, 6, "define") == 0 &&
           (i + 6 == text_.size() || text_[i + 6] == '(' || text_[i + 6] == ')' ||
            std::isspace(static_cast<unsigned char>(text_[i + 6])));
  }

 private:
  void scan() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
    if (i_ >= text_.size()) {
      tok_ = {Token::End, "", 0, text_.size()};
      return;
    }
    size_t start = i_;
    char c = text_[i_];
    if (c == '(') {
      tok_ = {Token::LParen, "(", 0, start};
      ++i_;
      return;
    }
    if (c == ')') {
      tok_ = {Token::RParen, ")", 0, start};
      ++i_;
      return;
    }
    if (c == '<' && allow_holes_) {
      // `<name>` is a hole if '>' arrives before any delimiter; a bare '<'
      // (the less-than primitive) otherwise.
      size_t j = i_ + 1;
      while (j < text_.size() && text_[j] != '>' && text_[j] != '(' &&
             text_[j] != ')' &&
             !std::isspace(static_cast<unsigned char>(text_[j]))) {
        ++j;
      }
      if (j < text_.size() && text_[j] == '>' && j > i_ + 1) {
        tok_ = {Token::HoleName, std::string(text_.substr(i_ + 1, j - i_ - 1)), 0, start};
        i_ = j + 1;
        return;
      }
    }
    size_t j = i_;
    while (j < text_.size() && text_[j] != '(' && text_[j] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[j]))) {
      ++j;
    }
    std::string word(text_.substr(i_, j - i_));
    i_ = j;
    bool digits = std::all_of(word.begin(), word.end(),
                              [](char d) { return d >= '0' && d <= '9'; });
    if (digits && !word.empty()) {
      if (word != "0" && word != "1" && word != "2") {
        throw SyntaxError("integer literals are limited to 0, 1, 2", start);
      }
      tok_ = {Token::Int, word, word[0] - '0', start};
      return;
    }
    tok_ = {Token::Symbol, word, 0, start};
  }

  std::string_view text_;
  bool allow_holes_;
  size_t i_ = 0;
  Token tok_;
};

std::optional<PrimOp> prim_from(const std::string& s) {
  if (s == "+") return PrimOp::Add;
  if (s == "-") return PrimOp::Sub;
  if (s == "*") return PrimOp::Mul;
  if (s == "=") return PrimOp::Eq;
  if (s == "<") return PrimOp::Lt;
  if (s == "cons") return PrimOp::ConsBit;
  return std::nullopt;
}

bool reserved_word(const std::string& s) {
  return s == "if" || s == "lambda" || s == "define" || s == "nil" ||
         prim_from(s).has_value();
}

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> params,
         std::span<const std::string> nt_names, bool template_mode)
      : lex_(text, template_mode),
        params_(params),
        nt_names_(nt_names),
        template_mode_(template_mode) {}

  Program run() {
    Program p;
    p.params.assign(params_.begin(), params_.end());
    std::vector<int32_t> scope;
    p.root = parse_chain(p, scope, /*top_level=*/true, 0);
    if (lex_.peek().kind != Token::End) {
      throw SyntaxError("trailing input after program", lex_.peek().pos);
    }
    return p;
  }

 private:
  Token expect(Token::Kind kind, const char* what) {
    if (lex_.peek().kind != kind) {
      throw SyntaxError(std::string("expected ") + what, lex_.peek().pos);
    }
    return lex_.next();
  }

  std::string expect_identifier(const char* what) {
    Token t = expect(Token::Symbol, what);
    if (reserved_word(t.text)) {
      throw SyntaxError("reserved word used as " + std::string(what), t.pos);
    }
    return t.text;
  }

  // defines* followed by a final expression. The final expression may be
  // absent only at top level (define-only program: last function is applied
  // to the arguments).
  int32_t parse_chain(Program& p, std::vector<int32_t>& scope, bool top_level,
                      int depth) {
    if (depth > kMaxNesting) {
      throw SyntaxError("nesting too deep", lex_.peek().pos);
    }
    std::vector<int32_t> defines;
    size_t base = scope.size();
    while (lex_.at_define()) {
      defines.push_back(parse_define(p, scope, depth));
    }
    int32_t fin = -1;
    const Token& t = lex_.peek();
    if (t.kind != Token::End && t.kind != Token::RParen) {
      fin = parse_expr(p, scope, depth);
    } else if (defines.empty()) {
      throw SyntaxError("expected expression", t.pos);
    } else if (!top_level) {
      throw SyntaxError("define body needs a final expression", t.pos);
    }
    scope.resize(base);
    if (defines.empty()) return fin;
    for (size_t i = 0; i + 1 < defines.size(); ++i) {
      p.nodes[defines[i]].value = defines[i + 1];
    }
    p.nodes[defines.back()].value = fin;
    return defines.front();
  }

  // "(define (name param) body...)". The function name stays in scope for
  // the rest of the enclosing chain (and its own body, for recursion).
  int32_t parse_define(Program& p, std::vector<int32_t>& scope, int depth) {
    expect(Token::LParen, "(");
    expect(Token::Symbol, "define");  // guaranteed by at_define()
    expect(Token::LParen, "( after define");
    std::string fname = expect_identifier("function name");
    std::string pname = expect_identifier("parameter name");
    expect(Token::RParen, ") after parameter");
    int32_t fid = intern_name(p, fname);
    int32_t pid = intern_name(p, pname);
    scope.push_back(fid);
    scope.push_back(pid);
    int32_t body = parse_chain(p, scope, /*top_level=*/false, depth + 1);
    scope.pop_back();  // parameter scope ends with the body
    expect(Token::RParen, ") closing define");
    p.nodes.push_back({NodeKind::Define, PrimOp::Add, fid, pid, body, -1});
    return static_cast<int32_t>(p.nodes.size() - 1);
  }

  int32_t resolve(Program& p, const std::vector<int32_t>& scope,
                  const Token& t) {
    // Innermost local binding wins; problem parameters are the outer scope.
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (p.names[*it] == t.text) {
        p.nodes.push_back({NodeKind::LocalRef, PrimOp::Add, *it, -1, -1, 0});
        return static_cast<int32_t>(p.nodes.size() - 1);
      }
    }
    for (size_t i = 0; i < p.params.size(); ++i) {
      if (p.params[i] == t.text) {
        p.nodes.push_back({NodeKind::ParamRef, PrimOp::Add,
                           static_cast<int32_t>(i), -1, -1, 0});
        return static_cast<int32_t>(p.nodes.size() - 1);
      }
    }
    if (template_mode_) {
      // Free local; grammar binding analysis validates it later.
      int32_t id = intern_name(p, t.text);
      p.nodes.push_back({NodeKind::LocalRef, PrimOp::Add, id, -1, -1, 0});
      return static_cast<int32_t>(p.nodes.size() - 1);
    }
    throw UnboundVariableError(t.text, t.pos);
  }

  int32_t parse_expr(Program& p, std::vector<int32_t>& scope, int depth) {
    if (depth > kMaxNesting) {
      throw SyntaxError("nesting too deep", lex_.peek().pos);
    }
    Token t = lex_.next();
    switch (t.kind) {
      case Token::Int:
        p.nodes.push_back({NodeKind::IntLit, PrimOp::Add, -1, -1, -1, t.value});
        return static_cast<int32_t>(p.nodes.size() - 1);
      case Token::HoleName: {
        for (size_t i = 0; i < nt_names_.size(); ++i) {
          if (nt_names_[i] == t.text) {
            p.nodes.push_back({NodeKind::Hole, PrimOp::Add,
                               static_cast<int32_t>(i), -1, -1, 0});
            return static_cast<int32_t>(p.nodes.size() - 1);
          }
        }
        throw SyntaxError("unknown nonterminal <" + t.text + ">", t.pos);
      }
      case Token::Symbol: {
        if (t.text == "nil") {
          p.nodes.push_back({NodeKind::NilLit, PrimOp::Add, -1, -1, -1, 0});
          return static_cast<int32_t>(p.nodes.size() - 1);
        }
        if (reserved_word(t.text)) {
          throw SyntaxError("misplaced '" + t.text + "'", t.pos);
        }
        return resolve(p, scope, t);
      }
      case Token::LParen:
        return parse_form(p, scope, depth, t.pos);
      case Token::RParen:
        throw SyntaxError("expected expression", t.pos);
      case Token::End:
        throw SyntaxError("unexpected end of input", t.pos);
    }
    throw SyntaxError("unexpected token", t.pos);
  }

  int32_t parse_form(Program& p, std::vector<int32_t>& scope, int depth,
                     size_t open_pos) {
    Token head = lex_.peek();
    if (head.kind == Token::RParen) {
      throw SyntaxError("empty form", open_pos);
    }
    if (head.kind == Token::Symbol) {
      if (head.text == "define") {
        throw SyntaxError("define is only allowed at the start of a body",
                          head.pos);
      }
      if (head.text == "if") {
        lex_.next();
        int32_t c = parse_expr(p, scope, depth + 1);
        int32_t a = parse_expr(p, scope, depth + 1);
        int32_t b = parse_expr(p, scope, depth + 1);
        expect(Token::RParen, ") closing if");
        p.nodes.push_back({NodeKind::If, PrimOp::Add, c, a, b, 0});
        return static_cast<int32_t>(p.nodes.size() - 1);
      }
      if (head.text == "lambda") {
        lex_.next();
        expect(Token::LParen, "( after lambda");
        std::string pname = expect_identifier("parameter name");
        expect(Token::RParen, ") after parameter");
        int32_t pid = intern_name(p, pname);
        scope.push_back(pid);
        int32_t body = parse_expr(p, scope, depth + 1);
        scope.pop_back();
        expect(Token::RParen, ") closing lambda");
        p.nodes.push_back({NodeKind::Lambda, PrimOp::Add, pid, body, -1, 0});
        return static_cast<int32_t>(p.nodes.size() - 1);
      }
      if (auto prim = prim_from(head.text)) {
        lex_.next();
        int32_t a = parse_expr(p, scope, depth + 1);
        int32_t b = parse_expr(p, scope, depth + 1);
        expect(Token::RParen, ") closing primitive");
        p.nodes.push_back({NodeKind::PrimApp, *prim, a, b, -1, 0});
        return static_cast<int32_t>(p.nodes.size() - 1);
      }
    }
    // Application: (callee arg). Functions are unary.
    int32_t callee = parse_expr(p, scope, depth + 1);
    int32_t arg = parse_expr(p, scope, depth + 1);
    expect(Token::RParen, ") closing application");
    p.nodes.push_back({NodeKind::Apply, PrimOp::Add, callee, arg, -1, 0});
    return static_cast<int32_t>(p.nodes.size() - 1);
  }

  Lexer lex_;
  std::span<const std::string> params_;
  std::span<const std::string> nt_names_;
  bool template_mode_;
};

}  // namespace

Program parse(std::string_view text, std::span<const std::string> params) {
  Parser p(text, params, {}, false);
  return p.run();
}

Program parse_template(std::string_view text,
                       std::span<const std::string> params,
                       std::span<const std::string> nt_names) {
  Parser p(text, params, nt_names, true);
  return p.run();
}

}  // namespace levinforge
