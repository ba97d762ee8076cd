#include "dexp/syntax.h"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace dexp {

ExprPtr make_literal(Value value, Span span) {
  return std::make_shared<const Expr>(
      Expr{Expr::Literal{std::move(value)}, span});
}

ExprPtr make_variable(std::string name, Span span) {
  return std::make_shared<const Expr>(
      Expr{Expr::Variable{std::move(name)}, span});
}

ExprPtr make_member(ExprPtr instance, std::string member,
                    std::vector<ExprPtr> args, Span span, Span member_span) {
  return std::make_shared<const Expr>(
      Expr{Expr::Member{std::move(instance), std::move(member),
                        std::move(args), member_span},
           span});
}

ExprPtr make_lambda(std::string param, ExprPtr body, Span span) {
  return std::make_shared<const Expr>(
      Expr{Expr::Lambda{std::move(param), std::move(body)}, span});
}

namespace {

enum class Tok {
  kIdent,
  kNumber,
  kString,
  kDot,
  kLParen,
  kRParen,
  kComma,
  kEquals,
  kArrow,
  kLet,
  kFun,
  kSemicolon,
  kNewline,
  kError,
  kEnd,
};

struct Token {
  Tok kind;
  Span span;
  std::string text;  // identifier name, string contents, or error message
  double number = 0;
};

bool ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

constexpr std::string_view kLambda = "\xCE\xBB";  // λ
constexpr std::string_view kRightArrow = "\xE2\x86\x92";  // →

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Tok k, std::size_t b, std::size_t e, std::string text = {}) {
    out.push_back(Token{k, Span{b, e}, std::move(text)});
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else if (c == '\n') {
      push(Tok::kNewline, i, i + 1);
      ++i;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (ident_start(c)) {
      std::size_t b = i;
      while (i < s.size() && ident_char(s[i])) ++i;
      std::string word(s.substr(b, i - b));
      if (word == "let") {
        push(Tok::kLet, b, i);
      } else if (word == "fun") {
        push(Tok::kFun, b, i);
      } else {
        push(Tok::kIdent, b, i, std::move(word));
      }
    } else if (c == '\'') {
      std::size_t b = i++;
      while (i < s.size() && s[i] != '\'' && s[i] != '\n') ++i;
      if (i < s.size() && s[i] == '\'') {
        std::string name(s.substr(b + 1, i - b - 1));
        ++i;
        if (name.empty()) {
          push(Tok::kError, b, i, "empty quoted identifier");
        } else {
          push(Tok::kIdent, b, i, std::move(name));
        }
      } else {
        push(Tok::kError, b, i, "unterminated quoted identifier");
      }
    } else if (digit(c) || (c == '-' && i + 1 < s.size() && digit(s[i + 1]))) {
      std::size_t b = i;
      if (c == '-') ++i;
      while (i < s.size() && digit(s[i])) ++i;
      if (i + 1 < s.size() && s[i] == '.' && digit(s[i + 1])) {
        ++i;
        while (i < s.size() && digit(s[i])) ++i;
      }
      double v = 0;
      auto res = std::from_chars(s.data() + b, s.data() + i, v);
      if (res.ec != std::errc()) {
        push(Tok::kError, b, i, "number out of range");
      } else {
        out.push_back(Token{Tok::kNumber, Span{b, i}, {}, v});
      }
    } else if (c == '"') {
      std::size_t b = i++;
      std::string text;
      bool closed = false;
      while (i < s.size() && s[i] != '\n') {
        if (s[i] == '"') {
          closed = true;
          ++i;
          break;
        }
        if (s[i] == '\\' && i + 1 < s.size() &&
            (s[i + 1] == '"' || s[i + 1] == '\\')) {
          text += s[i + 1];
          i += 2;
          continue;
        }
        text += s[i++];
      }
      if (closed) {
        push(Tok::kString, b, i, std::move(text));
      } else {
        push(Tok::kError, b, i, "unterminated string");
      }
    } else if (c == '.') {
      push(Tok::kDot, i, i + 1);
      ++i;
    } else if (c == '(') {
      push(Tok::kLParen, i, i + 1);
      ++i;
    } else if (c == ')') {
      push(Tok::kRParen, i, i + 1);
      ++i;
    } else if (c == ',') {
      push(Tok::kComma, i, i + 1);
      ++i;
    } else if (c == '=') {
      push(Tok::kEquals, i, i + 1);
      ++i;
    } else if (c == ';') {
      push(Tok::kSemicolon, i, i + 1);
      ++i;
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      push(Tok::kArrow, i, i + 2);
      i += 2;
    } else if (s.substr(i, kLambda.size()) == kLambda) {
      push(Tok::kFun, i, i + kLambda.size());
      i += kLambda.size();
    } else if (s.substr(i, kRightArrow.size()) == kRightArrow) {
      push(Tok::kArrow, i, i + kRightArrow.size());
      i += kRightArrow.size();
    } else {
      // Swallow a whole UTF-8 sequence so spans stay on code point bounds.
      std::size_t b = i++;
      while (i < s.size() && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80)
        ++i;
      push(Tok::kError, b, i, "unexpected character");
    }
  }
  return out;
}

struct SyntaxError {
  std::size_t location;
  std::string message;
};

class SegmentParser {
 public:
  SegmentParser(const std::vector<Token>& toks, std::size_t begin,
                std::size_t end, std::size_t eof_offset)
      : toks_(toks), pos_(begin), end_(end), eof_(eof_offset) {}

  Command command() {
    Command cmd;
    std::size_t first = peek().span.begin;
    if (peek().kind == Tok::kLet) {
      advance();
      const Token& name = expect(Tok::kIdent, "expected a name after let");
      cmd.let_name = name.text;
      expect(Tok::kEquals, "expected '=' in let binding");
    }
    cmd.body = term();
    if (peek().kind != Tok::kEnd) fail_at(peek(), "unexpected token");
    cmd.text_span = Span{first, last_end_};
    return cmd;
  }

 private:
  const Token& peek() {
    skip_newlines();
    if (pos_ >= end_) {
      end_token_ = Token{Tok::kEnd, Span{eof_, eof_}, {}};
      return end_token_;
    }
    return toks_[pos_];
  }

  const Token& advance() {
    const Token& t = peek();
    if (t.kind != Tok::kEnd) {
      ++pos_;
      last_end_ = t.span.end;
    }
    return t;
  }

  void skip_newlines() {
    while (pos_ < end_ && toks_[pos_].kind == Tok::kNewline) ++pos_;
  }

  [[noreturn]] void fail_at(const Token& t, std::string message) {
    if (t.kind == Tok::kError) message = t.text;
    if (t.kind == Tok::kEnd) message += " (unexpected end of command)";
    throw SyntaxError{t.span.begin, std::move(message)};
  }

  const Token& expect(Tok kind, const char* message) {
    if (peek().kind != kind) fail_at(peek(), message);
    return advance();
  }

  ExprPtr term() {
    const Token& t = peek();
    ExprPtr e;
    switch (t.kind) {
      case Tok::kNumber:
        advance();
        e = make_literal(Value::number(t.number), t.span);
        break;
      case Tok::kString:
        advance();
        e = make_literal(Value::string(t.text), t.span);
        break;
      case Tok::kIdent:
        advance();
        e = make_variable(t.text, t.span);
        break;
      case Tok::kFun:
        fail_at(t, "a function may only appear as a member argument");
      default:
        fail_at(t, "expected a term");
    }
    while (peek().kind == Tok::kDot) {
      advance();
      const Token& name = expect(Tok::kIdent, "expected a member name");
      Span member_span = name.span;
      std::string member = name.text;
      std::vector<ExprPtr> args;
      if (peek().kind == Tok::kLParen) {
        advance();
        if (peek().kind != Tok::kRParen) {
          args.push_back(expr());
          while (peek().kind == Tok::kComma) {
            advance();
            args.push_back(expr());
          }
        }
        expect(Tok::kRParen, "expected ')' or ','");
      }
      Span span{e->span.begin, last_end_};
      e = make_member(std::move(e), std::move(member), std::move(args), span,
                      member_span);
    }
    return e;
  }

  ExprPtr expr() {
    if (peek().kind == Tok::kFun) {
      std::size_t begin = advance().span.begin;
      const Token& param = expect(Tok::kIdent, "expected a parameter name");
      std::string name = param.text;
      expect(Tok::kArrow, "expected '->'");
      ExprPtr body = expr();
      return make_lambda(std::move(name), std::move(body),
                         Span{begin, last_end_});
    }
    return term();
  }

  const std::vector<Token>& toks_;
  std::size_t pos_;
  std::size_t end_;
  std::size_t eof_;
  std::size_t last_end_ = 0;
  Token end_token_{Tok::kEnd, {}, {}};
};

struct Segment {
  std::size_t tok_begin;
  std::size_t tok_end;  // exclusive, separator not included
  Span span;
};

bool starts_new_line_command(std::string_view text, std::size_t offset) {
  if (offset >= text.size()) return false;
  char c = text[offset];
  return c != ' ' && c != '\t' && c != '\r' && c != '\n' && c != ')' &&
         c != '#';
}

std::vector<Segment> segment(std::string_view text,
                             const std::vector<Token>& toks) {
  std::vector<Segment> segs;
  std::size_t start_tok = 0;
  std::size_t span_start = 0;
  int depth = 0;
  bool has_content = false;

  auto close = [&](std::size_t tok_end, std::size_t span_end) {
    if (has_content) {
      segs.push_back(Segment{start_tok, tok_end, Span{span_start, span_end}});
      span_start = span_end;
    }
    has_content = false;
    depth = 0;
  };

  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    if (t.kind == Tok::kSemicolon && depth == 0) {
      close(i, t.span.end);
      start_tok = i + 1;
      continue;
    }
    if (t.kind == Tok::kNewline) {
      if (depth == 0 ||
          (has_content && starts_new_line_command(text, t.span.end))) {
        close(i, t.span.end);
        start_tok = i + 1;
      }
      continue;
    }
    if (!has_content) start_tok = i;
    has_content = true;
    if (t.kind == Tok::kLParen) ++depth;
    if (t.kind == Tok::kRParen && depth > 0) --depth;
  }
  close(toks.size(), text.size());
  if (!segs.empty()) segs.back().span.end = text.size();
  return segs;
}

}  // namespace

Program parse(std::string_view text) {
  std::vector<Token> toks = lex(text);
  Program program;
  for (const Segment& seg : segment(text, toks)) {
    // Errors past a separator-less segment end are reported at the last
    // content token.
    std::size_t eof = seg.span.end;
    for (std::size_t i = seg.tok_end; i > seg.tok_begin; --i) {
      if (toks[i - 1].kind != Tok::kNewline) {
        eof = toks[i - 1].span.end;
        break;
      }
    }
    SegmentParser parser(toks, seg.tok_begin, seg.tok_end, eof);
    try {
      Command cmd = parser.command();
      cmd.span = seg.span;
      program.commands.push_back(std::move(cmd));
    } catch (const SyntaxError& err) {
      program.errors.push_back(
          ParseError{seg.span, err.message, seg.span.end, err.location});
    }
  }
  return program;
}

bool is_bare_identifier(std::string_view name) {
  if (name.empty() || !ident_start(name[0])) return false;
  if (!std::all_of(name.begin(), name.end(), ident_char)) return false;
  return name != "let" && name != "fun";
}

std::string quote_identifier(std::string_view name) {
  if (is_bare_identifier(name)) return std::string(name);
  return "'" + std::string(name) + "'";
}

namespace {

void print(const Expr& e, std::string& out) {
  if (auto* lit = e.literal()) {
    const Value& v = lit->value;
    if (v.is_number()) {
      double n = v.as_number();
      char buf[512];
      auto res =
          std::to_chars(buf, buf + sizeof buf, n, std::chars_format::fixed);
      out.append(buf, res.ptr);
    } else {
      out += v.serialize();
    }
  } else if (auto* var = e.variable()) {
    out += quote_identifier(var->name);
  } else if (auto* mem = e.member()) {
    print(*mem->instance, out);
    out += '.';
    out += quote_identifier(mem->member);
    if (!mem->args.empty()) {
      out += '(';
      for (std::size_t i = 0; i < mem->args.size(); ++i) {
        if (i) out += ", ";
        print(*mem->args[i], out);
      }
      out += ')';
    }
  } else if (auto* lam = e.lambda()) {
    out += "fun ";
    out += quote_identifier(lam->param);
    out += " -> ";
    print(*lam->body, out);
  }
}

}  // namespace

std::string pretty(const Expr& expr) {
  std::string out;
  print(expr, out);
  return out;
}

std::string pretty(const Command& command) {
  std::string out;
  if (command.let_name) {
    out = "let " + quote_identifier(*command.let_name) + " = ";
  }
  print(*command.body, out);
  return out;
}

std::string pretty(const Program& program) {
  if (!program.ok()) {
    throw std::invalid_argument("cannot print a program with parse errors");
  }
  std::string out;
  for (std::size_t i = 0; i < program.commands.size(); ++i) {
    if (i) out += '\n';
    out += pretty(program.commands[i]);
  }
  return out;
}

namespace {

void innermost(const Expr& e, std::size_t offset, const Expr*& best) {
  if (!e.span.touches(offset)) return;
  if (!best || e.span.length() <= best->span.length()) best = &e;
  if (auto* mem = e.member()) {
    innermost(*mem->instance, offset, best);
    for (const auto& a : mem->args) innermost(*a, offset, best);
  } else if (auto* lam = e.lambda()) {
    innermost(*lam->body, offset, best);
  }
}

}  // namespace

std::optional<CursorHit> node_at_cursor(const Program& program,
                                        std::size_t offset) {
  for (std::size_t i = 0; i < program.commands.size(); ++i) {
    const Command& cmd = program.commands[i];
    if (!cmd.text_span.touches(offset)) continue;
    const Expr* best = nullptr;
    innermost(*cmd.body, offset, best);
    return CursorHit{i, best ? best : cmd.body.get()};
  }
  return std::nullopt;
}

bool same_structure(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* la = a.literal()) return la->value == b.literal()->value;
  if (auto* va = a.variable()) return va->name == b.variable()->name;
  if (auto* ma = a.member()) {
    auto* mb = b.member();
    if (ma->member != mb->member || ma->args.size() != mb->args.size())
      return false;
    if (!same_structure(*ma->instance, *mb->instance)) return false;
    for (std::size_t i = 0; i < ma->args.size(); ++i) {
      if (!same_structure(*ma->args[i], *mb->args[i])) return false;
    }
    return true;
  }
  auto* fa = a.lambda();
  auto* fb = b.lambda();
  return fa->param == fb->param && same_structure(*fa->body, *fb->body);
}

bool same_structure(const Program& a, const Program& b) {
  if (a.commands.size() != b.commands.size()) return false;
  for (std::size_t i = 0; i < a.commands.size(); ++i) {
    const Command& x = a.commands[i];
    const Command& y = b.commands[i];
    if (x.let_name != y.let_name) return false;
    if (!same_structure(*x.body, *y.body)) return false;
  }
  return true;
}

namespace {

void collect_free(const Expr& e, std::vector<std::string>& bound,
                  std::set<std::string>& out) {
  if (auto* var = e.variable()) {
    if (std::find(bound.begin(), bound.end(), var->name) == bound.end())
      out.insert(var->name);
  } else if (auto* mem = e.member()) {
    collect_free(*mem->instance, bound, out);
    for (const auto& a : mem->args) collect_free(*a, bound, out);
  } else if (auto* lam = e.lambda()) {
    bound.push_back(lam->param);
    collect_free(*lam->body, bound, out);
    bound.pop_back();
  }
}

std::string fresh_name(const std::string& base,
                       const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!avoid.count(candidate)) return candidate;
  }
}

}  // namespace

std::set<std::string> free_variables(const Expr& expr) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  collect_free(expr, bound, out);
  return out;
}

ExprPtr substitute(const ExprPtr& expr, std::string_view name,
                   const ExprPtr& replacement) {
  const Expr& e = *expr;
  if (auto* var = e.variable()) {
    return var->name == name ? replacement : expr;
  }
  if (auto* mem = e.member()) {
    bool changed = false;
    ExprPtr inst = substitute(mem->instance, name, replacement);
    changed |= inst != mem->instance;
    std::vector<ExprPtr> args;
    args.reserve(mem->args.size());
    for (const auto& a : mem->args) {
      args.push_back(substitute(a, name, replacement));
      changed |= args.back() != a;
    }
    if (!changed) return expr;
    return make_member(std::move(inst), mem->member, std::move(args), e.span,
                       mem->member_span);
  }
  if (auto* lam = e.lambda()) {
    if (lam->param == name) return expr;
    std::set<std::string> body_free = free_variables(*lam->body);
    if (!body_free.count(std::string(name))) return expr;
    std::set<std::string> repl_free = free_variables(*replacement);
    if (repl_free.count(lam->param)) {
      std::set<std::string> avoid = repl_free;
      avoid.insert(body_free.begin(), body_free.end());
      avoid.insert(std::string(name));
      std::string renamed = fresh_name(lam->param, avoid);
      ExprPtr body =
          substitute(lam->body, lam->param, make_variable(renamed));
      return make_lambda(renamed, substitute(body, name, replacement), e.span);
    }
    return make_lambda(lam->param, substitute(lam->body, name, replacement),
                       e.span);
  }
  return expr;
}

std::size_t member_depth(const Expr& expr) {
  if (auto* mem = expr.member()) {
    std::size_t d = member_depth(*mem->instance);
    for (const auto& a : mem->args) d = std::max(d, member_depth(*a));
    return d + 1;
  }
  if (auto* lam = expr.lambda()) return member_depth(*lam->body);
  return 0;
}

ExprPtr value_to_expr(const Value& value) {
  if (value.is_closure()) {
    const Closure& c = value.as_closure();
    return make_lambda(c.param, c.body);
  }
  return make_literal(value);
}

}  // namespace dexp
