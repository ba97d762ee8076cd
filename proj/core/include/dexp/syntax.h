#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dexp/value.h"

namespace dexp {

/// Half-open byte range into the source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - begin; }
  /// Cursor containment: a cursor sitting right after the last byte still
  /// counts as inside.
  bool touches(std::size_t offset) const {
    return begin <= offset && offset <= end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

/// Expression node. Terms are literals, variables and member accesses;
/// lambdas may only appear as member-access arguments.
struct Expr {
  struct Literal {
    Value value;
  };
  struct Variable {
    std::string name;
  };
  struct Member {
    ExprPtr instance;
    std::string member;
    std::vector<ExprPtr> args;
    Span member_span;
  };
  struct Lambda {
    std::string param;
    ExprPtr body;
  };

  std::variant<Literal, Variable, Member, Lambda> node;
  Span span;

  const Literal* literal() const { return std::get_if<Literal>(&node); }
  const Variable* variable() const { return std::get_if<Variable>(&node); }
  const Member* member() const { return std::get_if<Member>(&node); }
  const Lambda* lambda() const { return std::get_if<Lambda>(&node); }
};

ExprPtr make_literal(Value value, Span span = {});
ExprPtr make_variable(std::string name, Span span = {});
ExprPtr make_member(ExprPtr instance, std::string member,
                    std::vector<ExprPtr> args, Span span = {},
                    Span member_span = {});
ExprPtr make_lambda(std::string param, ExprPtr body, Span span = {});

struct Command {
  /// Set for `let name = body`.
  std::optional<std::string> let_name;
  ExprPtr body;
  /// Whole source segment owned by the command, separators and
  /// surrounding blank space included.
  Span span;
  /// From the first to the last token of the command.
  Span text_span;

  bool is_let() const { return let_name.has_value(); }
};

struct ParseError {
  Span span;
  std::string message;
  std::size_t recovered_at = 0;
  /// Offset of the offending token.
  std::size_t location = 0;
};

struct Program {
  /// Well-formed commands in source order.
  std::vector<Command> commands;
  /// One entry per segment that failed to parse, in source order.
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty(); }
};

/// Error-recovering parser. Never fails: every segment (a line, or a
/// `;`-separated piece) that does not parse becomes a ParseError and the
/// remaining segments are parsed independently.
Program parse(std::string_view text);

/// Source form of a program with no parse errors; throws
/// std::invalid_argument otherwise.
std::string pretty(const Program& program);
std::string pretty(const Command& command);
std::string pretty(const Expr& expr);

/// Identifier as it must be written in source (quoted when needed).
std::string quote_identifier(std::string_view name);
bool is_bare_identifier(std::string_view name);

struct CursorHit {
  std::size_t command = 0;
  const Expr* expr = nullptr;
};

/// Innermost expression under the cursor, preferring the smallest span.
/// A cursor inside a command but not on any expression resolves to the
/// command body; a cursor outside every command resolves to nothing.
std::optional<CursorHit> node_at_cursor(const Program& program,
                                        std::size_t offset);

/// Equality ignoring spans.
bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const Program& a, const Program& b);

std::set<std::string> free_variables(const Expr& expr);

/// Capture-avoiding substitution of `replacement` for free occurrences of
/// `name`. Lambda parameters that would capture a free variable of the
/// replacement are renamed.
ExprPtr substitute(const ExprPtr& expr, std::string_view name,
                   const ExprPtr& replacement);

/// Expression depth counting member accesses only.
std::size_t member_depth(const Expr& expr);

/// Expression form of a value: closures become lambdas, everything else a
/// literal.
ExprPtr value_to_expr(const Value& value);

}  // namespace dexp
