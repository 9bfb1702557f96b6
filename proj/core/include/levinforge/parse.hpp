#pragma once

#include <stdexcept>
#include <string>

#include "levinforge/ast.hpp"

namespace levinforge {

// Lexical or structural error; `position` is a byte offset into the input.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string msg, size_t position)
      : std::runtime_error(std::move(msg)), position_(position) {}
  size_t position() const { return position_; }

 private:
  size_t position_;
};

// Reference to an identifier bound by no enclosing lambda, define, or
// problem parameter.
class UnboundVariableError : public std::runtime_error {
 public:
  UnboundVariableError(const std::string& name, size_t position)
      : std::runtime_error("unbound variable: " + name),
        name_(name),
        position_(position) {}
  const std::string& name() const { return name_; }
  size_t position() const { return position_; }

 private:
  std::string name_;
  size_t position_;
};

// Parses a program. `params` are the ambient problem parameters (free
// occurrences of these spellings become ParamRef). Integer literals are
// restricted to 0, 1, 2. Every other identifier must be bound by an
// enclosing lambda or define.
Program parse(std::string_view text, std::span<const std::string> params);

// Parses a grammar production template: like parse(), but `<name>` tokens
// become Hole nodes (index into `nt_names`) and identifiers bound by no
// enclosing scope are admitted as free LocalRefs (their validity is checked
// by grammar-level binding analysis).
Program parse_template(std::string_view text,
                       std::span<const std::string> params,
                       std::span<const std::string> nt_names);

}  // namespace levinforge
