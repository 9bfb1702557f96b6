#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "levinforge/ast.hpp"

namespace levinforge {

// Arbitrary-precision integer behind an int64 fast path. Arithmetic promotes
// to a heap representation on overflow; one operation costs one engine step
// regardless of operand size.
struct BigIntRep;

class IntVal {
 public:
  IntVal() = default;
  explicit IntVal(int64_t v) : small_(v) {}

  static IntVal add(const IntVal& a, const IntVal& b);
  static IntVal sub(const IntVal& a, const IntVal& b);
  static IntVal mul(const IntVal& a, const IntVal& b);
  static int compare(const IntVal& a, const IntVal& b);  // <0, 0, >0

  bool fits_small() const { return big_ == nullptr; }
  int64_t small() const { return small_; }  // valid when fits_small()
  std::string to_string() const;

 private:
  static IntVal from_big(BigIntRep&& rep);
  int64_t small_ = 0;
  std::shared_ptr<const BigIntRep> big_;
};

using BitList = std::vector<uint8_t>;  // elements are 0 or 1

struct ClosureData;

// Runtime value: integer, boolean, bit-list, or closure.
struct Value {
  enum class Kind : uint8_t { Int, Bool, Bits, Closure } kind = Kind::Int;
  IntVal i;
  bool b = false;
  std::shared_ptr<const BitList> bits;
  std::shared_ptr<const ClosureData> closure;

  static Value from_int(int64_t v) {
    Value out;
    out.kind = Kind::Int;
    out.i = IntVal(v);
    return out;
  }
  static Value from_bool(bool v) {
    Value out;
    out.kind = Kind::Bool;
    out.b = v;
    return out;
  }
};

// True for same-kind, structurally equal values; closures never compare
// equal.
bool value_equal(const Value& a, const Value& b);

// "12", "#t"/"#f", bit-lists as "0101" ("" when empty), "<closure>".
std::string value_to_string(const Value& v);

enum class EvalStatus : uint8_t {
  Ok,
  FuelExhausted,      // budget consumed before the program halted
  TypeError,          // operand kind mismatch, non-bit cons head, non-closure call
  CallDepthExceeded,  // recursion deeper than the interpreter stack guard
};

const char* eval_status_name(EvalStatus s);

struct EvalResult {
  EvalStatus status = EvalStatus::Ok;
  Value value;
  int64_t consumed = 0;  // engine steps used; always <= budget
};

inline constexpr int32_t kDefaultMaxCallDepth = 8192;

// Deterministic strict evaluation under a step budget. One step per AST node
// visited (literals and variable lookups included; a definition binding and
// the implicit application of a define-only program each cost one).
//
// args bind the program's parameters positionally; a define-only program
// instead applies its last defined function to args[0]. Failures are
// reported in `status`, never thrown; `consumed` never exceeds `budget`.
EvalResult evaluate(const Program& program, std::span<const Value> args,
                    int64_t budget,
                    int32_t max_call_depth = kDefaultMaxCallDepth);

// Steps a halting program takes: evaluate() under `budget` and return
// consumed. Status is surfaced unchanged for non-halting or failing runs.
EvalResult step_count(const Program& program, std::span<const Value> args,
                      int64_t budget = 1 << 26);

}  // namespace levinforge
