#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace levinforge {

// Binary primitives of the object language. `if` is a node kind of its own
// because only one branch is evaluated.
enum class PrimOp : uint8_t { Add, Sub, Mul, Eq, Lt, ConsBit };

const char* prim_name(PrimOp op);

enum class NodeKind : uint8_t {
  IntLit,    // value = literal (parser admits 0/1/2 only)
  ParamRef,  // a = index into Program::params
  LocalRef,  // a = index into Program::names (define/lambda-bound, resolved at runtime)
  NilLit,    // empty bit-list
  PrimApp,   // prim; a, b = operands
  If,        // a = condition, b = then, c = else
  Apply,     // a = callee expression, b = argument (functions are unary)
  Lambda,    // a = param name id, b = body expression
  Define,    // a = function name id, b = param name id, c = body head, value = next body item (-1 = none)
  Hole,      // grammar templates only; a = nonterminal index
};

// Flat arena node. Child links are arena indices; -1 means absent.
struct Node {
  NodeKind kind{};
  PrimOp prim{};
  int32_t a = -1;
  int32_t b = -1;
  int32_t c = -1;
  int64_t value = 0;
};

// A program (or grammar template fragment) in a flat arena.
//
// The root is either an expression or the head of a Define chain. A chain
// item is a Define node whose `value` field links the next item: another
// Define or the final expression. A define-only program (no final
// expression) denotes "apply the last defined function to the arguments".
struct Program {
  std::vector<Node> nodes;
  int32_t root = -1;
  std::vector<std::string> params;  // ambient problem parameters, by ParamRef index
  std::vector<std::string> names;   // local identifiers, by name id

  bool empty() const { return root < 0; }
};

// Canonical serialization: single spaces, lowercase atoms, no trailing
// whitespace. parse(serialize(p)) reproduces p; serialize(parse(s)) == s for
// canonical s. `nt_names` supplies spellings for Hole nodes (templates).
std::string serialize(const Program& p,
                      std::span<const std::string> nt_names = {});
std::string serialize_node(const Program& p, int32_t node,
                           std::span<const std::string> nt_names = {});

// Number of arena nodes reachable from `node` (Hole nodes count as 1).
int32_t subtree_size(const Program& p, int32_t node);

// Deep structural equality of two subtrees (names compared by spelling).
bool subtree_equal(const Program& a, int32_t na, const Program& b, int32_t nb);

// Copies the subtree rooted at `node` into a standalone Program that shares
// `p`'s parameter list. Local names are re-interned.
Program extract_subtree(const Program& p, int32_t node);

// Local names referenced but not bound inside the subtree. ParamRefs are not
// reported (parameters are ambient). Sorted, unique spellings.
std::vector<std::string> free_locals(const Program& p, int32_t node);

// Appends a deep copy of `src`'s subtree at `src_node` to `dst`, re-mapping
// child indices and interning local names into dst.names. Returns the new
// root index. Hole nodes are copied verbatim (callers that expand grammar
// templates replace them).
int32_t append_subtree(Program& dst, const Program& src, int32_t src_node);

// Interns `name` into p.names, returning its id.
int32_t intern_name(Program& p, std::string_view name);

}  // namespace levinforge
