#include "levinforge/ast.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace levinforge {

const char* prim_name(PrimOp op) {
  switch (op) {
    case PrimOp::Add: return "+";
    case PrimOp::Sub: return "-";
    case PrimOp::Mul: return "*";
    case PrimOp::Eq: return "=";
    case PrimOp::Lt: return "<";
    case PrimOp::ConsBit: return "cons";
  }
  return "?";
}

namespace {

void write_node(std::string& out, const Program& p, int32_t idx,
                std::span<const std::string> nt_names);

// Writes a define chain: items separated by single spaces.
void write_chain(std::string& out, const Program& p, int32_t idx,
                 std::span<const std::string> nt_names) {
  bool first = true;
  while (idx >= 0) {
    if (!first) out.push_back(' ');
    first = false;
    const Node& n = p.nodes[idx];
    if (n.kind == NodeKind::Define) {
      out.push_back('(');
      out += "define (";
      out += p.names[n.a];
      out.push_back(' ');
      out += p.names[n.b];
      out += ") ";
      write_chain(out, p, n.c, nt_names);
      out.push_back(')');
      idx = static_cast<int32_t>(n.value);
    } else {
      write_node(out, p, idx, nt_names);
      idx = -1;
    }
  }
}

void write_node(std::string& out, const Program& p, int32_t idx,
                std::span<const std::string> nt_names) {
  const Node& n = p.nodes[idx];
  switch (n.kind) {
    case NodeKind::IntLit:
      out += std::to_string(n.value);
      return;
    case NodeKind::ParamRef:
      out += p.params[n.a];
      return;
    case NodeKind::LocalRef:
      out += p.names[n.a];
      return;
    case NodeKind::NilLit:
      out += "nil";
      return;
    case NodeKind::PrimApp:
      out.push_back('(');
      out += prim_name(n.prim);
      out.push_back(' ');
      write_node(out, p, n.a, nt_names);
      out.push_back(' ');
      write_node(out, p, n.b, nt_names);
      out.push_back(')');
      return;
    case NodeKind::If:
      out += "(if ";
      write_node(out, p, n.a, nt_names);
      out.push_back(' ');
      write_node(out, p, n.b, nt_names);
      out.push_back(' ');
      write_node(out, p, n.c, nt_names);
      out.push_back(')');
      return;
    case NodeKind::Apply:
      out.push_back('(');
      write_node(out, p, n.a, nt_names);
      out.push_back(' ');
      write_node(out, p, n.b, nt_names);
      out.push_back(')');
      return;
    case NodeKind::Lambda:
      out += "(lambda (";
      out += p.names[n.a];
      out += ") ";
      write_node(out, p, n.b, nt_names);
      out.push_back(')');
      return;
    case NodeKind::Define:
      write_chain(out, p, idx, nt_names);
      return;
    case NodeKind::Hole:
      out.push_back('<');
      if (n.a >= 0 && static_cast<size_t>(n.a) < nt_names.size()) {
        out += nt_names[n.a];
      } else {
        out += "nt" + std::to_string(n.a);
      }
      out.push_back('>');
      return;
  }
}

}  // namespace

std::string serialize_node(const Program& p, int32_t node,
                           std::span<const std::string> nt_names) {
  std::string out;
  if (node < 0) return out;
  if (p.nodes[node].kind == NodeKind::Define) {
    write_chain(out, p, node, nt_names);
  } else {
    write_node(out, p, node, nt_names);
  }
  return out;
}

std::string serialize(const Program& p, std::span<const std::string> nt_names) {
  return serialize_node(p, p.root, nt_names);
}

int32_t subtree_size(const Program& p, int32_t node) {
  if (node < 0) return 0;
  const Node& n = p.nodes[node];
  int32_t total = 1;
  switch (n.kind) {
    case NodeKind::PrimApp:
    case NodeKind::Apply:
      total += subtree_size(p, n.a) + subtree_size(p, n.b);
      break;
    case NodeKind::If:
      total += subtree_size(p, n.a) + subtree_size(p, n.b) + subtree_size(p, n.c);
      break;
    case NodeKind::Lambda:
      total += subtree_size(p, n.b);
      break;
    case NodeKind::Define:
      total += subtree_size(p, n.c) + subtree_size(p, static_cast<int32_t>(n.value));
      break;
    default:
      break;
  }
  return total;
}

bool subtree_equal(const Program& a, int32_t na, const Program& b, int32_t nb) {
  if (na < 0 || nb < 0) return na == nb;
  const Node& x = a.nodes[na];
  const Node& y = b.nodes[nb];
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case NodeKind::IntLit:
      return x.value == y.value;
    case NodeKind::ParamRef:
      return a.params[x.a] == b.params[y.a];
    case NodeKind::LocalRef:
      return a.names[x.a] == b.names[y.a];
    case NodeKind::NilLit:
      return true;
    case NodeKind::PrimApp:
      return x.prim == y.prim && subtree_equal(a, x.a, b, y.a) &&
             subtree_equal(a, x.b, b, y.b);
    case NodeKind::If:
      return subtree_equal(a, x.a, b, y.a) && subtree_equal(a, x.b, b, y.b) &&
             subtree_equal(a, x.c, b, y.c);
    case NodeKind::Apply:
      return subtree_equal(a, x.a, b, y.a) && subtree_equal(a, x.b, b, y.b);
    case NodeKind::Lambda:
      return a.names[x.a] == b.names[y.a] && subtree_equal(a, x.b, b, y.b);
    case NodeKind::Define:
      return a.names[x.a] == b.names[y.a] && a.names[x.b] == b.names[y.b] &&
             subtree_equal(a, x.c, b, y.c) &&
             subtree_equal(a, static_cast<int32_t>(x.value), b,
                           static_cast<int32_t>(y.value));
    case NodeKind::Hole:
      return x.a == y.a;
  }
  return false;
}

int32_t intern_name(Program& p, std::string_view name) {
  for (size_t i = 0; i < p.names.size(); ++i) {
    if (p.names[i] == name) return static_cast<int32_t>(i);
  }
  p.names.emplace_back(name);
  return static_cast<int32_t>(p.names.size() - 1);
}

int32_t append_subtree(Program& dst, const Program& src, int32_t src_node) {
  if (src_node < 0) return -1;
  const Node& n = src.nodes[src_node];
  Node copy = n;
  switch (n.kind) {
    case NodeKind::IntLit:
    case NodeKind::NilLit:
    case NodeKind::Hole:
      break;
    case NodeKind::ParamRef: {
      // Parameter tables must agree by spelling; re-map the index.
      const std::string& pname = src.params[n.a];
      int32_t found = -1;
      for (size_t i = 0; i < dst.params.size(); ++i) {
        if (dst.params[i] == pname) { found = static_cast<int32_t>(i); break; }
      }
      if (found < 0) {
        dst.params.push_back(pname);
        found = static_cast<int32_t>(dst.params.size() - 1);
      }
      copy.a = found;
      break;
    }
    case NodeKind::LocalRef:
      copy.a = intern_name(dst, src.names[n.a]);
      break;
    case NodeKind::PrimApp:
    case NodeKind::Apply:
      copy.a = append_subtree(dst, src, n.a);
      copy.b = append_subtree(dst, src, n.b);
      break;
    case NodeKind::If:
      copy.a = append_subtree(dst, src, n.a);
      copy.b = append_subtree(dst, src, n.b);
      copy.c = append_subtree(dst, src, n.c);
      break;
    case NodeKind::Lambda:
      copy.a = intern_name(dst, src.names[n.a]);
      copy.b = append_subtree(dst, src, n.b);
      break;
    case NodeKind::Define:
      copy.a = intern_name(dst, src.names[n.a]);
      copy.b = intern_name(dst, src.names[n.b]);
      copy.c = append_subtree(dst, src, n.c);
      copy.value = append_subtree(dst, src, static_cast<int32_t>(n.value));
      break;
  }
  dst.nodes.push_back(copy);
  return static_cast<int32_t>(dst.nodes.size() - 1);
}

Program extract_subtree(const Program& p, int32_t node) {
  Program out;
  out.params = p.params;
  out.root = append_subtree(out, p, node);
  return out;
}

namespace {

void collect_free(const Program& p, int32_t idx, std::vector<int32_t>& bound,
                  std::set<std::string>& out) {
  if (idx < 0) return;
  const Node& n = p.nodes[idx];
  switch (n.kind) {
    case NodeKind::LocalRef:
      if (std::find(bound.begin(), bound.end(), n.a) == bound.end()) {
        out.insert(p.names[n.a]);
      }
      return;
    case NodeKind::PrimApp:
    case NodeKind::Apply:
      collect_free(p, n.a, bound, out);
      collect_free(p, n.b, bound, out);
      return;
    case NodeKind::If:
      collect_free(p, n.a, bound, out);
      collect_free(p, n.b, bound, out);
      collect_free(p, n.c, bound, out);
      return;
    case NodeKind::Lambda: {
      bound.push_back(n.a);
      collect_free(p, n.b, bound, out);
      bound.pop_back();
      return;
    }
    case NodeKind::Define: {
      // The function name is visible to its own body (recursion) and to the
      // rest of the chain.
      bound.push_back(n.a);
      bound.push_back(n.b);
      collect_free(p, n.c, bound, out);
      bound.pop_back();  // param scope ends with the body
      collect_free(p, static_cast<int32_t>(n.value), bound, out);
      bound.pop_back();
      return;
    }
    default:
      return;
  }
}

}  // namespace

std::vector<std::string> free_locals(const Program& p, int32_t node) {
  std::set<std::string> out;
  std::vector<int32_t> bound;
  collect_free(p, node, bound, out);
  return {out.begin(), out.end()};
}

}  // namespace levinforge
