#include "levinforge/machine.hpp"

#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

namespace levinforge {

using boost::multiprecision::cpp_int;

struct BigIntRep {
  cpp_int v;
};

IntVal IntVal::from_big(BigIntRep&& rep) {
  IntVal out;
  if (rep.v >= std::numeric_limits<int64_t>::min() &&
      rep.v <= std::numeric_limits<int64_t>::max()) {
    out.small_ = static_cast<int64_t>(rep.v);
    return out;
  }
  out.big_ = std::make_shared<const BigIntRep>(std::move(rep));
  return out;
}

IntVal IntVal::add(const IntVal& a, const IntVal& b) {
  if (a.big_ == nullptr && b.big_ == nullptr) {
    int64_t r;
    if (!__builtin_add_overflow(a.small_, b.small_, &r)) return IntVal(r);
  }
  BigIntRep rep;
  rep.v = (a.big_ ? a.big_->v : cpp_int(a.small_)) +
          (b.big_ ? b.big_->v : cpp_int(b.small_));
  return from_big(std::move(rep));
}

IntVal IntVal::sub(const IntVal& a, const IntVal& b) {
  if (a.big_ == nullptr && b.big_ == nullptr) {
    int64_t r;
    if (!__builtin_sub_overflow(a.small_, b.small_, &r)) return IntVal(r);
  }
  BigIntRep rep;
  rep.v = (a.big_ ? a.big_->v : cpp_int(a.small_)) -
          (b.big_ ? b.big_->v : cpp_int(b.small_));
  return from_big(std::move(rep));
}

IntVal IntVal::mul(const IntVal& a, const IntVal& b) {
  if (a.big_ == nullptr && b.big_ == nullptr) {
    int64_t r;
    if (!__builtin_mul_overflow(a.small_, b.small_, &r)) return IntVal(r);
  }
  BigIntRep rep;
  rep.v = (a.big_ ? a.big_->v : cpp_int(a.small_)) *
          (b.big_ ? b.big_->v : cpp_int(b.small_));
  return from_big(std::move(rep));
}

int IntVal::compare(const IntVal& a, const IntVal& b) {
  if (a.big_ == nullptr && b.big_ == nullptr) {
    return a.small_ < b.small_ ? -1 : (a.small_ > b.small_ ? 1 : 0);
  }
  cpp_int x = a.big_ ? a.big_->v : cpp_int(a.small_);
  cpp_int y = b.big_ ? b.big_->v : cpp_int(b.small_);
  return x < y ? -1 : (x > y ? 1 : 0);
}

std::string IntVal::to_string() const {
  if (big_ == nullptr) return std::to_string(small_);
  return big_->v.str();
}

bool value_equal(const Value& a, const Value& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Value::Kind::Int:
      return IntVal::compare(a.i, b.i) == 0;
    case Value::Kind::Bool:
      return a.b == b.b;
    case Value::Kind::Bits:
      return *a.bits == *b.bits;
    case Value::Kind::Closure:
      return false;
  }
  return false;
}

std::string value_to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Int:
      return v.i.to_string();
    case Value::Kind::Bool:
      return v.b ? "#t" : "#f";
    case Value::Kind::Bits: {
      std::string out;
      out.reserve(v.bits->size());
      for (uint8_t bit : *v.bits) out.push_back(bit ? '1' : '0');
      return out;
    }
    case Value::Kind::Closure:
      return "<closure>";
  }
  return "";
}

const char* eval_status_name(EvalStatus s) {
  switch (s) {
    case EvalStatus::Ok: return "ok";
    case EvalStatus::FuelExhausted: return "fuel-exhausted";
    case EvalStatus::TypeError: return "type-error";
    case EvalStatus::CallDepthExceeded: return "call-depth-exceeded";
  }
  return "?";
}

namespace machine_impl {

struct EnvNode {
  int32_t name;
  Value value;
  std::shared_ptr<const EnvNode> parent;
};

using EnvPtr = std::shared_ptr<const EnvNode>;

EnvPtr env_bind(const EnvPtr& parent, int32_t name, Value v) {
  auto node = std::make_shared<EnvNode>();
  node->name = name;
  node->value = std::move(v);
  node->parent = parent;
  return node;
}

const Value* env_lookup(const EnvPtr& env, int32_t name) {
  for (const EnvNode* n = env.get(); n != nullptr; n = n->parent.get()) {
    if (n->name == name) return &n->value;
  }
  return nullptr;
}

}  // namespace machine_impl

using machine_impl::EnvPtr;
using machine_impl::env_bind;
using machine_impl::env_lookup;

struct ClosureData {
  int32_t param_name;
  int32_t body;      // expression node or Define chain head
  EnvPtr env;        // captured environment (self-binding added on call)
  int32_t self_name; // define-bound functions see themselves; -1 for lambda
};

namespace {

class Interp {
 public:
  Interp(const Program& p, std::span<const Value> args, int64_t budget,
         int32_t max_call_depth)
      : p_(p), args_(args), budget_(budget), max_depth_(max_call_depth) {}

  EvalResult run() {
    EvalResult out;
    if (p_.root < 0) {
      out.status = EvalStatus::TypeError;
      return out;
    }
    Value v;
    if (p_.nodes[p_.root].kind == NodeKind::Define) {
      v = eval_chain(p_.root, nullptr, 0);
    } else {
      v = eval(p_.root, nullptr, 0);
    }
    out.status = status_;
    out.value = std::move(v);
    out.consumed = consumed_;
    return out;
  }

 private:
  bool charge() {
    if (consumed_ >= budget_) {
      if (status_ == EvalStatus::Ok) status_ = EvalStatus::FuelExhausted;
      consumed_ = budget_;
      return false;
    }
    ++consumed_;
    return true;
  }

  Value fail(EvalStatus s) {
    if (status_ == EvalStatus::Ok) status_ = s;
    return Value{};
  }

  // Evaluates a Define chain. With a final expression, yields its value;
  // define-only chains (top level) apply the last defined function to
  // args_[0].
  Value eval_chain(int32_t idx, EnvPtr env, int32_t depth) {
    Value last_fn;
    bool have_fn = false;
    while (idx >= 0 && status_ == EvalStatus::Ok) {
      const Node& n = p_.nodes[idx];
      if (n.kind != NodeKind::Define) {
        return eval(idx, env, depth);
      }
      if (!charge()) return Value{};  // definition binding
      auto data = std::make_shared<ClosureData>();
      data->param_name = n.b;
      data->body = n.c;
      data->env = env;
      data->self_name = n.a;
      Value fn;
      fn.kind = Value::Kind::Closure;
      fn.closure = std::move(data);
      env = env_bind(env, n.a, fn);
      last_fn = std::move(fn);
      have_fn = true;
      idx = static_cast<int32_t>(n.value);
    }
    if (status_ != EvalStatus::Ok) return Value{};
    // Define-only program: implicit application to the argument.
    if (!have_fn || args_.empty()) return fail(EvalStatus::TypeError);
    if (!charge()) return Value{};  // the implicit application
    return apply(last_fn, args_[0], depth);
  }

  Value apply(const Value& fn, Value arg, int32_t depth) {
    if (fn.kind != Value::Kind::Closure) return fail(EvalStatus::TypeError);
    if (depth + 1 > max_depth_) return fail(EvalStatus::CallDepthExceeded);
    const ClosureData& c = *fn.closure;
    EnvPtr env = c.env;
    if (c.self_name >= 0) env = env_bind(env, c.self_name, fn);
    env = env_bind(env, c.param_name, std::move(arg));
    if (c.body >= 0 && p_.nodes[c.body].kind == NodeKind::Define) {
      return eval_chain(c.body, env, depth + 1);
    }
    return eval(c.body, env, depth + 1);
  }

  Value eval(int32_t idx, const EnvPtr& env, int32_t depth) {
    if (!charge()) return Value{};
    const Node& n = p_.nodes[idx];
    switch (n.kind) {
      case NodeKind::IntLit:
        return Value::from_int(n.value);
      case NodeKind::ParamRef:
        if (static_cast<size_t>(n.a) >= args_.size()) {
          return fail(EvalStatus::TypeError);
        }
        return args_[n.a];
      case NodeKind::LocalRef: {
        const Value* v = env_lookup(env, n.a);
        if (v == nullptr) return fail(EvalStatus::TypeError);
        return *v;
      }
      case NodeKind::NilLit: {
        Value out;
        out.kind = Value::Kind::Bits;
        out.bits = empty_bits();
        return out;
      }
      case NodeKind::PrimApp: {
        Value a = eval(n.a, env, depth);
        if (status_ != EvalStatus::Ok) return Value{};
        Value b = eval(n.b, env, depth);
        if (status_ != EvalStatus::Ok) return Value{};
        return prim(n.prim, a, b);
      }
      case NodeKind::If: {
        Value c = eval(n.a, env, depth);
        if (status_ != EvalStatus::Ok) return Value{};
        if (c.kind != Value::Kind::Bool) return fail(EvalStatus::TypeError);
        return eval(c.b ? n.b : n.c, env, depth);
      }
      case NodeKind::Apply: {
        Value fn = eval(n.a, env, depth);
        if (status_ != EvalStatus::Ok) return Value{};
        Value arg = eval(n.b, env, depth);
        if (status_ != EvalStatus::Ok) return Value{};
        return apply(fn, std::move(arg), depth);
      }
      case NodeKind::Lambda: {
        auto data = std::make_shared<ClosureData>();
        data->param_name = n.a;
        data->body = n.b;
        data->env = env;
        data->self_name = -1;
        Value out;
        out.kind = Value::Kind::Closure;
        out.closure = std::move(data);
        return out;
      }
      case NodeKind::Define:
        return eval_chain(idx, env, depth);
      case NodeKind::Hole:
        return fail(EvalStatus::TypeError);
    }
    return fail(EvalStatus::TypeError);
  }

  Value prim(PrimOp op, const Value& a, const Value& b) {
    switch (op) {
      case PrimOp::Add:
      case PrimOp::Sub:
      case PrimOp::Mul: {
        if (a.kind != Value::Kind::Int || b.kind != Value::Kind::Int) {
          return fail(EvalStatus::TypeError);
        }
        Value out;
        out.kind = Value::Kind::Int;
        if (op == PrimOp::Add) out.i = IntVal::add(a.i, b.i);
        else if (op == PrimOp::Sub) out.i = IntVal::sub(a.i, b.i);
        else out.i = IntVal::mul(a.i, b.i);
        return out;
      }
      case PrimOp::Eq:
      case PrimOp::Lt: {
        if (a.kind != Value::Kind::Int || b.kind != Value::Kind::Int) {
          return fail(EvalStatus::TypeError);
        }
        int c = IntVal::compare(a.i, b.i);
        return Value::from_bool(op == PrimOp::Eq ? c == 0 : c < 0);
      }
      case PrimOp::ConsBit: {
        if (a.kind != Value::Kind::Int || !a.i.fits_small() ||
            (a.i.small() != 0 && a.i.small() != 1) ||
            b.kind != Value::Kind::Bits) {
          return fail(EvalStatus::TypeError);
        }
        auto out_bits = std::make_shared<BitList>();
        out_bits->reserve(b.bits->size() + 1);
        out_bits->push_back(static_cast<uint8_t>(a.i.small()));
        out_bits->insert(out_bits->end(), b.bits->begin(), b.bits->end());
        Value out;
        out.kind = Value::Kind::Bits;
        out.bits = std::move(out_bits);
        return out;
      }
    }
    return fail(EvalStatus::TypeError);
  }

  static std::shared_ptr<const BitList> empty_bits() {
    static const std::shared_ptr<const BitList> kEmpty =
        std::make_shared<const BitList>();
    return kEmpty;
  }

  const Program& p_;
  std::span<const Value> args_;
  int64_t budget_;
  int32_t max_depth_;
  int64_t consumed_ = 0;
  EvalStatus status_ = EvalStatus::Ok;
};

}  // namespace

EvalResult evaluate(const Program& program, std::span<const Value> args,
                    int64_t budget, int32_t max_call_depth) {
  if (budget < 0) budget = 0;
  Interp interp(program, args, budget, max_call_depth);
  return interp.run();
}

EvalResult step_count(const Program& program, std::span<const Value> args,
                      int64_t budget) {
  return evaluate(program, args, budget);
}

}  // namespace levinforge
