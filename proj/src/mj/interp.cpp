#include "orf/mj/interp.hpp"

#include <cmath>
#include <cstring>
#include <map>

#include "orf/mj/printer.hpp"

namespace orf::mj {

MjType value_type(const Value& v) {
  if (std::holds_alternative<int64_t>(v)) return MjType::Int;
  if (std::holds_alternative<double>(v)) return MjType::Num;
  return MjType::Bool;
}

std::string print_value(const Value& v) {
  switch (v.index()) {
    case 0: return std::to_string(std::get<int64_t>(v));
    case 1: return print_num(std::get<double>(v));
    default: return std::get<bool>(v) ? "true" : "false";
  }
}

const char* runtime_error_name(RuntimeErrorKind k) {
  switch (k) {
    case RuntimeErrorKind::DivByZero: return "DivByZero";
    case RuntimeErrorKind::StepLimit: return "StepLimit";
    case RuntimeErrorKind::AbsentMethod: return "AbsentMethod";
    case RuntimeErrorKind::ArityMismatch: return "ArityMismatch";
  }
  return "?";
}

namespace {

struct RtError {
  RuntimeErrorKind kind;
};

bool num_equal(double a, double b) {
  if (a == b) return true;  // covers +0.0 == -0.0
  uint64_t ba, bb;
  std::memcpy(&ba, &a, 8);
  std::memcpy(&bb, &b, 8);
  return ba == bb;  // NaN equals NaN with the same bit pattern
}

bool values_equal(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<double>(a)) return num_equal(std::get<double>(a), std::get<double>(b));
  return a == b;
}

int64_t wrap_add(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b)); }
int64_t wrap_sub(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) - static_cast<uint64_t>(b)); }
int64_t wrap_mul(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) * static_cast<uint64_t>(b)); }
int64_t wrap_neg(int64_t a) { return static_cast<int64_t>(-static_cast<uint64_t>(a)); }

class Interp {
 public:
  Interp(const std::vector<SourceMethod>& program, int64_t step_limit)
      : limit_(step_limit) {
    for (const auto& m : program) methods_.emplace(m.name, &m);
  }

  Value invoke(const std::string& name, const std::vector<Value>& args, int depth) {
    // Depth guard so runaway recursion hits a deterministic outcome before the
    // native stack does.
    if (depth > 512) throw RtError{RuntimeErrorKind::StepLimit};
    auto it = methods_.find(name);
    if (it == methods_.end()) throw RtError{RuntimeErrorKind::AbsentMethod};
    const SourceMethod& m = *it->second;
    if (args.size() != m.params.size()) throw RtError{RuntimeErrorKind::ArityMismatch};
    std::map<std::string, Value> env;
    for (size_t i = 0; i < args.size(); ++i) {
      if (value_type(args[i]) != m.params[i].second) throw RtError{RuntimeErrorKind::ArityMismatch};
      env.emplace(m.params[i].first, args[i]);
    }
    Value ret{int64_t{0}};
    if (!exec_block(m.ast.body, env, depth, ret))
      throw RtError{RuntimeErrorKind::StepLimit};  // typechecked methods always return
    return ret;
  }

 private:
  void step() {
    if (++steps_ > limit_) throw RtError{RuntimeErrorKind::StepLimit};
  }

  // Returns true when the block executed a return statement.
  bool exec_block(const std::vector<StmtPtr>& stmts, std::map<std::string, Value>& env, int depth,
                  Value& ret) {
    for (const auto& s : stmts) {
      step();
      switch (s->kind) {
        case Stmt::Kind::Decl:
        case Stmt::Kind::Assign:
          env[s->name] = eval(*s->expr, env, depth);
          break;
        case Stmt::Kind::Return:
          ret = eval(*s->expr, env, depth);
          return true;
        case Stmt::Kind::If: {
          bool c = std::get<bool>(eval(*s->expr, env, depth));
          if (exec_block(c ? s->body : s->else_body, env, depth, ret)) return true;
          break;
        }
        case Stmt::Kind::While:
          while (std::get<bool>(eval(*s->expr, env, depth))) {
            if (exec_block(s->body, env, depth, ret)) return true;
            step();  // one step per loop iteration on top of the body's own
          }
          break;
      }
    }
    return false;
  }

  Value eval(const Expr& e, std::map<std::string, Value>& env, int depth) {
    step();
    switch (e.kind) {
      case Expr::Kind::IntLit: return e.int_val;
      case Expr::Kind::NumLit: return e.num_val;
      case Expr::Kind::BoolLit: return e.bool_val;
      case Expr::Kind::Var: return env.at(e.name);
      case Expr::Kind::Paren: return eval(*e.children[0], env, depth);
      case Expr::Kind::Cast: {
        Value v = eval(*e.children[0], env, depth);
        if (e.cast_to == MjType::Int) {
          if (std::holds_alternative<int64_t>(v)) return v;
          double d = std::get<double>(v);
          if (!std::isfinite(d)) return int64_t{0};
          return static_cast<int64_t>(d);
        }
        if (std::holds_alternative<double>(v)) return v;
        return static_cast<double>(std::get<int64_t>(v));
      }
      case Expr::Kind::Unary: {
        Value v = eval(*e.children[0], env, depth);
        if (e.op == "!") return !std::get<bool>(v);
        if (std::holds_alternative<int64_t>(v)) return wrap_neg(std::get<int64_t>(v));
        return -std::get<double>(v);
      }
      case Expr::Kind::Call: {
        std::vector<Value> args;
        for (const auto& c : e.children) args.push_back(eval(*c, env, depth));
        if (e.name == "abs") {
          if (args.size() != 1) throw RtError{RuntimeErrorKind::ArityMismatch};
          if (std::holds_alternative<int64_t>(args[0])) {
            int64_t v = std::get<int64_t>(args[0]);
            return v < 0 ? wrap_neg(v) : v;
          }
          return std::fabs(std::get<double>(args[0]));
        }
        return invoke(e.name, args, depth + 1);
      }
      case Expr::Kind::Binary: {
        const std::string& op = e.op;
        if (op == "&&") {
          if (!std::get<bool>(eval(*e.children[0], env, depth))) return false;
          return std::get<bool>(eval(*e.children[1], env, depth));
        }
        if (op == "||") {
          if (std::get<bool>(eval(*e.children[0], env, depth))) return true;
          return std::get<bool>(eval(*e.children[1], env, depth));
        }
        Value a = eval(*e.children[0], env, depth);
        Value b = eval(*e.children[1], env, depth);
        if (op == "==") return values_equal_raw(a, b);
        if (op == "!=") return !values_equal_raw(a, b);
        if (op == "<" || op == "<=" || op == ">" || op == ">=") {
          if (std::holds_alternative<int64_t>(a)) return cmp(op, std::get<int64_t>(a), std::get<int64_t>(b));
          return cmp(op, std::get<double>(a), std::get<double>(b));
        }
        if (std::holds_alternative<int64_t>(a)) {
          int64_t x = std::get<int64_t>(a), y = std::get<int64_t>(b);
          if (op == "+") return wrap_add(x, y);
          if (op == "-") return wrap_sub(x, y);
          if (op == "*") return wrap_mul(x, y);
          if (y == 0) throw RtError{RuntimeErrorKind::DivByZero};
          if (x == INT64_MIN && y == -1) return x;  // wraps
          if (op == "/") return x / y;
          return x % y;
        }
        double x = std::get<double>(a), y = std::get<double>(b);
        if (op == "+") return x + y;
        if (op == "-") return x - y;
        if (op == "*") return x * y;
        return x / y;  // num division by zero yields IEEE inf/NaN
      }
    }
    throw RtError{RuntimeErrorKind::AbsentMethod};
  }

  // == and != use plain IEEE semantics inside expressions.
  static bool values_equal_raw(const Value& a, const Value& b) {
    if (std::holds_alternative<double>(a)) return std::get<double>(a) == std::get<double>(b);
    return a == b;
  }

  template <typename T>
  static bool cmp(const std::string& op, T a, T b) {
    if (op == "<") return a < b;
    if (op == "<=") return a <= b;
    if (op == ">") return a > b;
    return a >= b;
  }

  std::map<std::string, const SourceMethod*> methods_;
  int64_t limit_;
  int64_t steps_ = 0;
};

}  // namespace

bool outcomes_equal(const EvalOutcome& a, const EvalOutcome& b) {
  if (a.ok != b.ok) return false;
  if (!a.ok) return a.error == b.error;
  if (a.values.size() != b.values.size()) return false;
  for (size_t i = 0; i < a.values.size(); ++i)
    if (!values_equal(a.values[i], b.values[i])) return false;
  return true;
}

EvalOutcome evaluate(const std::vector<SourceMethod>& program, const std::vector<Invocation>& calls,
                     int64_t step_limit) {
  Interp interp(program, step_limit);
  std::vector<Value> results;
  results.reserve(calls.size());
  try {
    for (const auto& c : calls) results.push_back(interp.invoke(c.method_name, c.args, 0));
  } catch (const RtError& e) {
    return EvalOutcome::failure(e.kind);
  }
  return EvalOutcome::success(std::move(results));
}

}  // namespace orf::mj
