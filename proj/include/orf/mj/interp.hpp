#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "orf/mj/method.hpp"

namespace orf::mj {

using Value = std::variant<int64_t, double, bool>;

MjType value_type(const Value& v);
std::string print_value(const Value& v);

struct Invocation {
  std::string method_name;
  std::vector<Value> args;
};

enum class RuntimeErrorKind { DivByZero, StepLimit, AbsentMethod, ArityMismatch };

const char* runtime_error_name(RuntimeErrorKind k);

struct EvalOutcome {
  bool ok = true;
  std::vector<Value> values;  // one per evaluated invocation when ok
  RuntimeErrorKind error = RuntimeErrorKind::DivByZero;

  static EvalOutcome success(std::vector<Value> vs) { return {true, std::move(vs), RuntimeErrorKind::DivByZero}; }
  static EvalOutcome failure(RuntimeErrorKind k) { return {false, {}, k}; }
};

// Outcome equality as used by the labeler: Values compared element-wise with
// Num compared by bit pattern, except that +0.0 and -0.0 compare equal;
// distinct error kinds are unequal; any error differs from any value list.
bool outcomes_equal(const EvalOutcome& a, const EvalOutcome& b);

inline constexpr int64_t kDefaultStepLimit = 100000;

// Evaluates `calls` in order, each under a fresh environment. The step budget
// is shared across the whole call list. Deterministic; stops at the first
// runtime error.
EvalOutcome evaluate(const std::vector<SourceMethod>& program,
                     const std::vector<Invocation>& calls,
                     int64_t step_limit = kDefaultStepLimit);

}  // namespace orf::mj
