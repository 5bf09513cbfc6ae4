#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace orf::mj {

enum class MjType { Int, Num, Bool };

const char* type_name(MjType t);

struct ParseError : std::runtime_error {
  size_t offset;
  ParseError(size_t off, const std::string& msg)
      : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

struct TypeError : std::runtime_error {
  int stmt_id;  // -1 when the error is not tied to a statement
  TypeError(int stmt, const std::string& msg)
      : std::runtime_error(msg + " (statement " + std::to_string(stmt) + ")"), stmt_id(stmt) {}
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind { IntLit, NumLit, BoolLit, Var, Unary, Binary, Call, Paren, Cast };
  Kind kind;
  int64_t int_val = 0;
  double num_val = 0.0;
  bool bool_val = false;
  std::string name;  // Var and Call
  std::string op;    // Unary ("-" or "!") and Binary operators
  MjType cast_to = MjType::Int;
  std::vector<ExprPtr> children;  // Unary/Paren/Cast: 1, Binary: 2, Call: args
  MjType type = MjType::Int;      // filled in by the typechecker

  ExprPtr clone() const;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  enum class Kind { Decl, Assign, If, While, Return };
  Kind kind;
  MjType decl_type = MjType::Int;  // Decl
  std::string name;                // Decl and Assign target
  ExprPtr expr;                    // Decl init, Assign rhs, If/While condition, Return value
  std::vector<StmtPtr> body;       // If then-branch, While body
  std::vector<StmtPtr> else_body;  // If only
  int id = -1;                     // pre-order statement id, assigned after parsing
  // Token span of the whole statement (inclusive), including nested blocks.
  int tok_begin = -1;
  int tok_end = -1;

  StmtPtr clone() const;
};

struct Method {
  std::string name;
  std::vector<std::pair<std::string, MjType>> params;
  MjType return_type = MjType::Int;
  std::vector<StmtPtr> body;

  Method() = default;
  Method(Method&&) = default;
  Method& operator=(Method&&) = default;
  Method(const Method& other) { *this = other.clone(); }
  Method& operator=(const Method& other) {
    if (this != &other) *this = other.clone();
    return *this;
  }
  Method clone() const;
};

bool equal(const Expr& a, const Expr& b);
bool equal(const Stmt& a, const Stmt& b);
bool equal(const Method& a, const Method& b);

// Pre-order statement ids, contiguous from 0. Returns the statement count.
int assign_stmt_ids(Method& m);

// All statements in pre-order (ids must be assigned).
std::vector<Stmt*> all_stmts(Method& m);
std::vector<const Stmt*> all_stmts(const Method& m);

}  // namespace orf::mj
