#include "orf/mj/typecheck.hpp"

namespace orf::mj {

namespace {

class Checker {
 public:
  Checker(Method& m, const SignatureTable& table) : m_(m), table_(table) {}

  void run() {
    for (const auto& [pname, ptype] : m_.params) {
      if (!vars_.emplace(pname, ptype).second)
        throw TypeError(-1, "duplicate parameter '" + pname + "'");
    }
    check_block(m_.body, vars_);
    if (!always_returns(m_.body))
      throw TypeError(-1, "missing return on all paths in method '" + m_.name + "'");
  }

 private:
  using Scope = std::map<std::string, MjType>;

  void check_block(std::vector<StmtPtr>& stmts, Scope scope) {
    for (auto& s : stmts) check_stmt(*s, scope);
  }

  void check_stmt(Stmt& s, Scope& scope) {
    switch (s.kind) {
      case Stmt::Kind::Decl: {
        MjType t = check_expr(*s.expr, scope, s.id);
        if (t != s.decl_type)
          throw TypeError(s.id, "cannot initialize " + std::string(type_name(s.decl_type)) +
                                    " '" + s.name + "' with " + type_name(t));
        if (scope.count(s.name))
          throw TypeError(s.id, "redeclaration of '" + s.name + "'");
        scope.emplace(s.name, s.decl_type);
        break;
      }
      case Stmt::Kind::Assign: {
        auto it = scope.find(s.name);
        if (it == scope.end()) throw TypeError(s.id, "assignment to undeclared '" + s.name + "'");
        MjType t = check_expr(*s.expr, scope, s.id);
        if (t != it->second)
          throw TypeError(s.id, "cannot assign " + std::string(type_name(t)) + " to " +
                                    type_name(it->second) + " '" + s.name + "'");
        break;
      }
      case Stmt::Kind::If: {
        if (check_expr(*s.expr, scope, s.id) != MjType::Bool)
          throw TypeError(s.id, "if condition must be bool");
        check_block(s.body, scope);
        check_block(s.else_body, scope);
        break;
      }
      case Stmt::Kind::While: {
        if (check_expr(*s.expr, scope, s.id) != MjType::Bool)
          throw TypeError(s.id, "while condition must be bool");
        check_block(s.body, scope);
        break;
      }
      case Stmt::Kind::Return: {
        MjType t = check_expr(*s.expr, scope, s.id);
        if (t != m_.return_type)
          throw TypeError(s.id, "return type mismatch: expected " +
                                    std::string(type_name(m_.return_type)) + ", got " + type_name(t));
        break;
      }
    }
  }

  MjType check_expr(Expr& e, const Scope& scope, int stmt) {
    switch (e.kind) {
      case Expr::Kind::IntLit: return e.type = MjType::Int;
      case Expr::Kind::NumLit: return e.type = MjType::Num;
      case Expr::Kind::BoolLit: return e.type = MjType::Bool;
      case Expr::Kind::Var: {
        auto it = scope.find(e.name);
        if (it == scope.end()) throw TypeError(stmt, "undeclared variable '" + e.name + "'");
        return e.type = it->second;
      }
      case Expr::Kind::Paren:
        return e.type = check_expr(*e.children[0], scope, stmt);
      case Expr::Kind::Cast: {
        MjType t = check_expr(*e.children[0], scope, stmt);
        if (t == MjType::Bool) throw TypeError(stmt, "cannot cast bool");
        return e.type = e.cast_to;
      }
      case Expr::Kind::Unary: {
        MjType t = check_expr(*e.children[0], scope, stmt);
        if (e.op == "-") {
          if (t == MjType::Bool) throw TypeError(stmt, "unary - requires int or num");
          return e.type = t;
        }
        if (t != MjType::Bool) throw TypeError(stmt, "! requires bool");
        return e.type = MjType::Bool;
      }
      case Expr::Kind::Binary: {
        MjType a = check_expr(*e.children[0], scope, stmt);
        MjType b = check_expr(*e.children[1], scope, stmt);
        const std::string& op = e.op;
        if (op == "&&" || op == "||") {
          if (a != MjType::Bool || b != MjType::Bool) throw TypeError(stmt, op + " requires bool operands");
          return e.type = MjType::Bool;
        }
        if (op == "==" || op == "!=") {
          if (a != b) throw TypeError(stmt, op + " requires operands of the same type");
          return e.type = MjType::Bool;
        }
        if (op == "<" || op == "<=" || op == ">" || op == ">=") {
          if (a != b || a == MjType::Bool) throw TypeError(stmt, op + " requires matching int or num operands");
          return e.type = MjType::Bool;
        }
        if (op == "%") {
          if (a != MjType::Int || b != MjType::Int) throw TypeError(stmt, "% requires int operands");
          return e.type = MjType::Int;
        }
        // + - * /
        if (a != b || a == MjType::Bool)
          throw TypeError(stmt, op + " requires matching int or num operands (no implicit coercion)");
        return e.type = a;
      }
      case Expr::Kind::Call: {
        std::vector<MjType> args;
        for (auto& c : e.children) args.push_back(check_expr(*c, scope, stmt));
        if (e.name == "abs") {
          if (args.size() != 1 || args[0] == MjType::Bool)
            throw TypeError(stmt, "abs takes one int or num argument");
          return e.type = args[0];
        }
        auto it = table_.find(e.name);
        if (it == table_.end()) throw TypeError(stmt, "call to unknown method '" + e.name + "'");
        if (it->second.params != args)
          throw TypeError(stmt, "argument mismatch in call to '" + e.name + "'");
        return e.type = it->second.ret;
      }
    }
    throw TypeError(stmt, "unreachable");
  }

  static bool always_returns(const std::vector<StmtPtr>& stmts) {
    for (const auto& s : stmts) {
      if (s->kind == Stmt::Kind::Return) return true;
      if (s->kind == Stmt::Kind::If && !s->else_body.empty() && always_returns(s->body) &&
          always_returns(s->else_body))
        return true;
    }
    return false;
  }

  Method& m_;
  const SignatureTable& table_;
  Scope vars_;
};

}  // namespace

void typecheck(Method& m, const SignatureTable& table) { Checker(m, table).run(); }

}  // namespace orf::mj
