#include "orf/mutate.hpp"

#include <algorithm>
#include <map>

#include "orf/mj/printer.hpp"
#include "orf/mj/typecheck.hpp"

namespace orf {

const char* operator_name(MutationOperator op) {
  switch (op) {
    case MutationOperator::AOR: return "AOR";
    case MutationOperator::ROR: return "ROR";
    case MutationOperator::LOR: return "LOR";
    case MutationOperator::NegCond: return "NegCond";
    case MutationOperator::ConstRep: return "ConstRep";
    case MutationOperator::ParenShift: return "ParenShift";
  }
  return "?";
}

MutationOperator operator_from_name(const std::string& name) {
  for (auto op : {MutationOperator::AOR, MutationOperator::ROR, MutationOperator::LOR,
                  MutationOperator::NegCond, MutationOperator::ConstRep, MutationOperator::ParenShift})
    if (name == operator_name(op)) return op;
  throw std::runtime_error("unknown mutation operator '" + name + "'");
}

namespace {

void collect_expr_nodes(mj::Expr* e, std::vector<mj::Expr*>& out) {
  out.push_back(e);
  for (auto& c : e->children) collect_expr_nodes(c.get(), out);
}

std::vector<mj::Expr*> stmt_expr_nodes(mj::Stmt& s) {
  std::vector<mj::Expr*> out;
  if (s.expr) collect_expr_nodes(s.expr.get(), out);
  return out;
}

const std::map<std::string, std::string>& aor_table() {
  static const std::map<std::string, std::string> t = {{"+", "-"}, {"-", "+"}, {"*", "/"}, {"/", "*"}};
  return t;
}

const std::map<std::string, std::string>& ror_table() {
  static const std::map<std::string, std::string> t = {{"<", "<="}, {"<=", "<"}, {">", ">="},
                                                       {">=", ">"}, {"==", "!="}, {"!=", "=="}};
  return t;
}

// Applies an AST-level operator at `node`; returns false when the node does
// not match the operator's pattern.
bool rewrite_node(mj::Stmt& stmt, mj::Expr* node, MutationOperator op, int variant) {
  using K = mj::Expr::Kind;
  switch (op) {
    case MutationOperator::AOR: {
      if (node->kind != K::Binary) return false;
      auto it = aor_table().find(node->op);
      if (it == aor_table().end()) return false;
      node->op = it->second;
      return true;
    }
    case MutationOperator::ROR: {
      if (node->kind != K::Binary) return false;
      auto it = ror_table().find(node->op);
      if (it == ror_table().end()) return false;
      node->op = it->second;
      return true;
    }
    case MutationOperator::LOR: {
      if (node->kind != K::Binary) return false;
      if (node->op == "&&") node->op = "||";
      else if (node->op == "||") node->op = "&&";
      else return false;
      return true;
    }
    case MutationOperator::NegCond: {
      if (stmt.kind != mj::Stmt::Kind::If && stmt.kind != mj::Stmt::Kind::While) return false;
      if (node != stmt.expr.get()) return false;
      auto paren = std::make_unique<mj::Expr>();
      paren->kind = K::Paren;
      paren->children.push_back(std::move(stmt.expr));
      auto neg = std::make_unique<mj::Expr>();
      neg->kind = K::Unary;
      neg->op = "!";
      neg->children.push_back(std::move(paren));
      stmt.expr = std::move(neg);
      return true;
    }
    case MutationOperator::ConstRep: {
      if (node->kind == K::IntLit) {
        if (variant == 0) {
          node->int_val += 1;
          return true;
        }
        if (variant == 1 && node->int_val != 0 && node->int_val != -1) {
          node->int_val = 0;
          return true;
        }
        return false;
      }
      if (node->kind == K::NumLit) {
        if (variant != 0) return false;
        node->num_val = -node->num_val;
        return true;
      }
      if (node->kind == K::BoolLit) {
        if (variant != 0) return false;
        node->bool_val = !node->bool_val;
        return true;
      }
      return false;
    }
    case MutationOperator::ParenShift:
      return false;  // handled at the token level
  }
  return false;
}

mj::Stmt* find_stmt(mj::Method& m, int id) {
  for (mj::Stmt* s : all_stmts(m))
    if (s->id == id) return s;
  return nullptr;
}

// Moves the ')' at statement-relative token offset `node` to the end of the
// statement's expression (just before ';'), mirroring a parenthesis displaced
// to the end of an assignment. Returns the space-joined full-method text.
std::string shift_paren_text(const mj::SourceMethod& method, const mj::Stmt& stmt, int node) {
  int abs_pos = stmt.tok_begin + node;
  if (abs_pos <= stmt.tok_begin || abs_pos >= stmt.tok_end - 1) throw NotApplicable();
  if (method.tokens[abs_pos].lexeme != ")") throw NotApplicable();
  if (method.tokens[stmt.tok_end].lexeme != ";") throw NotApplicable();
  std::vector<std::string> lex;
  lex.reserve(method.tokens.size());
  for (size_t i = 0; i < method.tokens.size(); ++i) {
    if (static_cast<int>(i) == abs_pos) continue;
    if (static_cast<int>(i) == stmt.tok_end) lex.push_back(")");
    lex.push_back(method.tokens[i].lexeme);
  }
  std::string out;
  for (size_t i = 0; i < lex.size(); ++i) {
    if (i) out += ' ';
    out += lex[i];
  }
  return out;
}

bool is_simple_stmt(const mj::Stmt& s) {
  return s.kind == mj::Stmt::Kind::Decl || s.kind == mj::Stmt::Kind::Assign ||
         s.kind == mj::Stmt::Kind::Return;
}

bool compilable(const std::string& source) {
  try {
    mj::parse_method(source);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::string apply_mutable(const mj::SourceMethod& method, const Mutable& m) {
  if (m.op == MutationOperator::ParenShift) {
    mj::Method ast = method.ast.clone();
    const mj::Stmt* stmt = find_stmt(ast, m.stmt);
    if (!stmt || !is_simple_stmt(*stmt)) throw NotApplicable();
    return shift_paren_text(method, *stmt, m.node);
  }
  mj::Method ast = method.ast.clone();
  mj::Stmt* stmt = find_stmt(ast, m.stmt);
  if (!stmt) throw NotApplicable();
  auto nodes = stmt_expr_nodes(*stmt);
  if (m.node < 0 || m.node >= static_cast<int>(nodes.size())) throw NotApplicable();
  if (!rewrite_node(*stmt, nodes[m.node], m.op, m.variant)) throw NotApplicable();
  return print(ast);
}

std::vector<Mutable> enumerate_mutables(const mj::SourceMethod& method) {
  std::vector<Mutable> out;
  const std::string parent_printed = print(method.ast);
  mj::Method scratch = method.ast.clone();
  for (mj::Stmt* s : all_stmts(scratch)) {
    auto nodes = stmt_expr_nodes(*s);
    for (int ni = 0; ni < static_cast<int>(nodes.size()); ++ni) {
      for (auto op : {MutationOperator::AOR, MutationOperator::ROR, MutationOperator::LOR,
                      MutationOperator::NegCond, MutationOperator::ConstRep}) {
        int max_variant = (op == MutationOperator::ConstRep) ? 2 : 1;
        for (int v = 0; v < max_variant; ++v) {
          Mutable m{op, s->id, ni, v};
          try {
            std::string src = apply_mutable(method, m);
            if (src != parent_printed && compilable(src)) out.push_back(m);
          } catch (const NotApplicable&) {
          }
        }
      }
    }
    if (is_simple_stmt(*s)) {
      for (int p = s->tok_begin + 1; p < s->tok_end - 1; ++p) {
        if (method.tokens[p].lexeme != ")") continue;
        Mutable m{MutationOperator::ParenShift, s->id, p - s->tok_begin, 0};
        try {
          std::string src = apply_mutable(method, m);
          if (!compilable(src)) continue;
          if (print(mj::parse_method(src).ast) != parent_printed) out.push_back(m);
        } catch (const NotApplicable&) {
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Mutable& a, const Mutable& b) {
    return std::tie(a.stmt, a.node, a.op, a.variant) < std::tie(b.stmt, b.node, b.op, b.variant);
  });
  return out;
}

Mutant generate_hom(const mj::SourceMethod& method, int order, std::mt19937_64& rng, bool shuffle) {
  std::vector<Mutable> sites = enumerate_mutables(method);
  if (shuffle) std::shuffle(sites.begin(), sites.end(), rng);

  const std::string parent_printed = print(method.ast);
  mj::SourceMethod cur = mj::parse_method(parent_printed);
  Mutant hom;
  hom.parent = method.name;
  int counter = order;
  for (const Mutable& m : sites) {
    if (counter <= 0) break;
    std::string src;
    try {
      src = apply_mutable(cur, m);
    } catch (const NotApplicable&) {
      continue;  // the site changed under an earlier rewrite
    }
    if (!compilable(src)) break;  // revert and terminate with the accumulated mutant
    std::string canonical = print(mj::parse_method(src).ast);
    if (canonical == print(cur.ast)) continue;
    cur = mj::parse_method(canonical);
    hom.applied.push_back(m);
    --counter;
  }
  if (hom.applied.empty() || print(cur.ast) == parent_printed) throw NoMutant();
  hom.source = cur.source;
  hom.order = static_cast<int>(hom.applied.size());
  return hom;
}

}  // namespace orf
