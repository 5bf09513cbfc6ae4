#include <cassert>

#include "orf/mj/lexer.hpp"
#include "orf/mj/method.hpp"
#include "orf/mj/typecheck.hpp"

namespace orf::mj {

// ---------------------------------------------------------------------------
// AST helpers

ExprPtr Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->int_val = int_val;
  e->num_val = num_val;
  e->bool_val = bool_val;
  e->name = name;
  e->op = op;
  e->cast_to = cast_to;
  e->type = type;
  for (const auto& c : children) e->children.push_back(c->clone());
  return e;
}

StmtPtr Stmt::clone() const {
  auto s = std::make_unique<Stmt>();
  s->kind = kind;
  s->decl_type = decl_type;
  s->name = name;
  if (expr) s->expr = expr->clone();
  for (const auto& c : body) s->body.push_back(c->clone());
  for (const auto& c : else_body) s->else_body.push_back(c->clone());
  s->id = id;
  s->tok_begin = tok_begin;
  s->tok_end = tok_end;
  return s;
}

Method Method::clone() const {
  Method m;
  m.name = name;
  m.params = params;
  m.return_type = return_type;
  for (const auto& s : body) m.body.push_back(s->clone());
  return m;
}

bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case Expr::Kind::IntLit:
      if (a.int_val != b.int_val) return false;
      break;
    case Expr::Kind::NumLit:
      if (a.num_val != b.num_val) return false;
      break;
    case Expr::Kind::BoolLit:
      if (a.bool_val != b.bool_val) return false;
      break;
    case Expr::Kind::Var:
    case Expr::Kind::Call:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::Unary:
    case Expr::Kind::Binary:
      if (a.op != b.op) return false;
      break;
    case Expr::Kind::Cast:
      if (a.cast_to != b.cast_to) return false;
      break;
    case Expr::Kind::Paren:
      break;
  }
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!equal(*a.children[i], *b.children[i])) return false;
  return true;
}

bool equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  if (a.kind == Stmt::Kind::Decl && a.decl_type != b.decl_type) return false;
  if (static_cast<bool>(a.expr) != static_cast<bool>(b.expr)) return false;
  if (a.expr && !equal(*a.expr, *b.expr)) return false;
  if (a.body.size() != b.body.size() || a.else_body.size() != b.else_body.size()) return false;
  for (size_t i = 0; i < a.body.size(); ++i)
    if (!equal(*a.body[i], *b.body[i])) return false;
  for (size_t i = 0; i < a.else_body.size(); ++i)
    if (!equal(*a.else_body[i], *b.else_body[i])) return false;
  return true;
}

bool equal(const Method& a, const Method& b) {
  if (a.name != b.name || a.params != b.params || a.return_type != b.return_type) return false;
  if (a.body.size() != b.body.size()) return false;
  for (size_t i = 0; i < a.body.size(); ++i)
    if (!equal(*a.body[i], *b.body[i])) return false;
  return true;
}

namespace {

void assign_ids(std::vector<StmtPtr>& stmts, int& next) {
  for (auto& s : stmts) {
    s->id = next++;
    assign_ids(s->body, next);
    assign_ids(s->else_body, next);
  }
}

void collect(std::vector<StmtPtr>& stmts, std::vector<Stmt*>& out) {
  for (auto& s : stmts) {
    out.push_back(s.get());
    collect(s->body, out);
    collect(s->else_body, out);
  }
}

}  // namespace

int assign_stmt_ids(Method& m) {
  int next = 0;
  assign_ids(m.body, next);
  return next;
}

std::vector<Stmt*> all_stmts(Method& m) {
  std::vector<Stmt*> out;
  collect(m.body, out);
  return out;
}

std::vector<const Stmt*> all_stmts(const Method& m) {
  std::vector<Stmt*> out;
  collect(const_cast<Method&>(m).body, out);
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(const std::vector<Token>& toks, size_t src_len) : toks_(toks), src_len_(src_len) {}

  Method parse_method() {
    Method m;
    m.return_type = parse_type();
    m.name = expect_ident();
    expect_punct("(");
    if (!at_punct(")")) {
      for (;;) {
        MjType t = parse_type();
        std::string pname = expect_ident();
        m.params.emplace_back(pname, t);
        if (at_punct(",")) {
          advance();
          continue;
        }
        break;
      }
    }
    expect_punct(")");
    m.body = parse_block();
    if (pos_ != toks_.size()) fail("end of input");
    return m;
  }

 private:
  std::vector<StmtPtr> parse_block() {
    expect_punct("{");
    std::vector<StmtPtr> stmts;
    while (!at_punct("}")) stmts.push_back(parse_stmt());
    expect_punct("}");
    return stmts;
  }

  StmtPtr parse_stmt() {
    auto s = std::make_unique<Stmt>();
    s->tok_begin = static_cast<int>(pos_);
    if (at_keyword("return")) {
      advance();
      s->kind = Stmt::Kind::Return;
      s->expr = parse_expr();
      expect_punct(";");
    } else if (at_keyword("if")) {
      advance();
      s->kind = Stmt::Kind::If;
      expect_punct("(");
      s->expr = parse_expr();
      expect_punct(")");
      s->body = parse_block();
      if (at_keyword("else")) {
        advance();
        s->else_body = parse_block();
      }
    } else if (at_keyword("while")) {
      advance();
      s->kind = Stmt::Kind::While;
      expect_punct("(");
      s->expr = parse_expr();
      expect_punct(")");
      s->body = parse_block();
    } else if (at_type()) {
      s->kind = Stmt::Kind::Decl;
      s->decl_type = parse_type();
      s->name = expect_ident();
      expect_op("=");
      s->expr = parse_expr();
      expect_punct(";");
    } else {
      s->kind = Stmt::Kind::Assign;
      s->name = expect_ident();
      expect_op("=");
      s->expr = parse_expr();
      expect_punct(";");
    }
    s->tok_end = static_cast<int>(pos_) - 1;
    return s;
  }

  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    auto lhs = parse_and();
    while (at_op("||")) {
      advance();
      lhs = binary("||", std::move(lhs), parse_and());
    }
    return lhs;
  }

  ExprPtr parse_and() {
    auto lhs = parse_cmp();
    while (at_op("&&")) {
      advance();
      lhs = binary("&&", std::move(lhs), parse_cmp());
    }
    return lhs;
  }

  ExprPtr parse_cmp() {
    auto lhs = parse_add();
    for (const char* op : {"<=", ">=", "==", "!=", "<", ">"}) {
      if (at_op(op)) {
        advance();
        return binary(op, std::move(lhs), parse_add());
      }
    }
    return lhs;
  }

  ExprPtr parse_add() {
    auto lhs = parse_mul();
    for (;;) {
      if (at_op("+")) {
        advance();
        lhs = binary("+", std::move(lhs), parse_mul());
      } else if (at_op("-")) {
        advance();
        lhs = binary("-", std::move(lhs), parse_mul());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_mul() {
    auto lhs = parse_unary();
    for (;;) {
      bool matched = false;
      for (const char* op : {"*", "/", "%"}) {
        if (at_op(op)) {
          advance();
          lhs = binary(op, std::move(lhs), parse_unary());
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  ExprPtr parse_unary() {
    for (const char* op : {"-", "!"}) {
      if (at_op(op)) {
        advance();
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Unary;
        e->op = op;
        e->children.push_back(parse_unary());
        return e;
      }
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    if (done()) fail("expression");
    const Token& t = cur();
    auto e = std::make_unique<Expr>();
    if (t.kind == TokKind::IntLit) {
      e->kind = Expr::Kind::IntLit;
      e->int_val = std::stoll(t.lexeme);
      advance();
      return e;
    }
    if (t.kind == TokKind::NumLit) {
      e->kind = Expr::Kind::NumLit;
      e->num_val = std::stod(t.lexeme);
      advance();
      return e;
    }
    if (t.kind == TokKind::BoolLit) {
      e->kind = Expr::Kind::BoolLit;
      e->bool_val = (t.lexeme == "true");
      advance();
      return e;
    }
    if ((at_keyword("int") || at_keyword("num")) && peek_punct(1, "(")) {
      e->kind = Expr::Kind::Cast;
      e->cast_to = at_keyword("int") ? MjType::Int : MjType::Num;
      advance();
      expect_punct("(");
      e->children.push_back(parse_expr());
      expect_punct(")");
      return e;
    }
    if (t.kind == TokKind::Ident) {
      if (peek_punct(1, "(")) {
        e->kind = Expr::Kind::Call;
        e->name = t.lexeme;
        advance();
        expect_punct("(");
        if (!at_punct(")")) {
          for (;;) {
            e->children.push_back(parse_expr());
            if (at_punct(",")) {
              advance();
              continue;
            }
            break;
          }
        }
        expect_punct(")");
        return e;
      }
      e->kind = Expr::Kind::Var;
      e->name = t.lexeme;
      advance();
      return e;
    }
    if (at_punct("(")) {
      advance();
      e->kind = Expr::Kind::Paren;
      e->children.push_back(parse_expr());
      expect_punct(")");
      return e;
    }
    fail("expression");
    return nullptr;
  }

  static ExprPtr binary(const std::string& op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Binary;
    e->op = op;
    e->children.push_back(std::move(lhs));
    e->children.push_back(std::move(rhs));
    return e;
  }

  MjType parse_type() {
    if (at_keyword("int")) { advance(); return MjType::Int; }
    if (at_keyword("num")) { advance(); return MjType::Num; }
    if (at_keyword("bool")) { advance(); return MjType::Bool; }
    fail("type name");
    return MjType::Int;
  }

  bool done() const { return pos_ >= toks_.size(); }
  const Token& cur() const { return toks_[pos_]; }
  void advance() { ++pos_; }

  bool at_punct(const char* p) const { return !done() && cur().kind == TokKind::Punct && cur().lexeme == p; }
  bool at_op(const char* p) const { return !done() && cur().kind == TokKind::Op && cur().lexeme == p; }
  bool at_keyword(const char* p) const { return !done() && cur().kind == TokKind::Keyword && cur().lexeme == p; }
  bool at_type() const { return at_keyword("int") || at_keyword("num") || at_keyword("bool"); }
  bool peek_punct(size_t ahead, const char* p) const {
    return pos_ + ahead < toks_.size() && toks_[pos_ + ahead].kind == TokKind::Punct &&
           toks_[pos_ + ahead].lexeme == p;
  }

  void expect_punct(const char* p) {
    if (!at_punct(p)) fail(std::string("'") + p + "'");
    advance();
  }
  void expect_op(const char* p) {
    if (!at_op(p)) fail(std::string("'") + p + "'");
    advance();
  }
  std::string expect_ident() {
    if (done() || cur().kind != TokKind::Ident) fail("identifier");
    std::string s = cur().lexeme;
    advance();
    return s;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    size_t off = done() ? src_len_ : cur().begin;
    std::string got = done() ? "end of input" : "'" + cur().lexeme + "'";
    throw ParseError(off, "expected " + expected + ", got " + got);
  }

  const std::vector<Token>& toks_;
  size_t src_len_;
  size_t pos_ = 0;
};

void mark_spans(const std::vector<StmtPtr>& stmts, std::vector<int>& stmt_of_token) {
  for (const auto& s : stmts) {
    for (int i = s->tok_begin; i <= s->tok_end; ++i) stmt_of_token[i] = s->id;
    mark_spans(s->body, stmt_of_token);
    mark_spans(s->else_body, stmt_of_token);
  }
}

}  // namespace

SourceMethod parse_method(const std::string& source) {
  SourceMethod sm;
  sm.source = source;
  sm.tokens = lex(source);
  Parser p(sm.tokens, source.size());
  sm.ast = p.parse_method();
  sm.name = sm.ast.name;
  sm.params = sm.ast.params;
  sm.return_type = sm.ast.return_type;
  sm.stmt_count = assign_stmt_ids(sm.ast);
  typecheck(sm.ast);
  // Every token maps to exactly one statement id: statement tokens map to
  // their innermost statement; signature tokens and the opening brace attach
  // to the first statement, the trailing brace to the last one.
  sm.stmt_of_token.assign(sm.tokens.size(), -1);
  mark_spans(sm.ast.body, sm.stmt_of_token);
  int prev = 0;
  for (size_t i = 0; i < sm.stmt_of_token.size(); ++i) {
    if (sm.stmt_of_token[i] < 0)
      sm.stmt_of_token[i] = prev;
    else
      prev = sm.stmt_of_token[i];
  }
  return sm;
}

std::pair<std::vector<Token>, std::vector<int>> tokenize_with_statements(const SourceMethod& m) {
  return {m.tokens, m.stmt_of_token};
}

}  // namespace orf::mj
