#include "orf/mj/printer.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace orf::mj {

std::string print_num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      return std::to_string(e.int_val);
    case Expr::Kind::NumLit:
      return print_num(e.num_val);
    case Expr::Kind::BoolLit:
      return e.bool_val ? "true" : "false";
    case Expr::Kind::Var:
      return e.name;
    case Expr::Kind::Unary:
      return e.op + print(*e.children[0]);
    case Expr::Kind::Binary:
      return print(*e.children[0]) + " " + e.op + " " + print(*e.children[1]);
    case Expr::Kind::Paren:
      return "(" + print(*e.children[0]) + ")";
    case Expr::Kind::Cast:
      return std::string(type_name(e.cast_to)) + "(" + print(*e.children[0]) + ")";
    case Expr::Kind::Call: {
      std::string s = e.name + "(";
      for (size_t i = 0; i < e.children.size(); ++i) {
        if (i) s += ", ";
        s += print(*e.children[i]);
      }
      return s + ")";
    }
  }
  return "";
}

namespace {

void print_stmts(const std::vector<StmtPtr>& stmts, int indent, std::ostringstream& out) {
  std::string pad(static_cast<size_t>(indent) * 4, ' ');
  for (const auto& s : stmts) {
    out << pad;
    switch (s->kind) {
      case Stmt::Kind::Decl:
        out << type_name(s->decl_type) << " " << s->name << " = " << print(*s->expr) << ";\n";
        break;
      case Stmt::Kind::Assign:
        out << s->name << " = " << print(*s->expr) << ";\n";
        break;
      case Stmt::Kind::Return:
        out << "return " << print(*s->expr) << ";\n";
        break;
      case Stmt::Kind::While:
        out << "while (" << print(*s->expr) << ") {\n";
        print_stmts(s->body, indent + 1, out);
        out << pad << "}\n";
        break;
      case Stmt::Kind::If:
        out << "if (" << print(*s->expr) << ") {\n";
        print_stmts(s->body, indent + 1, out);
        out << pad << "}";
        if (!s->else_body.empty()) {
          out << " else {\n";
          print_stmts(s->else_body, indent + 1, out);
          out << pad << "}";
        }
        out << "\n";
        break;
    }
  }
}

}  // namespace

std::string print(const Method& m) {
  std::ostringstream out;
  out << type_name(m.return_type) << " " << m.name << "(";
  for (size_t i = 0; i < m.params.size(); ++i) {
    if (i) out << ", ";
    out << type_name(m.params[i].second) << " " << m.params[i].first;
  }
  out << ") {\n";
  print_stmts(m.body, 1, out);
  out << "}\n";
  return out.str();
}

}  // namespace orf::mj
