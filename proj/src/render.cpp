#include "dpfb/render.hpp"

#include <sstream>

namespace dpfb {

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Ternary: return 1;
    case ExprKind::Binary:
      switch (e.bop) {
        case BinOp::Implies: case BinOp::Iff: return 0;
        case BinOp::Or: return 2;
        case BinOp::And: return 3;
        case BinOp::Eq: case BinOp::Ne: return 4;
        case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return 5;
        case BinOp::Add: case BinOp::Sub: return 6;
        case BinOp::Mul: case BinOp::Div: case BinOp::Mod: return 7;
      }
      return 0;
    case ExprKind::Unary:
      return (e.uop == UnOp::PostInc || e.uop == UnOp::PostDec) ? 9 : 8;
    case ExprKind::IntLit:
      return e.value < 0 ? 8 : 10;
    default:
      return 10;
  }
}

std::string wrap(const ExprPtr& e, int min_prec) {
  std::string s = render(e);
  if (precedence(*e) < min_prec) return "(" + s + ")";
  return s;
}

std::string ind(int n) { return std::string(static_cast<std::size_t>(n) * 2, ' '); }

std::string render_assign_inline(const Stmt& s) {
  std::string lhs = render(s.lhs);
  switch (s.aop) {
    case AssignOp::Set: return lhs + " = " + render(s.rhs);
    case AssignOp::Add: return lhs + " += " + render(s.rhs);
    case AssignOp::Sub: return lhs + " -= " + render(s.rhs);
    case AssignOp::Mul: return lhs + " *= " + render(s.rhs);
    case AssignOp::Div: return lhs + " /= " + render(s.rhs);
    case AssignOp::Mod: return lhs + " %= " + render(s.rhs);
    case AssignOp::Inc: return lhs + "++";
    case AssignOp::Dec: return lhs + "--";
  }
  return lhs;
}

std::string render_decl_inline(const Stmt& s) {
  std::string out;
  for (std::size_t i = 0; i < s.decls.size(); ++i) {
    const auto& d = s.decls[i];
    if (i == 0) out += to_string(d.type) + " ";
    else out += ", ";
    out += d.name;
    for (const auto& dim : d.dims) out += "[" + (dim ? render(dim) : std::string()) + "]";
    if (d.init) out += " = " + render(d.init);
  }
  return out;
}

std::string render_inline(const StmtPtr& s) {
  if (!s) return "";
  if (s->kind == StmtKind::Assign) return render_assign_inline(*s);
  if (s->kind == StmtKind::Decl) return render_decl_inline(*s);
  if (s->kind == StmtKind::ExprStmt) return render(s->rhs);
  return "";
}

std::string render_body(const StmtList& body, int indent) {
  std::string out = "{\n";
  for (const auto& s : body) out += render(s, indent + 1);
  out += ind(indent) + "}";
  return out;
}

}  // namespace

std::string render(const ExprPtr& e) {
  if (!e) return "";
  switch (e->kind) {
    case ExprKind::IntLit: return std::to_string(e->value);
    case ExprKind::BoolLit: return e->value ? "true" : "false";
    case ExprKind::Var: return e->name;
    case ExprKind::Index: {
      std::string out = e->name;
      for (const auto& a : e->args) out += "[" + render(a) + "]";
      return out;
    }
    case ExprKind::Unary: {
      const auto& a = e->args[0];
      switch (e->uop) {
        case UnOp::PostInc: return wrap(a, 9) + "++";
        case UnOp::PostDec: return wrap(a, 9) + "--";
        case UnOp::PreInc: return "++" + wrap(a, 8);
        case UnOp::PreDec: return "--" + wrap(a, 8);
        case UnOp::Neg:
          if (a->kind == ExprKind::IntLit || a->kind == ExprKind::Unary) return "-(" + render(a) + ")";
          return "-" + wrap(a, 8);
        case UnOp::Not: return "!" + wrap(a, 8);
      }
      return "";
    }
    case ExprKind::Binary: {
      int p = precedence(*e);
      std::string op = to_string(e->bop);
      if (p == 0) return wrap(e->args[0], 1) + " " + op + " " + wrap(e->args[1], 1);
      return wrap(e->args[0], p) + " " + op + " " + wrap(e->args[1], p + 1);
    }
    case ExprKind::Ternary:
      return wrap(e->args[0], 2) + " ? " + wrap(e->args[1], 1) + " : " + wrap(e->args[2], 1);
    case ExprKind::Call: {
      std::string out = e->name + "(";
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        if (i) out += ", ";
        out += render(e->args[i]);
      }
      return out + ")";
    }
  }
  return "";
}

std::string render_header(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::For:
      return "for (" + render_inline(s.init) + "; " + render(s.cond) + "; " + render_inline(s.step) + ")";
    case StmtKind::While: return "while (" + render(s.cond) + ")";
    case StmtKind::If: return "if (" + render(s.cond) + ")";
    default: {
      std::string r = render(std::make_shared<Stmt>(s), 0);
      while (!r.empty() && r.back() == '\n') r.pop_back();
      return r;
    }
  }
}

std::string render(const StmtPtr& s, int indent) {
  if (!s) return "";
  std::string pad = ind(indent);
  switch (s->kind) {
    case StmtKind::Decl: return pad + render_decl_inline(*s) + ";\n";
    case StmtKind::Assign: return pad + render_assign_inline(*s) + ";\n";
    case StmtKind::ExprStmt: return pad + render(s->rhs) + ";\n";
    case StmtKind::Return: return pad + (s->rhs ? "return " + render(s->rhs) : std::string("return")) + ";\n";
    case StmtKind::Read: {
      std::string out = pad + "scanf(\"" + s->format + "\"";
      for (const auto& a : s->args) out += ", &" + render(a);
      return out + ");\n";
    }
    case StmtKind::Write: {
      std::string out = pad + "printf(\"" + s->format + "\"";
      for (const auto& a : s->args) out += ", " + render(a);
      return out + ");\n";
    }
    case StmtKind::Block: return pad + render_body(s->body, indent) + "\n";
    case StmtKind::For:
    case StmtKind::While: return pad + render_header(*s) + " " + render_body(s->body, indent) + "\n";
    case StmtKind::If: {
      std::string out = pad + render_header(*s) + " " + render_body(s->body, indent);
      const Stmt* cur = s.get();
      while (!cur->else_body.empty()) {
        if (cur->else_body.size() == 1 && cur->else_body[0]->kind == StmtKind::If) {
          cur = cur->else_body[0].get();
          out += " else " + render_header(*cur) + " " + render_body(cur->body, indent);
        } else {
          out += " else " + render_body(cur->else_body, indent);
          break;
        }
      }
      return out + "\n";
    }
  }
  return "";
}

std::string render(const StmtList& body, int indent) {
  std::string out;
  for (const auto& s : body) out += render(s, indent);
  return out;
}

std::string render(const FunctionDef& f) {
  std::string out = to_string(f.return_type) + " " + f.name + "(";
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    const auto& p = f.params[i];
    if (i) out += ", ";
    out += to_string(p.type) + " " + p.name;
    for (const auto& d : p.dims) out += "[" + (d ? render(d) : std::string()) + "]";
  }
  out += ") " + render_body(f.body, 0) + "\n";
  return out;
}

std::string render(const Program& p) {
  std::string out;
  for (const auto& g : p.globals) out += render(g, 0);
  for (const auto& f : p.functions) {
    if (!out.empty()) out += "\n";
    out += render(f);
  }
  return out;
}

std::string render_type(ScalarType t, const std::vector<ExprPtr>& dims) {
  std::string out = to_string(t);
  for (const auto& d : dims) out += "[" + (d ? render(d) : std::string()) + "]";
  return out;
}

bool same_program(const Program& a, const Program& b) { return render(a) == render(b); }

}  // namespace dpfb
