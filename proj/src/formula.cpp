#include "dpfb/formula.hpp"

#include <algorithm>

#include "dpfb/render.hpp"

namespace dpfb {

namespace {

std::int64_t c_div(std::int64_t a, std::int64_t b) {
  if (b == 0) return 0;
  if (b == -1) return -a;
  return a / b;
}

std::int64_t c_mod(std::int64_t a, std::int64_t b) { return a - b * c_div(a, b); }

BinOp negate_comparison(BinOp op) {
  switch (op) {
    case BinOp::Lt: return BinOp::Ge;
    case BinOp::Le: return BinOp::Gt;
    case BinOp::Gt: return BinOp::Le;
    case BinOp::Ge: return BinOp::Lt;
    case BinOp::Eq: return BinOp::Ne;
    case BinOp::Ne: return BinOp::Eq;
    default: return op;
  }
}

bool is_literal(const ExprPtr& e) { return e->kind == ExprKind::IntLit || e->kind == ExprKind::BoolLit; }

}  // namespace

std::optional<std::int64_t> evaluate(const ExprPtr& e,
                                     const std::function<std::optional<std::int64_t>(const Expr&)>& lookup) {
  switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
      return e->value;
    case ExprKind::Var:
    case ExprKind::Index:
      return lookup(*e);
    case ExprKind::Call:
      return std::nullopt;
    case ExprKind::Unary: {
      auto a = evaluate(e->args[0], lookup);
      if (!a) return std::nullopt;
      if (e->uop == UnOp::Neg) return -*a;
      if (e->uop == UnOp::Not) return *a == 0 ? 1 : 0;
      return std::nullopt;
    }
    case ExprKind::Ternary: {
      auto c = evaluate(e->args[0], lookup);
      if (!c) return std::nullopt;
      return evaluate(e->args[*c ? 1 : 2], lookup);
    }
    case ExprKind::Binary:
      break;
  }
  auto a = evaluate(e->args[0], lookup);
  if (!a) return std::nullopt;
  switch (e->bop) {
    case BinOp::And:
      if (*a == 0) return 0;
      break;
    case BinOp::Or:
      if (*a != 0) return 1;
      break;
    case BinOp::Implies:
      if (*a == 0) return 1;
      break;
    default:
      break;
  }
  auto b = evaluate(e->args[1], lookup);
  if (!b) return std::nullopt;
  const std::int64_t x = *a, y = *b;
  switch (e->bop) {
    case BinOp::Add: return x + y;
    case BinOp::Sub: return x - y;
    case BinOp::Mul: return x * y;
    case BinOp::Div: return c_div(x, y);
    case BinOp::Mod: return c_mod(x, y);
    case BinOp::Lt: return x < y;
    case BinOp::Le: return x <= y;
    case BinOp::Gt: return x > y;
    case BinOp::Ge: return x >= y;
    case BinOp::Eq: return x == y;
    case BinOp::Ne: return x != y;
    case BinOp::And:
    case BinOp::Or:
    case BinOp::Implies: return y != 0;
    case BinOp::Iff: return (x != 0) == (y != 0);
  }
  return std::nullopt;
}

std::optional<std::int64_t> evaluate(const ExprPtr& e, const Model& m) {
  return evaluate(e, [&](const Expr& x) -> std::optional<std::int64_t> {
    auto it = m.find(x.kind == ExprKind::Var ? x.name : render(std::make_shared<const Expr>(x)));
    if (it == m.end()) return std::nullopt;
    return it->second;
  });
}

ExprPtr fold(const ExprPtr& e) {
  return rewrite(e, [](const ExprPtr& n) -> ExprPtr {
    if (n->kind == ExprKind::Unary) {
      const auto& a = n->args[0];
      if (n->uop == UnOp::Not) {
        if (is_literal(a)) return ex::boolean(a->value == 0);
        if (a->kind == ExprKind::Unary && a->uop == UnOp::Not) return a->args[0];
        if (a->kind == ExprKind::Binary && is_comparison(a->bop))
          return ex::binary(negate_comparison(a->bop), a->args[0], a->args[1]);
        if (a->kind == ExprKind::Binary && a->bop == BinOp::And)
          return ex::disj(fold(ex::unary(UnOp::Not, a->args[0])), fold(ex::unary(UnOp::Not, a->args[1])));
        if (a->kind == ExprKind::Binary && a->bop == BinOp::Or)
          return ex::conj(fold(ex::unary(UnOp::Not, a->args[0])), fold(ex::unary(UnOp::Not, a->args[1])));
        return nullptr;
      }
      if (n->uop == UnOp::Neg) {
        if (a->kind == ExprKind::IntLit) return ex::lit(-a->value);
        if (a->kind == ExprKind::Unary && a->uop == UnOp::Neg) return a->args[0];
      }
      return nullptr;
    }
    if (n->kind == ExprKind::Ternary) {
      if (is_literal(n->args[0])) return n->args[0]->value ? n->args[1] : n->args[2];
      if (same_expr(n->args[1], n->args[2])) return n->args[1];
      return nullptr;
    }
    if (n->kind != ExprKind::Binary) return nullptr;
    const auto& a = n->args[0];
    const auto& b = n->args[1];
    switch (n->bop) {
      case BinOp::And: return ex::conj(a, b);
      case BinOp::Or: return ex::disj(a, b);
      case BinOp::Implies: return ex::implies(a, b);
      default: break;
    }
    if (is_literal(a) && is_literal(b)) {
      auto v = evaluate(n, Model{});
      if (!v) return nullptr;
      if (is_comparison(n->bop) || n->bop == BinOp::Iff) return ex::boolean(*v != 0);
      return ex::lit(*v);
    }
    auto is_int = [](const ExprPtr& x, std::int64_t v) { return x->kind == ExprKind::IntLit && x->value == v; };
    switch (n->bop) {
      case BinOp::Add:
        if (is_int(a, 0)) return b;
        if (is_int(b, 0)) return a;
        break;
      case BinOp::Sub:
        if (is_int(b, 0)) return a;
        if (b->kind == ExprKind::IntLit && b->value < 0) return ex::binary(BinOp::Add, a, ex::lit(-b->value));
        break;
      case BinOp::Mul:
        if (is_int(a, 1)) return b;
        if (is_int(b, 1)) return a;
        if (is_int(a, 0) || is_int(b, 0)) return ex::lit(0);
        break;
      case BinOp::Div:
        if (is_int(b, 1)) return a;
        break;
      case BinOp::Eq:
      case BinOp::Le:
      case BinOp::Ge:
        if (same_expr(a, b) && !has_call(a)) return ex::boolean(true);
        break;
      case BinOp::Ne:
      case BinOp::Lt:
      case BinOp::Gt:
        if (same_expr(a, b) && !has_call(a)) return ex::boolean(false);
        break;
      default:
        break;
    }
    return nullptr;
  });
}

namespace {

bool add_linear(const ExprPtr& e, std::int64_t scale, LinearForm& out) {
  auto add_atom = [&](const ExprPtr& atom) {
    auto key = render(atom);
    out.atoms.emplace(key, atom);
    out.terms[key] += scale;
    if (out.terms[key] == 0) out.terms.erase(key);
    return true;
  };
  switch (e->kind) {
    case ExprKind::IntLit:
      out.constant += scale * e->value;
      return true;
    case ExprKind::BoolLit:
      return false;
    case ExprKind::Var:
      return add_atom(e);
    case ExprKind::Index: {
      std::vector<ExprPtr> subs;
      for (const auto& s : e->args) subs.push_back(canonical_int(s));
      return add_atom(ex::index(e->name, std::move(subs)));
    }
    case ExprKind::Unary:
      if (e->uop == UnOp::Neg) return add_linear(e->args[0], -scale, out);
      return false;
    case ExprKind::Binary:
      switch (e->bop) {
        case BinOp::Add:
          return add_linear(e->args[0], scale, out) && add_linear(e->args[1], scale, out);
        case BinOp::Sub:
          return add_linear(e->args[0], scale, out) && add_linear(e->args[1], -scale, out);
        case BinOp::Mul: {
          auto l = linearize(e->args[0]);
          auto r = linearize(e->args[1]);
          if (l && l->terms.empty()) return add_linear(e->args[1], scale * l->constant, out);
          if (r && r->terms.empty()) return add_linear(e->args[0], scale * r->constant, out);
          return add_atom(ex::binary(BinOp::Mul, canonical_int(e->args[0]), canonical_int(e->args[1])));
        }
        case BinOp::Div:
        case BinOp::Mod: {
          auto l = canonical_int(e->args[0]);
          auto r = canonical_int(e->args[1]);
          if (l->kind == ExprKind::IntLit && r->kind == ExprKind::IntLit) {
            auto v = evaluate(ex::binary(e->bop, l, r), Model{});
            out.constant += scale * *v;
            return true;
          }
          return add_atom(ex::binary(e->bop, l, r));
        }
        default:
          return false;
      }
    case ExprKind::Ternary:
    case ExprKind::Call:
      return add_atom(e);
  }
  return false;
}

}  // namespace

std::optional<LinearForm> linearize(const ExprPtr& e) {
  LinearForm f;
  if (!add_linear(e, 1, f)) return std::nullopt;
  return f;
}

ExprPtr canonical_int(const ExprPtr& e) {
  auto f = linearize(e);
  if (!f) return e;
  ExprPtr acc;
  auto term = [&](const std::string& key, std::int64_t k) {
    const auto& atom = f->atoms.at(key);
    std::int64_t mag = k < 0 ? -k : k;
    ExprPtr t = mag == 1 ? atom : ex::binary(BinOp::Mul, ex::lit(mag), atom);
    if (!acc) {
      acc = k < 0 ? ex::unary(UnOp::Neg, t) : t;
    } else {
      acc = ex::binary(k < 0 ? BinOp::Sub : BinOp::Add, acc, t);
    }
  };
  for (const auto& [key, k] : f->terms)
    if (k > 0) term(key, k);
  for (const auto& [key, k] : f->terms)
    if (k < 0) term(key, k);
  if (!acc) return ex::lit(f->constant);
  if (f->constant > 0) acc = ex::binary(BinOp::Add, acc, ex::lit(f->constant));
  if (f->constant < 0) acc = ex::binary(BinOp::Sub, acc, ex::lit(-f->constant));
  return acc;
}

ExprPtr normalize_commutative(const ExprPtr& e, const std::function<int(const std::string&)>& rank) {
  return rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
    if (n->kind != ExprKind::Binary) return nullptr;
    BinOp op = n->bop;
    if (op != BinOp::Add && op != BinOp::Mul && op != BinOp::Eq && op != BinOp::Ne) return nullptr;
    std::vector<ExprPtr> parts;
    std::function<void(const ExprPtr&)> flatten = [&](const ExprPtr& x) {
      if (x->kind == ExprKind::Binary && x->bop == op && op != BinOp::Eq && op != BinOp::Ne) {
        flatten(x->args[0]);
        flatten(x->args[1]);
      } else {
        parts.push_back(x);
      }
    };
    flatten(n->args[0]);
    flatten(n->args[1]);
    std::vector<std::pair<std::pair<int, std::string>, ExprPtr>> keyed;
    for (const auto& p : parts) {
      auto text = render(p);
      keyed.push_back({{rank(text), text}, p});
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    ExprPtr acc = keyed[0].second;
    for (std::size_t i = 1; i < keyed.size(); ++i) acc = ex::binary(op, acc, keyed[i].second);
    return acc;
  });
}

ExprPtr normalize_commutative(const ExprPtr& e) {
  return normalize_commutative(e, [](const std::string&) { return 0; });
}

}  // namespace dpfb
