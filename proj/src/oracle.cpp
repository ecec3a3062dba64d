#include "dpfb/oracle.hpp"

#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <unordered_map>

#include "dpfb/error.hpp"
#include "dpfb/formula.hpp"
#include "dpfb/frontend.hpp"

namespace dpfb {

std::string to_string(ExecStatus s) {
  switch (s) {
    case ExecStatus::Ok: return "ok";
    case ExecStatus::OutOfBounds: return "out-of-bounds";
    case ExecStatus::DivByZero: return "division-by-zero";
    case ExecStatus::NonTermination: return "non-termination";
  }
  return "?";
}

namespace {

constexpr std::int64_t kMaxCells = std::int64_t{1} << 24;
constexpr int kMaxCallDepth = 4096;

struct Fault {
  ExecStatus status;
};

struct ArrayStore {
  std::vector<std::int64_t> data;
  std::vector<std::uint8_t> init;
};

struct ArrayRef {
  std::shared_ptr<ArrayStore> store;
  std::size_t offset = 0;
  std::vector<std::int64_t> dims;
};

struct Slot {
  bool is_bool = false;
  std::uint8_t initialized = 0;
  std::int64_t value = 0;
  std::optional<ArrayRef> array;
};

using Frame = std::unordered_map<std::string, Slot>;

enum class Flow { Normal, Return };

class Machine {
 public:
  Machine(const Program& p, const InputSource& src, std::uint64_t budget) : p_(p), src_(src), budget_(budget) {}

  ExecutionResult run() {
    try {
      cur_ = &globals_;
      exec_list(p_.globals);
      call(p_.main(), {});
    } catch (const Fault& f) {
      result_.status = f.status;
    }
    return std::move(result_);
  }

 private:
  void tick() {
    if (++result_.steps > budget_) throw Fault{ExecStatus::NonTermination};
  }

  Slot& slot(const std::string& name) {
    if (auto it = cur_->find(name); it != cur_->end()) return it->second;
    if (auto it = globals_.find(name); it != globals_.end()) return it->second;
    throw Error(ErrorKind::InvalidInput, "undeclared variable at run time: " + name);
  }

  ArrayRef array_value(const ExprPtr& e) {
    if (e->kind == ExprKind::Var) {
      auto& s = slot(e->name);
      if (!s.array) throw Error(ErrorKind::InvalidInput, "not an array: " + e->name);
      return *s.array;
    }
    if (e->kind != ExprKind::Index) throw Error(ErrorKind::InvalidInput, "array argument expected");
    auto& s = slot(e->name);
    if (!s.array) throw Error(ErrorKind::InvalidInput, "not an array: " + e->name);
    ArrayRef view = *s.array;
    for (const auto& sub : e->args) {
      auto i = eval(sub);
      if (view.dims.empty() || i < 0 || i >= view.dims[0]) throw Fault{ExecStatus::OutOfBounds};
      std::size_t stride = 1;
      for (std::size_t k = 1; k < view.dims.size(); ++k) stride *= static_cast<std::size_t>(view.dims[k]);
      view.offset += static_cast<std::size_t>(i) * stride;
      view.dims.erase(view.dims.begin());
    }
    return view;
  }

  struct Cell {
    std::int64_t* value;
    std::uint8_t* init;
    bool is_bool;
  };

  Cell locate(const ExprPtr& lv) {
    if (lv->kind == ExprKind::Var) {
      auto& s = slot(lv->name);
      return {&s.value, &s.initialized, s.is_bool};
    }
    auto view = array_value(lv);
    if (!view.dims.empty()) throw Error(ErrorKind::InvalidInput, "partial array access used as a value");
    auto& s = slot(lv->name);
    return {&view.store->data[view.offset], &view.store->init[view.offset], s.is_bool};
  }

  std::int64_t load(const ExprPtr& lv) {
    auto c = locate(lv);
    if (!*c.init) ++result_.uninitialized_reads;
    return *c.value;
  }

  void store(const Cell& c, std::int64_t v) {
    *c.value = c.is_bool ? (v != 0) : v;
    *c.init = 1;
  }

  std::int64_t eval(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::IntLit:
      case ExprKind::BoolLit:
        return e->value;
      case ExprKind::Var:
      case ExprKind::Index:
        return load(e);
      case ExprKind::Ternary:
        return eval(e->args[0]) ? eval(e->args[1]) : eval(e->args[2]);
      case ExprKind::Call:
        return call(*function(e->name), e->args);
      case ExprKind::Unary: {
        const auto& a = e->args[0];
        switch (e->uop) {
          case UnOp::Neg: return -eval(a);
          case UnOp::Not: return eval(a) == 0;
          case UnOp::PreInc:
          case UnOp::PreDec:
          case UnOp::PostInc:
          case UnOp::PostDec: {
            auto c = locate(a);
            if (!*c.init) ++result_.uninitialized_reads;
            std::int64_t old = *c.value;
            std::int64_t now = (e->uop == UnOp::PreInc || e->uop == UnOp::PostInc) ? old + 1 : old - 1;
            store(c, now);
            return (e->uop == UnOp::PreInc || e->uop == UnOp::PreDec) ? *c.value : old;
          }
        }
        return 0;
      }
      case ExprKind::Binary:
        break;
    }
    switch (e->bop) {
      case BinOp::And: return eval(e->args[0]) && eval(e->args[1]);
      case BinOp::Or: return eval(e->args[0]) || eval(e->args[1]);
      case BinOp::Implies: return !eval(e->args[0]) || eval(e->args[1]);
      default: break;
    }
    std::int64_t a = eval(e->args[0]);
    std::int64_t b = eval(e->args[1]);
    switch (e->bop) {
      case BinOp::Add: return a + b;
      case BinOp::Sub: return a - b;
      case BinOp::Mul: return a * b;
      case BinOp::Div:
        if (b == 0) throw Fault{ExecStatus::DivByZero};
        return b == -1 ? -a : a / b;
      case BinOp::Mod:
        if (b == 0) throw Fault{ExecStatus::DivByZero};
        return b == -1 ? 0 : a % b;
      case BinOp::Lt: return a < b;
      case BinOp::Le: return a <= b;
      case BinOp::Gt: return a > b;
      case BinOp::Ge: return a >= b;
      case BinOp::Eq: return a == b;
      case BinOp::Ne: return a != b;
      case BinOp::Iff: return (a != 0) == (b != 0);
      default: return 0;
    }
  }

  const FunctionDef* function(const std::string& name) {
    auto* f = p_.find(name);
    if (!f) throw Error(ErrorKind::InvalidInput, "unknown function: " + name);
    return f;
  }

  std::int64_t call(const FunctionDef& f, const std::vector<ExprPtr>& actuals) {
    if (depth_ >= kMaxCallDepth) throw Fault{ExecStatus::NonTermination};
    Frame frame;
    for (std::size_t i = 0; i < f.params.size() && i < actuals.size(); ++i) {
      const auto& prm = f.params[i];
      Slot s;
      s.is_bool = prm.type == ScalarType::Bool;
      if (!prm.dims.empty()) {
        s.array = array_value(actuals[i]);
      } else {
        std::int64_t v = eval(actuals[i]);
        s.value = s.is_bool ? (v != 0) : v;
        s.initialized = 1;
      }
      frame[prm.name] = std::move(s);
    }
    Frame* saved = cur_;
    cur_ = &frame;
    ++depth_;
    return_value_ = 0;
    exec_list(f.body);
    --depth_;
    cur_ = saved;
    std::int64_t rv = return_value_;
    return_value_ = 0;
    return f.return_type == ScalarType::Bool ? (rv != 0) : rv;
  }

  Flow exec_list(const StmtList& body) {
    for (const auto& s : body)
      if (exec(*s) == Flow::Return) return Flow::Return;
    return Flow::Normal;
  }

  void declare(const VarDecl& d) {
    Slot s;
    s.is_bool = d.type == ScalarType::Bool;
    if (!d.dims.empty()) {
      ArrayRef ref;
      std::int64_t cells = 1;
      for (const auto& dim : d.dims) {
        std::int64_t n = dim ? eval(dim) : 0;
        if (n < 0) throw Fault{ExecStatus::OutOfBounds};
        ref.dims.push_back(n);
        cells *= n;
        if (cells > kMaxCells) throw Fault{ExecStatus::OutOfBounds};
      }
      ref.store = std::make_shared<ArrayStore>();
      ref.store->data.assign(static_cast<std::size_t>(cells), 0);
      ref.store->init.assign(static_cast<std::size_t>(cells), 0);
      s.array = std::move(ref);
    }
    (*cur_)[d.name] = std::move(s);
    if (d.init) {
      auto v = eval(d.init);
      store(locate(ex::var(d.name)), v);
    }
  }

  Flow exec(const Stmt& s) {
    tick();
    switch (s.kind) {
      case StmtKind::Decl:
        for (const auto& d : s.decls) declare(d);
        return Flow::Normal;
      case StmtKind::Assign: {
        auto c = locate(s.lhs);
        if (s.aop == AssignOp::Set) {
          store(c, eval(s.rhs));
          return Flow::Normal;
        }
        if (!*c.init) ++result_.uninitialized_reads;
        std::int64_t old = *c.value;
        std::int64_t r = (s.aop == AssignOp::Inc || s.aop == AssignOp::Dec) ? 1 : eval(s.rhs);
        std::int64_t v = 0;
        switch (s.aop) {
          case AssignOp::Add:
          case AssignOp::Inc: v = old + r; break;
          case AssignOp::Sub:
          case AssignOp::Dec: v = old - r; break;
          case AssignOp::Mul: v = old * r; break;
          case AssignOp::Div:
            if (r == 0) throw Fault{ExecStatus::DivByZero};
            v = r == -1 ? -old : old / r;
            break;
          case AssignOp::Mod:
            if (r == 0) throw Fault{ExecStatus::DivByZero};
            v = r == -1 ? 0 : old % r;
            break;
          case AssignOp::Set: break;
        }
        store(c, v);
        return Flow::Normal;
      }
      case StmtKind::If:
        return exec_list(eval(s.cond) ? s.body : s.else_body);
      case StmtKind::For:
        if (s.init && exec(*s.init) == Flow::Return) return Flow::Return;
        while (!s.cond || eval(s.cond)) {
          tick();
          if (exec_list(s.body) == Flow::Return) return Flow::Return;
          if (s.step) exec(*s.step);
        }
        return Flow::Normal;
      case StmtKind::While:
        while (eval(s.cond)) {
          tick();
          if (exec_list(s.body) == Flow::Return) return Flow::Return;
        }
        return Flow::Normal;
      case StmtKind::Read:
        for (const auto& lv : s.args) {
          ReadEvent ev{lvalue_root(lv), lv->kind == ExprKind::Index, position_++};
          auto c = locate(lv);
          auto v = src_(ev);
          if (!v) ++result_.exhausted_reads;
          store(c, v.value_or(0));
        }
        return Flow::Normal;
      case StmtKind::Write:
        for (const auto& a : s.args) result_.outputs.push_back(eval(a));
        return Flow::Normal;
      case StmtKind::ExprStmt:
        eval(s.rhs);
        return Flow::Normal;
      case StmtKind::Return:
        return_value_ = s.rhs ? eval(s.rhs) : 0;
        return Flow::Return;
      case StmtKind::Block:
        return exec_list(s.body);
    }
    return Flow::Normal;
  }

  const Program& p_;
  const InputSource& src_;
  std::uint64_t budget_;
  ExecutionResult result_;
  Frame globals_;
  Frame* cur_ = nullptr;
  std::size_t position_ = 0;
  std::int64_t return_value_ = 0;
  int depth_ = 0;
};

bool satisfies(const std::vector<ExprPtr>& constraints, const Model& scalars) {
  for (const auto& c : constraints) {
    auto v = evaluate(c, scalars);
    if (v && *v == 0) return false;
  }
  return true;
}

}  // namespace

ExecutionResult interpret(const Program& p, const InputSource& input, std::uint64_t step_budget) {
  return Machine(p, input, step_budget).run();
}

ExecutionResult interpret(const Program& p, const std::vector<std::int64_t>& input, std::uint64_t step_budget) {
  InputSource src = [&](const ReadEvent& ev) -> std::optional<std::int64_t> {
    if (ev.position < input.size()) return input[ev.position];
    return std::nullopt;
  };
  return interpret(p, src, step_budget);
}

std::optional<GeneratedInput> generate_input(const Program& driver, const InputProfile& profile,
                                             std::uint64_t seed, std::int64_t size_cap, int attempts) {
  std::mt19937_64 rng(seed);
  std::int64_t hi = profile.scalar_max;
  if (size_cap > 0 && size_cap < hi) hi = std::max(size_cap, profile.scalar_min);
  for (int a = 0; a < attempts; ++a) {
    GeneratedInput g;
    Model scalars;
    InputSource src = [&](const ReadEvent& ev) -> std::optional<std::int64_t> {
      std::int64_t v;
      if (ev.array_element) {
        v = std::uniform_int_distribution<std::int64_t>(profile.element_min, profile.element_max)(rng);
      } else {
        v = std::uniform_int_distribution<std::int64_t>(profile.scalar_min, hi)(rng);
        scalars.emplace(ev.variable, v);
      }
      g.tokens.push_back(v);
      g.events.push_back(ev);
      return v;
    };
    g.result = interpret(driver, src);
    if (g.result.status != ExecStatus::Ok) continue;
    if (!satisfies(profile.constraints, scalars)) continue;
    return g;
  }
  return std::nullopt;
}

DifferentialResult differential(const Program& ref, const Program& cand, int trials, const InputProfile& profile,
                                std::uint64_t seed) {
  DifferentialResult out;
  const std::int64_t span = profile.scalar_max - profile.scalar_min + 1;
  for (int t = 0; t < trials; ++t) {
    std::int64_t cap = profile.scalar_min + (span * t) / std::max(trials, 1);
    auto g = generate_input(ref, profile, seed * 1000003u + static_cast<std::uint64_t>(t), cap);
    ++out.trials_run;
    if (!g) continue;
    auto c = interpret(cand, g->tokens);
    if (c.same_behaviour(g->result)) continue;

    out.agree = false;
    out.witness = g->tokens;
    out.ref_result = g->result;
    out.cand_result = c;
    for (std::size_t i = 0; i < g->events.size(); ++i) {
      if (!g->events[i].array_element || out.witness[i] == 0) continue;
      auto trial = out.witness;
      trial[i] = 0;
      auto r = interpret(ref, trial);
      if (r.status != ExecStatus::Ok) continue;
      auto k = interpret(cand, trial);
      if (k.same_behaviour(r)) continue;
      out.witness = std::move(trial);
      out.ref_result = std::move(r);
      out.cand_result = std::move(k);
    }
    return out;
  }
  return out;
}

std::vector<ExprPtr> parse_constraints(const std::string& text) {
  std::vector<ExprPtr> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_expression(line));
  }
  return out;
}

}  // namespace dpfb
