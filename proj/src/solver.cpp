#include "dpfb/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <set>
#include <sstream>

#include "dpfb/error.hpp"
#include "dpfb/render.hpp"

extern char** environ;

namespace dpfb {

std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Valid: return "valid";
    case VerdictKind::Counterexample: return "counterexample";
    case VerdictKind::Unknown: return "unknown";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// SMT-LIB printing

namespace {

std::string key_of(const Expr& e) {
  if (e.kind == ExprKind::Var) return e.name;
  return render(std::make_shared<const Expr>(e));
}

bool is_constant(const ExprPtr& e) { return e->kind == ExprKind::IntLit || e->kind == ExprKind::BoolLit; }

std::string int_literal(std::int64_t v) {
  if (v < 0) return "(- " + std::to_string(-v) + ")";
  return std::to_string(v);
}

class Printer {
public:
  std::set<std::string> symbols;
  bool nonlinear = false;

  std::string as_int(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::IntLit: return int_literal(e->value);
      case ExprKind::BoolLit: return e->value ? "1" : "0";
      case ExprKind::Var:
      case ExprKind::Index: {
        auto k = key_of(*e);
        symbols.insert(k);
        return smt_symbol(k);
      }
      case ExprKind::Call:
        throw Error(ErrorKind::EncodingFailed, "call to " + e->name + " in a solver formula");
      case ExprKind::Ternary:
        return "(ite " + as_bool(e->args[0]) + " " + as_int(e->args[1]) + " " + as_int(e->args[2]) + ")";
      case ExprKind::Unary:
        if (e->uop == UnOp::Neg) return "(- " + as_int(e->args[0]) + ")";
        if (e->uop == UnOp::Not) return "(ite " + as_bool(e) + " 1 0)";
        throw Error(ErrorKind::EncodingFailed, "side effect in a solver formula");
      case ExprKind::Binary:
        break;
    }
    const auto& a = e->args[0];
    const auto& b = e->args[1];
    switch (e->bop) {
      case BinOp::Add: return "(+ " + as_int(a) + " " + as_int(b) + ")";
      case BinOp::Sub: return "(- " + as_int(a) + " " + as_int(b) + ")";
      case BinOp::Mul:
        if (!is_constant(a) && !is_constant(b)) nonlinear = true;
        return "(* " + as_int(a) + " " + as_int(b) + ")";
      case BinOp::Div:
      case BinOp::Mod: {
        if (!is_constant(b)) nonlinear = true;
        // q = trunc(a / b), 0 when b = 0; a % b = a - b * q
        std::string bind = "(let ((?a " + as_int(a) + ") (?b " + as_int(b) + ")) ";
        if (e->bop == BinOp::Div) return bind + quotient() + ")";
        return bind + "(- ?a (* ?b " + quotient() + ")))";
      }
      default:
        return "(ite " + as_bool(e) + " 1 0)";
    }
  }

  std::string as_bool(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::IntLit:
      case ExprKind::BoolLit: return e->value ? "true" : "false";
      case ExprKind::Var:
      case ExprKind::Index:
      case ExprKind::Call: return "(not (= " + as_int(e) + " 0))";
      case ExprKind::Ternary:
        return "(ite " + as_bool(e->args[0]) + " " + as_bool(e->args[1]) + " " + as_bool(e->args[2]) + ")";
      case ExprKind::Unary:
        if (e->uop == UnOp::Not) return "(not " + as_bool(e->args[0]) + ")";
        return "(not (= " + as_int(e) + " 0))";
      case ExprKind::Binary:
        break;
    }
    const auto& a = e->args[0];
    const auto& b = e->args[1];
    auto cmp = [&](const char* op) { return std::string("(") + op + " " + as_int(a) + " " + as_int(b) + ")"; };
    switch (e->bop) {
      case BinOp::Lt: return cmp("<");
      case BinOp::Le: return cmp("<=");
      case BinOp::Gt: return cmp(">");
      case BinOp::Ge: return cmp(">=");
      case BinOp::Eq: return cmp("=");
      case BinOp::Ne: return "(not " + cmp("=") + ")";
      case BinOp::And: return "(and " + as_bool(a) + " " + as_bool(b) + ")";
      case BinOp::Or: return "(or " + as_bool(a) + " " + as_bool(b) + ")";
      case BinOp::Implies: return "(=> " + as_bool(a) + " " + as_bool(b) + ")";
      case BinOp::Iff: return "(= " + as_bool(a) + " " + as_bool(b) + ")";
      default: return "(not (= " + as_int(e) + " 0))";
    }
  }

private:
  // Quotient over the ?a/?b bound by the enclosing let.
  static std::string quotient() {
    return "(ite (= ?b 0) 0 (ite (>= ?a 0) (ite (> ?b 0) (div ?a ?b) (- (div ?a (- ?b)))) "
           "(ite (> ?b 0) (- (div (- ?a) ?b)) (div (- ?a) (- ?b)))))";
  }
};

// ---------------------------------------------------------------------------
// get-value response parsing

struct SExpr {
  std::string atom;
  std::vector<SExpr> items;
  bool list = false;
};

class SExprReader {
public:
  explicit SExprReader(const std::string& s) : s_(s) {}

  std::optional<SExpr> next() {
    skip();
    if (pos_ >= s_.size()) return std::nullopt;
    return read();
  }

private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  SExpr read() {
    skip();
    SExpr out;
    if (pos_ >= s_.size()) return out;
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      out.list = true;
      for (;;) {
        skip();
        if (pos_ >= s_.size()) break;
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        out.items.push_back(read());
      }
      return out;
    }
    if (c == '|') {
      auto end = s_.find('|', pos_ + 1);
      if (end == std::string::npos) end = s_.size();
      out.atom = s_.substr(pos_ + 1, end - pos_ - 1);
      pos_ = end + 1;
      return out;
    }
    if (c == '"') {
      auto end = s_.find('"', pos_ + 1);
      if (end == std::string::npos) end = s_.size();
      out.atom = s_.substr(pos_, end - pos_ + 1);
      pos_ = end + 1;
      return out;
    }
    auto start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
           s_[pos_] != ')')
      ++pos_;
    out.atom = s_.substr(start, pos_ - start);
    return out;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

std::optional<std::int64_t> value_of(const SExpr& v) {
  if (!v.list) {
    if (v.atom == "true") return 1;
    if (v.atom == "false") return 0;
    try {
      std::size_t used = 0;
      auto n = std::stoll(v.atom, &used);
      if (used != v.atom.size()) return std::nullopt;
      return n;
    } catch (...) {
      return std::nullopt;
    }
  }
  if (v.items.size() == 2 && !v.items[0].list && v.items[0].atom == "-") {
    auto n = value_of(v.items[1]);
    if (n) return -*n;
  }
  return std::nullopt;
}

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::vector<ExprPtr> conjuncts_of(const ExprPtr& e) {
  std::vector<ExprPtr> out;
  std::function<void(const ExprPtr&)> go = [&](const ExprPtr& x) {
    if (x->kind == ExprKind::Binary && x->bop == BinOp::And) {
      go(x->args[0]);
      go(x->args[1]);
    } else {
      out.push_back(x);
    }
  };
  go(e);
  return out;
}

std::vector<ExprPtr> disjuncts_of(const ExprPtr& e) {
  std::vector<ExprPtr> out;
  std::function<void(const ExprPtr&)> go = [&](const ExprPtr& x) {
    if (x->kind == ExprKind::Binary && x->bop == BinOp::Or) {
      go(x->args[0]);
      go(x->args[1]);
    } else {
      out.push_back(x);
    }
  };
  go(e);
  return out;
}

std::vector<ExprPtr> dedupe(const std::vector<ExprPtr>& xs) {
  std::vector<ExprPtr> out;
  std::set<std::string> seen;
  for (const auto& x : xs)
    if (seen.insert(render(x)).second) out.push_back(x);
  return out;
}

std::vector<ExprPtr> without(const std::vector<ExprPtr>& xs, std::size_t skip) {
  std::vector<ExprPtr> out;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (i != skip) out.push_back(xs[i]);
  return out;
}

}  // namespace

std::string smt_symbol(const std::string& key) {
  std::string s = key;
  for (auto& c : s)
    if (c == '|' || c == '\\') c = '!';
  return "|" + s + "|";
}

SmtScript to_smt(const ExprPtr& f) {
  Printer p;
  SmtScript out;
  out.formula = p.as_bool(f);
  out.logic = p.nonlinear ? "QF_NIA" : "QF_LIA";
  out.symbols.assign(p.symbols.begin(), p.symbols.end());
  for (const auto& s : out.symbols) out.declarations += "(declare-const " + smt_symbol(s) + " Int)\n";
  return out;
}

// ---------------------------------------------------------------------------
// process runner

ProcessResult run_process(const std::string& path, const std::vector<std::string>& args,
                          const std::string& input, int timeout_ms) {
  ignore_sigpipe();
  ProcessResult res;
  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) return res;
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    return res;
  }
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_adddup2(&fa, in_pipe[0], 0);
  posix_spawn_file_actions_adddup2(&fa, out_pipe[1], 1);
  posix_spawn_file_actions_adddup2(&fa, out_pipe[1], 2);

  std::vector<std::string> argv_s;
  argv_s.push_back(path);
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_s) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = 0;
  int rc = ::posix_spawnp(&pid, path.c_str(), &fa, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    res.output = std::string("spawn failed: ") + std::strerror(rc);
    return res;
  }
  res.started = true;

  int wfd = in_pipe[1];
  int rfd = out_pipe[0];
  ::fcntl(wfd, F_SETFL, ::fcntl(wfd, F_GETFL) | O_NONBLOCK);
  std::size_t written = 0;
  if (input.empty()) {
    ::close(wfd);
    wfd = -1;
  }
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  char buf[4096];
  while (rfd >= 0) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      res.timed_out = true;
      break;
    }
    int wait_ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
    pollfd fds[2];
    int n = 0;
    fds[n++] = {rfd, POLLIN, 0};
    if (wfd >= 0) fds[n++] = {wfd, POLLOUT, 0};
    int pr = ::poll(fds, n, wait_ms);
    if (pr < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (wfd >= 0 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t w = ::write(wfd, input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN && errno != EINTR) written = input.size();
      if (written >= input.size()) {
        ::close(wfd);
        wfd = -1;
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t r = ::read(rfd, buf, sizeof buf);
      if (r > 0) {
        res.output.append(buf, static_cast<std::size_t>(r));
      } else if (r == 0 || (errno != EINTR && errno != EAGAIN)) {
        ::close(rfd);
        rfd = -1;
      }
    }
  }
  if (wfd >= 0) ::close(wfd);
  if (rfd >= 0) ::close(rfd);
  if (res.timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  res.exit_status = status;
  return res;
}

// ---------------------------------------------------------------------------

Solver::Solver(SolverConfig config) : config_(std::move(config)) {}

std::int64_t Solver::queries() const { return queries_.load(); }

SolverVerdict Solver::check_validity(const ExprPtr& f) const {
  const auto start = std::chrono::steady_clock::now();
  SolverVerdict v;
  auto finish = [&]() -> SolverVerdict {
    v.elapsed_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return v;
  };

  auto folded = fold(f);
  if (ex::is_true(folded)) {
    v.kind = VerdictKind::Valid;
    return finish();
  }

  SmtScript script;
  try {
    script = to_smt(f);
  } catch (const Error& e) {
    v.diagnostic = e.detail();
    return finish();
  }
  std::ostringstream in;
  in << "(set-option :produce-models true)\n"
     << "(set-option :timeout " << config_.timeout_ms << ")\n"
     << "(set-logic " << script.logic << ")\n"
     << script.declarations << "(assert (not " << script.formula << "))\n(check-sat)\n";
  if (!script.symbols.empty()) {
    in << "(get-value (";
    for (const auto& s : script.symbols) in << smt_symbol(s) << " ";
    in << "))\n";
  }
  in << "(exit)\n";

  ++queries_;
  // Hard deadline a little past the solver's own timeout.
  auto proc = run_process(config_.path, config_.args, in.str(), config_.timeout_ms + config_.timeout_ms / 4 + 50);
  if (!proc.started) {
    v.diagnostic = "solver crashed: " + proc.output;
    return finish();
  }
  if (proc.timed_out) {
    v.diagnostic = "timeout";
    return finish();
  }

  SExprReader reader(proc.output);
  auto first = reader.next();
  if (!first || first->list) {
    v.diagnostic = "solver crashed: " + proc.output.substr(0, 200);
    return finish();
  }
  if (first->atom == "unsat") {
    v.kind = VerdictKind::Valid;
    return finish();
  }
  if (first->atom != "sat") {
    v.diagnostic = first->atom == "unknown" ? "solver returned unknown" : "solver crashed: " + proc.output.substr(0, 200);
    return finish();
  }

  Model m;
  std::map<std::string, std::string> back;
  for (const auto& s : script.symbols) back[smt_symbol(s).substr(1, smt_symbol(s).size() - 2)] = s;
  if (!script.symbols.empty()) {
    auto values = reader.next();
    if (!values || !values->list) {
      v.diagnostic = "malformed model: " + proc.output.substr(0, 200);
      return finish();
    }
    for (const auto& pair : values->items) {
      if (!pair.list || pair.items.size() != 2) continue;
      auto it = back.find(pair.items[0].atom);
      auto val = value_of(pair.items[1]);
      if (it != back.end() && val) m[it->second] = *val;
    }
  }
  auto check = evaluate(f, m);
  if (!check || *check != 0) {
    v.diagnostic = "countermodel does not falsify the formula";
    return finish();
  }
  v.kind = VerdictKind::Counterexample;
  v.model = std::move(m);
  return finish();
}

bool Solver::is_valid(const ExprPtr& f) const { return check_validity(f).kind == VerdictKind::Valid; }

ExprPtr Solver::simplify(const ExprPtr& f, const ExprPtr& context) const {
  if (!f) return f;
  try {
    auto ctx = context ? fold(context) : ex::boolean(true);
    auto g = fold(f);
    if (g->kind == ExprKind::IntLit || g->kind == ExprKind::BoolLit) return node_count(g) <= node_count(f) ? g : f;

    // Inside a disjunct, drop disjuncts subsumed by the others.
    auto shrink_disjunction = [&](const ExprPtr& d) {
      auto ds = dedupe(disjuncts_of(d));
      for (std::size_t k = 0; ds.size() > 1 && k < ds.size();) {
        auto rest = without(ds, k);
        if (is_valid(ex::implies(ex::conj(ctx, ds[k]), ex::disj_all(rest))))
          ds = rest;
        else
          ++k;
      }
      return ex::disj_all(ds);
    };

    auto cs = dedupe(conjuncts_of(g));
    auto drop_implied = [&] {
      for (std::size_t k = 0; cs.size() > 1 && k < cs.size();) {
        auto rest = without(cs, k);
        if (is_valid(ex::implies(ex::conj_all(rest), cs[k])))
          cs = rest;
        else
          ++k;
      }
    };
    if (!ex::is_true(ctx)) {
      for (std::size_t k = 0; k < cs.size();) {
        if (is_valid(ex::implies(ctx, cs[k])))
          cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(k));
        else
          ++k;
      }
    }
    drop_implied();
    for (auto& c : cs)
      if (c->kind == ExprKind::Binary && c->bop == BinOp::Or) c = shrink_disjunction(c);
    cs = dedupe(cs);
    drop_implied();
    auto result = cs.empty() ? ex::boolean(true) : ex::conj_all(cs);
    if (node_count(result) > node_count(f)) return f;
    if (same_expr(result, f)) return f;
    if (!is_valid(ex::implies(ctx, ex::iff(result, f)))) return f;
    return result;
  } catch (...) {
    return f;
  }
}

}  // namespace dpfb
