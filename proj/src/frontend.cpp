#include "dpfb/frontend.hpp"

#include <cctype>
#include <set>

#include "dpfb/error.hpp"

namespace dpfb {

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int column = 1;
};

[[noreturn]] void syntax(const Token& t, const std::string& msg) {
  throw Error(ErrorKind::SyntaxError, msg, t.line, t.column);
}

[[noreturn]] void unsupported(const Token& t, const std::string& msg) {
  throw Error(ErrorKind::UnsupportedConstruct, msg, t.line, t.column);
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  bool line_start = true;
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      advance(1);
      line_start = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      Token at{Tok::Punct, "/*", 0, line, col};
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
      if (i + 1 >= src.size()) syntax(at, "unterminated comment");
      advance(2);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (c == '#' && line_start) {
      std::size_t end = src.find('\n', i);
      std::string directive(src.substr(i, end == std::string_view::npos ? src.size() - i : end - i));
      if (directive.rfind("#include", 0) != 0) unsupported(t, "preprocessor directive '" + directive + "'");
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    line_start = false;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && (src[j] == '.' || src[j] == 'e' || src[j] == 'x'))
        unsupported(t, "non-decimal or floating-point literal");
      t.kind = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      if (t.text.size() > 18) syntax(t, "integer literal too large");
      t.value = std::stoll(t.text);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\\') ++j;
        if (j < src.size() && src[j] == '\n') syntax(t, "unterminated string literal");
        ++j;
      }
      if (j >= src.size()) syntax(t, "unterminated string literal");
      t.kind = Tok::String;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      advance(j + 1 - i);
      out.push_back(t);
      continue;
    }
    if (c == '\'') unsupported(t, "character literal");
    static const char* const two[] = {"==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=",
                                      "-=", "*=", "/=", "%=", "->", "<<", ">>"};
    t.kind = Tok::Punct;
    bool matched = false;
    if (i + 1 < src.size()) {
      std::string pair(src.substr(i, 2));
      for (const char* p : two) {
        if (pair == p) {
          t.text = pair;
          matched = true;
          break;
        }
      }
    }
    if (!matched) {
      static const std::string single = "+-*/%<>=!&|(){}[];,?:.^~";
      if (single.find(c) == std::string::npos) syntax(t, std::string("unexpected character '") + c + "'");
      t.text = std::string(1, c);
    }
    advance(t.text.size());
    out.push_back(t);
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

bool is_type_word(const std::string& s) {
  return s == "int" || s == "bool" || s == "void" || s == "long" || s == "const";
}

bool is_unsupported_type_word(const std::string& s) {
  return s == "char" || s == "float" || s == "double" || s == "struct" || s == "unsigned" ||
         s == "short" || s == "signed" || s == "union" || s == "enum" || s == "typedef";
}

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::End) {
      if (peek().kind != Tok::Ident) syntax(peek(), "expected a declaration or function definition");
      std::size_t save = pos_;
      ScalarType t = parse_type();
      Token name = expect_ident();
      if (check("(")) {
        p.functions.push_back(function(t, name));
      } else {
        pos_ = save;
        p.globals.push_back(declaration());
        expect(";");
      }
    }
    return p;
  }

  ExprPtr standalone_expression() {
    auto e = expression();
    if (peek().kind != Tok::End) syntax(peek(), "unexpected trailing input");
    return e;
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int ordinal_ = 0;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool check(const std::string& p) const {
    return (peek().kind == Tok::Punct || peek().kind == Tok::Ident) && peek().text == p;
  }
  bool accept(const std::string& p) {
    if (check(p)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const std::string& p) {
    if (!accept(p)) syntax(peek(), "expected '" + p + "' but found '" + peek().text + "'");
  }
  Token expect_ident() {
    if (peek().kind != Tok::Ident) syntax(peek(), "expected identifier but found '" + peek().text + "'");
    return next();
  }
  Location loc_of(const Token& t) { return Location{++ordinal_, t.line, t.column}; }

  ScalarType parse_type() {
    const Token& t = peek();
    if (is_unsupported_type_word(t.text)) unsupported(t, "type '" + t.text + "'");
    if (!is_type_word(t.text)) syntax(t, "expected a type but found '" + t.text + "'");
    while (accept("const")) {
    }
    if (accept("long")) {
      accept("long");
      accept("int");
      return ScalarType::Int;
    }
    Token w = next();
    if (w.text == "int") return ScalarType::Int;
    if (w.text == "bool") return ScalarType::Bool;
    if (w.text == "void") return ScalarType::Void;
    syntax(w, "expected a type");
  }

  FunctionDef function(ScalarType ret, const Token& name) {
    FunctionDef f;
    f.name = name.text;
    f.return_type = ret;
    f.loc = loc_of(name);
    expect("(");
    if (check("void") && peek(1).text == ")") next();
    while (!check(")")) {
      Param prm;
      prm.type = parse_type();
      if (check("*")) unsupported(peek(), "pointer parameter");
      prm.name = expect_ident().text;
      while (accept("[")) {
        prm.dims.push_back(check("]") ? nullptr : expression());
        expect("]");
      }
      f.params.push_back(std::move(prm));
      if (!accept(",")) break;
    }
    expect(")");
    expect("{");
    f.body = statements_until("}");
    expect("}");
    return f;
  }

  StmtList statements_until(const std::string& close) {
    StmtList out;
    while (!check(close) && peek().kind != Tok::End) {
      if (auto s = statement()) out.push_back(s);
    }
    return out;
  }

  StmtList body() {
    if (accept("{")) {
      auto b = statements_until("}");
      expect("}");
      return b;
    }
    StmtList out;
    if (auto s = statement()) out.push_back(s);
    return out;
  }

  StmtPtr declaration() {
    Token start = peek();
    Location loc = loc_of(start);
    ScalarType t = parse_type();
    if (t == ScalarType::Void) syntax(start, "variables cannot have type void");
    std::vector<VarDecl> decls;
    do {
      if (check("*")) unsupported(peek(), "pointer declaration (pointer arithmetic is not supported)");
      VarDecl d;
      d.type = t;
      d.name = expect_ident().text;
      while (accept("[")) {
        if (check("]")) syntax(peek(), "array declaration needs a size");
        d.dims.push_back(expression());
        expect("]");
      }
      if (d.dims.size() > 2) unsupported(start, "arrays of more than two dimensions");
      if (accept("=")) {
        if (check("{")) unsupported(peek(), "aggregate initializer");
        if (!d.dims.empty()) unsupported(peek(), "array initializer");
        d.init = expression();
      }
      decls.push_back(std::move(d));
    } while (accept(","));
    return st::decl(std::move(decls), loc);
  }

  StmtPtr simple_statement(bool allow_decl) {
    Token start = peek();
    if (start.kind == Tok::Ident && (is_type_word(start.text) || is_unsupported_type_word(start.text))) {
      if (!allow_decl) syntax(start, "declaration not allowed here");
      return declaration();
    }
    Location loc = loc_of(start);
    if (check("++") || check("--")) {
      bool inc = next().text == "++";
      auto lv = postfix();
      if (!is_lvalue(*lv)) syntax(start, "increment of a non-lvalue");
      return st::assign(lv, nullptr, loc, inc ? AssignOp::Inc : AssignOp::Dec);
    }
    auto e = expression();
    static const std::map<std::string, AssignOp> ops = {{"=", AssignOp::Set},  {"+=", AssignOp::Add},
                                                        {"-=", AssignOp::Sub}, {"*=", AssignOp::Mul},
                                                        {"/=", AssignOp::Div}, {"%=", AssignOp::Mod}};
    if (peek().kind == Tok::Punct) {
      auto it = ops.find(peek().text);
      if (it != ops.end()) {
        Token op = next();
        if (!is_lvalue(*e)) syntax(op, "assignment to a non-lvalue");
        auto rhs = expression();
        if (check("=")) unsupported(peek(), "chained assignment");
        return st::assign(e, rhs, loc, it->second);
      }
    }
    if (e->kind == ExprKind::Unary && (e->uop == UnOp::PostInc || e->uop == UnOp::PostDec))
      return st::assign(e->args[0], nullptr, loc, e->uop == UnOp::PostInc ? AssignOp::Inc : AssignOp::Dec);
    if (e->kind == ExprKind::Call) return st::expr(e, loc);
    syntax(start, "expression statement has no effect");
  }

  StmtPtr statement() {
    const Token& t = peek();
    if (accept(";")) return nullptr;
    if (check("{")) {
      Location loc = loc_of(t);
      next();
      auto b = statements_until("}");
      expect("}");
      return st::block(std::move(b), loc);
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "if") {
        Location loc = loc_of(t);
        next();
        expect("(");
        auto c = expression();
        expect(")");
        auto then_b = body();
        StmtList else_b;
        if (accept("else")) else_b = body();
        return st::if_(c, std::move(then_b), std::move(else_b), loc);
      }
      if (t.text == "while") {
        Location loc = loc_of(t);
        next();
        expect("(");
        auto c = expression();
        expect(")");
        return st::while_(c, body(), loc);
      }
      if (t.text == "for") {
        Location loc = loc_of(t);
        next();
        expect("(");
        StmtPtr init;
        if (!check(";")) init = simple_statement(true);
        if (check(",")) unsupported(peek(), "comma operator");
        expect(";");
        ExprPtr c = check(";") ? ex::boolean(true) : expression();
        expect(";");
        StmtPtr step;
        if (!check(")")) step = simple_statement(false);
        if (check(",")) unsupported(peek(), "comma operator");
        expect(")");
        return st::for_(init, c, step, body(), loc);
      }
      if (t.text == "do" || t.text == "switch" || t.text == "goto" || t.text == "break" ||
          t.text == "continue")
        unsupported(t, "'" + t.text + "' statement");
      if (t.text == "return") {
        Location loc = loc_of(t);
        next();
        ExprPtr v;
        if (!check(";")) v = expression();
        expect(";");
        return st::ret(v, loc);
      }
      if (t.text == "scanf") return read_statement();
      if (t.text == "printf") return write_statement();
    }
    auto s = simple_statement(true);
    if (check(",")) unsupported(peek(), "comma operator");
    expect(";");
    return s;
  }

  StmtPtr read_statement() {
    Token t = next();
    Location loc = loc_of(t);
    expect("(");
    if (peek().kind != Tok::String) syntax(peek(), "scanf expects a format string");
    std::string fmt = next().text;
    std::vector<ExprPtr> lvs;
    while (accept(",")) {
      if (!accept("&")) unsupported(peek(), "scanf argument must be '&lvalue'");
      auto lv = postfix();
      if (!is_lvalue(*lv)) syntax(t, "scanf target must be an lvalue");
      lvs.push_back(lv);
    }
    expect(")");
    expect(";");
    check_format(t, fmt, lvs.size());
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Read;
    s->loc = loc;
    s->format = fmt;
    s->args = std::move(lvs);
    return s;
  }

  StmtPtr write_statement() {
    Token t = next();
    Location loc = loc_of(t);
    expect("(");
    if (peek().kind != Tok::String) syntax(peek(), "printf expects a format string");
    std::string fmt = next().text;
    std::vector<ExprPtr> args;
    while (accept(",")) args.push_back(expression());
    expect(")");
    expect(";");
    check_format(t, fmt, args.size());
    return st::write(fmt, std::move(args), loc);
  }

  static void check_format(const Token& at, const std::string& fmt, std::size_t nargs) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < fmt.size(); ++i) {
      if (fmt[i] != '%') continue;
      if (i + 1 < fmt.size() && fmt[i + 1] == '%') {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      if (j + 1 < fmt.size() && fmt[j] == 'l' && fmt[j + 1] == 'd') ++j;
      else if (j + 2 < fmt.size() && fmt[j] == 'l' && fmt[j + 1] == 'l' && fmt[j + 2] == 'd') j += 2;
      if (j >= fmt.size() || fmt[j] != 'd') unsupported(at, "only %d conversions are supported");
      ++count;
      i = j;
    }
    if (count != nargs) syntax(at, "format string expects " + std::to_string(count) + " argument(s)");
  }

  // -- expressions --------------------------------------------------------

  ExprPtr expression() { return ternary(); }

  ExprPtr ternary() {
    auto c = binary_level(0);
    if (accept("?")) {
      auto t = expression();
      expect(":");
      auto e = ternary();
      return ex::ite(c, t, e);
    }
    return c;
  }

  ExprPtr binary_level(int level) {
    static const std::vector<std::vector<std::pair<std::string, BinOp>>> levels = {
        {{"||", BinOp::Or}},
        {{"&&", BinOp::And}},
        {{"==", BinOp::Eq}, {"!=", BinOp::Ne}},
        {{"<", BinOp::Lt}, {"<=", BinOp::Le}, {">", BinOp::Gt}, {">=", BinOp::Ge}},
        {{"+", BinOp::Add}, {"-", BinOp::Sub}},
        {{"*", BinOp::Mul}, {"/", BinOp::Div}, {"%", BinOp::Mod}},
    };
    if (level == static_cast<int>(levels.size())) return unary();
    auto lhs = binary_level(level + 1);
    for (;;) {
      if (peek().kind != Tok::Punct) return lhs;
      if (peek().text == "&" || peek().text == "|" || peek().text == "^" || peek().text == "<<" ||
          peek().text == ">>")
        unsupported(peek(), "bitwise operator '" + peek().text + "'");
      bool found = false;
      for (const auto& [text, op] : levels[static_cast<std::size_t>(level)]) {
        if (peek().text == text) {
          Token t = next();
          auto rhs = binary_level(level + 1);
          auto e = std::const_pointer_cast<Expr>(ex::binary(op, lhs, rhs));
          e->line = t.line;
          e->column = t.column;
          lhs = e;
          found = true;
          break;
        }
      }
      if (!found) return lhs;
    }
  }

  ExprPtr unary() {
    const Token& t = peek();
    if (t.kind == Tok::Punct) {
      if (t.text == "-") {
        next();
        if (peek().kind == Tok::Number) {
          Token n = next();
          auto lit = std::const_pointer_cast<Expr>(ex::lit(-n.value));
          lit->line = n.line;
          lit->column = n.column;
          return postfix_ops(lit);
        }
        return ex::unary(UnOp::Neg, unary());
      }
      if (t.text == "+") {
        next();
        return unary();
      }
      if (t.text == "!") {
        next();
        return ex::unary(UnOp::Not, unary());
      }
      if (t.text == "++" || t.text == "--") {
        bool inc = next().text == "++";
        return ex::unary(inc ? UnOp::PreInc : UnOp::PreDec, unary());
      }
      if (t.text == "&") unsupported(t, "address-of outside scanf (pointer arithmetic is not supported)");
      if (t.text == "*") unsupported(t, "pointer dereference (pointer arithmetic is not supported)");
      if (t.text == "~") unsupported(t, "bitwise operator '~'");
      if (t.text == "(" && peek(1).kind == Tok::Ident &&
          (is_type_word(peek(1).text) || is_unsupported_type_word(peek(1).text)))
        unsupported(t, "type cast");
    }
    return postfix();
  }

  ExprPtr postfix() { return postfix_ops(primary()); }

  ExprPtr postfix_ops(ExprPtr e) {
    for (;;) {
      if (check("[")) {
        if (e->kind != ExprKind::Var && e->kind != ExprKind::Index) syntax(peek(), "subscript of a non-array");
        next();
        auto idx = expression();
        expect("]");
        auto args = e->args;
        args.push_back(idx);
        auto n = std::const_pointer_cast<Expr>(ex::index(e->name, std::move(args)));
        n->line = e->line;
        n->column = e->column;
        e = n;
        continue;
      }
      if (check("++") || check("--")) {
        bool inc = next().text == "++";
        e = ex::unary(inc ? UnOp::PostInc : UnOp::PostDec, e);
        continue;
      }
      if (check(".") || check("->")) unsupported(peek(), "member access");
      return e;
    }
  }

  ExprPtr primary() {
    Token t = next();
    if (t.kind == Tok::Number) {
      auto e = std::const_pointer_cast<Expr>(ex::lit(t.value));
      e->line = t.line;
      e->column = t.column;
      return e;
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "true" || t.text == "false") return ex::boolean(t.text == "true");
      if (t.text == "INT_MAX") return ex::lit(2147483647);
      if (t.text == "INT_MIN") return ex::lit(-2147483647 - 1);
      if (t.text == "NULL" || t.text == "malloc" || t.text == "calloc" || t.text == "sizeof")
        unsupported(t, "'" + t.text + "' (dynamic memory and pointers are not supported)");
      if (t.text == "scanf" || t.text == "printf") syntax(t, t.text + " is only allowed as a statement");
      if (check("(")) {
        next();
        std::vector<ExprPtr> args;
        while (!check(")")) {
          args.push_back(expression());
          if (!accept(",")) break;
        }
        expect(")");
        auto e = std::const_pointer_cast<Expr>(ex::call(t.text, std::move(args)));
        e->line = t.line;
        e->column = t.column;
        return e;
      }
      auto e = std::const_pointer_cast<Expr>(ex::var(t.text));
      e->line = t.line;
      e->column = t.column;
      return e;
    }
    if (t.kind == Tok::Punct && t.text == "(") {
      auto e = expression();
      expect(")");
      return e;
    }
    if (t.kind == Tok::String) unsupported(t, "string literal outside scanf/printf");
    if (t.kind == Tok::End) syntax(t, "unexpected end of input");
    syntax(t, "unexpected token '" + t.text + "'");
  }
};

// -- type checking ----------------------------------------------------------

[[noreturn]] void type_error(const ExprPtr& e, const std::string& msg) {
  throw Error(ErrorKind::TypeError, msg, e ? e->line : 0, e ? e->column : 0);
}

[[noreturn]] void type_error_at(const Location& l, const std::string& msg) {
  throw Error(ErrorKind::TypeError, msg, l.line, l.column);
}

void declare(SymbolTable& table, const std::string& name, VarInfo info, const Location& loc) {
  auto it = table.find(name);
  if (it == table.end()) {
    table.emplace(name, std::move(info));
    return;
  }
  if (it->second.type != info.type || it->second.rank() != info.rank())
    type_error_at(loc, "redeclaration of '" + name + "' with a different type");
}

class Checker {
public:
  explicit Checker(const Program& p) : p_(p) {}

  void run() {
    std::set<std::string> names;
    int mains = 0;
    for (const auto& f : p_.functions) {
      if (!names.insert(f.name).second) type_error_at(f.loc, "duplicate function '" + f.name + "'");
      if (f.name == "main") ++mains;
    }
    if (mains != 1) throw Error(ErrorKind::TypeError, "program must define exactly one function named main");
    SymbolTable globals;
    for (const auto& g : p_.globals) {
      for (const auto& d : g->decls) {
        for (const auto& dim : d.dims) check_int(dim, globals);
        if (d.init) check_expr(d.init, globals);
        declare(globals, d.name, VarInfo{d.type, d.dims, false, true}, g->loc);
      }
    }
    for (const auto& f : p_.functions) {
      SymbolTable table = globals;
      for (const auto& prm : f.params) {
        if (prm.type == ScalarType::Void) type_error_at(f.loc, "parameter of type void");
        table[prm.name] = VarInfo{prm.type, prm.dims, true, false};
      }
      current_ = &f;
      check_body(f.body, table);
    }
  }

private:
  const Program& p_;
  const FunctionDef* current_ = nullptr;

  void check_body(const StmtList& body, SymbolTable& table) {
    for (const auto& s : body) check_stmt(s, table);
  }

  void check_stmt(const StmtPtr& s, SymbolTable& table) {
    switch (s->kind) {
      case StmtKind::Decl:
        for (const auto& d : s->decls) {
          for (const auto& dim : d.dims) check_int(dim, table);
          declare(table, d.name, VarInfo{d.type, d.dims, false, false}, s->loc);
          if (d.init) check_expr(d.init, table);
        }
        break;
      case StmtKind::Assign:
        check_lvalue(s->lhs, table);
        if (s->rhs) check_expr(s->rhs, table);
        break;
      case StmtKind::If:
        check_expr(s->cond, table);
        check_body(s->body, table);
        check_body(s->else_body, table);
        break;
      case StmtKind::For:
        if (s->init) check_stmt(s->init, table);
        check_expr(s->cond, table);
        if (s->step) check_stmt(s->step, table);
        check_body(s->body, table);
        break;
      case StmtKind::While:
        check_expr(s->cond, table);
        check_body(s->body, table);
        break;
      case StmtKind::Read:
        for (const auto& a : s->args) check_lvalue(a, table);
        break;
      case StmtKind::Write:
        for (const auto& a : s->args) check_expr(a, table);
        break;
      case StmtKind::ExprStmt:
        check_expr(s->rhs, table);
        break;
      case StmtKind::Return:
        if (s->rhs) {
          if (current_->return_type == ScalarType::Void) type_error_at(s->loc, "void function returns a value");
          check_expr(s->rhs, table);
        }
        break;
      case StmtKind::Block:
        check_body(s->body, table);
        break;
    }
  }

  void check_lvalue(const ExprPtr& e, const SymbolTable& table) {
    auto it = table.find(e->name);
    if (it == table.end()) type_error(e, "use of undeclared variable '" + e->name + "'");
    std::size_t n = e->kind == ExprKind::Index ? e->args.size() : 0;
    if (n != it->second.rank()) type_error(e, "assignment target '" + e->name + "' must be a scalar element");
    for (const auto& i : e->args) check_int(i, table);
  }

  void check_int(const ExprPtr& e, const SymbolTable& table) {
    check_expr(e, table);
    if (is_boolean_expr(e, table)) type_error(e, "array index must have integer type");
  }

  void check_expr(const ExprPtr& e, const SymbolTable& table, bool allow_array = false) {
    switch (e->kind) {
      case ExprKind::IntLit:
      case ExprKind::BoolLit:
        return;
      case ExprKind::Var: {
        auto it = table.find(e->name);
        if (it == table.end()) type_error(e, "use of undeclared variable '" + e->name + "'");
        if (it->second.is_array() && !allow_array) type_error(e, "array '" + e->name + "' used as a scalar");
        return;
      }
      case ExprKind::Index: {
        auto it = table.find(e->name);
        if (it == table.end()) type_error(e, "use of undeclared variable '" + e->name + "'");
        if (e->args.size() > it->second.rank()) type_error(e, "too many subscripts on '" + e->name + "'");
        if (e->args.size() < it->second.rank() && !allow_array)
          type_error(e, "partially subscripted array '" + e->name + "' used as a scalar");
        for (const auto& i : e->args) check_int(i, table);
        return;
      }
      case ExprKind::Unary:
        if (e->uop != UnOp::Neg && e->uop != UnOp::Not) check_lvalue(e->args[0], table);
        else check_expr(e->args[0], table);
        return;
      case ExprKind::Binary:
      case ExprKind::Ternary:
        for (const auto& a : e->args) check_expr(a, table);
        return;
      case ExprKind::Call: {
        const FunctionDef* f = p_.find(e->name);
        if (!f) type_error(e, "call to undefined function '" + e->name + "'");
        if (f->params.size() != e->args.size()) type_error(e, "wrong number of arguments to '" + e->name + "'");
        for (std::size_t i = 0; i < e->args.size(); ++i) {
          const auto& prm = f->params[i];
          const auto& a = e->args[i];
          if (prm.dims.empty()) {
            check_expr(a, table);
            continue;
          }
          if (a->kind != ExprKind::Var && a->kind != ExprKind::Index)
            type_error(a, "array argument expected for parameter '" + prm.name + "'");
          check_expr(a, table, true);
          auto it = table.find(a->name);
          std::size_t remaining = it->second.rank() - (a->kind == ExprKind::Index ? a->args.size() : 0);
          if (remaining != prm.dims.size())
            type_error(a, "array argument rank mismatch for parameter '" + prm.name + "'");
        }
        return;
      }
    }
  }
};

}  // namespace

bool is_boolean_expr(const ExprPtr& e, const SymbolTable& symbols) {
  switch (e->kind) {
    case ExprKind::BoolLit: return true;
    case ExprKind::Var:
    case ExprKind::Index: {
      auto it = symbols.find(e->name);
      return it != symbols.end() && it->second.type == ScalarType::Bool;
    }
    case ExprKind::Unary: return e->uop == UnOp::Not;
    case ExprKind::Binary: return is_comparison(e->bop) || is_boolean_op(e->bop);
    case ExprKind::Ternary: return is_boolean_expr(e->args[1], symbols) && is_boolean_expr(e->args[2], symbols);
    default: return false;
  }
}

SymbolTable symbols_of(const Program& p, const FunctionDef& f) {
  SymbolTable table;
  for (const auto& g : p.globals)
    for (const auto& d : g->decls) table.emplace(d.name, VarInfo{d.type, d.dims, false, true});
  for (const auto& prm : f.params) table[prm.name] = VarInfo{prm.type, prm.dims, true, false};
  for_each_stmt(f.body, [&](const StmtPtr& s) {
    if (s->kind == StmtKind::Decl)
      for (const auto& d : s->decls) table.emplace(d.name, VarInfo{d.type, d.dims, false, false});
  });
  return table;
}

void typecheck(const Program& p) { Checker(p).run(); }

Program parse(std::string_view source) {
  Parser parser(lex(source));
  Program p = parser.program();
  typecheck(p);
  renumber(p);
  return p;
}

ExprPtr parse_expression(std::string_view text) {
  Parser parser(lex(text));
  return parser.standalone_expression();
}

}  // namespace dpfb
