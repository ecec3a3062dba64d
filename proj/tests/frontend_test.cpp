#include <gtest/gtest.h>

#include "dpfb/error.hpp"
#include "dpfb/frontend.hpp"
#include "dpfb/render.hpp"
#include "test_support.hpp"

using namespace dpfb;

namespace {

ErrorKind error_of(const std::string& src) {
  try {
    parse(src);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error for: " << src;
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST(Parse, MinimalProgram) {
  auto p = parse("int main(){int x; x = 1; return 0;}");
  ASSERT_EQ(p.functions.size(), 1u);
  EXPECT_EQ(p.main().body.size(), 3u);
  EXPECT_EQ(p.main().body[0]->kind, StmtKind::Decl);
  EXPECT_EQ(p.main().body[1]->kind, StmtKind::Assign);
  EXPECT_EQ(p.main().body[2]->kind, StmtKind::Return);
}

TEST(Parse, WorkedExampleReference) {
  auto p = corpus::load("sumtrian_fig2.c");
  ASSERT_EQ(p.functions.size(), 1u);
  const auto& body = p.main().body;
  // decl, scanf, decl, input loop, init, update loop, max init, max loop, printf
  ASSERT_EQ(body.size(), 9u);
  EXPECT_EQ(body[3]->kind, StmtKind::For);
  EXPECT_EQ(body[3]->loc.line, 5);
  EXPECT_EQ(body[4]->loc.line, 8);
  EXPECT_EQ(body[5]->kind, StmtKind::For);
  EXPECT_EQ(body[5]->loc.line, 9);
  EXPECT_EQ(body[7]->loc.line, 21);
}

TEST(Parse, WorkedExampleCandidate) {
  auto p = corpus::load("sumtrian_fig3.c");
  ASSERT_EQ(p.functions.size(), 3u);
  EXPECT_NE(p.find("max"), nullptr);
  EXPECT_NE(p.find("max_arr"), nullptr);
  EXPECT_EQ(p.find("max_arr")->params[0].dims.size(), 1u);
}

TEST(Parse, LocationsStrictlyIncrease) {
  auto p = corpus::load("sumtrian_fig3.c");
  int last = 0;
  bool ordered = true;
  for_each_stmt(p, [&](const StmtPtr& s) {
    ordered = ordered && s->loc.ordinal > last;
    last = s->loc.ordinal;
  });
  EXPECT_TRUE(ordered);
}

TEST(Parse, Errors) {
  EXPECT_EQ(error_of("int main(){int *p = &x; return 0;}"), ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(error_of("int main(){int x; x = &x; return 0;}"), ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(error_of("int main(){int x x = 1;}"), ErrorKind::SyntaxError);
  EXPECT_EQ(error_of("int main(){ y = 1; }"), ErrorKind::TypeError);
  EXPECT_EQ(error_of("int main(){int a[3]; a[true] = 1; }"), ErrorKind::TypeError);
  EXPECT_EQ(error_of("int f(){return 0;}"), ErrorKind::TypeError);
  EXPECT_EQ(error_of("int main(){float x;}"), ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(error_of("int main(){int x; scanf(\"%s\", &x);}"), ErrorKind::UnsupportedConstruct);
}

TEST(Parse, ErrorCarriesPosition) {
  try {
    parse("int main() {\n  int x;\n  x = ;\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SyntaxError);
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Parse, NegativeLiteralsAndPrecedence) {
  auto e = parse_expression("a - -3 * b + (c > d ? 1 : 2)");
  EXPECT_EQ(render(e), "a - -3 * b + (c > d ? 1 : 2)");
  auto f = parse_expression("!(a && b) || c == d");
  EXPECT_EQ(render(f), "!(a && b) || c == d");
}

TEST(RoundTrip, CorpusProgramsReparseToEqualAst) {
  for (const char* name : {"sumtrian_fig2.c", "sumtrian_fig3.c"}) {
    auto p = corpus::load(name);
    auto text = render(p);
    auto q = parse(text);
    EXPECT_TRUE(same_program(p, q)) << text;
    EXPECT_EQ(render(q), text);
  }
}

TEST(RoundTrip, ElseIfChainsAndBlocks) {
  const char* src =
      "int main() { int x, y; scanf(\"%d%d\", &x, &y); { x++; }\n"
      "if (x > 1) y = 1; else if (x < -1) { y = 2; } else y -= 3;\n"
      "while (x--) y *= 2; for (int k = 0; k < 3; ++k) y %= 7; printf(\"%d\\n\", y); return 0; }";
  auto p = parse(src);
  auto q = parse(render(p));
  EXPECT_TRUE(same_program(p, q)) << render(p);
}
