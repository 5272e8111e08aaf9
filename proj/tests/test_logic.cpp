#include <gtest/gtest.h>

#include <map>

#include "grg/graph.hpp"
#include "grg/logic.hpp"
#include "grg/rng.hpp"

namespace grg::logic {
namespace {

using K = Formula::Kind;

// ---------------------------------------------------------------------------
// Independent naive evaluator (no memo, no sharing) used as the oracle.
bool naive_eval(const StructureView& s, const FormulaPtr& f,
                std::map<std::string, std::size_t> env) {
  auto term = [&](const Term& t) -> std::size_t {
    if (t.kind == Term::Kind::constant) return s.constants.at(t.name);
    auto it = env.find(t.name);
    if (it == env.end()) throw UnboundVariable(t.name);
    return it->second;
  };
  switch (f->kind) {
    case K::edge_atom: return (*s.edges)[term(f->terms[0])].test(term(f->terms[1]));
    case K::ball_atom: return (*s.balls)[term(f->terms[0])].test(term(f->terms[1]));
    case K::order_atom:
      return s.order(f->shifts[0], f->shifts[1], f->shifts[2],
                     term(f->terms[0]), term(f->terms[1]), term(f->terms[2]));
    case K::eq_atom: return term(f->terms[0]) == term(f->terms[1]);
    case K::negation: return !naive_eval(s, f->lhs, env);
    case K::conjunction: return naive_eval(s, f->lhs, env) && naive_eval(s, f->rhs, env);
    case K::disjunction: return naive_eval(s, f->lhs, env) || naive_eval(s, f->rhs, env);
    case K::implication: return !naive_eval(s, f->lhs, env) || naive_eval(s, f->rhs, env);
    case K::exists:
      for (std::size_t v = 0; v < s.n; ++v) {
        env[f->var] = v;
        if (naive_eval(s, f->lhs, env)) return true;
      }
      return false;
    case K::forall:
      for (std::size_t v = 0; v < s.n; ++v) {
        env[f->var] = v;
        if (!naive_eval(s, f->lhs, env)) return false;
      }
      return true;
  }
  return false;
}

// Random AST over variables x, y and a constant c.
FormulaPtr random_formula(Rng& rng, int depth, std::vector<std::string> scope) {
  auto term = [&]() -> Term {
    if (rng.coin(0.15)) return Term{Term::Kind::constant, "c"};
    return Term{Term::Kind::variable, scope[rng.below(scope.size())]};
  };
  auto atom = [&]() {
    auto f = std::make_shared<Formula>();
    switch (rng.below(3)) {
      case 0: f->kind = K::edge_atom; f->terms = {term(), term()}; break;
      case 1: f->kind = K::ball_atom; f->terms = {term(), term()}; break;
      default: f->kind = K::eq_atom; f->terms = {term(), term()}; break;
    }
    return f;
  };
  if (depth <= 0 || rng.coin(0.25)) return atom();
  auto f = std::make_shared<Formula>();
  switch (rng.below(6)) {
    case 0:
      f->kind = K::negation;
      f->lhs = random_formula(rng, depth - 1, scope);
      return f;
    case 1: f->kind = K::conjunction; break;
    case 2: f->kind = K::disjunction; break;
    case 3: f->kind = K::implication; break;
    default: {
      f->kind = rng.coin(0.5) ? K::exists : K::forall;
      f->var = "w" + std::to_string(rng.below(3));
      auto inner = scope;
      inner.push_back(f->var);
      f->lhs = random_formula(rng, depth - 1, inner);
      return f;
    }
  }
  f->lhs = random_formula(rng, depth - 1, scope);
  f->rhs = random_formula(rng, depth - 1, scope);
  return f;
}

StructureView random_structure(Rng& rng, std::size_t n,
                               std::vector<DynBitset>& edges,
                               std::vector<DynBitset>& balls) {
  edges.assign(n, DynBitset(n));
  balls.assign(n, DynBitset(n));
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      if (rng.coin(0.4)) { edges[u].set(v); edges[v].set(u); }
      if (rng.coin(0.6)) { balls[u].set(v); balls[v].set(u); }
    }
  StructureView s;
  s.n = n;
  s.edges = &edges;
  s.balls = &balls;
  s.constants["c"] = n ? rng.below(n) : 0;
  return s;
}

// ---------------------------------------------------------------------------

TEST(Parse, GrammarBasics) {
  auto r = parse("def N2(v,x) := E(v,x) | exists w (E(v,w) & E(w,x)); "
                 "forall z (E(x,z) -> N2(v,z))");
  EXPECT_EQ(r.formula->kind, K::forall);
  auto free = free_variables(r.formula);
  EXPECT_EQ(free, (std::set<std::string>{"v", "x"}));
}

TEST(Parse, SyntaxErrorPosition) {
  try {
    parse("E(x");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position, 4u);
  }
}

TEST(Parse, OrderAtomShifts) {
  auto r = parse("C[1,0,-2](a,b,c)");
  ASSERT_EQ(r.formula->kind, K::order_atom);
  EXPECT_EQ(r.formula->shifts, (std::array<long, 3>{1, 0, -2}));
}

TEST(Parse, ConstDeclarationAndUnknownPredicate) {
  auto r = parse("const c0, c1; E(c0, c1)");
  EXPECT_EQ(r.constants.size(), 2u);
  EXPECT_EQ(r.formula->terms[0].kind, Term::Kind::constant);
  EXPECT_THROW(parse("P(x, y)"), UnknownSymbol);
  EXPECT_THROW(parse("def E(x) := x = x; E(a, b)"), SyntaxError);
}

TEST(Parse, PrecedenceAndAssociativity) {
  // a=b | c=d & e=f  parses as  a=b | (c=d & e=f)
  auto r = parse("a = b | c = d & e = f");
  EXPECT_EQ(r.formula->kind, K::disjunction);
  EXPECT_EQ(r.formula->rhs->kind, K::conjunction);
  // x=x -> y=y -> z=z is right associative
  auto r2 = parse("x = x -> y = y -> z = z");
  EXPECT_EQ(r2.formula->kind, K::implication);
  EXPECT_EQ(r2.formula->rhs->kind, K::implication);
}

TEST(Parse, DefExpansionAvoidsCapture) {
  // The body's bound w must not capture the argument w.
  auto r = parse("def P(x) := exists w (E(x, w)); P(w)");
  ASSERT_EQ(r.formula->kind, K::exists);
  EXPECT_NE(r.formula->var, "w");
  EXPECT_EQ(r.formula->lhs->terms[0].name, "w");
}

TEST(Parse, PrintRoundTripOnRandomAsts) {
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    auto f = random_formula(rng, 6, {"x", "y"});
    auto back = parse("const c; " + print(f)).formula;
    EXPECT_TRUE(ast_equal(f, back)) << print(f);
  }
}

TEST(Evaluate, TrivialExamples) {
  std::vector<DynBitset> edges(2, DynBitset(2));
  edges[0].set(1);
  edges[1].set(0);
  StructureView s;
  s.n = 2;
  s.edges = &edges;
  EXPECT_TRUE(evaluate(s, parse("E(x,y)").formula, {{"x", 0}, {"y", 1}}));
  EXPECT_FALSE(evaluate(s, parse("E(x,x)").formula, {{"x", 0}}));

  std::vector<DynBitset> none(1, DynBitset(1));
  StructureView iso{1, &none, nullptr, nullptr, {}};
  EXPECT_FALSE(evaluate(iso, parse("exists y (E(x,y))").formula, {{"x", 0}}));
}

TEST(Evaluate, Errors) {
  std::vector<DynBitset> edges(2, DynBitset(2));
  StructureView s;
  s.n = 2;
  s.edges = &edges;
  EXPECT_THROW(evaluate(s, parse("B(x,y)").formula, {{"x", 0}, {"y", 1}}),
               MissingOracle);
  EXPECT_THROW(evaluate(s, parse("E(x,y)").formula, {{"x", 0}}), UnboundVariable);
  EXPECT_THROW(evaluate(s, parse("const k; E(k,x)").formula, {{"x", 0}}),
               UnknownSymbol);
}

TEST(Evaluate, AgreesWithNaiveOracle) {
  Rng rng(57);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    std::vector<DynBitset> edges, balls;
    auto s = random_structure(rng, n, edges, balls);
    auto f = random_formula(rng, 5, {"x", "y"});
    Env env{{"x", rng.below(n)}, {"y", rng.below(n)}};
    std::map<std::string, std::size_t> naive_env(env.begin(), env.end());
    EXPECT_EQ(evaluate(s, f, env), naive_eval(s, f, naive_env)) << print(f);
  }
}

TEST(Evaluate, QuantifierDuality) {
  Rng rng(71);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    std::vector<DynBitset> edges, balls;
    auto s = random_structure(rng, n, edges, balls);
    auto body = random_formula(rng, 3, {"x", "w0"});
    auto wrap = [&](K q, FormulaPtr inner) {
      auto f = std::make_shared<Formula>();
      f->kind = q;
      f->var = "w0";
      f->lhs = std::move(inner);
      return f;
    };
    auto neg = [&](FormulaPtr inner) {
      auto f = std::make_shared<Formula>();
      f->kind = K::negation;
      f->lhs = std::move(inner);
      return f;
    };
    Env env{{"x", rng.below(n)}};
    // !exists w φ  ==  forall w !φ
    EXPECT_EQ(evaluate(s, neg(wrap(K::exists, body)), env),
              evaluate(s, wrap(K::forall, neg(body)), env));
  }
}

TEST(DefineSet, Examples) {
  auto g = GeoGraph::from_edges(4, {{0, 1}, {0, 2}});
  StructureView s;
  s.n = 4;
  s.edges = &g.adj;
  s.constants["c"] = 0;

  auto singleton = define_set(s, parse("const c; x = c").formula);
  EXPECT_EQ(singleton.to_indices(), (std::vector<std::size_t>{0}));

  auto row = define_set(s, parse("const c; E(c,x)").formula);
  EXPECT_TRUE(row == g.row(0));

  // Constant binding through params instead of the structure.
  StructureView bare = s;
  bare.constants.clear();
  auto row2 = define_set(bare, parse("const c; E(c,x)").formula, {{"c", 0}});
  EXPECT_TRUE(row2 == g.row(0));

  EXPECT_THROW(define_set(s, parse("E(x,y)").formula), Error);
}

// Hand-built 6-vertex check of the unit-ball formula against brute force.
TEST(DefineSet, BallFormulaOnHandBuiltGraph) {
  // 0-1-2-3-4-5 path plus chord 1-3.
  auto g = GeoGraph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 3}});
  StructureView s;
  s.n = 6;
  s.edges = &g.adj;
  s.constants["v"] = 1;
  auto r = parse(
      "const v; "
      "def N2(a,x) := E(a,x) | exists w (E(a,w) & E(w,x)); "
      "N2(v,x) & forall z (E(x,z) -> N2(v,z))");
  auto got = define_set(s, r.formula);
  // Brute force: N2(1) = {0,2,3,1(via repeat)} + {4 via 3}; check closure.
  auto n2 = neighbors_k(g, 1, 2);
  DynBitset want(6);
  for (std::size_t x = 0; x < 6; ++x) {
    if (!n2.test(x)) continue;
    bool closed = true;
    g.row(x).for_each([&](std::size_t z) { closed &= n2.test(z); });
    if (closed) want.set(x);
  }
  EXPECT_TRUE(got == want);
}

}  // namespace
}  // namespace grg::logic
