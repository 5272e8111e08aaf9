#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "grg/bitset.hpp"
#include "grg/errors.hpp"

namespace grg::logic {

/// Terms are variables or declared constants; both are lowercase
/// identifiers, told apart by the constant declarations in force.
struct Term {
  enum class Kind { variable, constant };
  Kind kind;
  std::string name;

  bool operator==(const Term& o) const = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// First-order formula over { E, B, C[z,t,k], = } with the usual
/// connectives and single-variable quantifiers. Derived predicates are
/// expanded away at parse time, so evaluation never sees them.
struct Formula {
  enum class Kind {
    edge_atom,   // E(t1,t2)
    ball_atom,   // B(t1,t2)
    order_atom,  // C[z,t,k](t1,t2,t3)
    eq_atom,     // t1 = t2
    negation,
    conjunction,
    disjunction,
    implication,
    exists,
    forall,
  };

  Kind kind;
  std::vector<Term> terms;           // atoms
  std::array<long, 3> shifts{0, 0, 0};  // order atoms
  FormulaPtr lhs, rhs;               // connectives (negation uses lhs)
  std::string var;                   // quantifiers
};

inline bool is_atom(Formula::Kind k) {
  return k == Formula::Kind::edge_atom || k == Formula::Kind::ball_atom ||
         k == Formula::Kind::order_atom || k == Formula::Kind::eq_atom;
}

inline bool ast_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  if (a->terms != b->terms || a->shifts != b->shifts || a->var != b->var)
    return false;
  return ast_equal(a->lhs, b->lhs) && ast_equal(a->rhs, b->rhs);
}

inline void collect_free_vars(const FormulaPtr& f, std::set<std::string>& bound,
                              std::set<std::string>& out) {
  if (!f) return;
  if (is_atom(f->kind)) {
    for (const Term& t : f->terms)
      if (t.kind == Term::Kind::variable && !bound.count(t.name))
        out.insert(t.name);
    return;
  }
  if (f->kind == Formula::Kind::exists || f->kind == Formula::Kind::forall) {
    const bool was_bound = bound.count(f->var) > 0;
    bound.insert(f->var);
    collect_free_vars(f->lhs, bound, out);
    if (!was_bound) bound.erase(f->var);
    return;
  }
  collect_free_vars(f->lhs, bound, out);
  collect_free_vars(f->rhs, bound, out);
}

inline std::set<std::string> free_variables(const FormulaPtr& f) {
  std::set<std::string> bound, out;
  collect_free_vars(f, bound, out);
  return out;
}

/// Canonical fully parenthesized print; parses back to an equal AST.
inline std::string print(const FormulaPtr& f) {
  using K = Formula::Kind;
  auto term = [](const Term& t) { return t.name; };
  switch (f->kind) {
    case K::edge_atom:
      return "E(" + term(f->terms[0]) + ", " + term(f->terms[1]) + ")";
    case K::ball_atom:
      return "B(" + term(f->terms[0]) + ", " + term(f->terms[1]) + ")";
    case K::order_atom:
      return "C[" + std::to_string(f->shifts[0]) + "," +
             std::to_string(f->shifts[1]) + "," + std::to_string(f->shifts[2]) +
             "](" + term(f->terms[0]) + ", " + term(f->terms[1]) + ", " +
             term(f->terms[2]) + ")";
    case K::eq_atom:
      return term(f->terms[0]) + " = " + term(f->terms[1]);
    case K::negation:
      return "!" + print(f->lhs);
    case K::conjunction:
      return "(" + print(f->lhs) + " & " + print(f->rhs) + ")";
    case K::disjunction:
      return "(" + print(f->lhs) + " | " + print(f->rhs) + ")";
    case K::implication:
      return "(" + print(f->lhs) + " -> " + print(f->rhs) + ")";
    case K::exists:
      return "exists " + f->var + " (" + print(f->lhs) + ")";
    case K::forall:
      return "forall " + f->var + " (" + print(f->lhs) + ")";
  }
  return "";
}

struct ParseResult {
  FormulaPtr formula;
  std::vector<std::string> constants;  // declared in the prelude
};

namespace detail {

struct Token {
  enum class Kind {
    ident, pred, number, lparen, rparen, lbracket, rbracket, comma, semi,
    eq, bang, amp, pipe, arrow, define, kw_const, kw_def, kw_exists,
    kw_forall, eof,
  };
  Kind kind;
  std::string text;
  long value = 0;
  std::size_t pos = 0;  // 1-based character position
};

inline std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  auto push = [&](Token::Kind k, std::string text, std::size_t pos, long v = 0) {
    out.push_back(Token{k, std::move(text), v, pos + 1});
  };
  while (i < n) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    const std::size_t start = i;
    if (std::islower(static_cast<unsigned char>(c))) {
      std::size_t j = i + 1;
      while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      std::string word = src.substr(i, j - i);
      Token::Kind k = Token::Kind::ident;
      if (word == "const") k = Token::Kind::kw_const;
      else if (word == "def") k = Token::Kind::kw_def;
      else if (word == "exists") k = Token::Kind::kw_exists;
      else if (word == "forall") k = Token::Kind::kw_forall;
      push(k, std::move(word), start);
      i = j;
      continue;
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::size_t j = i + 1;
      while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      push(Token::Kind::pred, src.substr(i, j - i), start);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i + 1;
      while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      const std::string text = src.substr(i, j - i);
      push(Token::Kind::number, text, start, std::stol(text));
      i = j;
      continue;
    }
    switch (c) {
      case '(': push(Token::Kind::lparen, "(", start); ++i; break;
      case ')': push(Token::Kind::rparen, ")", start); ++i; break;
      case '[': push(Token::Kind::lbracket, "[", start); ++i; break;
      case ']': push(Token::Kind::rbracket, "]", start); ++i; break;
      case ',': push(Token::Kind::comma, ",", start); ++i; break;
      case ';': push(Token::Kind::semi, ";", start); ++i; break;
      case '=': push(Token::Kind::eq, "=", start); ++i; break;
      case '!': push(Token::Kind::bang, "!", start); ++i; break;
      case '&': push(Token::Kind::amp, "&", start); ++i; break;
      case '|': push(Token::Kind::pipe, "|", start); ++i; break;
      case '-':
        if (i + 1 < n && src[i + 1] == '>') { push(Token::Kind::arrow, "->", start); i += 2; break; }
        throw SyntaxError("stray '-'", start + 1);
      case ':':
        if (i + 1 < n && src[i + 1] == '=') { push(Token::Kind::define, ":=", start); i += 2; break; }
        throw SyntaxError("stray ':'", start + 1);
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", start + 1);
    }
  }
  push(Token::Kind::eof, "", n);
  return out;
}

struct Definition {
  std::vector<std::string> params;
  FormulaPtr body;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(tokenize(src)) {
    for (const auto& t : toks_)
      if (t.kind == Token::Kind::ident) seen_names_.insert(t.text);
  }

  ParseResult parse_program() {
    while (true) {
      if (peek().kind == Token::Kind::kw_const) { parse_const_decl(); continue; }
      if (peek().kind == Token::Kind::kw_def) { parse_def(); continue; }
      break;
    }
    FormulaPtr f = parse_formula();
    expect(Token::Kind::eof, "trailing input after formula");
    ParseResult r;
    r.formula = std::move(f);
    r.constants.assign(constants_.begin(), constants_.end());
    return r;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }

  const Token& expect(Token::Kind k, const std::string& what) {
    if (peek().kind != k) throw SyntaxError("expected " + what, peek().pos);
    return advance();
  }

  void parse_const_decl() {
    advance();  // const
    while (true) {
      const Token& name = expect(Token::Kind::ident, "constant name");
      constants_.insert(name.text);
      if (peek().kind == Token::Kind::comma) { advance(); continue; }
      break;
    }
    expect(Token::Kind::semi, "';' after constant declaration");
  }

  void parse_def() {
    advance();  // def
    const Token& name = expect(Token::Kind::pred, "predicate name");
    if (name.text == "E" || name.text == "B" || name.text == "C")
      throw SyntaxError("cannot redefine built-in relation " + name.text, name.pos);
    expect(Token::Kind::lparen, "'('");
    std::vector<std::string> params;
    while (true) {
      params.push_back(expect(Token::Kind::ident, "parameter name").text);
      if (peek().kind == Token::Kind::comma) { advance(); continue; }
      break;
    }
    expect(Token::Kind::rparen, "')'");
    expect(Token::Kind::define, "':='");
    FormulaPtr body = parse_formula();
    expect(Token::Kind::semi, "';' after definition");
    defs_[name.text] = Definition{std::move(params), std::move(body)};
  }

  FormulaPtr parse_formula() { return parse_implies(); }

  FormulaPtr parse_implies() {
    FormulaPtr lhs = parse_or();
    if (peek().kind == Token::Kind::arrow) {
      advance();
      FormulaPtr rhs = parse_implies();  // right associative
      return node(Formula::Kind::implication, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (peek().kind == Token::Kind::pipe) {
      advance();
      lhs = node(Formula::Kind::disjunction, std::move(lhs), parse_and());
    }
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_unary();
    while (peek().kind == Token::Kind::amp) {
      advance();
      lhs = node(Formula::Kind::conjunction, std::move(lhs), parse_unary());
    }
    return lhs;
  }

  FormulaPtr parse_unary() {
    const Token& t = peek();
    if (t.kind == Token::Kind::bang) {
      advance();
      return node(Formula::Kind::negation, parse_unary(), nullptr);
    }
    if (t.kind == Token::Kind::kw_exists || t.kind == Token::Kind::kw_forall) {
      const bool exists = t.kind == Token::Kind::kw_exists;
      advance();
      const Token& var = expect(Token::Kind::ident, "quantified variable");
      if (constants_.count(var.text))
        throw SyntaxError("cannot quantify over constant " + var.text, var.pos);
      expect(Token::Kind::lparen, "'(' after quantified variable");
      FormulaPtr body = parse_formula();
      expect(Token::Kind::rparen, "')'");
      auto f = std::make_shared<Formula>();
      f->kind = exists ? Formula::Kind::exists : Formula::Kind::forall;
      f->var = var.text;
      f->lhs = std::move(body);
      return f;
    }
    return parse_primary();
  }

  FormulaPtr parse_primary() {
    const Token& t = peek();
    if (t.kind == Token::Kind::lparen) {
      advance();
      FormulaPtr f = parse_formula();
      expect(Token::Kind::rparen, "')'");
      return f;
    }
    if (t.kind == Token::Kind::pred) return parse_pred_atom();
    if (t.kind == Token::Kind::ident) {
      Term lhs = parse_term();
      expect(Token::Kind::eq, "'=' in equality atom");
      Term rhs = parse_term();
      auto f = std::make_shared<Formula>();
      f->kind = Formula::Kind::eq_atom;
      f->terms = {std::move(lhs), std::move(rhs)};
      return f;
    }
    throw SyntaxError("expected a formula", t.pos);
  }

  FormulaPtr parse_pred_atom() {
    const Token& name = advance();
    if (name.text == "C") {
      expect(Token::Kind::lbracket, "'[' after C");
      std::array<long, 3> shifts{};
      for (int i = 0; i < 3; ++i) {
        shifts[i] = expect(Token::Kind::number, "integer shift").value;
        if (i < 2) expect(Token::Kind::comma, "','");
      }
      expect(Token::Kind::rbracket, "']'");
      auto args = parse_args(3);
      auto f = std::make_shared<Formula>();
      f->kind = Formula::Kind::order_atom;
      f->shifts = shifts;
      f->terms = std::move(args);
      return f;
    }
    if (name.text == "E" || name.text == "B") {
      auto args = parse_args(2);
      auto f = std::make_shared<Formula>();
      f->kind = name.text == "E" ? Formula::Kind::edge_atom : Formula::Kind::ball_atom;
      f->terms = std::move(args);
      return f;
    }
    auto it = defs_.find(name.text);
    if (it == defs_.end())
      throw UnknownSymbol("undefined predicate " + name.text);
    auto args = parse_args(it->second.params.size());
    std::map<std::string, Term> subst;
    for (std::size_t i = 0; i < args.size(); ++i)
      subst[it->second.params[i]] = args[i];
    return substitute(it->second.body, subst);
  }

  std::vector<Term> parse_args(std::size_t count) {
    expect(Token::Kind::lparen, "'('");
    std::vector<Term> args;
    for (std::size_t i = 0; i < count; ++i) {
      args.push_back(parse_term());
      if (i + 1 < count) expect(Token::Kind::comma, "','");
    }
    expect(Token::Kind::rparen, "')'");
    return args;
  }

  Term parse_term() {
    const Token& t = expect(Token::Kind::ident, "term");
    const auto kind = constants_.count(t.text) ? Term::Kind::constant
                                               : Term::Kind::variable;
    return Term{kind, t.text};
  }

  static FormulaPtr node(Formula::Kind k, FormulaPtr lhs, FormulaPtr rhs) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->lhs = std::move(lhs);
    f->rhs = std::move(rhs);
    return f;
  }

  std::string fresh_var() {
    while (true) {
      std::string name = "q" + std::to_string(fresh_counter_++);
      if (!seen_names_.count(name)) {
        seen_names_.insert(name);
        return name;
      }
    }
  }

  /// Capture-avoiding substitution used to expand derived predicates:
  /// bound variables of the body are renamed fresh.
  FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, Term>& s) {
    auto out = std::make_shared<Formula>(*f);
    if (is_atom(f->kind)) {
      for (Term& t : out->terms) {
        if (t.kind != Term::Kind::variable) continue;
        auto it = s.find(t.name);
        if (it != s.end()) t = it->second;
      }
      return out;
    }
    if (f->kind == Formula::Kind::exists || f->kind == Formula::Kind::forall) {
      auto inner = s;
      const std::string renamed = fresh_var();
      inner[f->var] = Term{Term::Kind::variable, renamed};
      out->var = renamed;
      out->lhs = substitute(f->lhs, inner);
      return out;
    }
    if (f->lhs) out->lhs = substitute(f->lhs, s);
    if (f->rhs) out->rhs = substitute(f->rhs, s);
    return out;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> constants_;
  std::map<std::string, Definition> defs_;
  std::set<std::string> seen_names_;
  int fresh_counter_ = 1;
};

}  // namespace detail

/// Parses a program: optional `const`/`def` prelude followed by a formula.
/// Derived predicates are expanded; the result is self-contained.
inline ParseResult parse(const std::string& text) {
  return detail::Parser(text).parse_program();
}

/// Finite structure the evaluator runs on. Relation oracles are total on
/// the domain when present; E and B rows are symmetric and irreflexive.
struct StructureView {
  std::size_t n = 0;
  const std::vector<DynBitset>* edges = nullptr;
  const std::vector<DynBitset>* balls = nullptr;
  std::function<bool(long, long, long, std::size_t, std::size_t, std::size_t)>
      order;  // C[z,t,k](a,b,c)
  std::map<std::string, std::size_t> constants;
};

using Env = std::vector<std::pair<std::string, std::size_t>>;

namespace detail {

struct NodeInfo {
  bool quantifier_free = false;
  std::vector<std::string> free_vars;  // sorted
};

/// Tarskian evaluation with a per-evaluator memo: quantifier-free
/// subformulas with at most two free variables are cached by their
/// bindings, which is what makes the nested recovery formulas affordable.
class Evaluator {
 public:
  explicit Evaluator(const StructureView& s) : s_(&s) {}

  bool eval(const FormulaPtr& f, Env& env) {
    using K = Formula::Kind;
    const NodeInfo& info = node_info(f);
    const bool memoizable = info.quantifier_free && info.free_vars.size() <= 2 &&
                            !is_atom(f->kind);
    std::uint64_t key = 0;
    if (memoizable) {
      key = make_key(f, info, env);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    bool result = false;
    switch (f->kind) {
      case K::edge_atom: {
        if (!s_->edges) throw MissingOracle("structure has no edge relation");
        const std::size_t a = resolve(f->terms[0], env);
        const std::size_t b = resolve(f->terms[1], env);
        result = (*s_->edges)[a].test(b);
        break;
      }
      case K::ball_atom: {
        if (!s_->balls) throw MissingOracle("structure has no ball relation");
        const std::size_t a = resolve(f->terms[0], env);
        const std::size_t b = resolve(f->terms[1], env);
        result = (*s_->balls)[a].test(b);
        break;
      }
      case K::order_atom: {
        if (!s_->order) throw MissingOracle("structure has no order relation");
        result = s_->order(f->shifts[0], f->shifts[1], f->shifts[2],
                           resolve(f->terms[0], env), resolve(f->terms[1], env),
                           resolve(f->terms[2], env));
        break;
      }
      case K::eq_atom:
        result = resolve(f->terms[0], env) == resolve(f->terms[1], env);
        break;
      case K::negation:
        result = !eval(f->lhs, env);
        break;
      case K::conjunction:
        result = eval(f->lhs, env) && eval(f->rhs, env);
        break;
      case K::disjunction:
        result = eval(f->lhs, env) || eval(f->rhs, env);
        break;
      case K::implication:
        result = !eval(f->lhs, env) || eval(f->rhs, env);
        break;
      case K::exists:
      case K::forall: {
        const bool want = f->kind == K::exists;
        result = !want;
        env.emplace_back(f->var, 0);
        for (std::size_t v = 0; v < s_->n; ++v) {
          env.back().second = v;
          if (eval(f->lhs, env) == want) {
            result = want;
            break;
          }
        }
        env.pop_back();
        break;
      }
    }
    if (memoizable) memo_[key] = result;
    return result;
  }

  std::size_t resolve(const Term& t, const Env& env) const {
    if (t.kind == Term::Kind::constant) {
      auto it = s_->constants.find(t.name);
      if (it == s_->constants.end())
        throw UnknownSymbol("constant " + t.name + " is not bound");
      return it->second;
    }
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == t.name) return it->second;
    throw UnboundVariable("variable " + t.name + " is not bound");
  }

 private:
  const NodeInfo& node_info(const FormulaPtr& f) {
    auto it = info_.find(f.get());
    if (it != info_.end()) return it->second;
    NodeInfo info;
    info.quantifier_free =
        f->kind != Formula::Kind::exists && f->kind != Formula::Kind::forall;
    if (f->lhs) info.quantifier_free &= node_info(f->lhs).quantifier_free;
    if (f->rhs) info.quantifier_free &= node_info(f->rhs).quantifier_free;
    auto fv = free_variables(f);
    info.free_vars.assign(fv.begin(), fv.end());
    return info_.emplace(f.get(), std::move(info)).first->second;
  }

  std::uint64_t make_key(const FormulaPtr& f, const NodeInfo& info, const Env& env) {
    std::uint64_t id;
    auto it = ids_.find(f.get());
    if (it != ids_.end()) id = it->second;
    else { id = ids_.size(); ids_.emplace(f.get(), id); }
    std::uint64_t v1 = 0xFFFFF, v2 = 0xFFFFF;
    if (info.free_vars.size() >= 1)
      v1 = resolve(Term{Term::Kind::variable, info.free_vars[0]}, env);
    if (info.free_vars.size() >= 2)
      v2 = resolve(Term{Term::Kind::variable, info.free_vars[1]}, env);
    return (id << 40) | (v1 << 20) | v2;
  }

  const StructureView* s_;
  std::unordered_map<const Formula*, NodeInfo> info_;
  std::unordered_map<const Formula*, std::uint64_t> ids_;
  std::unordered_map<std::uint64_t, bool> memo_;
};

}  // namespace detail

/// Standard truth over the finite domain; env binds the free variables.
inline bool evaluate(const StructureView& s, const FormulaPtr& f, const Env& env = {}) {
  detail::Evaluator ev(s);
  Env e = env;
  return ev.eval(f, e);
}

/// The set of vertices satisfying a formula with exactly one free variable.
/// `params` binds constants on top of the structure's own bindings.
inline DynBitset define_set(const StructureView& s, const FormulaPtr& f,
                            const std::map<std::string, std::size_t>& params = {}) {
  StructureView view = s;
  for (const auto& [k, v] : params) view.constants[k] = v;
  std::set<std::string> free = free_variables(f);
  if (free.size() != 1)
    throw Error("define_set needs exactly one free variable, got " +
                std::to_string(free.size()));
  const std::string var = *free.begin();
  detail::Evaluator ev(view);
  DynBitset out(view.n);
  Env env{{var, 0}};
  for (std::size_t v = 0; v < view.n; ++v) {
    env[0].second = v;
    if (ev.eval(f, env)) out.set(v);
  }
  return out;
}

}  // namespace grg::logic
