#pragma once

// Expression-tree scalar fields over a 4-coordinate chart: textual DSL,
// exact differentiation (real and Wirtinger) and pointwise complex
// evaluation. Trees are immutable and freely shared.

#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phgeom {

using cplx = std::complex<double>;

struct Node;
using Expression = std::shared_ptr<const Node>;

enum class Op : std::uint8_t {
  Const, Coord, Param,
  Neg, Exp, Ln, Sin, Cos, Sqrt, Conj, Re, Im, Abs,
  Add, Mul, Div, Pow,
};

struct Node {
  Op op;
  cplx value{0.0, 0.0};        // Const
  int coord = -1;              // Coord index 0..3
  std::string name;            // Coord / Param spelling
  double expo = 0.0;           // Pow exponent (constant by construction)
  std::vector<Expression> kids;
};

// ---------------------------------------------------------------------------
// errors

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(std::string msg, std::size_t off)
      : std::runtime_error(std::move(msg)), offset(off) {}
};

struct UnknownSymbolError : ParseError {
  std::string symbol;
  UnknownSymbolError(std::string sym, std::size_t off)
      : ParseError("unknown symbol '" + sym + "' at offset " + std::to_string(off), off),
        symbol(std::move(sym)) {}
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : EvalError {
  using EvalError::EvalError;
};

struct UnboundParamError : EvalError {
  using EvalError::EvalError;
};

// ---------------------------------------------------------------------------
// factories with light simplification: constant folding, 0/1 identities and
// flattening of nested sums/products. Nothing deeper.

namespace detail {
inline bool is_const(const Expression& e, cplx v) {
  return e->op == Op::Const && e->value == v;
}
inline bool is_zero(const Expression& e) { return is_const(e, cplx(0.0, 0.0)); }
inline bool is_one(const Expression& e) { return is_const(e, cplx(1.0, 0.0)); }
}  // namespace detail

inline Expression make_const(cplx v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}
inline Expression make_const(double v) { return make_const(cplx(v, 0.0)); }

inline Expression make_coord(int idx, std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Coord;
  n->coord = idx;
  n->name = std::move(name);
  return n;
}

inline Expression make_param(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Param;
  n->name = std::move(name);
  return n;
}

Expression make_neg(const Expression& a);

inline Expression make_add(std::vector<Expression> kids) {
  std::vector<Expression> flat;
  cplx c{0.0, 0.0};
  for (auto& k : kids) {
    if (k->op == Op::Add) {
      for (auto& kk : k->kids) {
        if (kk->op == Op::Const) c += kk->value;
        else flat.push_back(kk);
      }
    } else if (k->op == Op::Const) {
      c += k->value;
    } else {
      flat.push_back(k);
    }
  }
  if (c != cplx(0.0, 0.0) || flat.empty()) flat.push_back(make_const(c));
  if (flat.size() == 1) return flat[0];
  auto n = std::make_shared<Node>();
  n->op = Op::Add;
  n->kids = std::move(flat);
  return n;
}

inline Expression make_mul(std::vector<Expression> kids) {
  std::vector<Expression> flat;
  cplx c{1.0, 0.0};
  for (auto& k : kids) {
    if (k->op == Op::Mul) {
      for (auto& kk : k->kids) {
        if (kk->op == Op::Const) c *= kk->value;
        else flat.push_back(kk);
      }
    } else if (k->op == Op::Const) {
      c *= k->value;
    } else {
      flat.push_back(k);
    }
  }
  if (c == cplx(0.0, 0.0)) return make_const(0.0);
  if (flat.empty()) return make_const(c);
  if (c == cplx(-1.0, 0.0)) return make_neg(flat.size() == 1 ? flat[0] : [&] {
    auto m = std::make_shared<Node>();
    m->op = Op::Mul;
    m->kids = flat;
    return Expression(m);
  }());
  if (c != cplx(1.0, 0.0)) flat.insert(flat.begin(), make_const(c));
  if (flat.size() == 1) return flat[0];
  auto n = std::make_shared<Node>();
  n->op = Op::Mul;
  n->kids = std::move(flat);
  return n;
}

inline Expression make_neg(const Expression& a) {
  if (a->op == Op::Const) return make_const(-a->value);
  if (a->op == Op::Neg) return a->kids[0];
  auto n = std::make_shared<Node>();
  n->op = Op::Neg;
  n->kids = {a};
  return n;
}

inline Expression make_sub(const Expression& a, const Expression& b) {
  return make_add({a, make_neg(b)});
}

inline Expression make_div(const Expression& a, const Expression& b) {
  if (detail::is_zero(a)) return make_const(0.0);
  if (detail::is_one(b)) return a;
  if (a->op == Op::Const && b->op == Op::Const && b->value != cplx(0.0, 0.0))
    return make_const(a->value / b->value);
  auto n = std::make_shared<Node>();
  n->op = Op::Div;
  n->kids = {a, b};
  return n;
}

Expression make_unary(Op op, const Expression& a);

// x^e for constant e; negative exponents become 1/x^|e| so that every tree
// prints inside the DSL grammar.
inline Expression make_pow(const Expression& a, double e) {
  if (e == 0.0) return make_const(1.0);
  if (e == 1.0) return a;
  if (e < 0.0) return make_div(make_const(1.0), make_pow(a, -e));
  if (a->op == Op::Const) {
    if (a->value.imag() == 0.0 && (a->value.real() > 0.0 || e == std::round(e))) {
      double r = std::round(e);
      if (e == r) {
        cplx acc{1.0, 0.0};
        for (int i = 0; i < static_cast<int>(r); ++i) acc *= a->value;
        return make_const(acc);
      }
      return make_const(std::pow(a->value.real(), e));
    }
  }
  auto n = std::make_shared<Node>();
  n->op = Op::Pow;
  n->kids = {a};
  n->expo = e;
  return n;
}

inline Expression make_unary(Op op, const Expression& a) {
  if (a->op == Op::Const) {
    const cplx v = a->value;
    switch (op) {
      case Op::Exp: return make_const(std::exp(v));
      case Op::Sin: return make_const(std::sin(v));
      case Op::Cos: return make_const(std::cos(v));
      case Op::Conj: return make_const(std::conj(v));
      case Op::Re: return make_const(v.real());
      case Op::Im: return make_const(v.imag());
      case Op::Abs: return make_const(std::abs(v));
      case Op::Sqrt: return make_const(std::sqrt(v));
      case Op::Ln:
        if (v.imag() == 0.0 && v.real() > 0.0) return make_const(std::log(v.real()));
        break;  // fold only on the real-log domain
      default: break;
    }
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->kids = {a};
  return n;
}

// ---------------------------------------------------------------------------
// Chart

struct ComplexPairing {
  std::string name;  // e.g. "z"
  int re = -1;       // coordinate index of the real part
  int im = -1;       // coordinate index of the imaginary part
};

struct Chart {
  std::array<std::string, 4> coords;
  std::vector<ComplexPairing> pairings;
  Expression domain_predicate;  // must evaluate > 0 at valid points; may be null

  int coord_index(const std::string& name) const {
    for (int i = 0; i < 4; ++i)
      if (coords[i] == name) return i;
    return -1;
  }
  const ComplexPairing* pairing(const std::string& name) const {
    for (auto& p : pairings)
      if (p.name == name) return &p;
    return nullptr;
  }
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(std::array<std::string, 4> coords,
                           std::vector<ComplexPairing> pairings = {},
                           Expression domain_predicate = nullptr) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (coords[i] == coords[j])
        throw std::invalid_argument("chart coordinate names must be unique");
  std::array<bool, 4> used{};
  for (auto& p : pairings) {
    if (p.re < 0 || p.re > 3 || p.im < 0 || p.im > 3 || p.re == p.im)
      throw std::invalid_argument("complex pairing indices out of range");
    if (used[p.re] || used[p.im])
      throw std::invalid_argument("complex pairings must be disjoint");
    used[p.re] = used[p.im] = true;
  }
  auto c = std::make_shared<Chart>();
  c->coords = std::move(coords);
  c->pairings = std::move(pairings);
  c->domain_predicate = std::move(domain_predicate);
  return c;
}

// ---------------------------------------------------------------------------
// evaluation

using ParamMap = std::map<std::string, cplx>;

inline cplx evaluate(const Expression& e, const double pt[4], const ParamMap& params) {
  switch (e->op) {
    case Op::Const: return e->value;
    case Op::Coord: return cplx(pt[e->coord], 0.0);
    case Op::Param: {
      auto it = params.find(e->name);
      if (it == params.end()) throw UnboundParamError("unbound parameter '" + e->name + "'");
      return it->second;
    }
    case Op::Neg: return -evaluate(e->kids[0], pt, params);
    case Op::Exp: return std::exp(evaluate(e->kids[0], pt, params));
    case Op::Ln: {
      cplx v = evaluate(e->kids[0], pt, params);
      if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v)) || v.real() <= 0.0)
        throw DomainError("ln argument outside the positive real axis");
      return cplx(std::log(v.real()), 0.0);
    }
    case Op::Sin: return std::sin(evaluate(e->kids[0], pt, params));
    case Op::Cos: return std::cos(evaluate(e->kids[0], pt, params));
    case Op::Sqrt: return std::sqrt(evaluate(e->kids[0], pt, params));
    case Op::Conj: return std::conj(evaluate(e->kids[0], pt, params));
    case Op::Re: return cplx(evaluate(e->kids[0], pt, params).real(), 0.0);
    case Op::Im: return cplx(evaluate(e->kids[0], pt, params).imag(), 0.0);
    case Op::Abs: return cplx(std::abs(evaluate(e->kids[0], pt, params)), 0.0);
    case Op::Add: {
      cplx s{0.0, 0.0};
      for (auto& k : e->kids) s += evaluate(k, pt, params);
      return s;
    }
    case Op::Mul: {
      cplx s{1.0, 0.0};
      for (auto& k : e->kids) s *= evaluate(k, pt, params);
      return s;
    }
    case Op::Div: {
      cplx num = evaluate(e->kids[0], pt, params);
      cplx den = evaluate(e->kids[1], pt, params);
      if (den == cplx(0.0, 0.0)) throw DomainError("division by zero");
      return num / den;
    }
    case Op::Pow: {
      cplx b = evaluate(e->kids[0], pt, params);
      double r = std::round(e->expo);
      if (e->expo == r && std::abs(r) <= 64.0) {
        cplx acc{1.0, 0.0};
        for (int i = 0; i < static_cast<int>(r); ++i) acc *= b;
        return acc;
      }
      return std::pow(b, cplx(e->expo, 0.0));
    }
  }
  throw EvalError("corrupt expression node");
}

// ---------------------------------------------------------------------------
// differentiation

inline Expression differentiate(const Expression& e, int coord) {
  switch (e->op) {
    case Op::Const:
    case Op::Param: return make_const(0.0);
    case Op::Coord: return make_const(e->coord == coord ? 1.0 : 0.0);
    case Op::Neg: return make_neg(differentiate(e->kids[0], coord));
    case Op::Exp: return make_mul({e, differentiate(e->kids[0], coord)});
    case Op::Ln: return make_div(differentiate(e->kids[0], coord), e->kids[0]);
    case Op::Sin:
      return make_mul({make_unary(Op::Cos, e->kids[0]), differentiate(e->kids[0], coord)});
    case Op::Cos:
      return make_neg(make_mul({make_unary(Op::Sin, e->kids[0]), differentiate(e->kids[0], coord)}));
    case Op::Sqrt:
      return make_div(differentiate(e->kids[0], coord), make_mul({make_const(2.0), e}));
    case Op::Conj: return make_unary(Op::Conj, differentiate(e->kids[0], coord));
    case Op::Re: return make_unary(Op::Re, differentiate(e->kids[0], coord));
    case Op::Im: return make_unary(Op::Im, differentiate(e->kids[0], coord));
    case Op::Abs:
      // d|f| = Re(conj(f) f') / |f|
      return make_div(make_unary(Op::Re, make_mul({make_unary(Op::Conj, e->kids[0]),
                                                   differentiate(e->kids[0], coord)})),
                      e);
    case Op::Add: {
      std::vector<Expression> ks;
      for (auto& k : e->kids) ks.push_back(differentiate(k, coord));
      return make_add(std::move(ks));
    }
    case Op::Mul: {
      std::vector<Expression> terms;
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        std::vector<Expression> f;
        for (std::size_t j = 0; j < e->kids.size(); ++j)
          f.push_back(i == j ? differentiate(e->kids[j], coord) : e->kids[j]);
        terms.push_back(make_mul(std::move(f)));
      }
      return make_add(std::move(terms));
    }
    case Op::Div: {
      const auto& a = e->kids[0];
      const auto& b = e->kids[1];
      return make_div(make_sub(make_mul({differentiate(a, coord), b}),
                               make_mul({a, differentiate(b, coord)})),
                      make_mul({b, b}));
    }
    case Op::Pow: {
      return make_mul({make_const(e->expo), make_pow(e->kids[0], e->expo - 1.0),
                       differentiate(e->kids[0], coord)});
    }
  }
  throw EvalError("corrupt expression node");
}

// Wirtinger derivative w.r.t. a declared complex pairing:
//   d/dz  = (d/dx - i d/dy)/2,   d/dzbar = (d/dx + i d/dy)/2.
inline Expression wirtinger(const Expression& e, const Chart& chart,
                            const std::string& zname, bool conjugate) {
  const ComplexPairing* p = chart.pairing(zname);
  if (!p) throw std::invalid_argument("unknown complex coordinate '" + zname + "'");
  Expression dx = differentiate(e, p->re);
  Expression dy = differentiate(e, p->im);
  cplx iunit = conjugate ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
  return make_mul({make_const(0.5), make_add({dx, make_mul({make_const(iunit), dy})})});
}

// ---------------------------------------------------------------------------
// coordinate substitution (simultaneous); used by pullbacks.

inline Expression substitute(const Expression& e, const std::array<Expression, 4>& repl) {
  switch (e->op) {
    case Op::Const:
    case Op::Param: return e;
    case Op::Coord: return repl[e->coord] ? repl[e->coord] : e;
    default: {
      std::vector<Expression> ks;
      ks.reserve(e->kids.size());
      bool changed = false;
      for (auto& k : e->kids) {
        auto s = substitute(k, repl);
        changed = changed || (s != k);
        ks.push_back(std::move(s));
      }
      if (!changed) return e;
      switch (e->op) {
        case Op::Neg: return make_neg(ks[0]);
        case Op::Add: return make_add(std::move(ks));
        case Op::Mul: return make_mul(std::move(ks));
        case Op::Div: return make_div(ks[0], ks[1]);
        case Op::Pow: return make_pow(ks[0], e->expo);
        default: return make_unary(e->op, ks[0]);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// structural equality

inline bool equal(const Expression& a, const Expression& b) {
  if (a == b) return true;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::Const: return a->value == b->value;
    case Op::Coord: return a->coord == b->coord;
    case Op::Param: return a->name == b->name;
    case Op::Pow:
      if (a->expo != b->expo) return false;
      [[fallthrough]];
    default:
      if (a->kids.size() != b->kids.size()) return false;
      for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!equal(a->kids[i], b->kids[i])) return false;
      return true;
  }
}

// ---------------------------------------------------------------------------
// printer; emits text inside the DSL grammar, minimal parentheses.

namespace detail {

inline std::string fmt_double(double v) {
  std::array<char, 32> buf;
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

inline std::string fmt_const(cplx v) {
  if (v.imag() == 0.0) {
    if (v.real() < 0.0) return "(-" + fmt_double(-v.real()) + ")";
    return fmt_double(v.real());
  }
  if (v.real() == 0.0) {
    if (v.imag() == 1.0) return "i";
    if (v.imag() == -1.0) return "(-i)";
    if (v.imag() < 0.0) return "(-" + fmt_double(-v.imag()) + "*i)";
    return fmt_double(v.imag()) + "*i";
  }
  std::string re = v.real() < 0.0 ? "-" + fmt_double(-v.real()) : fmt_double(v.real());
  std::string im = v.imag() < 0.0 ? " - " + fmt_double(-v.imag()) : " + " + fmt_double(v.imag());
  return "(" + re + im + "*i)";
}

// precedence: 0 add, 1 mul/div, 2 unary-minus, 3 pow-base/atom
std::string print_prec(const Expression& e, int parent);

inline std::string fname(Op op) {
  switch (op) {
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Sqrt: return "sqrt";
    case Op::Conj: return "conj";
    case Op::Re: return "re";
    case Op::Im: return "im";
    case Op::Abs: return "abs";
    default: return "?";
  }
}

inline std::string print_prec(const Expression& e, int parent) {
  std::string s;
  int prec;
  switch (e->op) {
    case Op::Const: s = fmt_const(e->value); prec = 3; break;
    case Op::Coord: s = e->name; prec = 3; break;
    case Op::Param: s = e->name; prec = 3; break;
    case Op::Add: {
      s = print_prec(e->kids[0], 0);
      for (std::size_t k = 1; k < e->kids.size(); ++k) {
        const auto& kid = e->kids[k];
        if (kid->op == Op::Neg) s += " - " + print_prec(kid->kids[0], 1);
        else if (kid->op == Op::Const && kid->value.imag() == 0.0 && kid->value.real() < 0.0)
          s += " - " + fmt_double(-kid->value.real());
        else s += " + " + print_prec(kid, 1);
      }
      prec = 0;
      break;
    }
    case Op::Mul: {
      s = print_prec(e->kids[0], 1);
      for (std::size_t k = 1; k < e->kids.size(); ++k) s += "*" + print_prec(e->kids[k], 2);
      prec = 1;
      break;
    }
    case Op::Div:
      s = print_prec(e->kids[0], 1) + "/" + print_prec(e->kids[1], 2);
      prec = 1;
      break;
    case Op::Neg:
      s = "-" + print_prec(e->kids[0], 2);
      prec = 2;
      break;
    case Op::Pow:
      s = print_prec(e->kids[0], 4) + "^" + fmt_double(e->expo);
      prec = 2;
      break;
    default:
      s = fname(e->op) + "(" + print_prec(e->kids[0], 0) + ")";
      prec = 3;
      break;
  }
  if (prec < parent) return "(" + s + ")";
  return s;
}

}  // namespace detail

inline std::string print_expression(const Expression& e) { return detail::print_prec(e, 0); }

// ---------------------------------------------------------------------------
// parser (recursive descent over the EBNF):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ['-'] atom ['^' number]
//   atom   := number | 'i' | 'pi' | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'

namespace detail {

struct Parser {
  const std::string& text;
  const Chart& chart;
  const std::vector<std::string>& params;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' ||
                                 text[pos] == '\n' || text[pos] == '\r'))
      ++pos;
  }
  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }
  bool accept(char c) {
    if (peek(c)) { ++pos; return true; }
    return false;
  }
  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "' at offset " + std::to_string(pos), pos);
  }

  Expression parse_expr() {
    Expression lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = make_add({lhs, parse_term()});
      else if (accept('-')) lhs = make_sub(lhs, parse_term());
      else return lhs;
    }
  }

  Expression parse_term() {
    Expression lhs = parse_factor();
    for (;;) {
      if (accept('*')) lhs = make_mul({lhs, parse_factor()});
      else if (accept('/')) lhs = make_div(lhs, parse_factor());
      else return lhs;
    }
  }

  Expression parse_factor() {
    bool neg = accept('-');
    Expression a = parse_atom();
    skip_ws();
    if (accept('^')) {
      double e = parse_number_literal();
      a = make_pow(a, e);
    }
    return neg ? make_neg(a) : a;
  }

  double parse_number_literal() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
      ++pos;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t save = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = save;  // 'e'/'E' begins an identifier, not an exponent
      }
    }
    if (pos == start)
      throw ParseError("expected number at offset " + std::to_string(start), start);
    double v = 0.0;
    auto res = std::from_chars(text.data() + start, text.data() + pos, v);
    if (res.ec != std::errc())
      throw ParseError("malformed number at offset " + std::to_string(start), start);
    return v;
  }

  Expression parse_atom() {
    skip_ws();
    if (pos >= text.size())
      throw ParseError("unexpected end of input at offset " + std::to_string(pos), pos);
    char c = text[pos];
    if (c == '(') {
      ++pos;
      Expression e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return make_const(parse_number_literal());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        ++pos;
      std::string id = text.substr(start, pos - start);
      if (peek('(')) {
        static const std::map<std::string, Op> fns = {
            {"exp", Op::Exp}, {"ln", Op::Ln},     {"sin", Op::Sin},
            {"cos", Op::Cos}, {"sqrt", Op::Sqrt}, {"conj", Op::Conj},
            {"re", Op::Re},   {"im", Op::Im},     {"abs", Op::Abs}};
        auto it = fns.find(id);
        if (it == fns.end()) throw UnknownSymbolError(id, start);
        expect('(');
        std::vector<Expression> args;
        args.push_back(parse_expr());
        while (accept(',')) args.push_back(parse_expr());
        expect(')');
        if (args.size() != 1)
          throw ParseError("function '" + id + "' takes one argument (offset " +
                               std::to_string(start) + ")",
                           start);
        return make_unary(it->second, args[0]);
      }
      if (id == "i") return make_const(cplx(0.0, 1.0));
      if (id == "pi") return make_const(3.14159265358979323846);
      int ci = chart.coord_index(id);
      if (ci >= 0) return make_coord(ci, id);
      for (auto& p : params)
        if (p == id) return make_param(id);
      throw UnknownSymbolError(id, start);
    }
    throw ParseError(std::string("unexpected character '") + c + "' at offset " +
                         std::to_string(pos),
                     pos);
  }
};

}  // namespace detail

inline Expression parse_expression(const std::string& text, const Chart& chart,
                                   const std::vector<std::string>& params = {}) {
  detail::Parser p{text, chart, params};
  Expression e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size())
    throw ParseError("trailing input at offset " + std::to_string(p.pos), p.pos);
  return e;
}

// ---------------------------------------------------------------------------
// ScalarField: an expression bound to a chart.

struct ScalarField {
  Expression expr;
  ChartPtr chart;

  cplx operator()(const double pt[4], const ParamMap& params = {}) const {
    return evaluate(expr, pt, params);
  }
};

inline ScalarField parse_field(const std::string& text, const ChartPtr& chart,
                               const std::vector<std::string>& params = {}) {
  return ScalarField{parse_expression(text, *chart, params), chart};
}

// Convenience algebra on fields (charts must coincide).
inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return {make_add({a.expr, b.expr}), a.chart};
}
inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return {make_sub(a.expr, b.expr), a.chart};
}
inline ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return {make_mul({a.expr, b.expr}), a.chart};
}
inline ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  return {make_div(a.expr, b.expr), a.chart};
}

}  // namespace phgeom
