// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smallscat/fields.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace smallscat
{

struct Expression::Node
{
  enum class Op
  {
    literal,
    var_x,
    var_y,
    var_z,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    call
  };
  Op op = Op::literal;
  complex value = 0.0;
  std::string function;
  std::shared_ptr<const Node> lhs, rhs;

  complex eval(const Vec3 &p) const
  {
    switch (op)
    {
      case Op::literal:
        return value;
      case Op::var_x:
        return p.x();
      case Op::var_y:
        return p.y();
      case Op::var_z:
        return p.z();
      case Op::add:
        return lhs->eval(p) + rhs->eval(p);
      case Op::sub:
        return lhs->eval(p) - rhs->eval(p);
      case Op::mul:
        return lhs->eval(p) * rhs->eval(p);
      case Op::div:
        return lhs->eval(p) / rhs->eval(p);
      case Op::pow:
      {
        const complex base = lhs->eval(p);
        const complex e = rhs->eval(p);
        // Keep small integer powers exact so that x^2 of a real x stays real.
        if (e.imag() == 0.0 && e.real() == std::round(e.real()) && std::abs(e.real()) <= 64)
        {
          const int n = static_cast<int>(e.real());
          complex r = 1.0;
          for (int i = 0; i < std::abs(n); ++i)
          {
            r *= base;
          }
          return n >= 0 ? r : 1.0 / r;
        }
        return std::pow(base, e);
      }
      case Op::neg:
        // 0 - v keeps a +0 imaginary part, so sqrt(-4) lands on +2i.
        return complex(0.0) - lhs->eval(p);
      case Op::call:
        return apply(lhs->eval(p));
    }
    return 0.0;
  }

  complex apply(complex v) const
  {
    if (function == "sin")
      return std::sin(v);
    if (function == "cos")
      return std::cos(v);
    if (function == "tan")
      return std::tan(v);
    if (function == "exp")
      return std::exp(v);
    if (function == "log")
      return std::log(v);
    if (function == "sqrt")
      return std::sqrt(v);
    if (function == "abs")
      return std::abs(v);
    if (function == "re")
      return v.real();
    if (function == "im")
      return v.imag();
    return std::conj(v);
  }

  bool depends_on_position() const
  {
    if (op == Op::var_x || op == Op::var_y || op == Op::var_z)
    {
      return true;
    }
    return (lhs && lhs->depends_on_position()) || (rhs && rhs->depends_on_position());
  }
};

namespace
{

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr)
{
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr literal(complex v)
{
  auto n = std::make_shared<Expression::Node>();
  n->value = v;
  return n;
}

class Parser
{
public:
  explicit Parser(const std::string &text) : s(text) {}

  NodePtr parse()
  {
    NodePtr e = expr();
    skip();
    if (pos != s.size())
    {
      fail("unexpected '" + std::string(1, s[pos]) + "'");
    }
    return e;
  }

private:
  const std::string &s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string &what) const
  {
    std::ostringstream os;
    os << "cannot parse expression '" << s << "' at position " << pos << ": " << what;
    throw ValidationError("expression_parse", os.str());
  }

  void skip()
  {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
    {
      ++pos;
    }
  }

  bool accept(char c)
  {
    skip();
    if (pos < s.size() && s[pos] == c)
    {
      ++pos;
      return true;
    }
    return false;
  }

  NodePtr expr()
  {
    NodePtr lhs = term();
    for (;;)
    {
      if (accept('+'))
        lhs = make(Op::add, lhs, term());
      else if (accept('-'))
        lhs = make(Op::sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term()
  {
    NodePtr lhs = unary();
    for (;;)
    {
      if (accept('*'))
        lhs = make(Op::mul, lhs, unary());
      else if (accept('/'))
        lhs = make(Op::div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary()
  {
    if (accept('-'))
      return make(Op::neg, unary());
    if (accept('+'))
      return unary();
    return power();
  }

  NodePtr power()
  {
    NodePtr base = primary();
    if (accept('^'))
    {
      return make(Op::pow, base, unary());
    }
    return base;
  }

  NodePtr primary()
  {
    skip();
    if (pos >= s.size())
    {
      fail("unexpected end of input");
    }
    const char c = s[pos];
    if (c == '(')
    {
      ++pos;
      NodePtr e = expr();
      if (!accept(')'))
        fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
    {
      const char *begin = s.c_str() + pos;
      char *end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin)
        fail("bad number");
      pos += static_cast<std::size_t>(end - begin);
      if (pos < s.size() && s[pos] == 'i' &&
          (pos + 1 == s.size() || !std::isalnum(static_cast<unsigned char>(s[pos + 1]))))
      {
        ++pos;
        return literal(complex(0.0, v));
      }
      return literal(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)))
    {
      const std::size_t start = pos;
      while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos])))
        ++pos;
      const std::string name = s.substr(start, pos - start);
      if (name == "x")
        return make(Op::var_x);
      if (name == "y")
        return make(Op::var_y);
      if (name == "z")
        return make(Op::var_z);
      if (name == "i")
        return literal(I);
      if (name == "pi")
        return literal(pi);
      static const char *functions[] = {"sin", "cos",  "tan", "exp", "log",
                                        "sqrt", "abs", "re",  "im",  "conj"};
      for (const char *f : functions)
      {
        if (name == f)
        {
          if (!accept('('))
            fail("expected '(' after " + name);
          auto n = std::make_shared<Expression::Node>();
          n->op = Op::call;
          n->function = name;
          n->lhs = expr();
          if (!accept(')'))
            fail("expected ')'");
          return n;
        }
      }
      pos = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

}  // namespace

Expression::Expression(const std::string &text) : source(text), root(Parser(text).parse()) {}

complex Expression::operator()(const Vec3 &p) const { return root ? root->eval(p) : 0.0; }

bool Expression::is_constant() const { return !root || !root->depends_on_position(); }

ScalarField::ScalarField(complex v) : value(v) {}

ScalarField::ScalarField(const Expression &e) : type(Kind::expression), expr(e)
{
  if (expr.is_constant())
  {
    type = Kind::constant;
    value = expr(Vec3::Zero());
  }
}

ScalarField ScalarField::from_string(const std::string &text) { return ScalarField(Expression(text)); }

ScalarField ScalarField::from_grid(const Box &box, const std::array<int, 3> &nodes,
                                   std::vector<complex> values)
{
  for (int n : nodes)
  {
    if (n < 2)
    {
      throw ValidationError("invalid_argument", "grid fields need at least 2 nodes per axis");
    }
  }
  if (values.size() != static_cast<std::size_t>(nodes[0]) * nodes[1] * nodes[2])
  {
    throw ValidationError("invalid_argument", "grid field sample count does not match its shape");
  }
  if (!((box.hi.array() > box.lo.array()).all()))
  {
    throw ValidationError("invalid_argument", "grid field box must have positive extent");
  }
  ScalarField f;
  f.type = Kind::grid;
  f.box = box;
  f.nodes = nodes;
  f.samples = std::move(values);
  return f;
}

ScalarField ScalarField::from_function(std::function<complex(const Vec3 &)> f,
                                       std::string description)
{
  ScalarField out;
  out.type = Kind::function;
  out.fn = std::move(f);
  out.label = std::move(description);
  return out;
}

complex ScalarField::operator()(const Vec3 &p) const
{
  switch (type)
  {
    case Kind::constant:
      return value;
    case Kind::expression:
      return expr(p);
    case Kind::function:
      return fn(p);
    case Kind::grid:
      break;
  }
  std::array<int, 3> i0{};
  std::array<double, 3> t{};
  for (int d = 0; d < 3; ++d)
  {
    const double h = (box.hi[d] - box.lo[d]) / (nodes[d] - 1);
    const double s = std::clamp((p[d] - box.lo[d]) / h, 0.0, double(nodes[d] - 1));
    i0[d] = std::min(static_cast<int>(s), nodes[d] - 2);
    t[d] = s - i0[d];
  }
  complex sum = 0.0;
  for (int corner = 0; corner < 8; ++corner)
  {
    double w = 1.0;
    std::size_t idx = 0, stride = 1;
    for (int d = 0; d < 3; ++d)
    {
      const int bit = (corner >> d) & 1;
      w *= bit ? t[d] : 1.0 - t[d];
      idx += static_cast<std::size_t>(i0[d] + bit) * stride;
      stride *= static_cast<std::size_t>(nodes[d]);
    }
    if (w != 0.0)
    {
      sum += w * samples[idx];
    }
  }
  return sum;
}

std::string ScalarField::describe() const
{
  std::ostringstream os;
  os.precision(17);
  switch (type)
  {
    case Kind::constant:
      if (value.imag() == 0.0)
        os << value.real();
      else
        os << "(" << value.real() << (value.imag() < 0 ? "" : "+") << value.imag() << "i)";
      break;
    case Kind::expression:
      os << expr.text();
      break;
    case Kind::grid:
      os << "grid " << nodes[0] << "x" << nodes[1] << "x" << nodes[2];
      break;
    case Kind::function:
      os << label;
      break;
  }
  return os.str();
}

TensorField::TensorField() : TensorField(CMat3::Zero()) {}

TensorField::TensorField(const CMat3 &constant)
{
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      entries[3 * r + c] = ScalarField(constant(r, c));
}

CMat3 TensorField::operator()(const Vec3 &p) const
{
  CMat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      m(r, c) = entries[3 * r + c](p);
  return m;
}

bool TensorField::is_zero() const
{
  for (const auto &e : entries)
  {
    if (!e.is_constant() || e.constant_value() != 0.0)
    {
      return false;
    }
  }
  return true;
}

}  // namespace smallscat
