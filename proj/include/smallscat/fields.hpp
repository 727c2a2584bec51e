// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SMALLSCAT_FIELDS_HPP
#define SMALLSCAT_FIELDS_HPP

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "smallscat/types.hpp"

namespace smallscat
{

//
// Complex-valued arithmetic expression in x, y, z. Grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number ['i'] | 'i' | 'pi' | 'x' | 'y' | 'z' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | tan | exp | log | sqrt | abs | re | im | conj
//
// so "1.2+0.1i" is a complex literal and "2*exp(-x^2)" a Gaussian profile.
//
class Expression
{
public:
  struct Node;

  Expression() = default;
  explicit Expression(const std::string &text);

  complex operator()(const Vec3 &p) const;
  const std::string &text() const { return source; }
  // True when the expression does not reference x, y or z.
  bool is_constant() const;

private:
  std::string source;
  std::shared_ptr<const Node> root;
};

//
// Scalar field on a box: a constant, an expression, node samples on a regular grid with
// trilinear interpolation (clamped to the box), or a derived pointwise function.
//
class ScalarField
{
public:
  enum class Kind
  {
    constant,
    expression,
    grid,
    function
  };

  ScalarField() : ScalarField(complex(0.0)) {}
  ScalarField(complex value);
  ScalarField(double value) : ScalarField(complex(value)) {}
  explicit ScalarField(const Expression &expr);
  static ScalarField from_string(const std::string &text);
  // Samples at nodes lo + (i, j, k) * (hi - lo) / (n - 1), x fastest.
  static ScalarField from_grid(const Box &box, const std::array<int, 3> &nodes,
                               std::vector<complex> values);
  static ScalarField from_function(std::function<complex(const Vec3 &)> f,
                                   std::string description);

  complex operator()(const Vec3 &p) const;
  Kind kind() const { return type; }
  bool is_constant() const { return type == Kind::constant; }
  complex constant_value() const { return value; }
  // Human-readable description for manifests.
  std::string describe() const;

private:
  Kind type = Kind::constant;
  complex value = 0.0;
  Expression expr;
  Box box;
  std::array<int, 3> nodes{};
  std::vector<complex> samples;
  std::function<complex(const Vec3 &)> fn;
  std::string label;
};

// Tensor field stored row-major as nine scalar fields.
struct TensorField
{
  std::array<ScalarField, 9> entries;

  TensorField();
  explicit TensorField(const CMat3 &constant);
  CMat3 operator()(const Vec3 &p) const;
  bool is_zero() const;
};

}  // namespace smallscat

#endif  // SMALLSCAT_FIELDS_HPP
