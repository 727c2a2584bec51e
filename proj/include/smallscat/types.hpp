// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SMALLSCAT_TYPES_HPP
#define SMALLSCAT_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace smallscat
{

using complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr complex I{0.0, 1.0};

//
// Error hierarchy. Every error carries a short machine-readable code (snake_case) that is
// surfaced unchanged through the C API and the command line.
//
enum class ErrorKind
{
  validation,
  solver,
  comparison,
  internal
};

class Error : public std::runtime_error
{
  ErrorKind error_kind;
  std::string error_code;

public:
  Error(ErrorKind kind, std::string code, const std::string &message)
    : std::runtime_error(message), error_kind(kind), error_code(std::move(code))
  {
  }

  ErrorKind kind() const { return error_kind; }
  const std::string &code() const { return error_code; }
};

class ValidationError : public Error
{
public:
  ValidationError(std::string code, const std::string &message)
    : Error(ErrorKind::validation, std::move(code), message)
  {
  }
};

class SolverError : public Error
{
public:
  SolverError(std::string code, const std::string &message)
    : Error(ErrorKind::solver, std::move(code), message)
  {
  }
};

class ComparisonError : public Error
{
public:
  ComparisonError(std::string code, const std::string &message)
    : Error(ErrorKind::comparison, std::move(code), message)
  {
  }
};

// Axis-aligned box.
struct Box
{
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();

  Vec3 extent() const { return hi - lo; }
  Vec3 center() const { return 0.5 * (lo + hi); }
  double volume() const { return extent().prod(); }
  bool contains(const Vec3 &x) const
  {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  }
};

// Emits a warning line on stderr unless warnings have been silenced.
void warn(const std::string &message);
void set_warnings_enabled(bool enabled);

}  // namespace smallscat

#endif  // SMALLSCAT_TYPES_HPP
