#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>

namespace cartfe {

enum class ValueKind : std::uint8_t { Scalar, Vector, Tensor };

/// Kind plus spatial dimension; a Tensor of dim d is a d x d matrix stored row-major.
struct ValueShape {
  ValueKind kind = ValueKind::Scalar;
  int dim = 1;

  int size() const noexcept {
    switch (kind) {
      case ValueKind::Scalar: return 1;
      case ValueKind::Vector: return dim;
      case ValueKind::Tensor: return dim * dim;
    }
    return 1;
  }
  friend bool operator==(const ValueShape& a, const ValueShape& b) noexcept {
    return a.kind == b.kind && (a.kind == ValueKind::Scalar || a.dim == b.dim);
  }

  static ValueShape scalar() noexcept { return {ValueKind::Scalar, 1}; }
  static ValueShape vector(int d) noexcept { return {ValueKind::Vector, d}; }
  static ValueShape tensor(int d) noexcept { return {ValueKind::Tensor, d}; }
};

const char* kind_name(ValueKind k) noexcept;

/// A scalar, d-vector or d x d tensor at one point (d <= 3).
///
/// Gradients of vector fields use the Jacobian layout: entry (a, b) holds
/// d u_a / d x_b.
class Value {
public:
  Value() = default;
  Value(double s) : shape_(ValueShape::scalar()) { c_[0] = s; }  // NOLINT: implicit by design of the law API

  static Value vector(std::initializer_list<double> comps);
  static Value zero(ValueShape shape);
  static Value identity(int dim);
  static Value from_components(ValueShape shape, const double* comps);

  ValueShape shape() const noexcept { return shape_; }
  ValueKind kind() const noexcept { return shape_.kind; }
  int dim() const noexcept { return shape_.dim; }
  int size() const noexcept { return shape_.size(); }

  double scalar() const;
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  double operator()(int a, int b) const { return c_[static_cast<std::size_t>(a * shape_.dim + b)]; }
  double& operator()(int a, int b) { return c_[static_cast<std::size_t>(a * shape_.dim + b)]; }
  const double* data() const noexcept { return c_.data(); }
  double* data() noexcept { return c_.data(); }

  Value& operator+=(const Value& o);
  Value& operator-=(const Value& o);
  Value& operator*=(double s);

private:
  ValueShape shape_{};
  std::array<double, 9> c_{};
};

Value operator+(Value a, const Value& b);
Value operator-(Value a, const Value& b);
Value operator-(Value a);
Value operator/(Value a, double s);

/// scalar * any, any * scalar, vector * vector (dot), tensor * vector, tensor * tensor.
Value operator*(const Value& a, const Value& b);

double inner(const Value& a, const Value& b);
double trace(const Value& t);
double norm(const Value& v);
Value transpose(const Value& t);
Value symmetric_part(const Value& t);
Value outer(const Value& a, const Value& b);

std::ostream& operator<<(std::ostream& os, const Value& v);

}  // namespace cartfe
