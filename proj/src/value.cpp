#include "cartfe/value.hpp"

#include <cmath>
#include <ostream>

#include "cartfe/errors.hpp"

namespace cartfe {

const char* kind_name(ValueKind k) noexcept {
  switch (k) {
    case ValueKind::Scalar: return "scalar";
    case ValueKind::Vector: return "vector";
    case ValueKind::Tensor: return "tensor";
  }
  return "?";
}

Value Value::vector(std::initializer_list<double> comps) {
  CARTFE_THROW_IF(comps.size() == 0 || comps.size() > 3, InvalidArgument,
                  "vector values have 1 to 3 components");
  Value v;
  v.shape_ = ValueShape::vector(static_cast<int>(comps.size()));
  int i = 0;
  for (double c : comps) v.c_[static_cast<std::size_t>(i++)] = c;
  return v;
}

Value Value::zero(ValueShape shape) {
  Value v;
  v.shape_ = shape;
  return v;
}

Value Value::identity(int dim) {
  Value v = zero(ValueShape::tensor(dim));
  for (int a = 0; a < dim; ++a) v(a, a) = 1.0;
  return v;
}

Value Value::from_components(ValueShape shape, const double* comps) {
  Value v = zero(shape);
  for (int i = 0; i < shape.size(); ++i) v.c_[static_cast<std::size_t>(i)] = comps[i];
  return v;
}

double Value::scalar() const {
  CARTFE_THROW_IF(shape_.kind != ValueKind::Scalar, KindError,
                  std::string("expected a scalar, got a ") + kind_name(shape_.kind));
  return c_[0];
}

static void require_same(const Value& a, const Value& b, const char* op) {
  if (!(a.shape() == b.shape())) {
    throw KindError(std::string(op) + ": shape mismatch (" + kind_name(a.kind()) + " vs " +
                    kind_name(b.kind()) + ")");
  }
}

Value& Value::operator+=(const Value& o) {
  require_same(*this, o, "+");
  for (int i = 0; i < size(); ++i) c_[static_cast<std::size_t>(i)] += o.c_[static_cast<std::size_t>(i)];
  return *this;
}

Value& Value::operator-=(const Value& o) {
  require_same(*this, o, "-");
  for (int i = 0; i < size(); ++i) c_[static_cast<std::size_t>(i)] -= o.c_[static_cast<std::size_t>(i)];
  return *this;
}

Value& Value::operator*=(double s) {
  for (int i = 0; i < size(); ++i) c_[static_cast<std::size_t>(i)] *= s;
  return *this;
}

Value operator+(Value a, const Value& b) { return a += b; }
Value operator-(Value a, const Value& b) { return a -= b; }
Value operator-(Value a) { return a *= -1.0; }
Value operator/(Value a, double s) { return a *= 1.0 / s; }

Value operator*(const Value& a, const Value& b) {
  if (a.kind() == ValueKind::Scalar) {
    Value r = b;
    r *= a[0];
    return r;
  }
  if (b.kind() == ValueKind::Scalar) {
    Value r = a;
    r *= b[0];
    return r;
  }
  CARTFE_THROW_IF(a.dim() != b.dim(), KindError, "*: dimension mismatch");
  const int d = a.dim();
  if (a.kind() == ValueKind::Vector && b.kind() == ValueKind::Vector) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return Value(s);
  }
  if (a.kind() == ValueKind::Tensor && b.kind() == ValueKind::Vector) {
    Value r = Value::zero(ValueShape::vector(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) r[i] += a(i, j) * b[j];
    return r;
  }
  if (a.kind() == ValueKind::Tensor && b.kind() == ValueKind::Tensor) {
    Value r = Value::zero(ValueShape::tensor(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) r(i, j) += a(i, k) * b(k, j);
    return r;
  }
  throw KindError("*: unsupported operands vector * tensor (use transpose)");
}

double inner(const Value& a, const Value& b) {
  require_same(a, b, "inner");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double trace(const Value& t) {
  CARTFE_THROW_IF(t.kind() != ValueKind::Tensor, KindError, "trace of a non-tensor");
  double s = 0.0;
  for (int a = 0; a < t.dim(); ++a) s += t(a, a);
  return s;
}

double norm(const Value& v) { return std::sqrt(inner(v, v)); }

Value transpose(const Value& t) {
  CARTFE_THROW_IF(t.kind() != ValueKind::Tensor, KindError, "transpose of a non-tensor");
  Value r = t;
  for (int a = 0; a < t.dim(); ++a)
    for (int b = 0; b < t.dim(); ++b) r(a, b) = t(b, a);
  return r;
}

Value symmetric_part(const Value& t) { return (t + transpose(t)) * Value(0.5); }

Value outer(const Value& a, const Value& b) {
  CARTFE_THROW_IF(a.kind() != ValueKind::Vector || b.kind() != ValueKind::Vector ||
                      a.dim() != b.dim(),
                  KindError, "outer needs two vectors of equal dimension");
  Value r = Value::zero(ValueShape::tensor(a.dim()));
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) r(i, j) = a[i] * b[j];
  return r;
}

std::ostream& operator<<(std::ostream& os, const Value& v) {
  if (v.kind() == ValueKind::Scalar) return os << v[0];
  os << '(';
  for (int i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os << ')';
}

}  // namespace cartfe
