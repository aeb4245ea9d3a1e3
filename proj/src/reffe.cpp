#include "cartfe/reffe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "cartfe/errors.hpp"
#include "cartfe/quadrature.hpp"

namespace cartfe {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

// Lagrange polynomial i on `z` and its derivative at x.
void lagrange_1d(const std::vector<double>& z, int i, double x, double& val, double& der) {
  const int n = static_cast<int>(z.size());
  double v = 1.0;
  double dv = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const double den = z[sz(i)] - z[sz(j)];
    const double t = (x - z[sz(j)]) / den;
    dv = dv * t + v / den;
    v *= t;
  }
  val = v;
  der = dv;
}

// Tensor-product element: each dof samples one component at a lattice node,
// with its own 1D node set per (component, axis).
class TensorElement : public ReferenceElement {
public:
  TensorElement(Family f, Conformity c, int order, int dim, ValueShape shape)
      : ReferenceElement(f, c, order, dim, shape) {}

  struct TDof {
    int comp;
    std::array<int, kMaxDim> idx;
  };

  void evaluate(std::span<const double> points, double* values, double* grads) const override {
    const int d = dim_;
    const int npts = static_cast<int>(points.size()) / d;
    const int nc = num_components();
    const int nd = num_dofs();
    std::fill(values, values + static_cast<std::ptrdiff_t>(nd) * npts * nc, 0.0);
    if (grads) std::fill(grads, grads + static_cast<std::ptrdiff_t>(nd) * npts * nc * d, 0.0);
    std::array<double, kMaxDim> v{}, dv{};
    for (int i = 0; i < nd; ++i) {
      const TDof& t = tdofs_[sz(i)];
      for (int q = 0; q < npts; ++q) {
        for (int a = 0; a < d; ++a) {
          lagrange_1d(nodes_[sz(t.comp)][sz(a)], t.idx[sz(a)], points[sz(q * d + a)], v[sz(a)], dv[sz(a)]);
        }
        double prod = 1.0;
        for (int a = 0; a < d; ++a) prod *= v[sz(a)];
        values[(static_cast<std::ptrdiff_t>(i) * npts + q) * nc + t.comp] = prod;
        if (!grads) continue;
        double* g = grads + ((static_cast<std::ptrdiff_t>(i) * npts + q) * nc + t.comp) * d;
        for (int b = 0; b < d; ++b) {
          double p = dv[sz(b)];
          for (int a = 0; a < d; ++a)
            if (a != b) p *= v[sz(a)];
          g[b] = p;
        }
      }
    }
  }

  void add_dof(int comp, const std::array<int, kMaxDim>& idx, int face_dim, int face_local, int slot) {
    tdofs_.push_back({comp, idx});
    DofInfo info;
    info.face_dim = face_dim;
    info.face_local = face_local;
    info.slot = slot;
    info.component = comp;
    for (int a = 0; a < dim_; ++a) info.node[sz(a)] = nodes_[sz(comp)][sz(a)][sz(idx[sz(a)])];
    dofs_.push_back(info);
  }

  // nodes_[comp][axis]
  std::vector<std::vector<std::vector<double>>> nodes_;
  std::vector<TDof> tdofs_;
};

// Iterate multi-indices in [0,ext_a) with the first axis fastest.
template <class F>
void for_each_index(int d, const std::array<int, kMaxDim>& ext, F&& f) {
  int total = 1;
  for (int a = 0; a < d; ++a) total *= ext[sz(a)];
  std::array<int, kMaxDim> idx{};
  for (int n = 0; n < total; ++n) {
    int r = n;
    for (int a = 0; a < d; ++a) {
      idx[sz(a)] = r % ext[sz(a)];
      r /= ext[sz(a)];
    }
    f(idx);
  }
}

class PElement : public ReferenceElement {
public:
  PElement(int dim, int order, ValueShape shape)
      : ReferenceElement(Family::PLagrangian, Conformity::L2, order, dim, shape) {
    std::array<int, kMaxDim> ext{};
    for (int a = 0; a < dim; ++a) ext[sz(a)] = order + 1;
    for_each_index(dim, ext, [&](const std::array<int, kMaxDim>& i) {
      int s = 0;
      for (int a = 0; a < dim; ++a) s += i[sz(a)];
      if (s <= order) exps_.push_back(i);
    });
    const int n = static_cast<int>(exps_.size());
    const double delta = 1.0 / (2.0 * (order + 1));
    std::vector<std::array<double, kMaxDim>> nodes(sz(n));
    for (int k = 0; k < n; ++k) {
      nodes[sz(k)].fill(0.0);
      for (int a = 0; a < dim; ++a) nodes[sz(k)][sz(a)] = 0.5 + delta * exps_[sz(k)][sz(a)];
    }
    // coef_ = V^{-1} with V[node][monomial]; Gauss-Jordan with partial pivoting.
    std::vector<double> V(sz(n * n)), inv(sz(n * n), 0.0);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        double m = 1.0;
        for (int a = 0; a < dim; ++a) m *= std::pow(nodes[sz(r)][sz(a)] - 0.5, exps_[sz(c)][sz(a)]);
        V[sz(r * n + c)] = m;
      }
      inv[sz(r * n + r)] = 1.0;
    }
    for (int c = 0; c < n; ++c) {
      int piv = c;
      for (int r = c + 1; r < n; ++r)
        if (std::abs(V[sz(r * n + c)]) > std::abs(V[sz(piv * n + c)])) piv = r;
      CARTFE_THROW_IF(std::abs(V[sz(piv * n + c)]) < 1e-300, GeometryError, "P-Lagrangian nodes not unisolvent");
      for (int k = 0; k < n; ++k) {
        std::swap(V[sz(c * n + k)], V[sz(piv * n + k)]);
        std::swap(inv[sz(c * n + k)], inv[sz(piv * n + k)]);
      }
      const double p = V[sz(c * n + c)];
      for (int k = 0; k < n; ++k) {
        V[sz(c * n + k)] /= p;
        inv[sz(c * n + k)] /= p;
      }
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = V[sz(r * n + c)];
        if (f == 0.0) continue;
        for (int k = 0; k < n; ++k) {
          V[sz(r * n + k)] -= f * V[sz(c * n + k)];
          inv[sz(r * n + k)] -= f * inv[sz(c * n + k)];
        }
      }
    }
    coef_ = std::move(inv);  // coef_[monomial][basis]
    nnodes_ = n;
    for (int comp = 0; comp < shape.size(); ++comp) {
      for (int k = 0; k < n; ++k) {
        DofInfo info;
        info.face_dim = dim;
        info.face_local = 0;
        info.slot = k;
        info.component = comp;
        info.node = nodes[sz(k)];
        dofs_.push_back(info);
      }
    }
  }

  void evaluate(std::span<const double> points, double* values, double* grads) const override {
    const int d = dim_;
    const int npts = static_cast<int>(points.size()) / d;
    const int nc = num_components();
    const int nd = num_dofs();
    const int n = nnodes_;
    std::fill(values, values + static_cast<std::ptrdiff_t>(nd) * npts * nc, 0.0);
    if (grads) std::fill(grads, grads + static_cast<std::ptrdiff_t>(nd) * npts * nc * d, 0.0);
    std::vector<double> mono(sz(n)), dmono(sz(n * d));
    for (int q = 0; q < npts; ++q) {
      for (int m = 0; m < n; ++m) {
        double v = 1.0;
        for (int a = 0; a < d; ++a) v *= std::pow(points[sz(q * d + a)] - 0.5, exps_[sz(m)][sz(a)]);
        mono[sz(m)] = v;
        for (int b = 0; b < d; ++b) {
          const int e = exps_[sz(m)][sz(b)];
          double g = 0.0;
          if (e > 0) {
            g = e * std::pow(points[sz(q * d + b)] - 0.5, e - 1);
            for (int a = 0; a < d; ++a)
              if (a != b) g *= std::pow(points[sz(q * d + a)] - 0.5, exps_[sz(m)][sz(a)]);
          }
          dmono[sz(m * d + b)] = g;
        }
      }
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        std::array<double, kMaxDim> g{};
        for (int m = 0; m < n; ++m) {
          const double c = coef_[sz(m * n + j)];
          v += c * mono[sz(m)];
          for (int b = 0; b < d; ++b) g[sz(b)] += c * dmono[sz(m * d + b)];
        }
        for (int comp = 0; comp < nc; ++comp) {
          const int i = comp * n + j;
          values[(static_cast<std::ptrdiff_t>(i) * npts + q) * nc + comp] = v;
          if (grads) {
            double* gp = grads + ((static_cast<std::ptrdiff_t>(i) * npts + q) * nc + comp) * d;
            for (int b = 0; b < d; ++b) gp[b] = g[sz(b)];
          }
        }
      }
    }
  }

private:
  std::vector<std::array<int, kMaxDim>> exps_;
  std::vector<double> coef_;
  int nnodes_ = 0;
};

void check_dim_order(int dim, int order) {
  CARTFE_THROW_IF(dim < 1 || dim > 3, InvalidArgument, "reference elements support dimensions 1..3");
  CARTFE_THROW_IF(order < 0, InvalidArgument, "element order must be >= 0");
}

}  // namespace

const char* family_name(Family f) noexcept {
  switch (f) {
    case Family::QLagrangian: return "QLagrangian";
    case Family::PLagrangian: return "PLagrangian";
    case Family::RaviartThomas: return "RaviartThomas";
  }
  return "?";
}

const char* conformity_name(Conformity c) noexcept {
  switch (c) {
    case Conformity::H1: return "H1";
    case Conformity::L2: return "L2";
    case Conformity::HDiv: return "HDiv";
  }
  return "?";
}

std::string ReferenceElement::name() const {
  return std::string(family_name(family_)) + "(order=" + std::to_string(order_) + ", dim=" + std::to_string(dim_) +
         ", " + conformity_name(conformity_) + ")";
}

std::vector<double> ReferenceElement::shape_values(std::span<const double> points) const {
  const auto npts = points.size() / static_cast<std::size_t>(dim_);
  std::vector<double> v(static_cast<std::size_t>(num_dofs()) * npts * static_cast<std::size_t>(num_components()));
  evaluate(points, v.data(), nullptr);
  return v;
}

std::vector<double> ReferenceElement::shape_gradients(std::span<const double> points) const {
  const auto npts = points.size() / static_cast<std::size_t>(dim_);
  const auto nc = static_cast<std::size_t>(num_components());
  std::vector<double> v(static_cast<std::size_t>(num_dofs()) * npts * nc);
  std::vector<double> g(v.size() * static_cast<std::size_t>(dim_));
  evaluate(points, v.data(), g.data());
  return g;
}

RefElemPtr q_lagrangian(int dim, int order, ValueShape shape, Conformity conformity) {
  check_dim_order(dim, order);
  CARTFE_THROW_IF(conformity == Conformity::HDiv, InvalidArgument, "Q-Lagrangian elements are H1 or L2");
  CARTFE_THROW_IF(conformity == Conformity::H1 && order < 1, InvalidArgument,
                  "H1-conforming Q-Lagrangian elements need order >= 1");
  CARTFE_THROW_IF(shape.kind == ValueKind::Vector && shape.dim != dim, InvalidArgument,
                  "vector elements must have one component per axis");
  CARTFE_THROW_IF(shape.kind == ValueKind::Tensor, InvalidArgument, "tensor-valued elements are not supported");
  auto e = std::make_shared<TensorElement>(Family::QLagrangian, conformity, order, dim, shape);
  std::vector<double> z(sz(order + 1));
  if (order == 0) z[0] = 0.5;
  for (int i = 0; i <= order && order > 0; ++i) z[sz(i)] = static_cast<double>(i) / order;
  const int nc = shape.size();
  e->nodes_.assign(sz(nc), std::vector<std::vector<double>>(sz(dim), z));
  const CubeTopology cube(dim);
  std::array<int, kMaxDim> ext{};
  for (int a = 0; a < dim; ++a) ext[sz(a)] = order + 1;
  for (int c = 0; c < nc; ++c) {
    int local = 0;
    for_each_index(dim, ext, [&](const std::array<int, kMaxDim>& idx) {
      if (conformity == Conformity::L2) {
        e->add_dof(c, idx, dim, 0, local++);
        return;
      }
      unsigned mask = 0;
      std::array<int, kMaxDim> off{};
      int slot = 0, stride = 1;
      for (int a = 0; a < dim; ++a) {
        const int i = idx[sz(a)];
        if (i == 0 || i == order) {
          off[sz(a)] = (i == 0) ? 0 : 1;
        } else {
          mask |= 1u << a;
          off[sz(a)] = -1;
          slot += (i - 1) * stride;
          stride *= order - 1;
        }
      }
      const int m = std::popcount(mask);
      e->add_dof(c, idx, m, cube.index_of(mask, off), slot);
      ++local;
    });
  }
  return e;
}

RefElemPtr p_lagrangian(int dim, int order, ValueShape shape) {
  check_dim_order(dim, order);
  CARTFE_THROW_IF(shape.kind != ValueKind::Scalar && !(shape.kind == ValueKind::Vector && shape.dim == dim),
                  InvalidArgument, "P-Lagrangian elements are scalar or d-vector valued");
  return std::make_shared<PElement>(dim, order, shape);
}

RefElemPtr raviart_thomas(int dim, int order) {
  check_dim_order(dim, order);
  auto e = std::make_shared<TensorElement>(Family::RaviartThomas, Conformity::HDiv, order, dim,
                                           ValueShape::vector(dim));
  // Along its own axis a component needs k+2 nodes: both facets plus k
  // interior Gauss points; along the other axes k+1 Gauss points.
  std::vector<double> inner, gx, gw;
  if (order > 0) gauss_legendre_01(order, inner, gw);
  std::vector<double> full{0.0};
  full.insert(full.end(), inner.begin(), inner.end());
  full.push_back(1.0);
  gauss_legendre_01(order + 1, gx, gw);
  e->nodes_.assign(sz(dim), std::vector<std::vector<double>>(sz(dim), gx));
  for (int a = 0; a < dim; ++a) e->nodes_[sz(a)][sz(a)] = full;

  const CubeTopology cube(dim);
  // Facet dofs, local facet order, then interior dofs per component.
  for (int f = 0; f < 2 * dim; ++f) {
    const int a = cube.facet_axis(f);
    const int side = cube.facet_side(f);
    std::array<int, kMaxDim> ext{};
    for (int b = 0; b < dim; ++b) ext[sz(b)] = (b == a) ? 1 : order + 1;
    int slot = 0;
    for_each_index(dim, ext, [&](std::array<int, kMaxDim> idx) {
      idx[sz(a)] = side == 0 ? 0 : order + 1;
      e->add_dof(a, idx, dim - 1, f, slot++);
    });
  }
  for (int a = 0; a < dim; ++a) {
    std::array<int, kMaxDim> ext{};
    for (int b = 0; b < dim; ++b) ext[sz(b)] = (b == a) ? order : order + 1;
    int slot = 0;
    for_each_index(dim, ext, [&](std::array<int, kMaxDim> idx) {
      idx[sz(a)] += 1;
      e->add_dof(a, idx, dim, 0, slot++);
    });
  }
  return e;
}

void piola_map(std::span<const double> h, std::span<const double> vhat, std::span<double> v) {
  double det = 1.0;
  for (double x : h) {
    CARTFE_THROW_IF(!(x > 0.0), GeometryError, "Piola map needs a positive diagonal Jacobian");
    det *= x;
  }
  for (std::size_t a = 0; a < h.size(); ++a) v[a] = h[a] * vhat[a] / det;
}

double piola_divergence(std::span<const double> h, double div_hat) {
  double det = 1.0;
  for (double x : h) {
    CARTFE_THROW_IF(!(x > 0.0), GeometryError, "Piola map needs a positive diagonal Jacobian");
    det *= x;
  }
  return div_hat / det;
}

}  // namespace cartfe
