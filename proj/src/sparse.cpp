#include "cartfe/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cartfe/errors.hpp"
#include "cartfe/simd/kernels.hpp"

namespace cartfe {

namespace {
std::size_t sz(int i) { return static_cast<std::size_t>(i); }
}  // namespace

double CsrMatrix::at(int i, int j) const {
  const auto b = col.begin() + row_ptr[sz(i)], e = col.begin() + row_ptr[sz(i) + 1];
  const auto it = std::lower_bound(b, e, j);
  return (it != e && *it == j) ? val[static_cast<std::size_t>(it - col.begin())] : 0.0;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  CARTFE_THROW_IF(x.size() != sz(ncols) || y.size() != sz(nrows), InvalidArgument, "matrix-vector size mismatch");
  for (int i = 0; i < nrows; ++i) {
    const std::size_t b = sz(row_ptr[sz(i)]), n = sz(row_ptr[sz(i) + 1]) - b;
    y[sz(i)] = simd::gather_dot(std::span<const double>(val).subspan(b, n), std::span<const int>(col).subspan(b, n), x);
  }
}

std::vector<double> CsrMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(sz(nrows));
  multiply(x, y);
  return y;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(sz(std::min(nrows, ncols)), 0.0);
  for (int i = 0; i < static_cast<int>(d.size()); ++i) d[sz(i)] = at(i, i);
  return d;
}

CsrMatrix CsrMatrix::transpose() const {
  CsrMatrix t;
  t.nrows = ncols;
  t.ncols = nrows;
  t.row_ptr.assign(sz(ncols) + 1, 0);
  for (int c : col) ++t.row_ptr[sz(c) + 1];
  std::partial_sum(t.row_ptr.begin(), t.row_ptr.end(), t.row_ptr.begin());
  t.col.resize(col.size());
  t.val.resize(val.size());
  std::vector<int> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (int i = 0; i < nrows; ++i)
    for (int k = row_ptr[sz(i)]; k < row_ptr[sz(i) + 1]; ++k) {
      const int p = next[sz(col[sz(k)])]++;
      t.col[sz(p)] = i;
      t.val[sz(p)] = val[sz(k)];
    }
  return t;
}

double CsrMatrix::asymmetry() const {
  CARTFE_THROW_IF(nrows != ncols, InvalidArgument, "asymmetry of a non-square matrix");
  double m = 0.0;
  for (int i = 0; i < nrows; ++i)
    for (int k = row_ptr[sz(i)]; k < row_ptr[sz(i) + 1]; ++k)
      m = std::max(m, std::abs(val[sz(k)] - at(col[sz(k)], i)));
  return m;
}

std::vector<double> CsrMatrix::to_dense() const {
  std::vector<double> a(sz(nrows) * sz(ncols), 0.0);
  for (int i = 0; i < nrows; ++i)
    for (int k = row_ptr[sz(i)]; k < row_ptr[sz(i) + 1]; ++k) a[sz(i) * sz(ncols) + sz(col[sz(k)])] = val[sz(k)];
  return a;
}

CsrMatrix CsrMatrix::from_dense(int n, int m, std::span<const double> a) {
  CARTFE_THROW_IF(a.size() != sz(n) * sz(m), InvalidArgument, "dense size mismatch");
  CooBuilder b(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (a[sz(i) * sz(m) + sz(j)] != 0.0) b.add(i, j, a[sz(i) * sz(m) + sz(j)]);
  return b.finalize();
}

CsrMatrix CsrMatrix::identity(int n) {
  CooBuilder b(n, n);
  for (int i = 0; i < n; ++i) b.add(i, i, 1.0);
  return b.finalize();
}

void CooBuilder::reserve(std::size_t n) {
  rows_.reserve(n);
  cols_.reserve(n);
  vals_.reserve(n);
}

void CooBuilder::append(const CooBuilder& other) {
  CARTFE_THROW_IF(other.nrows_ != nrows_ || other.ncols_ != ncols_, InvalidArgument, "COO size mismatch");
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
  cols_.insert(cols_.end(), other.cols_.begin(), other.cols_.end());
  vals_.insert(vals_.end(), other.vals_.begin(), other.vals_.end());
}

CsrMatrix CooBuilder::finalize() const {
  const std::size_t n = vals_.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (rows_[k] < 0 || rows_[k] >= nrows_ || cols_[k] < 0 || cols_[k] >= ncols_) {
      throw InvalidArgument("COO entry (" + std::to_string(rows_[k]) + ", " + std::to_string(cols_[k]) +
                            ") out of range");
    }
  }
  // Bucket by row (stable), then stable-sort each row by column.
  std::vector<int> start(sz(nrows_) + 1, 0);
  for (int r : rows_) ++start[sz(r) + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<int> order(n);
  std::vector<int> next(start.begin(), start.end() - 1);
  for (std::size_t k = 0; k < n; ++k) order[sz(next[sz(rows_[k])]++)] = static_cast<int>(k);

  CsrMatrix a;
  a.nrows = nrows_;
  a.ncols = ncols_;
  a.row_ptr.assign(sz(nrows_) + 1, 0);
  a.col.reserve(n);
  a.val.reserve(n);
  for (int i = 0; i < nrows_; ++i) {
    auto b = order.begin() + start[sz(i)], e = order.begin() + start[sz(i) + 1];
    std::stable_sort(b, e, [&](int x, int y) { return cols_[sz(x)] < cols_[sz(y)]; });
    for (auto it = b; it != e; ++it) {
      const int c = cols_[sz(*it)];
      if (!a.col.empty() && sz(a.row_ptr[sz(i)]) < a.col.size() && a.col.back() == c) {
        a.val.back() += vals_[sz(*it)];
      } else {
        a.col.push_back(c);
        a.val.push_back(vals_[sz(*it)]);
      }
    }
    a.row_ptr[sz(i) + 1] = static_cast<int>(a.col.size());
  }
  return a;
}

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double norm_2(std::span<const double> x) { return std::sqrt(simd::dot(x, x)); }

}  // namespace cartfe
