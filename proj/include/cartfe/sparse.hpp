#pragma once

#include <span>
#include <vector>

namespace cartfe {

/// Compressed sparse rows. Column indices are sorted and unique per row.
struct CsrMatrix {
  int nrows = 0;
  int ncols = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  int nnz() const noexcept { return static_cast<int>(val.size()); }
  /// Entry (i, j), zero when not stored.
  double at(int i, int j) const;
  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  std::vector<double> diagonal() const;
  CsrMatrix transpose() const;
  /// max |A_ij - A_ji| over stored entries.
  double asymmetry() const;
  std::vector<double> to_dense() const;
  static CsrMatrix from_dense(int n, int m, std::span<const double> a);
  static CsrMatrix identity(int n);
};

/// Triplet accumulator. finalize() sums duplicates in insertion order, so a
/// fixed insertion sequence gives a bitwise-reproducible matrix.
class CooBuilder {
public:
  CooBuilder(int nrows, int ncols) : nrows_(nrows), ncols_(ncols) {}
  void add(int i, int j, double v) {
    rows_.push_back(i);
    cols_.push_back(j);
    vals_.push_back(v);
  }
  void reserve(std::size_t n);
  /// Move all entries of `other` after the current ones.
  void append(const CooBuilder& other);
  std::size_t size() const noexcept { return vals_.size(); }
  CsrMatrix finalize() const;

private:
  int nrows_, ncols_;
  std::vector<int> rows_, cols_;
  std::vector<double> vals_;
};

double norm_inf(std::span<const double> x);
double norm_2(std::span<const double> x);

}  // namespace cartfe
