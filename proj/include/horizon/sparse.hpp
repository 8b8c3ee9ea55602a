#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <vector>

namespace horizon {

namespace detail {

// Plain products; the library routine for complex * complex guards against
// inf/nan and is several times slower in the inner loop.
inline double mul(double a, double b) { return a * b; }
inline std::complex<double> mul(double a, std::complex<double> b) { return a * b; }
inline std::complex<double> mul(std::complex<double> a, std::complex<double> b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace detail

template <class T>
struct Triplet {
  int row;
  int col;
  T value;
};

// Compressed sparse rows. Products are evaluated row by row in a fixed
// order, so the result does not depend on the number of threads.
template <class T>
class CsrMatrix {
 public:
  CsrMatrix() = default;

  // Duplicate (row, col) pairs are summed in insertion order.
  static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet<T>> t) {
    std::stable_sort(t.begin(), t.end(), [](const Triplet<T>& a, const Triplet<T>& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
    for (std::size_t i = 0; i < t.size();) {
      std::size_t j = i;
      T sum = t[i].value;
      while (++j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) sum += t[j].value;
      m.col_.push_back(t[i].col);
      m.val_.push_back(sum);
      ++m.ptr_[static_cast<std::size_t>(t[i].row) + 1];
      i = j;
    }
    for (int r = 0; r < rows; ++r) m.ptr_[r + 1] += m.ptr_[r];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return val_.size(); }

  // y = A x
  template <class X, class Y>
  void multiply(const X* x, Y* y) const {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows_; ++r) {
      Y acc{};
      for (int p = ptr_[r]; p < ptr_[r + 1]; ++p) acc += detail::mul(val_[p], x[col_[p]]);
      y[r] = acc;
    }
  }

  T coeff(int r, int c) const {
    auto b = col_.begin() + ptr_[r];
    auto e = col_.begin() + ptr_[r + 1];
    auto it = std::lower_bound(b, e, c);
    if (it == e || *it != c) return T{};
    return val_[static_cast<std::size_t>(it - col_.begin())];
  }

  int row_begin(int r) const { return ptr_[r]; }
  int row_end(int r) const { return ptr_[r + 1]; }
  int col_at(int p) const { return col_[p]; }
  const T& value_at(int p) const { return val_[p]; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> ptr_;
  std::vector<int> col_;
  std::vector<T> val_;
};

}  // namespace horizon
