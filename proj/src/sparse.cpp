#include "vpsim/sparse.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace vpsim {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (rows_ < 0 || cols_ < 0 || row_ptr_.size() != static_cast<std::size_t>(rows_) + 1 ||
      col_idx_.size() != values_.size() || row_ptr_.back() != static_cast<int>(values_.size())) {
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
  }
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] < 0 || col_idx_[k] >= cols_) throw std::out_of_range("SparseMatrix: column out of range");
      if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1]) {
        throw std::invalid_argument("SparseMatrix: columns must be strictly increasing within a row");
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::span<const Triplet> entries) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("from_triplets: negative dimension");
  std::vector<int> count(static_cast<std::size_t>(rows) + 1, 0);
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      std::ostringstream os;
      os << "triplet (" << t.row << ", " << t.col << ") outside " << rows << "x" << cols;
      throw std::out_of_range(os.str());
    }
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<int> cols_tmp(entries.size());
  std::vector<double> vals_tmp(entries.size());
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (const auto& t : entries) {
    const int k = fill[t.row]++;
    cols_tmp[k] = t.col;
    vals_tmp[k] = t.value;
  }

  std::vector<int> row_ptr(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  col_idx.reserve(entries.size());
  values.reserve(entries.size());
  std::vector<int> order;
  for (int r = 0; r < rows; ++r) {
    const int b = count[r], e = count[r + 1];
    order.resize(static_cast<std::size_t>(e - b));
    std::iota(order.begin(), order.end(), b);
    // rows are short: stable insertion sort keeps the summation order of
    // duplicates deterministic without a scratch allocation
    for (std::size_t x = 1; x < order.size(); ++x) {
      const int key = order[x];
      std::size_t y = x;
      for (; y > 0 && cols_tmp[order[y - 1]] > cols_tmp[key]; --y) order[y] = order[y - 1];
      order[y] = key;
    }
    std::size_t k = 0;
    while (k < order.size()) {
      const int c = cols_tmp[order[k]];
      double sum = 0.0;
      while (k < order.size() && cols_tmp[order[k]] == c) sum += vals_tmp[order[k++]];
      if (sum != 0.0) {
        col_idx.push_back(c);
        values.push_back(sum);
      }
    }
    row_ptr[r + 1] = static_cast<int>(values.size());
  }
  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_ = std::move(row_ptr);
  m.col_idx_ = std::move(col_idx);
  m.values_ = std::move(values);
  return m;
}

SparseMatrix SparseMatrix::identity(int n, double scale) {
  std::vector<double> d(static_cast<std::size_t>(n), scale);
  return diagonal(d);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
  const int n = static_cast<int>(d.size());
  std::vector<int> rp(static_cast<std::size_t>(n) + 1), ci;
  std::vector<double> v;
  for (int i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      ci.push_back(i);
      v.push_back(d[i]);
    }
    rp[i + 1] = static_cast<int>(v.size());
  }
  return {n, n, std::move(rp), std::move(ci), std::move(v)};
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(cols_) || y.size() != static_cast<std::size_t>(rows_)) {
    throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
  }
  const int* rp = row_ptr_.data();
  const int* ci = col_idx_.data();
  const double* v = values_.data();
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = rp[r]; k < rp[r + 1]; ++k) s += v[k] * x[ci[k]];
    y[r] = s;
  }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows_));
  multiply(x, y);
  return y;
}

double SparseMatrix::at(int r, int c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("SparseMatrix::at");
  const auto b = col_idx_.begin() + row_ptr_[r], e = col_idx_.begin() + row_ptr_[r + 1];
  const auto it = std::lower_bound(b, e, c);
  return (it != e && *it == c) ? values_[static_cast<std::size_t>(it - col_idx_.begin())] : 0.0;
}

std::vector<double> SparseMatrix::diagonal_entries() const {
  std::vector<double> d(static_cast<std::size_t>(std::min(rows_, cols_)), 0.0);
  for (int r = 0; r < static_cast<int>(d.size()); ++r) d[r] = at(r, r);
  return d;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<int> rp(static_cast<std::size_t>(cols_) + 1, 0);
  for (int c : col_idx_) ++rp[c + 1];
  std::partial_sum(rp.begin(), rp.end(), rp.begin());
  std::vector<int> ci(values_.size());
  std::vector<double> v(values_.size());
  std::vector<int> fill(rp.begin(), rp.end() - 1);
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int dst = fill[col_idx_[k]]++;
      ci[dst] = r;
      v[dst] = values_[k];
    }
  }
  return {cols_, rows_, std::move(rp), std::move(ci), std::move(v)};
}

void SparseMatrix::append_triplets(std::vector<Triplet>& out, int row_offset, int col_offset,
                                   double scale) const {
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      out.push_back({r + row_offset, col_idx_[k] + col_offset, scale * values_[k]});
    }
  }
}

SparseMatrix assemble_from_triplets(int n, std::span<const Triplet> entries) {
  return SparseMatrix::from_triplets(n, n, entries);
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimension mismatch");
  const auto& arp = a.row_ptr();
  const auto& aci = a.col_idx();
  const auto& av = a.values();
  const auto& brp = b.row_ptr();
  const auto& bci = b.col_idx();
  const auto& bv = b.values();

  std::vector<int> rp(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<int> ci;
  std::vector<double> v;
  std::vector<double> acc(static_cast<std::size_t>(b.cols()), 0.0);
  std::vector<int> marker(static_cast<std::size_t>(b.cols()), -1);
  std::vector<int> touched;
  for (int r = 0; r < a.rows(); ++r) {
    touched.clear();
    for (int ka = arp[r]; ka < arp[r + 1]; ++ka) {
      const int mid = aci[ka];
      const double w = av[ka];
      for (int kb = brp[mid]; kb < brp[mid + 1]; ++kb) {
        const int c = bci[kb];
        if (marker[c] != r) {
          marker[c] = r;
          acc[c] = 0.0;
          touched.push_back(c);
        }
        acc[c] += w * bv[kb];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int c : touched) {
      if (acc[c] != 0.0) {
        ci.push_back(c);
        v.push_back(acc[c]);
      }
    }
    rp[r + 1] = static_cast<int>(v.size());
  }
  return {a.rows(), b.cols(), std::move(rp), std::move(ci), std::move(v)};
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("add: shape mismatch");
  std::vector<int> rp(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<int> ci;
  std::vector<double> v;
  ci.reserve(static_cast<std::size_t>(a.nnz() + b.nnz()));
  v.reserve(static_cast<std::size_t>(a.nnz() + b.nnz()));
  for (int r = 0; r < a.rows(); ++r) {
    int ka = a.row_ptr()[r], ea = a.row_ptr()[r + 1];
    int kb = b.row_ptr()[r], eb = b.row_ptr()[r + 1];
    while (ka < ea || kb < eb) {
      int c;
      double s;
      if (kb >= eb || (ka < ea && a.col_idx()[ka] < b.col_idx()[kb])) {
        c = a.col_idx()[ka];
        s = alpha * a.values()[ka++];
      } else if (ka >= ea || b.col_idx()[kb] < a.col_idx()[ka]) {
        c = b.col_idx()[kb];
        s = beta * b.values()[kb++];
      } else {
        c = a.col_idx()[ka];
        s = alpha * a.values()[ka++] + beta * b.values()[kb++];
      }
      if (s != 0.0) {
        ci.push_back(c);
        v.push_back(s);
      }
    }
    rp[r + 1] = static_cast<int>(v.size());
  }
  return {a.rows(), a.cols(), std::move(rp), std::move(ci), std::move(v)};
}

SparseMatrix scale_rows(std::span<const double> d, const SparseMatrix& a) {
  if (d.size() != static_cast<std::size_t>(a.rows())) throw std::invalid_argument("scale_rows: size mismatch");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nnz()));
  for (int r = 0; r < a.rows(); ++r) {
    for (int k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) t.push_back({r, a.col_idx()[k], d[r] * a.values()[k]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), t);
}

SparseMatrix scale_cols(const SparseMatrix& a, std::span<const double> d) {
  if (d.size() != static_cast<std::size_t>(a.cols())) throw std::invalid_argument("scale_cols: size mismatch");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nnz()));
  for (int r = 0; r < a.rows(); ++r) {
    for (int k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
      const int c = a.col_idx()[k];
      t.push_back({r, c, a.values()[k] * d[c]});
    }
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), t);
}

SparseMatrix scaled(const SparseMatrix& a, double s) {
  std::vector<double> v(a.values());
  for (double& x : v) x *= s;
  if (s == 0.0) return SparseMatrix::from_triplets(a.rows(), a.cols(), {});
  return {a.rows(), a.cols(), a.row_ptr(), a.col_idx(), std::move(v)};
}

BlockAssembler::BlockAssembler(std::vector<int> row_sizes, std::vector<int> col_sizes)
    : row_sizes_(std::move(row_sizes)), col_sizes_(std::move(col_sizes)) {
  row_off_.assign(row_sizes_.size() + 1, 0);
  col_off_.assign(col_sizes_.size() + 1, 0);
  std::partial_sum(row_sizes_.begin(), row_sizes_.end(), row_off_.begin() + 1);
  std::partial_sum(col_sizes_.begin(), col_sizes_.end(), col_off_.begin() + 1);
}

void BlockAssembler::place(int block_row, int block_col, const SparseMatrix& m, double scale) {
  if (block_row < 0 || block_row >= static_cast<int>(row_sizes_.size()) || block_col < 0 ||
      block_col >= static_cast<int>(col_sizes_.size())) {
    throw std::out_of_range("BlockAssembler::place: block index");
  }
  if (m.rows() != row_sizes_[block_row] || m.cols() != col_sizes_[block_col]) {
    throw std::invalid_argument("BlockAssembler::place: block shape mismatch");
  }
  m.append_triplets(entries_, row_off_[block_row], col_off_[block_col], scale);
}

SparseMatrix BlockAssembler::build() const {
  return SparseMatrix::from_triplets(row_off_.back(), col_off_.back(), entries_);
}

}  // namespace vpsim
