#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bogolab/common.hpp"

namespace bogolab {

// Hermitian CSR matrix over complex doubles. Rows are assembled in order;
// entries with |value| <= 1e-15 are dropped at assembly so the stored pattern
// carries no explicit zeros.
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(std::uint64_t dim) : dim_(dim), row_ptr_(dim + 1, 0) {}

  std::uint64_t dim() const { return dim_; }
  std::uint64_t nnz() const { return cols_.size(); }

  static constexpr double kDropTol = 1e-15;

  // Appends one row; `entries` may be unsorted and may repeat columns.
  void append_row(std::vector<std::pair<std::uint64_t, Cx>>& entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t w = 0;
    for (std::size_t i = 0; i < entries.size();) {
      std::uint64_t col = entries[i].first;
      Cx acc(0, 0);
      while (i < entries.size() && entries[i].first == col) acc += entries[i++].second;
      if (std::abs(acc) > kDropTol) entries[w++] = {col, acc};
    }
    entries.resize(w);
    for (const auto& [col, val] : entries) {
      cols_.push_back(col);
      vals_.push_back(val);
    }
    row_ptr_[++rows_done_] = cols_.size();
  }

  void finish() {
    if (rows_done_ != dim_) fail(ErrorCode::InvalidArgument, "row assembly incomplete");
  }

  void matvec(const Vec& x, Vec& y) const {
    y.setZero(static_cast<Eigen::Index>(dim_));
    for (std::uint64_t r = 0; r < dim_; ++r) {
      Cx acc(0, 0);
      for (std::uint64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        acc += vals_[k] * x[static_cast<Eigen::Index>(cols_[k])];
      y[static_cast<Eigen::Index>(r)] = acc;
    }
  }

  Vec apply(const Vec& x) const {
    Vec y;
    matvec(x, y);
    return y;
  }

  Mat dense() const {
    Mat M = Mat::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    for (std::uint64_t r = 0; r < dim_; ++r)
      for (std::uint64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cols_[k])) = vals_[k];
    return M;
  }

  double hermiticity_violation() const {
    // Compare against the transposed pattern; both sides are column-sorted.
    std::vector<std::vector<std::pair<std::uint64_t, Cx>>> colwise(dim_);
    for (std::uint64_t r = 0; r < dim_; ++r)
      for (std::uint64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        colwise[cols_[k]].push_back({r, vals_[k]});
    double worst = 0.0;
    for (std::uint64_t r = 0; r < dim_; ++r) {
      std::size_t i = row_ptr_[r];
      std::size_t j = 0;
      const auto& mirror = colwise[r];
      while (i < row_ptr_[r + 1] || j < mirror.size()) {
        const std::uint64_t ci = i < row_ptr_[r + 1] ? cols_[i] : ~std::uint64_t{0};
        const std::uint64_t cj = j < mirror.size() ? mirror[j].first : ~std::uint64_t{0};
        if (ci == cj) {
          worst = std::max(worst, std::abs(vals_[i] - std::conj(mirror[j].second)));
          ++i;
          ++j;
        } else if (ci < cj) {
          worst = std::max(worst, std::abs(vals_[i]));
          ++i;
        } else {
          worst = std::max(worst, std::abs(mirror[j].second));
          ++j;
        }
      }
    }
    return worst;
  }

  // Scale estimate for convergence thresholds: max row sum of moduli.
  // Copy of one finished row as (column, value) pairs, ascending columns.
  std::vector<std::pair<std::uint64_t, Cx>> row(std::uint64_t r) const {
    std::vector<std::pair<std::uint64_t, Cx>> out;
    out.reserve(row_ptr_[r + 1] - row_ptr_[r]);
    for (std::uint64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({cols_[k], vals_[k]});
    return out;
  }

  SparseOperator adjoint() const {
    std::vector<std::vector<std::pair<std::uint64_t, Cx>>> bycol(dim_);
    for (std::uint64_t r = 0; r < dim_; ++r)
      for (std::uint64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        bycol[cols_[k]].push_back({r, std::conj(vals_[k])});
    SparseOperator out(dim_);
    for (std::uint64_t c = 0; c < dim_; ++c) out.append_row(bycol[c]);
    out.finish();
    return out;
  }

  double norm_inf() const {
    double worst = 0.0;
    for (std::uint64_t r = 0; r < dim_; ++r) {
      double acc = 0.0;
      for (std::uint64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += std::abs(vals_[k]);
      worst = std::max(worst, acc);
    }
    return worst;
  }

  SparseOperator& operator*=(double s) {
    for (Cx& v : vals_) v *= s;
    return *this;
  }

  // Entry-wise sum; patterns may differ.
  friend SparseOperator add(const SparseOperator& a, const SparseOperator& b, Cx wa = 1.0, Cx wb = 1.0) {
    if (a.dim_ != b.dim_) fail(ErrorCode::DimensionMismatch, "operator dimensions differ");
    SparseOperator out(a.dim_);
    std::vector<std::pair<std::uint64_t, Cx>> row;
    for (std::uint64_t r = 0; r < a.dim_; ++r) {
      row.clear();
      for (std::uint64_t k = a.row_ptr_[r]; k < a.row_ptr_[r + 1]; ++k)
        row.push_back({a.cols_[k], wa * a.vals_[k]});
      for (std::uint64_t k = b.row_ptr_[r]; k < b.row_ptr_[r + 1]; ++k)
        row.push_back({b.cols_[k], wb * b.vals_[k]});
      out.append_row(row);
    }
    out.finish();
    return out;
  }

  // Matrix Market, coordinate complex general, 1-based indices, 17 significant
  // digits so values round-trip exactly through the decimal text.
  void write_matrix_market(std::ostream& os) const {
    os << "%%MatrixMarket matrix coordinate complex general\n";
    os << dim_ << " " << dim_ << " " << nnz() << "\n";
    for (std::uint64_t r = 0; r < dim_; ++r)
      for (std::uint64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        os << (r + 1) << " " << (cols_[k] + 1) << " " << fmt17(vals_[k].real()) << " "
           << fmt17(vals_[k].imag()) << "\n";
  }

  static SparseOperator read_matrix_market(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0)
      fail(ErrorCode::IoError, "missing MatrixMarket header");
    if (line.find("coordinate complex general") == std::string::npos)
      fail(ErrorCode::IoError, "unsupported MatrixMarket flavor: " + line);
    do {
      if (!std::getline(is, line)) fail(ErrorCode::IoError, "truncated MatrixMarket file");
    } while (!line.empty() && line[0] == '%');
    std::istringstream head(line);
    std::uint64_t rows = 0, cols = 0, nnz = 0;
    head >> rows >> cols >> nnz;
    if (rows != cols) fail(ErrorCode::IoError, "operator must be square");
    std::vector<std::vector<std::pair<std::uint64_t, Cx>>> rowdata(rows);
    for (std::uint64_t k = 0; k < nnz; ++k) {
      if (!std::getline(is, line)) fail(ErrorCode::IoError, "truncated MatrixMarket file");
      std::istringstream entry(line);
      std::uint64_t r = 0, c = 0;
      double re = 0, im = 0;
      entry >> r >> c >> re >> im;
      if (r < 1 || r > rows || c < 1 || c > cols) fail(ErrorCode::IoError, "index out of range");
      rowdata[r - 1].push_back({c - 1, Cx(re, im)});
    }
    SparseOperator out(rows);
    for (auto& row : rowdata) out.append_row(row);
    out.finish();
    return out;
  }

 private:
  std::uint64_t dim_ = 0;
  std::uint64_t rows_done_ = 0;
  std::vector<std::uint64_t> row_ptr_;
  std::vector<std::uint64_t> cols_;
  std::vector<Cx> vals_;
};

}  // namespace bogolab
