// Copyright 2026 The amlgraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "amlgraph/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aml::linalg {
namespace {

void CheckShape(bool ok, const char* op, std::size_t a, std::size_t b) {
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument, std::string(op) + ": shape mismatch (" +
                                                 std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

void Count(OpCounter* ops, std::uint64_t n) {
  if (ops) ops->macs += n;
}

}  // namespace

bool Matrix::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void MatMulRow(std::span<const double> a_row, const Matrix& b, std::span<double> out) {
  const std::size_t n = b.cols();
  std::fill(out.begin(), out.end(), 0.0);
  const double* bd = b.data().data();
  for (std::size_t k = 0; k < a_row.size(); ++k) {
    const double a = a_row[k];
    if (a == 0.0) continue;
    const double* brow = bd + k * n;
    for (std::size_t j = 0; j < n; ++j) out[j] += a * brow[j];
  }
}

Matrix MatMul(const Matrix& a, const Matrix& b, OpCounter* ops) {
  CheckShape(a.cols() == b.rows(), "MatMul", a.cols(), b.rows());
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) MatMulRow(a.row(i), b, out.row(i));
  Count(ops, a.rows() * a.cols() * b.cols());
  return out;
}

Matrix MatMulTN(const Matrix& a, const Matrix& b, OpCounter* ops) {
  CheckShape(a.rows() == b.rows(), "MatMulTN", a.rows(), b.rows());
  Matrix out(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto arow = a.row(i);
    const auto brow = b.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double v = arow[k];
      if (v == 0.0) continue;
      double* orow = out.row(k).data();
      for (std::size_t j = 0; j < n; ++j) orow[j] += v * brow[j];
    }
  }
  Count(ops, a.rows() * a.cols() * b.cols());
  return out;
}

Matrix MatMulNT(const Matrix& a, const Matrix& b, OpCounter* ops) {
  CheckShape(a.cols() == b.cols(), "MatMulNT", a.cols(), b.cols());
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto arow = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto brow = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += arow[k] * brow[k];
      out(i, j) = s;
    }
  }
  Count(ops, a.rows() * a.cols() * b.rows());
  return out;
}

Matrix SpMM(const SparseMatrix& s, const Matrix& d, OpCounter* ops) {
  CheckShape(s.cols == d.rows(), "SpMM", s.cols, d.rows());
  Matrix out(s.rows, d.cols());
  const std::size_t n = d.cols();
  for (std::size_t i = 0; i < s.rows; ++i) {
    double* orow = out.row(i).data();
    for (std::uint64_t k = s.offsets[i]; k < s.offsets[i + 1]; ++k) {
      const double v = s.values[k];
      const double* drow = d.row(s.indices[k]).data();
      for (std::size_t j = 0; j < n; ++j) orow[j] += v * drow[j];
    }
  }
  Count(ops, s.nnz() * n);
  return out;
}

Matrix SpMMT(const SparseMatrix& s, const Matrix& d, OpCounter* ops) {
  CheckShape(s.rows == d.rows(), "SpMMT", s.rows, d.rows());
  Matrix out(s.cols, d.cols());
  const std::size_t n = d.cols();
  for (std::size_t i = 0; i < s.rows; ++i) {
    const double* drow = d.row(i).data();
    for (std::uint64_t k = s.offsets[i]; k < s.offsets[i + 1]; ++k) {
      const double v = s.values[k];
      double* orow = out.row(s.indices[k]).data();
      for (std::size_t j = 0; j < n; ++j) orow[j] += v * drow[j];
    }
  }
  Count(ops, s.nnz() * n);
  return out;
}

void ReluInPlace(Matrix& m) {
  for (double& v : m.data()) v = v > 0.0 ? v : 0.0;
}

void SoftmaxRow(std::span<double> row) {
  double mx = row.empty() ? 0.0 : row[0];
  for (double v : row) mx = std::max(mx, v);
  double sum = 0.0;
  for (double& v : row) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : row) v /= sum;
}

void SoftmaxRowsInPlace(Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) SoftmaxRow(m.row(i));
}

Matrix GatherRows(const Matrix& m, std::span<const std::uint32_t> ids) {
  Matrix out(ids.size(), m.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto src = m.row(ids[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

double MaxAbsDiff(const Matrix& a, const Matrix& b) {
  CheckShape(a.rows() == b.rows() && a.cols() == b.cols(), "MaxAbsDiff", a.size(), b.size());
  double mx = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mx = std::max(mx, std::abs(a.data()[i] - b.data()[i]));
  }
  return mx;
}

}  // namespace aml::linalg
