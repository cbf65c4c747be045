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

// Dense row-major matrices and a CSR sparse matrix, with the handful of
// products the GCN trainers need. All loops run in a fixed order so results
// are bit-reproducible.

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "amlgraph/common.hpp"

namespace aml::linalg {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void Fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  bool AllFinite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Square or rectangular CSR matrix with sorted column indices per row.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint64_t> offsets;  // rows + 1
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
};

// Multiply-add counter; a proxy for per-epoch work.
struct OpCounter {
  std::uint64_t macs = 0;
};

// out = a * b
Matrix MatMul(const Matrix& a, const Matrix& b, OpCounter* ops = nullptr);
// out = a^T * b
Matrix MatMulTN(const Matrix& a, const Matrix& b, OpCounter* ops = nullptr);
// out = a * b^T
Matrix MatMulNT(const Matrix& a, const Matrix& b, OpCounter* ops = nullptr);
// out = s * d
Matrix SpMM(const SparseMatrix& s, const Matrix& d, OpCounter* ops = nullptr);
// out = s^T * d
Matrix SpMMT(const SparseMatrix& s, const Matrix& d, OpCounter* ops = nullptr);

// Row `r` of (a * b), written into `out` (length b.cols()).
void MatMulRow(std::span<const double> a_row, const Matrix& b, std::span<double> out);

void ReluInPlace(Matrix& m);
void SoftmaxRowsInPlace(Matrix& m);
void SoftmaxRow(std::span<double> row);

// Rows of `m` at `ids`, in order (repeats allowed).
Matrix GatherRows(const Matrix& m, std::span<const std::uint32_t> ids);

double MaxAbsDiff(const Matrix& a, const Matrix& b);

}  // namespace aml::linalg
