// Copyright 2026 The ldpagg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldpagg/topology.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace ldpagg {
namespace {

Vector SymmetricEigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();  // ascending
}

}  // namespace

std::string ValidationReport::ToString() const {
  std::ostringstream out;
  for (const auto& item : items) {
    out << (item.pass ? "PASS " : "FAIL ") << item.name
        << " (residual " << item.residual << ")\n";
  }
  if (valid) {
    out << "rho2_abs " << *rho2_abs << "\nw_bar " << *w_bar
        << "\ncontraction_norm " << *contraction_norm << "\n";
  }
  return out.str();
}

ValidationReport ValidateWeights(const Matrix& w) {
  ValidationReport report;
  auto add = [&report](std::string name, bool pass, double residual) {
    report.items.push_back({std::move(name), pass, residual});
  };

  if (w.rows() != w.cols() || w.rows() == 0) {
    add("square", false, static_cast<double>(std::abs(w.rows() - w.cols())));
    return report;
  }
  add("square", true, 0.0);
  if (!w.allFinite()) {
    add("finite", false, INFINITY);
    return report;
  }
  const int m = static_cast<int>(w.rows());

  const double symmetry = (w - w.transpose()).cwiseAbs().maxCoeff();
  add("symmetric", symmetry <= kStructuralTolerance, symmetry);

  const double row_sums = w.rowwise().sum().cwiseAbs().maxCoeff();
  add("row_sums_zero", row_sums <= kStructuralTolerance, row_sums);
  const double col_sums = w.colwise().sum().cwiseAbs().maxCoeff();
  add("column_sums_zero", col_sums <= kStructuralTolerance, col_sums);

  double most_negative_off = 0.0;
  double diag_mismatch = 0.0;
  double max_self_weight = -INFINITY;
  for (int i = 0; i < m; ++i) {
    double off_sum = 0.0;
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      most_negative_off = std::min(most_negative_off, w(i, j));
      off_sum += w(i, j);
    }
    diag_mismatch = std::max(diag_mismatch, std::abs(w(i, i) + off_sum));
    max_self_weight = std::max(max_self_weight, w(i, i));
  }
  add("off_diagonal_nonnegative", most_negative_off >= 0.0, -most_negative_off);
  add("diagonal_matches_neighbor_sum", diag_mismatch <= kStructuralTolerance,
      diag_mismatch);
  if (m >= 2) {
    // Every agent needs at least one neighbor.
    add("self_weights_negative", max_self_weight < 0.0,
        std::max(0.0, max_self_weight));
  }

  const Matrix shifted = Matrix::Identity(m, m) + w -
                         Matrix::Constant(m, m, 1.0 / static_cast<double>(m));
  // Symmetric part suffices once symmetry passed; use singular values
  // otherwise so the reported norm is always the spectral norm.
  double norm;
  if (symmetry <= kStructuralTolerance) {
    norm = SymmetricEigenvalues(0.5 * (shifted + shifted.transpose()))
               .cwiseAbs()
               .maxCoeff();
  } else {
    Eigen::JacobiSVD<Matrix> svd(shifted);
    norm = svd.singularValues()(0);
  }
  add("contraction_norm_below_one", norm < 1.0 - kStructuralTolerance, norm);

  report.valid = std::all_of(report.items.begin(), report.items.end(),
                             [](const ValidationItem& it) { return it.pass; });
  if (report.valid) {
    double rho2 = 1.0;
    if (m >= 2) {
      const Vector eig = SymmetricEigenvalues(0.5 * (w + w.transpose()));
      rho2 = std::abs(eig(m - 2));
    }
    report.rho2_abs = rho2;
    report.w_bar = w.diagonal().cwiseAbs().minCoeff();
    report.contraction_norm = norm;
    report.spectral_bound_gap = norm - (1.0 - rho2);
  }
  return report;
}

NetworkTopology NetworkTopology::Ring(int m, double w) {
  if (m < 2) throw std::invalid_argument("ring topology needs m >= 2");
  if (!(w > 0.0 && w < 0.5)) {
    throw std::invalid_argument("ring edge weight must lie in (0, 1/2)");
  }
  Matrix weights = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const int next = (i + 1) % m;
    weights(i, next) = w;
    weights(next, i) = w;
  }
  for (int i = 0; i < m; ++i) weights(i, i) = -(weights.row(i).sum());
  return FromMatrix(weights);
}

NetworkTopology NetworkTopology::Trivial() {
  NetworkTopology topo;
  topo.weights_ = Matrix::Zero(1, 1);
  topo.neighbors_.assign(1, {});
  topo.spectrum_ = Vector::Zero(1);
  topo.rho2_abs_ = 1.0;
  topo.w_bar_ = 0.0;
  topo.contraction_norm_ = 0.0;
  return topo;
}

NetworkTopology NetworkTopology::FromMatrix(const Matrix& weights) {
  if (weights.rows() == 1 && weights.cols() == 1 && weights(0, 0) == 0.0) {
    return Trivial();
  }
  const ValidationReport report = ValidateWeights(weights);
  if (!report.valid) {
    throw std::invalid_argument("invalid weight matrix:\n" + report.ToString());
  }
  NetworkTopology topo;
  const int m = static_cast<int>(weights.rows());
  topo.weights_ = 0.5 * (weights + weights.transpose());
  topo.neighbors_.assign(m, {});
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i != j && topo.weights_(i, j) > 0.0) topo.neighbors_[i].push_back(j);
    }
  }
  topo.spectrum_ = SymmetricEigenvalues(topo.weights_);
  topo.rho2_abs_ = *report.rho2_abs;
  topo.w_bar_ = *report.w_bar;
  topo.contraction_norm_ = *report.contraction_norm;
  return topo;
}

}  // namespace ldpagg
