// SPDX-License-Identifier: Apache-2.0
//
// Ince polynomial coefficients via the Fourier-basis eigenproblem of the
// Ince equation  C'' + eps*sin(2eta)*C' + (a - p*eps*cos(2eta))*C = 0.
// The operator closes exactly on the parity-restricted trigonometric span,
// so the matrix is assembled by discrete projection on a uniform eta grid
// (exact by trigonometric orthogonality) and diagonalized with Eigen.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "qilab/modes.hpp"

namespace qilab {

namespace {

struct Basis {
  bool is_cos;
  std::vector<int> freq;  // angular frequency of each basis function
};

Basis ince_basis(int p, InceParity parity) {
  Basis b;
  b.is_cos = (parity == InceParity::Even);
  if (parity == InceParity::Even) {
    if (p % 2 == 0)
      for (int k = 0; k <= p / 2; ++k) b.freq.push_back(2 * k);
    else
      for (int k = 0; k <= (p - 1) / 2; ++k) b.freq.push_back(2 * k + 1);
  } else {
    if (p % 2 == 0)
      for (int k = 1; k <= p / 2; ++k) b.freq.push_back(2 * k);
    else
      for (int k = 0; k <= (p - 1) / 2; ++k) b.freq.push_back(2 * k + 1);
  }
  return b;
}

}  // namespace

std::vector<double> ince_coefficients(int p, int m, InceParity parity,
                                      double epsilon) {
  if (p < 0 || m < 0 || m > p || (p - m) % 2 != 0)
    throw ValidationError("ince: invalid (p, m) index pair");
  if (parity == InceParity::Odd && m < 1)
    throw ValidationError("ince: odd parity requires m >= 1");
  if (epsilon < 0.0) throw ValidationError("ince: epsilon must be >= 0");

  Basis basis = ince_basis(p, parity);
  const int N = static_cast<int>(basis.freq.size());
  if (N == 0) throw ValidationError("ince: empty basis for given indices");

  // m -> position among the sorted eigenvalues
  int idx;
  if (parity == InceParity::Even)
    idx = (p % 2 == 0) ? m / 2 : (m - 1) / 2;
  else
    idx = (p % 2 == 0) ? m / 2 - 1 : (m - 1) / 2;

  const int M = 4 * (p + 3);  // enough samples for exact trig projection
  Eigen::MatrixXd T(N, N);
  std::vector<double> eta(M);
  for (int i = 0; i < M; ++i) eta[i] = 2.0 * M_PI * i / M;

  for (int k = 0; k < N; ++k) {
    double a = basis.freq[k];
    std::vector<double> Lb(M);
    for (int i = 0; i < M; ++i) {
      double e = eta[i];
      double s2 = std::sin(2.0 * e), c2 = std::cos(2.0 * e);
      if (basis.is_cos)
        Lb[i] = -a * a * std::cos(a * e) - epsilon * a * s2 * std::sin(a * e) -
                p * epsilon * c2 * std::cos(a * e);
      else
        Lb[i] = -a * a * std::sin(a * e) + epsilon * a * s2 * std::cos(a * e) -
                p * epsilon * c2 * std::sin(a * e);
    }
    for (int j = 0; j < N; ++j) {
      double aj = basis.freq[j];
      double num = 0.0, den = 0.0;
      for (int i = 0; i < M; ++i) {
        double bj =
            basis.is_cos ? std::cos(aj * eta[i]) : std::sin(aj * eta[i]);
        num += bj * Lb[i];
        den += bj * bj;
      }
      T(j, k) = num / den;
    }
  }

  // a C = -L C in this sign convention; eigenvalues of -T are the Ince
  // eigenvalues a, ordered ascending with increasing m.
  Eigen::EigenSolver<Eigen::MatrixXd> es(-T);
  if (es.info() != Eigen::Success)
    throw NumericError("ince: eigenproblem failed to converge");
  Eigen::VectorXd evals = es.eigenvalues().real();
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return evals(i) < evals(j); });

  Eigen::VectorXd vec = es.eigenvectors().col(order[idx]).real();
  std::vector<double> coeffs(vec.data(), vec.data() + N);
  // deterministic sign: first nonzero coefficient positive
  for (double c : coeffs) {
    if (std::abs(c) > 1e-12) {
      if (c < 0)
        for (auto& x : coeffs) x = -x;
      break;
    }
  }
  return coeffs;
}

}  // namespace qilab
