#pragma once

#include "iep/symlin.hpp"

#include <random>

namespace testing {

inline iep::SymMatrix random_sym(int n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  iep::SymMatrix m(n);
  for (int s = 0; s < n; ++s)
    for (int t = s; t < n; ++t) m.set(s, t, U(rng));
  return m;
}

inline iep::SymMatrix orthogonal_conjugate(const iep::SymMatrix& d, std::mt19937_64& rng) {
  const int n = d.n();
  std::normal_distribution<double> N;
  Eigen::MatrixXd g(n, n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) g(s, t) = N(rng);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  return iep::SymMatrix::symmetrized(q * d.dense() * q.transpose());
}

}  // namespace testing
