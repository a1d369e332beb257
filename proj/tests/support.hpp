#pragma once

#include <Eigen/Dense>
#include <random>

#include "gaas/matrix.hpp"
#include "gaas/model.hpp"
#include "gaas/scenarios.hpp"

namespace testing {

inline Eigen::MatrixXd to_eigen(const gaas::Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline gaas::Matrix from_eigen(const Eigen::MatrixXd& e) {
  gaas::Matrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

inline gaas::Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  gaas::Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

inline gaas::Matrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
  const gaas::Matrix a = random_matrix(rng, n, n);
  return 0.5 * (a + a.transpose());
}

inline double max_abs_diff(const gaas::Matrix& a, const gaas::Matrix& b) { return (a - b).max_abs(); }

inline gaas::Scenario switched_case() {
  return gaas::parse_config(gaas::scenarios::builtin_config("casestudy_switched"));
}

inline gaas::Scenario ramp_case() {
  return gaas::parse_config(gaas::scenarios::builtin_config("casestudy_ramp"));
}

// Double integrator data shared by the case-study tests.
inline const gaas::Matrix kA{{0, 1}, {0, 0}};
inline const gaas::Matrix kB{{0}, {1}};
inline const gaas::Matrix kC{{1, 0}};
inline const gaas::Matrix kM{{3.9544, 1.1805}, {1.1805, 4.2262}};
inline const gaas::Matrix kK{{-1.3298, -1.4108}};

}  // namespace testing
