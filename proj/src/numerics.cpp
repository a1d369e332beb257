#include "gaas/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gaas/error.hpp"

namespace gaas::numerics {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const Matrix& a, const char* what) {
  if (!a.is_square()) {
    throw Error(ErrorCode::NonSquare, std::string(what) + ": matrix is " +
                                          std::to_string(a.rows()) + "x" +
                                          std::to_string(a.cols()));
  }
}

Matrix gram(const Matrix& a) { return a.transpose() * a; }

Matrix gram_outer(const Matrix& a) { return a * a.transpose(); }

// Balances a general matrix in place by powers of two (row/column norm
// equalization); eigenvalues are unchanged.
void balance(Matrix& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const std::size_t n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations. Entries below the subdiagonal are zeroed on return.
void to_hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t m = 1; m + 1 < n; ++m) {
    double x = 0.0;
    std::size_t i = m;
    for (std::size_t j = m; j < n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        i = j;
      }
    }
    if (i != m) {
      for (std::size_t j = m - 1; j < n; ++j) std::swap(a(i, j), a(m, j));
      for (std::size_t j = 0; j < n; ++j) std::swap(a(j, i), a(j, m));
    }
    if (x != 0.0) {
      for (i = m + 1; i < n; ++i) {
        double y = a(i, m - 1);
        if (y == 0.0) continue;
        y /= x;
        a(i, m - 1) = y;
        for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
        for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
      }
    }
  }
  for (std::size_t i = 2; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
std::vector<std::complex<double>> hessenberg_qr(Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
  const long max_iterations = 100L * n * n;
  long total_iterations = 0;

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  int nn = n - 1;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, w_ = 0.0, x = 0.0, y = 0.0, z = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= kEps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        w[nn--] = x + t;
      } else {
        y = a(nn - 1, nn - 1);
        w_ = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w_;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            w[nn - 1] = w[nn] = x + z;
            if (z != 0.0) w[nn] = x - w_ / z;
          } else {
            w[nn] = std::complex<double>(x + p, -z);
            w[nn - 1] = std::conj(w[nn]);
          }
          nn -= 2;
        } else {
          if (++total_iterations > max_iterations) {
            throw Error(ErrorCode::NoConvergence, "QR iteration did not converge");
          }
          if (its > 0 && its % 10 == 0) {
            // Exceptional shift.
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w_ = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w_) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= kEps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k + 1 != nn) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k + 1 != nn) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

}  // namespace

SymEigResult sym_eig(const Matrix& a) {
  require_square(a, "sym_eig");
  const std::size_t n = a.rows();
  const double scale = a.max_abs();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * scale) {
        throw Error(ErrorCode::NotSymmetric, "sym_eig: matrix is not symmetric");
      }

  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  Matrix v = Matrix::identity(n);

  constexpr int kMaxSweeps = 100;
  const double target = kEps * kEps * std::max(s.frobenius_norm() * s.frobenius_norm(), 1e-300);
  int sweep = 0;
  for (;; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
    if (off <= target) break;
    if (sweep == kMaxSweeps) throw Error(ErrorCode::NoConvergence, "Jacobi sweeps exhausted");

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (apq == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
        const double t = sign_of(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = s(k, p);
          const double akq = s(k, q);
          s(k, p) = s(p, k) = c * akp - sn * akq;
          s(k, q) = s(q, k) = sn * akp + c * akq;
        }
        s(p, p) -= t * apq;
        s(q, q) += t * apq;
        s(p, q) = s(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return s(i, i) < s(j, j); });
  SymEigResult out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = s(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const Matrix g = a.rows() >= a.cols() ? gram(a) : gram_outer(a);
  const auto eig = sym_eig(g);
  return std::sqrt(std::max(0.0, eig.values.back()));
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  require_square(a, "eigenvalues");
  if (a.rows() == 0) return {};
  Matrix h = a;
  balance(h);
  to_hessenberg(h);
  return hessenberg_qr(h);
}

double real_spectral_abscissa(const Matrix& a) {
  const auto ev = eigenvalues(a);
  if (ev.empty()) throw Error(ErrorCode::InvalidArgument, "spectral abscissa of empty matrix");
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& z : ev) m = std::max(m, z.real());
  return m;
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
  require_square(a, "solve_linear");
  const std::size_t n = a.rows();
  if (b.rows() != n) throw Error(ErrorCode::DimensionMismatch, "solve_linear: rhs row mismatch");
  Matrix lu = a;
  Matrix x = b;
  const double tol = 64.0 * kEps * static_cast<double>(std::max<std::size_t>(n, 1)) *
                     std::max(a.max_abs(), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (std::abs(lu(piv, k)) <= tol) {
      throw Error(ErrorCode::SingularOperator, "solve_linear: matrix is singular to working precision");
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x(ii, c);
      for (std::size_t j = ii + 1; j < n; ++j) s -= lu(ii, j) * x(j, c);
      x(ii, c) = s / lu(ii, ii);
    }
  }
  return x;
}

Matrix solve_sylvester(const Matrix& f, const Matrix& g, const Matrix& w) {
  require_square(f, "solve_sylvester(F)");
  require_square(g, "solve_sylvester(G)");
  require_shape(w, f.rows(), g.rows(), "solve_sylvester(W)");
  const std::size_t n = f.rows();
  const std::size_t k = g.rows();
  const Matrix op = kron(Matrix::identity(k), f) + kron(g.transpose(), Matrix::identity(n));
  const Vector rhs = w.vec();
  Matrix sol;
  try {
    sol = solve_linear(op, Matrix::column(rhs));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularOperator) {
      throw Error(ErrorCode::SingularOperator,
                  "solve_sylvester: F and -G share an eigenvalue (singular Kronecker operator)");
    }
    throw;
  }
  return Matrix::unvec(sol.data(), n, k);
}

Matrix psd_sqrt(const Matrix& m) {
  const auto eig = sym_eig(m);
  const std::size_t n = m.rows();
  const double top = eig.values.empty() ? 0.0 : std::max(eig.values.back(), 0.0);
  const double tol = 1e-10 * top;
  Vector roots(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lam = eig.values[i];
    if (lam < -tol) throw Error(ErrorCode::NotPSD, "psd_sqrt: matrix has a negative eigenvalue");
    roots[i] = std::sqrt(std::max(lam, 0.0));
  }
  const Matrix& v = eig.vectors;
  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += v(i, k) * roots[k] * v(j, k);
      r(i, j) = r(j, i) = s;
    }
  return r;
}

Matrix pseudo_inverse(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return Matrix(a.cols(), a.rows());
  const bool tall = a.rows() >= a.cols();
  const auto eig = sym_eig(tall ? gram(a) : gram_outer(a));
  const double top = std::max(eig.values.back(), 0.0);
  const std::size_t k = eig.values.size();
  Matrix core(k, k);
  if (top > 0.0) {
    for (std::size_t c = 0; c < k; ++c) {
      const double lam = eig.values[c];
      if (lam <= rel_tol * top) continue;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          core(i, j) += eig.vectors(i, c) * eig.vectors(j, c) / lam;
    }
  }
  return tall ? core * a.transpose() : a.transpose() * core;
}

Matrix null_space(const Matrix& a, double rel_tol) {
  const std::size_t n = a.cols();
  if (a.rows() == 0) return Matrix::identity(n);
  const auto eig = sym_eig(gram(a));
  const double top = std::max(eig.values.back(), 0.0);
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < n; ++c)
    if (top == 0.0 || eig.values[c] <= rel_tol * top) keep.push_back(c);
  Matrix z(n, keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) z(i, j) = eig.vectors(i, keep[j]);
  return z;
}

ConstrainedLstsqResult constrained_lstsq(const Matrix& obj_map, std::span<const double> obj_rhs,
                                         const Matrix& eq_map, std::span<const double> eq_rhs,
                                         double rel_tol) {
  const std::size_t n = obj_map.cols();
  if (obj_rhs.size() != obj_map.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "constrained_lstsq: objective rhs size mismatch");
  }
  if (eq_map.rows() > 0 && eq_map.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "constrained_lstsq: equality map column mismatch");
  }
  if (eq_rhs.size() != eq_map.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "constrained_lstsq: equality rhs size mismatch");
  }

  ConstrainedLstsqResult out;
  Vector xp(n, 0.0);
  if (eq_map.rows() > 0) {
    xp = pseudo_inverse(eq_map, rel_tol) * eq_rhs;
    Vector res = eq_map * xp;
    for (std::size_t i = 0; i < res.size(); ++i) res[i] -= eq_rhs[i];
    const double bnorm = norm2(eq_rhs);
    if (norm2(res) > 1e-8 * bnorm + 1e-14 * eq_map.frobenius_norm() * norm2(xp)) {
      throw Error(ErrorCode::InconsistentConstraints,
                  "constrained_lstsq: equality constraints are inconsistent");
    }
    out.null_basis = null_space(eq_map, rel_tol);
  } else {
    out.null_basis = Matrix::identity(n);
  }

  const Matrix& z = out.null_basis;
  Vector x = xp;
  if (z.cols() > 0) {
    const Matrix az = obj_map * z;
    Vector r0 = obj_map * xp;
    for (std::size_t i = 0; i < r0.size(); ++i) r0[i] = obj_rhs[i] - r0[i];
    const Vector y = pseudo_inverse(az, rel_tol) * r0;
    const Vector zy = z * y;
    for (std::size_t i = 0; i < n; ++i) x[i] += zy[i];
  }

  Vector r = obj_map * x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= obj_rhs[i];
  out.objective = norm2(r);
  if (eq_map.rows() > 0) {
    Vector e = eq_map * x;
    for (std::size_t i = 0; i < e.size(); ++i) e[i] -= eq_rhs[i];
    out.eq_residual = norm2(e);
  }
  out.kkt_residual = z.cols() > 0 ? norm2((z.transpose() * obj_map.transpose()) * r) : 0.0;
  out.solution = std::move(x);
  return out;
}

}  // namespace gaas::numerics
