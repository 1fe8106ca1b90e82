#include "kexp/symtrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "kexp/types.hpp"

namespace kexp {

SymTridEigen symtrid_eig(std::span<const double> diagonal, std::span<const double> offdiagonal,
                         bool compute_vectors) {
  const std::size_t n = diagonal.size();
  if (n == 0) throw std::invalid_argument("symtrid_eig: empty matrix");
  if (offdiagonal.size() + 1 != n) {
    throw std::invalid_argument("symtrid_eig: offdiagonal must have n-1 entries");
  }
  constexpr int kMaxSweeps = 60;
  const double eps = std::numeric_limits<double>::epsilon();

  std::vector<double> d(diagonal.begin(), diagonal.end());
  std::vector<double> e(n, 0.0);
  std::copy(offdiagonal.begin(), offdiagonal.end(), e.begin());
  std::vector<double> v;
  if (compute_vectors) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  }

  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      int sweeps = 0;
      do {
        if (++sweeps > kMaxSweeps) {
          throw ConvergenceError("symtrid_eig: QL iteration did not converge");
        }
        // Wilkinson shift from the leading 2x2 block.
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        // Implicit QL sweep from the bottom of the unreduced block.
        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          if (compute_vectors) {
            for (std::size_t k = 0; k < n; ++k) {
              const double vk1 = v[k * n + i + 1];
              v[k * n + i + 1] = s * v[k * n + i] + c * vk1;
              v[k * n + i] = c * v[k * n + i] - s * vk1;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  SymTridEigen out;
  out.n = n;
  out.eigenvalues.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.eigenvalues[k] = d[order[k]];
  if (compute_vectors) {
    out.q.resize(n * n);
    for (std::size_t row = 0; row < n; ++row)
      for (std::size_t k = 0; k < n; ++k) out.q[row * n + k] = v[row * n + order[k]];
  }
  return out;
}

}  // namespace kexp
