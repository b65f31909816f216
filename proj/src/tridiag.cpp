#include "scgame/tridiag.hpp"

#include <cmath>

#include "scgame/errors.hpp"

namespace scg {

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
  const std::size_t n = rhs.size();
  if (n == 0) return;
  std::vector<double> c(n);
  double beta = diag[0];
  if (beta == 0.0) throw Error("tridiagonal solve: zero pivot");
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    c[i] = upper[i - 1] / beta;
    beta = diag[i] - lower[i] * c[i];
    if (beta == 0.0) throw Error("tridiagonal solve: zero pivot");
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i + 1] * rhs[i + 1];
}

Stencil build_stencil(const Grid& grid, const std::function<double(double)>& diffusion,
                      const std::function<double(double)>& drift,
                      const std::function<double(double)>& rate) {
  const std::size_t nx = grid.n_x();
  const double dx = grid.dx;
  Stencil s{std::vector<double>(nx, 0.0), std::vector<double>(nx, 0.0), std::vector<double>(nx, 0.0)};
  for (std::size_t i = 1; i + 1 < nx; ++i) {
    const double x = grid.x_nodes[i];
    const double diff = diffusion(x) / (dx * dx);
    const double m = drift(x);
    double lo = diff, up = diff;
    if (diff >= std::abs(m) / (2.0 * dx)) {
      lo -= m / (2.0 * dx);
      up += m / (2.0 * dx);
    } else if (m > 0.0) {
      up += m / dx;
    } else {
      lo -= m / dx;
    }
    s.lower[i] = lo;
    s.upper[i] = up;
    s.diag[i] = -lo - up - rate(x);
  }
  return s;
}

}  // namespace scg
