#include "levystop/numerics.hpp"

#include <cmath>

namespace levystop::numerics {

std::vector<double> Chebyshev::nodes(double a, double b, int n) {
  if (!(b > a) || n < 2) throw UsageError("Chebyshev: bad interval or order");
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double t = std::cos(M_PI * (k + 0.5) / n);
    xs[static_cast<std::size_t>(k)] = 0.5 * (a + b) + 0.5 * (b - a) * t;
  }
  return xs;
}

Chebyshev Chebyshev::fit_values(double a, double b,
                                const std::vector<double>& node_values) {
  const int n = static_cast<int>(node_values.size());
  if (!(b > a) || n < 2) throw UsageError("Chebyshev: bad interval or order");
  Chebyshev c;
  c.a_ = a;
  c.b_ = b;
  c.coef_.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    long double acc = 0.0L;
    for (int k = 0; k < n; ++k)
      acc += static_cast<long double>(node_values[static_cast<std::size_t>(k)]) *
             std::cos(M_PI * j * (k + 0.5) / n);
    c.coef_[static_cast<std::size_t>(j)] =
        static_cast<double>(acc * (j == 0 ? 1.0L : 2.0L) / n);
  }
  return c;
}

Chebyshev Chebyshev::fit(const std::function<double(double)>& f, double a,
                         double b, int n) {
  const std::vector<double> xs = nodes(a, b, n);
  std::vector<double> vals(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) vals[k] = f(xs[k]);
  return fit_values(a, b, vals);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  if (n == 0) return out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(i + 1 == n ? hi : lo + step * static_cast<double>(i));
  return out;
}

}  // namespace levystop::numerics
