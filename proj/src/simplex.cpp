#include "macrolight/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace macrolight {

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, const SimplexOptions& options) {
  const std::size_t dim = start.size();
  SimplexResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> pts(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += options.initial_step;
  std::vector<double> vals(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(dim + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> p2;
    std::vector<double> v2;
    for (auto i : order) {
      p2.push_back(pts[i]);
      v2.push_back(vals[i]);
    }
    pts.swap(p2);
    vals.swap(v2);
  };

  auto along = [&](const std::vector<double>& centroid, const std::vector<double>& from,
                   double coef) {
    std::vector<double> x(dim);
    for (std::size_t d = 0; d < dim; ++d) x[d] = centroid[d] + coef * (from[d] - centroid[d]);
    return x;
  };

  sort_simplex();
  for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
    if (std::isfinite(vals.back()) && vals.back() - vals.front() <= options.tolerance) {
      result.converged = true;
      break;
    }
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += pts[i][d] / static_cast<double>(dim);
    }
    const auto& worst = pts.back();
    const auto xr = along(centroid, worst, -1.0);
    const double fr = eval(xr);
    if (fr < vals.front()) {
      const auto xe = along(centroid, worst, -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts.back() = xe;
        vals.back() = fe;
      } else {
        pts.back() = xr;
        vals.back() = fr;
      }
    } else if (fr < vals[dim - 1]) {
      pts.back() = xr;
      vals.back() = fr;
    } else {
      const bool outside = fr < vals.back();
      const auto xc = along(centroid, worst, outside ? -0.5 : 0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, vals.back())) {
        pts.back() = xc;
        vals.back() = fc;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {
          for (std::size_t d = 0; d < dim; ++d) pts[i][d] = pts[0][d] + 0.5 * (pts[i][d] - pts[0][d]);
          vals[i] = eval(pts[i]);
        }
      }
    }
    sort_simplex();
  }
  result.x = pts.front();
  result.value = vals.front();
  return result;
}

}  // namespace macrolight
