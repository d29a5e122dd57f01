#pragma once

#include <functional>
#include <span>
#include <vector>

namespace macrolight {

struct SimplexOptions {
  double initial_step = 0.05;
  // Stop once every vertex value lies within this of the best vertex.
  double tolerance = 1e-10;
  int max_iterations = 2000;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead minimization (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2). Non-finite objective values are treated as +infinity.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, const SimplexOptions& options = {});

}  // namespace macrolight
