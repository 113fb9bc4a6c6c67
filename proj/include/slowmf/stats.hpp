#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace slowmf {

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);

/// Least-squares line y = intercept + slope * x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
/// Fit of log(y) against log(x); throws ValidationError for < 3 points or non-positive data.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware concurrency).
/// Results must be written to per-index slots so the output is independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace slowmf
