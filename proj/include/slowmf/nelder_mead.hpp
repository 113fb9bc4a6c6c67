#pragma once

#include "slowmf/linalg.hpp"

#include <functional>
#include <vector>

namespace slowmf {

struct NmOptions {
    double tol_x = 1e-8;   ///< stop when the simplex diameter falls below this
    double tol_f = 0.0;    ///< stop when max - min vertex value falls below this
    int max_iter = 500;
};

struct NmTraceEntry {
    std::vector<Vec> simplex;
    std::vector<double> values;
};

struct NmResult {
    Vec argmin;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;  ///< false when max_iter was hit
    std::vector<NmTraceEntry> trace;
};

/// Nelder-Mead with reflection 1, expansion 2, contraction 1/2 and shrink 1/2.
/// Non-finite objective values act as an infinite penalty.
NmResult nelder_mead(const std::function<double(const Vec&)>& objective, std::vector<Vec> simplex,
                     const NmOptions& opts = {});

/// One-dimensional convenience wrapper with the two-point simplex {x0, x1}.
NmResult nelder_mead(const std::function<double(double)>& objective, double x0, double x1,
                     const NmOptions& opts = {});

}  // namespace slowmf
