#pragma once

#include "slowmf/grid.hpp"
#include "slowmf/model.hpp"
#include "slowmf/noise.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace slowmf {

struct LpOptions {
    double T_cut = 0.0;  ///< 0 selects (eps/rho) ln(1/tol) + 5 eps/gamma1
    double tol = 1e-10;
    int max_iter = 200;
};

double default_T_cut(double eps, double rho, double gamma1, double tol);

/// Backward orbit on [-T_cut, 0] (times relative to the chosen origin node).
struct BackwardOrbit {
    TimeGrid grid;
    Mat X;  ///< n1 x nodes, fast deviation from the driver
    Mat Y;  ///< n2 x nodes, Y(0) = xi
};

struct LpResult {
    Vec H;  ///< X(0)
    Vec h;  ///< H plus the driver value at the origin node
    BackwardOrbit orbit;
    int iterations = 0;
    std::vector<double> changes;  ///< weighted-norm change per iteration
    std::vector<double> ratios;   ///< changes[k] / changes[k-1]
    double residual = 0.0;        ///< last weighted-norm change
};

/// Picard iteration for the pair of integral equations on [-T_cut, 0]:
///   X(t) = (1/eps) int_{-T}^t e^{A(t-s)/eps} f(X + drv, Y) ds,
///   Y(t) = e^{Bt} xi - int_t^0 e^{B(t-s)} g(X + drv, Y, a) ds,
/// using exponential trapezoid quadrature. `origin` is the driver node that
/// plays the role of time 0 (defaults to the grid origin); choosing a later
/// node yields the manifold of the shifted sample.
LpResult lp_fixed_point(const SlowFastModel& model, const StationaryDriverPath& driver,
                        const Vec& xi, const LpOptions& opts = {},
                        std::optional<std::size_t> origin = std::nullopt);

/// Graph of xi -> h over a set of slow values for one sample.
struct ManifoldSample {
    double eps = 0.0;
    double mu = 0.0;  ///< 0 marks white noise
    std::uint64_t omega_seed = 0;
    std::vector<Vec> xi_grid;
    std::vector<Vec> h_values;
    double lipschitz_est = 0.0;
    int iterations = 0;  ///< max over the grid
    double residual = 0.0;  ///< max over the grid
    double max_ratio = 0.0;  ///< max observed contraction ratio over the grid
};

ManifoldSample manifold_graph(const SlowFastModel& model, const StationaryDriverPath& driver,
                              const std::vector<Vec>& xi_grid, const LpOptions& opts = {},
                              std::optional<std::size_t> origin = std::nullopt);

enum class ManifoldSource { fixed_point, expansion };
std::string to_string(ManifoldSource s);
ManifoldSource manifold_source_from_string(const std::string& s);

/// Wong-Zakai manifold convergence study: mean |h^{mu,eps} - h^eps| over seeds and xi.
struct GapStudyConfig {
    double eps = 0.1;
    std::vector<double> mu_list;
    std::vector<double> xi_list;
    std::size_t n_seeds = 10;
    std::uint64_t base_seed = 1;
    ManifoldSource source = ManifoldSource::fixed_point;
    double dt = 0.0;  ///< 0 selects min(eps/500, min mu / 10)
    LpOptions lp;
};

struct GapRow {
    double mu = 0.0;
    double mean_gap = 0.0;
    double stderr_ = 0.0;
};

struct GapTable {
    double eps = 0.0;
    std::vector<GapRow> rows;
    double slope = 0.0;
    double slope_stderr = 0.0;
};

GapTable wz_manifold_gap(const SlowFastModel& model, const GapStudyConfig& cfg);

/// Flow manifold points forward and measure the distance to the manifold of the shifted sample.
struct InvarianceReport {
    double t_check = 0.0;
    double max_distance = 0.0;
    double scale = 0.0;  ///< max |h| over the xi grid at time 0
    std::vector<double> distances;
};

InvarianceReport invariance_check(const SlowFastModel& model, const NoiseBundle& noise,
                                  NoiseKind kind, const std::vector<Vec>& xi_grid, double t_check,
                                  const LpOptions& opts = {}, double burn_in = 0.0);

}  // namespace slowmf
