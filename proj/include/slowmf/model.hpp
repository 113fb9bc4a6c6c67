#pragma once

#include "slowmf/linalg.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace slowmf {

using FastFn = std::function<Vec(const Vec& u, const Vec& v)>;
using SlowFn = std::function<Vec(const Vec& u, const Vec& v, double a)>;

/// u' = (A u + f(u, v)) / eps + sigma / sqrt(eps) * noise,
/// v' = B v + g(u, v, a),
/// together with the declared constants used by the assumption checks.
struct SlowFastModel {
    std::string name;
    Mat A;
    Mat B;
    FastFn f;
    SlowFn g;
    Vec sigma;
    double eps = 0.1;
    double a = 0.0;  ///< parameter passed to g
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double K = 0.0;
    double rho = 0.0;

    Eigen::Index n_fast() const { return A.rows(); }
    Eigen::Index n_slow() const { return B.rows(); }

    SlowFastModel with_eps(double e) const;
    SlowFastModel with_param(double value) const;
    SlowFastModel with_sigma(const Vec& s) const;
};

/// Closed-form constants of the gap and contraction conditions.
namespace constants {
double kappa(double K, double gamma1, double gamma2, double rho, double eps);
double kappa_star(double K, double gamma1, double gamma2, double rho, double eps);
double eps_max(double K, double gamma1, double gamma2, double rho);
/// Lipschitz bound of the manifold graph.
double graph_lipschitz(double K, double gamma1, double gamma2, double rho, double eps);
/// Tracking prefactor 1 / (1 - K (1/(gamma1 - rho) + eps/(rho - eps gamma2))).
double tracking_c1(double K, double gamma1, double gamma2, double rho, double eps);
}  // namespace constants

struct AssumptionReport {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double K = 0.0;
    double rho = 0.0;
    double eps = 0.0;
    double kappa = 0.0;
    double kappa1 = 0.0;
    double kappa_star = 0.0;
    double eps_max = 0.0;
    double lipschitz_bound = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double log_norm_A = 0.0;    ///< must be <= -gamma1
    double log_norm_negB = 0.0; ///< must be <= gamma2
    bool ok = false;
    bool tracking_ok = false;  ///< ok and kappa_star < 1
    std::vector<std::string> violations;
};

AssumptionReport check_assumptions(const SlowFastModel& model);
/// Throws AssumptionError listing the violations when !report.ok.
void require_assumptions(const AssumptionReport& report);

/// C^1 bridge: 1 on [0,1], 1 - 3x^2 + 2x^3 with x = s - 1 on [1,2], 0 beyond.
double bridge(double s);
/// raw(u, v) * bridge(|arg| / radius); arg is (u, v) stacked.
FastFn cutoff(FastFn raw, double radius);
SlowFn cutoff(SlowFn raw, double radius);

/// Sup of |d/dv (bridge(|v|/R) v^2 / 600)| by dense sampling with a small safety margin.
double example_fast_lipschitz(double radius);

SlowFastModel example_model(double a, double cutoff_radius = 6.0, double eps = 0.1);

/// Finite-difference Lipschitz estimates on the ball of the given radius.
struct LipschitzSample {
    double f = 0.0;
    double g = 0.0;
};
LipschitzSample sample_lipschitz(const SlowFastModel& model, double radius, std::size_t n_pairs,
                                 std::uint64_t seed);

/// Nonlinearity factories selectable by name from configuration files.
struct Nonlinearity {
    FastFn f;
    SlowFn g;
};
/// Known names: "example" (needs cutoff radius), "linear" (f = g = 0).
Nonlinearity registered_nonlinearity(const std::string& name, double cutoff_radius);
std::vector<std::string> registered_nonlinearity_names();

}  // namespace slowmf
