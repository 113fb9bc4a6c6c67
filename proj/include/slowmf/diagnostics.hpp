#pragma once

#include "slowmf/noise.hpp"

#include <cstdint>
#include <vector>

namespace slowmf {

/// |n1 - n2| for one Brownian sample on a grid ending at time 0:
///   n1 = eps^{-1/2} sum e^{r/mu} dB_r,
///   n2 = eps^{-3/2} c sum (e^{r/mu} - e^{r/eps}) dB_r,  c = 1/(1/eps - 1/mu),
/// with the limiting kernel -r e^{r/eps} when mu is (numerically) equal to eps.
double nonuniformity_value(const BrownianPath& b, double eps, double mu);

/// Exact variance of n2 and of n1 - n2 for the continuous integrals.
double nonuniformity_n2_variance(double eps, double mu);
double nonuniformity_variance(double eps, double mu);

struct NonuniformityRow {
    double eps = 0.0;
    double mean_abs_n = 0.0;
    double stderr_ = 0.0;
    double analytic = 0.0;  ///< sqrt(2/pi) times the exact standard deviation
};

struct NonuniformityTable {
    double mu = 0.0;
    std::vector<NonuniformityRow> rows;
    double slope = 0.0;
    double slope_stderr = 0.0;
};

/// dt = 0 selects mu / 20; the window length is 20 max(eps, mu).
NonuniformityTable nonuniformity_diagnostic(double mu, const std::vector<double>& eps_list,
                                            std::size_t n_seeds, std::uint64_t base_seed,
                                            double dt = 0.0);

/// max over nodes in [0, t_end] of |Phi - B|.
double sup_phi_gap(const NoiseBundle& noise, double t_end);

struct NoiseRateRow {
    double mu = 0.0;
    double mean_sup = 0.0;
    double stderr_ = 0.0;
};

struct NoiseRateTable {
    std::vector<NoiseRateRow> rows;
    double slope = 0.0;
    double slope_stderr = 0.0;
};

/// Mean sup_{[0, t_end]} |Phi^mu - B| over seeds for each mu; dt = 0 selects min mu / 10.
NoiseRateTable noise_rate_study(const std::vector<double>& mu_list, std::size_t n_seeds,
                                std::uint64_t base_seed, double t_end = 1.0, double dt = 0.0);

}  // namespace slowmf
