#include "slowmf/diagnostics.hpp"

#include "slowmf/errors.hpp"
#include "slowmf/stats.hpp"

#include <algorithm>
#include <cmath>

namespace slowmf {

double nonuniformity_value(const BrownianPath& b, double eps, double mu) {
    if (!(eps > 0.0) || !(mu > 0.0)) throw ValidationError("nonuniformity: eps and mu must be positive");
    const TimeGrid& g = b.grid();
    const auto& inc = b.increments();
    const bool limiting = std::abs(mu - eps) <= 1e-6 * eps;
    const double c = limiting ? 0.0 : 1.0 / (1.0 / eps - 1.0 / mu);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < inc.size(); ++i) {
        const double r = g.time(i);
        if (r >= 0.0) break;
        const double em = std::exp(r / mu);
        const double ee = std::exp(r / eps);
        s1 += em * inc[i];
        s2 += (limiting ? -r * ee : c * (em - ee)) * inc[i];
    }
    const double n1 = s1 / std::sqrt(eps);
    const double n2 = s2 / (eps * std::sqrt(eps));
    return std::abs(n1 - n2);
}

double nonuniformity_n2_variance(double eps, double mu) {
    if (std::abs(mu - eps) <= 1e-6 * eps) {
        // int r^2 e^{2r/eps} dr = eps^3 / 4
        return 0.25;
    }
    const double c = 1.0 / (1.0 / eps - 1.0 / mu);
    return c * c / (eps * eps * eps) * (mu / 2.0 + eps / 2.0 - 2.0 * eps * mu / (eps + mu));
}

double nonuniformity_variance(double eps, double mu) { return mu / (2.0 * (eps + mu)); }

NonuniformityTable nonuniformity_diagnostic(double mu, const std::vector<double>& eps_list,
                                            std::size_t n_seeds, std::uint64_t base_seed, double dt) {
    if (eps_list.size() < 3) throw ConfigError("nonuniformity: need at least 3 eps values");
    if (n_seeds < 2) throw ConfigError("nonuniformity: need at least 2 seeds");
    if (dt <= 0.0) dt = mu / 20.0;
    const double eps_max = *std::max_element(eps_list.begin(), eps_list.end());
    const double window = 20.0 * std::max(eps_max, mu);
    const TimeGrid grid = TimeGrid::with_origin(static_cast<std::size_t>(std::ceil(window / dt)), 1, dt);

    std::vector<std::vector<double>> vals(eps_list.size(), std::vector<double>(n_seeds));
    parallel_for(n_seeds, [&](std::size_t s) {
        const BrownianPath b = sample_brownian(grid, base_seed + s);
        for (std::size_t k = 0; k < eps_list.size(); ++k) vals[k][s] = nonuniformity_value(b, eps_list[k], mu);
    });

    NonuniformityTable t;
    t.mu = mu;
    std::vector<double> means;
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        const MeanStderr ms = mean_stderr(vals[k]);
        const double analytic = std::sqrt(2.0 / M_PI) * std::sqrt(nonuniformity_variance(eps_list[k], mu));
        t.rows.push_back({eps_list[k], ms.mean, ms.stderr_, analytic});
        means.push_back(ms.mean);
    }
    const LineFit fit = fit_loglog(eps_list, means);
    t.slope = fit.slope;
    t.slope_stderr = fit.slope_stderr;
    return t;
}

double sup_phi_gap(const NoiseBundle& noise, double t_end) {
    if (!noise.phi) throw ConfigError("sup_phi_gap: noise bundle has no integrated OU path");
    const TimeGrid& g = noise.grid();
    const std::size_t o = g.origin();
    const std::size_t last = g.node_at(t_end);
    const auto& B = noise.brownian->values();
    const auto& P = noise.phi->values();
    double best = 0.0;
    for (std::size_t i = o; i <= last; ++i) best = std::max(best, std::abs(P[i] - B[i]));
    return best;
}

NoiseRateTable noise_rate_study(const std::vector<double>& mu_list, std::size_t n_seeds,
                                std::uint64_t base_seed, double t_end, double dt) {
    if (mu_list.size() < 3) throw ConfigError("noise rate study: need at least 3 mu values");
    if (n_seeds < 2) throw ConfigError("noise rate study: need at least 2 seeds");
    const double mu_min = *std::min_element(mu_list.begin(), mu_list.end());
    if (dt <= 0.0) dt = mu_min / 10.0;
    const TimeGrid grid = TimeGrid::with_origin(0, static_cast<std::size_t>(std::llround(t_end / dt)), dt);

    std::vector<std::vector<double>> sups(mu_list.size(), std::vector<double>(n_seeds));
    parallel_for(n_seeds, [&](std::size_t s) {
        const NoiseBundle base = make_noise(grid, base_seed + s);
        for (std::size_t k = 0; k < mu_list.size(); ++k) {
            sups[k][s] = sup_phi_gap(with_mu(base, mu_list[k]), grid.t_end());
        }
    });
    NoiseRateTable t;
    std::vector<double> means;
    for (std::size_t k = 0; k < mu_list.size(); ++k) {
        const MeanStderr ms = mean_stderr(sups[k]);
        t.rows.push_back({mu_list[k], ms.mean, ms.stderr_});
        means.push_back(ms.mean);
    }
    const LineFit fit = fit_loglog(mu_list, means);
    t.slope = fit.slope;
    t.slope_stderr = fit.slope_stderr;
    return t;
}

}  // namespace slowmf
