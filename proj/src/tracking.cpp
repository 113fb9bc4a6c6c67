#include "slowmf/tracking.hpp"

#include "slowmf/errors.hpp"
#include "slowmf/expansion.hpp"
#include "slowmf/stats.hpp"

#include <cmath>
#include <string>

namespace slowmf {

TrackingReport tracking_gap(const SlowFastModel& m, const NoiseBundle& noise, const State& zeta,
                            const TimeGrid& grid, const TrackingConfig& cfg) {
    const AssumptionReport rep = check_assumptions(m);
    require_assumptions(rep);
    if (!(rep.kappa_star < 1.0)) {
        throw AssumptionError("tracking: kappa* = " + std::to_string(rep.kappa_star) + " is not below 1");
    }
    if (!noise.has_ou()) throw ConfigError("tracking: noise bundle has no OU path");
    if (std::abs(grid.t_start()) > 0.0) throw ConfigError("tracking: grid must start at time 0");

    const TimeGrid& ng = noise.grid();
    const std::size_t o = ng.origin();
    const auto factor = static_cast<std::size_t>(std::llround(grid.dt() / ng.dt()));
    const double burn_in = default_burn_in(m.eps, m.gamma1, noise.mu());

    ManifoldFn hfn;
    std::shared_ptr<ExpansionNoise> en;
    std::shared_ptr<StationaryDriverPath> drv;
    if (cfg.source == ManifoldSource::expansion) {
        en = std::make_shared<ExpansionNoise>(expansion_noise(noise, m.eps, NoiseKind::colored, burn_in));
        const auto c = ExpansionCoefficients::from_model(m);
        hfn = [en, c, o, factor](std::size_t step, double, const Vec& xi) -> Vec {
            return Vec::Constant(1, expansion_h(c, *en, xi[0], o + step * factor));
        };
    } else {
        drv = std::make_shared<StationaryDriverPath>(
            stationary_driver(noise, m.A, m.sigma, m.eps, NoiseKind::colored, burn_in));
        const LpOptions lp = cfg.lp;
        hfn = [drv, &m, lp, o, factor](std::size_t step, double, const Vec& xi) -> Vec {
            return lp_fixed_point(m, *drv, xi, lp, o + step * factor).h;
        };
    }

    const Trajectory orig = solve_sde(m, noise, zeta, grid);
    const Trajectory red = solve_reduced(m.B, [&m](const Vec& u, const Vec& v, double a) { return m.g(u, v, a); },
                                         hfn, zeta.slow, m.a, grid);

    TrackingReport r;
    r.C1_bound = rep.c1;
    r.C2_bound = rep.c2;
    const std::size_t n = grid.size();
    r.t.resize(n);
    r.gap.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<Eigen::Index>(i);
        r.t[i] = grid.time(i);
        r.gap[i] = (orig.fast.col(c) - red.fast.col(c)).lpNorm<1>() + (orig.slow.col(c) - red.slow.col(c)).lpNorm<1>();
    }
    const auto late = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - cfg.late_fraction)));
    double acc = 0.0;
    for (std::size_t i = late; i < n; ++i) acc += r.gap[i];
    r.floor = acc / static_cast<double>(n - late);

    std::vector<double> ts, lg;
    for (std::size_t i = 0; i < n && r.gap[i] > cfg.floor_factor * r.floor; ++i) {
        ts.push_back(r.t[i]);
        lg.push_back(std::log(r.gap[i]));
    }
    r.fit_points = ts.size();
    if (ts.size() >= 3) r.fitted_rate = -fit_line(ts, lg).slope;
    return r;
}

}  // namespace slowmf
