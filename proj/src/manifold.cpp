#include "slowmf/manifold.hpp"

#include "slowmf/errors.hpp"
#include "slowmf/expansion.hpp"
#include "slowmf/integrate.hpp"
#include "slowmf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slowmf {

double default_T_cut(double eps, double rho, double gamma1, double tol) {
    return (eps / rho) * std::log(1.0 / tol) + 5.0 * eps / gamma1;
}

std::string to_string(ManifoldSource s) {
    return s == ManifoldSource::fixed_point ? "fixed_point" : "expansion";
}

ManifoldSource manifold_source_from_string(const std::string& s) {
    if (s == "fixed_point") return ManifoldSource::fixed_point;
    if (s == "expansion") return ManifoldSource::expansion;
    throw ConfigError("unknown manifold source '" + s + "'");
}

namespace {

double weighted_sup(const Mat& diff, const std::vector<double>& w) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < diff.cols(); ++j) {
        best = std::max(best, w[static_cast<std::size_t>(j)] * diff.col(j).norm());
    }
    return best;
}

}  // namespace

LpResult lp_fixed_point(const SlowFastModel& m, const StationaryDriverPath& driver, const Vec& xi,
                        const LpOptions& opts, std::optional<std::size_t> origin) {
    const AssumptionReport rep = check_assumptions(m);
    if (!(rep.kappa1 < 1.0)) {
        throw AssumptionError("fixed point: contraction constant " + std::to_string(rep.kappa1) +
                              " is not below 1");
    }
    require_assumptions(rep);
    if (xi.size() != m.n_slow()) throw ValidationError("fixed point: xi dimension mismatch");
    if (driver.values.rows() != m.n_fast()) throw ValidationError("fixed point: driver dimension mismatch");
    if (std::abs(driver.eps - m.eps) > 1e-15 * m.eps) {
        throw ValidationError("fixed point: driver built for a different eps");
    }
    if (!(opts.tol > 0.0) || opts.max_iter < 1) throw ConfigError("fixed point: invalid tolerance or budget");

    const double T = opts.T_cut > 0.0 ? opts.T_cut : default_T_cut(m.eps, m.rho, m.gamma1, opts.tol);
    const double h = driver.grid.dt();
    const auto N = static_cast<std::size_t>(std::ceil(T / h - 1e-9));
    const std::size_t o = origin ? *origin : driver.grid.origin();
    if (o >= driver.grid.size()) throw RangeError("fixed point: origin node outside the driver grid");
    if (o < N + driver.valid_from) {
        throw ConfigError("fixed point: driver window too short; need " + std::to_string(T) +
                          " time units of burned-in driver before the origin");
    }

    const Eigen::Index n1 = m.n_fast();
    const Eigen::Index n2 = m.n_slow();
    const auto nodes = static_cast<Eigen::Index>(N + 1);
    const Mat drv = driver.values.block(0, static_cast<Eigen::Index>(o - N), n1, nodes);

    const PhiSet pa = phi_functions(m.A * (h / m.eps));
    const Mat EA = pa.exp;
    const Mat WA0 = (h / m.eps) * (pa.phi1 - pa.phi2);
    const Mat WA1 = (h / m.eps) * pa.phi2;
    const PhiSet pb = phi_functions(-m.B * h);
    const Mat EB = pb.exp;
    const Mat WB_right = h * (pb.phi1 - pb.phi2);
    const Mat WB_left = h * pb.phi2;

    std::vector<double> weight(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
        const double t = -static_cast<double>(N - j) * h;
        weight[j] = std::exp(m.rho * t / m.eps);
    }

    Mat X = Mat::Zero(n1, nodes);
    Mat Y(n2, nodes);
    Y.col(nodes - 1) = xi;
    for (Eigen::Index j = nodes - 1; j-- > 0;) Y.col(j) = EB * Y.col(j + 1);

    Mat F(n1, nodes), G(n2, nodes), Xn(n1, nodes), Yn(n2, nodes);
    LpResult res;
    bool converged = false;
    for (int it = 1; it <= opts.max_iter; ++it) {
        for (Eigen::Index j = 0; j < nodes; ++j) {
            const Vec u = X.col(j) + drv.col(j);
            const Vec v = Y.col(j);
            F.col(j) = m.f(u, v);
            G.col(j) = m.g(u, v, m.a);
        }
        Xn.col(0).setZero();
        for (Eigen::Index j = 0; j + 1 < nodes; ++j) {
            Xn.col(j + 1) = EA * Xn.col(j) + WA0 * F.col(j) + WA1 * F.col(j + 1);
        }
        Yn.col(nodes - 1) = xi;
        for (Eigen::Index j = nodes - 1; j-- > 0;) {
            Yn.col(j) = EB * Yn.col(j + 1) - (WB_right * G.col(j + 1) + WB_left * G.col(j));
        }
        const double change = weighted_sup(Xn - X, weight) + weighted_sup(Yn - Y, weight);
        if (!std::isfinite(change)) {
            throw DivergenceError("fixed point: non-finite iterate", 0.0);
        }
        X.swap(Xn);
        Y.swap(Yn);
        if (!res.changes.empty() && res.changes.back() > 0.0) {
            res.ratios.push_back(change / res.changes.back());
        }
        res.changes.push_back(change);
        res.iterations = it;
        res.residual = change;
        if (change <= opts.tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        const double last = res.ratios.empty() ? 0.0 : res.ratios.back();
        throw ConvergenceError("fixed point: no convergence after " + std::to_string(opts.max_iter) +
                                   " iterations (last ratio " + std::to_string(last) + ")",
                               last);
    }
    res.H = X.col(nodes - 1);
    res.h = res.H + driver.values.col(static_cast<Eigen::Index>(o));
    res.orbit.grid = TimeGrid::with_origin(N, 0, h);
    res.orbit.X = std::move(X);
    res.orbit.Y = std::move(Y);
    return res;
}

ManifoldSample manifold_graph(const SlowFastModel& m, const StationaryDriverPath& driver,
                              const std::vector<Vec>& xi_grid, const LpOptions& opts,
                              std::optional<std::size_t> origin) {
    if (xi_grid.empty()) throw ConfigError("manifold graph: empty xi grid");
    std::vector<LpResult> results(xi_grid.size());
    parallel_for(xi_grid.size(), [&](std::size_t i) {
        try {
            results[i] = lp_fixed_point(m, driver, xi_grid[i], opts, origin);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(std::string(e.what()) + " at xi = " + std::to_string(xi_grid[i][0]),
                                   e.last_ratio());
        }
    });
    ManifoldSample s;
    s.eps = m.eps;
    s.mu = driver.mu;
    s.omega_seed = driver.seed;
    s.xi_grid = xi_grid;
    for (const auto& r : results) {
        s.h_values.push_back(r.h);
        s.iterations = std::max(s.iterations, r.iterations);
        s.residual = std::max(s.residual, r.residual);
        for (double q : r.ratios) s.max_ratio = std::max(s.max_ratio, q);
    }
    for (std::size_t i = 0; i + 1 < xi_grid.size(); ++i) {
        const double dx = (xi_grid[i + 1] - xi_grid[i]).norm();
        if (dx > 0.0) {
            s.lipschitz_est = std::max(s.lipschitz_est, (s.h_values[i + 1] - s.h_values[i]).norm() / dx);
        }
    }
    return s;
}

namespace {

/// Values h(omega, xi) for one sample over the xi list, for one driver kind.
std::vector<double> manifold_values(const SlowFastModel& m, const NoiseBundle& noise, NoiseKind kind,
                                    const std::vector<double>& xi_list, ManifoldSource source,
                                    double burn_in, const LpOptions& lp) {
    std::vector<double> out(xi_list.size());
    if (source == ManifoldSource::expansion) {
        const ExpansionNoise en = expansion_noise(noise, m.eps, kind, burn_in);
        const auto c = ExpansionCoefficients::from_model(m);
        for (std::size_t i = 0; i < xi_list.size(); ++i) out[i] = expansion_h(c, en, xi_list[i]);
        return out;
    }
    const StationaryDriverPath d = stationary_driver(noise, m.A, m.sigma, m.eps, kind, burn_in);
    for (std::size_t i = 0; i < xi_list.size(); ++i) {
        out[i] = lp_fixed_point(m, d, Vec::Constant(1, xi_list[i]), lp).h[0];
    }
    return out;
}

}  // namespace

GapTable wz_manifold_gap(const SlowFastModel& model, const GapStudyConfig& cfg) {
    if (cfg.mu_list.size() < 3) throw ConfigError("manifold gap study: need at least 3 mu values for a rate fit");
    if (cfg.xi_list.empty() || cfg.n_seeds == 0) throw ConfigError("manifold gap study: empty xi list or seed count");
    if (model.n_fast() != 1 || model.n_slow() != 1) {
        throw ValidationError("manifold gap study: scalar fast and slow blocks required");
    }
    const SlowFastModel m = model.with_eps(cfg.eps);
    const double mu_min = *std::min_element(cfg.mu_list.begin(), cfg.mu_list.end());
    const double mu_max = *std::max_element(cfg.mu_list.begin(), cfg.mu_list.end());
    const double dt = cfg.dt > 0.0 ? cfg.dt : std::min(m.eps / 500.0, mu_min / 10.0);
    const double T = cfg.lp.T_cut > 0.0 ? cfg.lp.T_cut : default_T_cut(m.eps, m.rho, m.gamma1, cfg.lp.tol);
    const double burn_in = default_burn_in(m.eps, m.gamma1, mu_max);
    const auto before = static_cast<std::size_t>(std::ceil((T + burn_in) / dt)) + 2;
    const TimeGrid grid = TimeGrid::with_origin(before, 1, dt);

    const std::size_t n_mu = cfg.mu_list.size();
    std::vector<std::vector<double>> per_seed(n_mu, std::vector<double>(cfg.n_seeds, 0.0));
    parallel_for(cfg.n_seeds, [&](std::size_t s) {
        const NoiseBundle noise = make_noise(grid, cfg.base_seed + s);
        const auto white = manifold_values(m, noise, NoiseKind::white, cfg.xi_list, cfg.source, burn_in, cfg.lp);
        for (std::size_t k = 0; k < n_mu; ++k) {
            const NoiseBundle nb = with_mu(noise, cfg.mu_list[k]);
            const auto colored = manifold_values(m, nb, NoiseKind::colored, cfg.xi_list, cfg.source, burn_in, cfg.lp);
            double acc = 0.0;
            for (std::size_t i = 0; i < white.size(); ++i) acc += std::abs(colored[i] - white[i]);
            per_seed[k][s] = acc / static_cast<double>(white.size());
        }
    });

    GapTable table;
    table.eps = m.eps;
    std::vector<double> means;
    for (std::size_t k = 0; k < n_mu; ++k) {
        const MeanStderr ms = mean_stderr(per_seed[k]);
        table.rows.push_back({cfg.mu_list[k], ms.mean, ms.stderr_});
        means.push_back(ms.mean);
    }
    const LineFit fit = fit_loglog(cfg.mu_list, means);
    table.slope = fit.slope;
    table.slope_stderr = fit.slope_stderr;
    return table;
}

InvarianceReport invariance_check(const SlowFastModel& m, const NoiseBundle& noise, NoiseKind kind,
                                  const std::vector<Vec>& xi_grid, double t_check,
                                  const LpOptions& opts, double burn_in) {
    if (xi_grid.empty()) throw ConfigError("invariance check: empty xi grid");
    const double mu = kind == NoiseKind::colored ? noise.mu() : 0.0;
    if (burn_in <= 0.0) burn_in = default_burn_in(m.eps, m.gamma1, mu);
    const StationaryDriverPath d = stationary_driver(noise, m.A, m.sigma, m.eps, kind, burn_in);
    const TimeGrid& g = noise.grid();
    const std::size_t o = g.origin();
    const std::size_t k = g.node_at(t_check);
    if (k < o) throw RangeError("invariance check: t_check must be non-negative");

    InvarianceReport rep;
    rep.t_check = t_check;
    rep.distances.assign(xi_grid.size(), 0.0);
    std::vector<double> scales(xi_grid.size(), 0.0);
    parallel_for(xi_grid.size(), [&](std::size_t i) {
        const LpResult start = lp_fixed_point(m, d, xi_grid[i], opts, o);
        scales[i] = start.h.norm();
        if (k == o) return;
        const State zeta{start.h, xi_grid[i]};
        const TimeGrid window = g.window(o, k);
        const Trajectory tr = kind == NoiseKind::colored ? solve_rde(m, noise, zeta, window)
                                                         : solve_sde(m, noise, zeta, window);
        const State end = tr.state(window.n_steps());
        const LpResult shifted = lp_fixed_point(m, d, end.slow, opts, k);
        rep.distances[i] = (end.fast - shifted.h).norm();
    });
    rep.max_distance = *std::max_element(rep.distances.begin(), rep.distances.end());
    rep.scale = *std::max_element(scales.begin(), scales.end());
    return rep;
}

}  // namespace slowmf
