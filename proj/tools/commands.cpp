#include "commands.hpp"

#include "slowmf/diagnostics.hpp"
#include "slowmf/errors.hpp"
#include "slowmf/estimate.hpp"
#include "slowmf/expansion.hpp"
#include "slowmf/manifold.hpp"
#include "slowmf/stats.hpp"
#include "slowmf/tracking.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace slowmf::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string tag(const char* prefix, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%g", prefix, x);
    return buf;
}

std::size_t steps_for(double span, double dt) {
    return static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
}

std::vector<double> default_xi() { return {-4, -3, -2, -1, 0, 1, 2, 3, 4}; }

std::size_t count(Section& s, const std::string& key, std::int64_t fallback) {
    const std::int64_t n = s.integer(key, fallback);
    if (n < 1) throw ConfigError("config: " + s.name() + "." + key + " must be at least 1");
    return static_cast<std::size_t>(n);
}

LpOptions lp_options(Section& s) {
    LpOptions o;
    o.tol = s.number("tol", o.tol);
    o.T_cut = s.number("T_cut", o.T_cut);
    o.max_iter = static_cast<int>(s.integer("max_iter", o.max_iter));
    if (!(o.tol > 0.0) || o.T_cut < 0.0 || o.max_iter < 1) throw ConfigError("config: invalid fixed-point options");
    return o;
}

double lp_window(const SlowFastModel& m, const LpOptions& o) {
    return o.T_cut > 0.0 ? o.T_cut : default_T_cut(m.eps, m.rho, m.gamma1, o.tol);
}

std::vector<Vec> as_points(const std::vector<double>& xs) {
    std::vector<Vec> out;
    for (double x : xs) out.push_back(Vec::Constant(1, x));
    return out;
}

json report_json(const AssumptionReport& r) {
    return {{"gamma1", r.gamma1}, {"gamma2", r.gamma2}, {"K", r.K}, {"rho", r.rho}, {"eps", r.eps},
            {"kappa", r.kappa}, {"kappa1", r.kappa1}, {"kappa_star", r.kappa_star}, {"eps_max", r.eps_max},
            {"lipschitz_bound", r.lipschitz_bound}, {"C1", r.c1}, {"C2", r.c2}, {"ok", r.ok},
            {"tracking_ok", r.tracking_ok}, {"violations", r.violations}};
}

SlowFastModel checked_model(const RunConfig& rc, double eps, bool tracking = false) {
    SlowFastModel m = build_model(Section(rc.raw, "model")).with_eps(eps);
    const AssumptionReport rep = check_assumptions(m);
    require_assumptions(rep);
    if (tracking && !rep.tracking_ok) {
        throw AssumptionError("assumption violations: kappa* = " + std::to_string(rep.kappa_star) + " is not below 1");
    }
    return m;
}

void require_scalar(const SlowFastModel& m, const std::string& what) {
    if (m.n_fast() != 1 || m.n_slow() != 1) throw ConfigError(what + " needs a scalar fast and slow block");
}

// Manifold value at `node` for one sample, from either source.
struct ManifoldEvaluator {
    SlowFastModel model;
    ManifoldSource source;
    LpOptions lp;
    std::shared_ptr<const StationaryDriverPath> driver;
    std::shared_ptr<const ExpansionNoise> expansion;

    ManifoldEvaluator(const SlowFastModel& m, const NoiseBundle& noise, NoiseKind kind, ManifoldSource src,
                      const LpOptions& opts, double burn_in)
        : model(m), source(src), lp(opts) {
        if (src == ManifoldSource::expansion) {
            require_scalar(m, "the expansion source");
            expansion = std::make_shared<const ExpansionNoise>(expansion_noise(noise, m.eps, kind, burn_in));
        } else {
            driver = std::make_shared<const StationaryDriverPath>(
                stationary_driver(noise, m.A, m.sigma, m.eps, kind, burn_in));
        }
    }

    // {h, iterations, max ratio, residual}
    std::array<double, 4> at(double xi, std::size_t node) const {
        if (expansion) {
            return {expansion_h(ExpansionCoefficients::from_model(model), *expansion, xi, node), 0.0, 0.0, 0.0};
        }
        const LpResult r = lp_fixed_point(model, *driver, Vec::Constant(1, xi), lp, node);
        double ratio = 0.0;
        for (double q : r.ratios) ratio = std::max(ratio, q);
        return {r.h[0], static_cast<double>(r.iterations), ratio, r.residual};
    }
};

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
        dynamic_cast<const RangeError*>(&e) || dynamic_cast<const CLI::Error*>(&e)) {
        return ExitCode::usage;
    }
    if (dynamic_cast<const AssumptionError*>(&e)) return ExitCode::assumption;
    if (dynamic_cast<const Error*>(&e)) return ExitCode::divergence;
    return ExitCode::failure;
}

// ---------------------------------------------------------------------------------------------

void cmd_paths(const RunConfig& rc, OutputDir& out) {
    Section s(rc.raw, "paths");
    const auto mus = s.numbers("mu", {0.1});
    const std::size_t n_seeds = count(s, "n_seeds", 3);
    const double T = s.number("T", 1.0);
    const std::string z0 = s.text("z0", "stationary");
    double dt = s.number("dt", 0.0);
    s.finish();
    if (mus.empty()) throw ConfigError("paths: mu list is empty");
    if (!(T > 0.0)) throw ConfigError("paths: T must be positive");
    Z0Mode mode;
    if (z0 == "zero") {
        mode = Z0Mode::zero();
    } else if (z0 != "stationary") {
        throw ConfigError("paths: z0 must be 'stationary' or 'zero'");
    }
    if (dt <= 0.0) dt = std::min(1e-3, *std::min_element(mus.begin(), mus.end()) / 10.0);
    const TimeGrid grid = TimeGrid::with_origin(0, steps_for(T, dt), dt);

    std::vector<std::vector<double>> summary;
    for (std::size_t k = 0; k < n_seeds; ++k) {
        const NoiseBundle base = make_noise(grid, rc.seed + k);
        for (double mu : mus) {
            const NoiseBundle nb = with_mu(base, mu, mode);
            const auto& B = nb.brownian->values();
            const auto& z = nb.ou->values();
            const auto& phi = nb.phi->values();
            std::vector<std::vector<double>> rows;
            double sup = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                rows.push_back({grid.time(i), B[i], z[i], phi[i], phi[i] - B[i]});
                sup = std::max(sup, std::abs(phi[i] - B[i]));
            }
            out.write_csv("paths_" + tag("mu", mu) + "_seed" + std::to_string(rc.seed + k) + ".csv",
                          {"t", "B", "z", "phi", "phi_minus_B"}, rows);
            summary.push_back({mu, static_cast<double>(rc.seed + k), sup});
        }
    }
    out.write_csv("paths_summary.csv", {"mu", "seed", "sup_abs_phi_minus_B"}, summary);
}

// ---------------------------------------------------------------------------------------------

void cmd_manifold(const RunConfig& rc, OutputDir& out) {
    Section s(rc.raw, "manifold");
    const auto eps_list = s.numbers("eps", {0.1});
    const auto mus = s.numbers("mu", {0.1, 0.01, 0.001});
    const auto xis = s.numbers("xi", default_xi());
    const std::size_t n_seeds = count(s, "n_seeds", 1);
    const ManifoldSource source = manifold_source_from_string(s.text("source", "fixed_point"));
    const auto times = s.numbers("evolution_times", {0.0});
    const auto checks = s.numbers("invariance_times", {});
    const double dt_cfg = s.number("dt", 0.0);
    const LpOptions lp = lp_options(s);
    s.finish();
    if (eps_list.empty() || xis.empty()) throw ConfigError("manifold: eps and xi lists must be non-empty");
    for (double mu : mus) {
        if (!(mu > 0.0)) throw ConfigError("manifold: mu values must be positive (white noise is always included)");
    }
    for (double t : times) {
        if (t < 0.0) throw ConfigError("manifold: evolution times must be non-negative");
    }
    for (double t : checks) {
        if (t < 0.0) throw ConfigError("manifold: invariance times must be non-negative");
    }

    std::vector<double> kinds{0.0};  // 0 marks white noise
    kinds.insert(kinds.end(), mus.begin(), mus.end());
    const double mu_max = mus.empty() ? 0.0 : *std::max_element(mus.begin(), mus.end());
    const double mu_min = mus.empty() ? 1.0 : *std::min_element(mus.begin(), mus.end());
    double t_after = 0.0;
    for (double t : times) t_after = std::max(t_after, t);
    for (double t : checks) t_after = std::max(t_after, t);

    std::vector<std::vector<double>> graph, summary, invariance;
    json assumptions = json::object();
    for (double eps : eps_list) {
        const SlowFastModel m = checked_model(rc, eps);
        const AssumptionReport rep = check_assumptions(m);
        assumptions[tag("eps", eps)] = report_json(rep);
        const double dt = dt_cfg > 0.0 ? dt_cfg : std::min(eps / 200.0, mu_min / 10.0);
        const double burn = default_burn_in(eps, m.gamma1, mu_max);
        const double before = burn + (source == ManifoldSource::fixed_point ? lp_window(m, lp) : 0.0);
        const TimeGrid grid = TimeGrid::with_origin(steps_for(before, dt) + 2, steps_for(t_after, dt) + 1, dt);
        const std::size_t o = grid.origin();

        for (std::size_t k = 0; k < n_seeds; ++k) {
            const std::uint64_t seed = rc.seed + k;
            const NoiseBundle base = make_noise(grid, seed);
            for (double mu : kinds) {
                const NoiseKind kind = mu > 0.0 ? NoiseKind::colored : NoiseKind::white;
                const NoiseBundle nb = mu > 0.0 ? with_mu(base, mu) : base;
                const ManifoldEvaluator ev(m, nb, kind, source, lp, burn);
                for (double t : times) {
                    const std::size_t node = grid.node_at(grid.time(o + steps_for(t, dt)));
                    std::vector<std::array<double, 4>> vals(xis.size());
                    parallel_for(xis.size(), [&](std::size_t i) { vals[i] = ev.at(xis[i], node); });
                    double iters = 0.0, ratio = 0.0, resid = 0.0, lip = 0.0;
                    for (std::size_t i = 0; i < xis.size(); ++i) {
                        graph.push_back({eps, mu, static_cast<double>(seed), grid.time(node), xis[i], vals[i][0]});
                        iters = std::max(iters, vals[i][1]);
                        ratio = std::max(ratio, vals[i][2]);
                        resid = std::max(resid, vals[i][3]);
                        for (std::size_t j = 0; j < i; ++j) {
                            if (xis[i] != xis[j]) {
                                lip = std::max(lip, std::abs(vals[i][0] - vals[j][0]) / std::abs(xis[i] - xis[j]));
                            }
                        }
                    }
                    summary.push_back({eps, mu, static_cast<double>(seed), grid.time(node), iters, ratio, resid, lip,
                                       rep.lipschitz_bound, rep.kappa1});
                }
                for (double t : checks) {
                    const double tc = grid.time(o + steps_for(t, dt));
                    const InvarianceReport r = invariance_check(m, nb, kind, as_points(xis), tc, lp, burn);
                    for (std::size_t i = 0; i < xis.size(); ++i) {
                        invariance.push_back({eps, mu, static_cast<double>(seed), tc, xis[i], r.distances[i], r.scale});
                    }
                }
            }
        }
    }
    out.write_json("assumptions.json", assumptions);
    out.write_csv("manifold_graph.csv", {"eps", "mu", "seed", "t", "xi", "h"}, graph);
    out.write_csv("manifold_summary.csv",
                  {"eps", "mu", "seed", "t", "max_iterations", "max_ratio", "max_residual", "lipschitz_est",
                   "lipschitz_bound", "kappa1"},
                  summary);
    if (!checks.empty()) {
        out.write_csv("manifold_invariance.csv", {"eps", "mu", "seed", "t_check", "xi", "distance", "scale"}, invariance);
    }
}

// ---------------------------------------------------------------------------------------------

void cmd_converge(const RunConfig& rc, OutputDir& out) {
    Section s(rc.raw, "converge");
    const auto eps_list = s.numbers("eps", {0.1, 0.05});
    const auto mus = s.numbers("mu", {0.1, 0.01, 0.001});
    GapStudyConfig g;
    g.xi_list = s.numbers("xi", default_xi());
    g.n_seeds = count(s, "n_seeds", 10);
    g.source = manifold_source_from_string(s.text("source", "fixed_point"));
    g.dt = s.number("dt", 0.0);
    g.lp = lp_options(s);
    const double rate_T = s.number("noise_rate_T", 1.0);
    const std::size_t rate_seeds = count(s, "noise_rate_seeds", 20);
    s.finish();
    if (mus.size() < 3) throw ConfigError("converge: need at least 3 mu values, got " + std::to_string(mus.size()));
    if (eps_list.empty()) throw ConfigError("converge: eps list is empty");
    g.mu_list = mus;
    g.base_seed = rc.seed;

    std::vector<std::vector<double>> sweep, fits;
    std::vector<std::vector<double>> gap_by_mu(mus.size());
    for (double eps : eps_list) {
        const SlowFastModel m = checked_model(rc, eps);
        g.eps = eps;
        const GapTable t = wz_manifold_gap(m, g);
        for (std::size_t k = 0; k < t.rows.size(); ++k) {
            sweep.push_back({eps, t.rows[k].mu, t.rows[k].mean_gap, t.rows[k].stderr_});
            gap_by_mu[k].push_back(t.rows[k].mean_gap);
        }
        fits.push_back({eps, t.slope, t.slope_stderr});
    }
    std::vector<std::vector<double>> uniform;
    for (std::size_t k = 0; k < mus.size(); ++k) {
        const auto [lo, hi] = std::minmax_element(gap_by_mu[k].begin(), gap_by_mu[k].end());
        uniform.push_back({mus[k], *lo, *hi, *hi / *lo});
    }
    out.write_csv("converge_mu_sweep.csv", {"eps", "mu", "mean_gap", "stderr"}, sweep);
    out.write_csv("converge_fit.csv", {"eps", "slope", "slope_stderr"}, fits);
    out.write_csv("converge_eps_uniformity.csv", {"mu", "min_gap_over_eps", "max_gap_over_eps", "max_over_min"}, uniform);

    const NoiseRateTable nr = noise_rate_study(mus, rate_seeds, rc.seed, rate_T);
    std::vector<std::vector<double>> rate_rows;
    for (const auto& r : nr.rows) rate_rows.push_back({r.mu, r.mean_sup, r.stderr_});
    out.write_csv("noise_rate.csv", {"mu", "mean_sup_abs_phi_minus_B", "stderr"}, rate_rows);
    out.write_csv("noise_rate_fit.csv", {"slope", "slope_stderr"}, {{nr.slope, nr.slope_stderr}});
}

// ---------------------------------------------------------------------------------------------

void cmd_track(const RunConfig& rc, OutputDir& out) {
    Section s(rc.raw, "track");
    const double eps = s.number("eps", 0.01);
    const auto mus = s.numbers("mu", {0.1, 0.01});
    const double T = s.number("T", 1.0);
    const double dt = s.number("dt", 1e-4);
    const double xi = s.number("xi", 3.0);
    const double offset = s.number("offset", 1.0);
    const std::size_t n_seeds = count(s, "n_seeds", 1);
    TrackingConfig tc;
    tc.source = manifold_source_from_string(s.text("source", "expansion"));
    tc.late_fraction = s.number("late_fraction", tc.late_fraction);
    tc.floor_factor = s.number("floor_factor", tc.floor_factor);
    tc.lp = lp_options(s);
    s.finish();
    if (mus.empty()) throw ConfigError("track: mu list is empty");
    if (!(T > 0.0) || !(dt > 0.0)) throw ConfigError("track: T and dt must be positive");
    if (!(tc.late_fraction > 0.0 && tc.late_fraction < 1.0)) throw ConfigError("track: late_fraction must be in (0, 1)");

    const SlowFastModel m = checked_model(rc, eps, true);
    require_scalar(m, "track");
    std::vector<std::vector<double>> summary, floors;
    for (double mu : mus) {
        if (!(mu > 0.0)) throw ConfigError("track: mu values must be positive");
        const double burn = default_burn_in(eps, m.gamma1, mu);
        const double before = burn + (tc.source == ManifoldSource::fixed_point ? lp_window(m, tc.lp) : 0.0);
        const TimeGrid grid = TimeGrid::with_origin(steps_for(before, dt) + 2, steps_for(T, dt), dt);
        const TimeGrid window = grid.window(grid.origin(), grid.n_steps());
        double floor_acc = 0.0;
        for (std::size_t k = 0; k < n_seeds; ++k) {
            const std::uint64_t seed = rc.seed + k;
            const NoiseBundle nb = make_noise(grid, seed, mu);
            const ManifoldEvaluator ev(m, nb, NoiseKind::colored, tc.source, tc.lp, burn);
            const double h0 = ev.at(xi, grid.origin())[0];
            const TrackingReport r =
                tracking_gap(m, nb, State{Vec::Constant(1, h0 + offset), Vec::Constant(1, xi)}, window, tc);
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < r.t.size(); ++i) rows.push_back({r.t[i], r.gap[i]});
            out.write_csv("track_gap_" + tag("mu", mu) + "_seed" + std::to_string(seed) + ".csv", {"t", "gap"}, rows);
            summary.push_back({mu, static_cast<double>(seed), r.fitted_rate, static_cast<double>(r.fit_points), r.floor,
                               r.C1_bound, r.C2_bound, 0.5 * m.rho / eps});
            floor_acc += r.floor;
        }
        floors.push_back({mu, floor_acc / static_cast<double>(n_seeds)});
    }
    out.write_csv("track_summary.csv",
                  {"mu", "seed", "fitted_rate", "fit_points", "floor", "C1_bound", "C2_bound", "rate_threshold"}, summary);
    out.write_csv("track_floor.csv", {"mu", "mean_floor"}, floors);
}

// ---------------------------------------------------------------------------------------------

namespace {

Observation read_observation(const fs::path& path, double dt) {
    std::ifstream in(path);
    if (!in) throw ConfigError("estimate: cannot open observation file '" + path.string() + "'");
    std::string line;
    std::getline(in, line);
    if (line.rfind("t,", 0) != 0) throw ConfigError("estimate: observation header must start with 't,'");
    const auto n_slow = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("estimate: bad number '" + cell + "' in observation file");
            }
        }
        if (static_cast<Eigen::Index>(row.size()) != n_slow + 1) throw ConfigError("estimate: ragged observation row");
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw ConfigError("estimate: observation needs at least two rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (std::abs(rows[i][0] - static_cast<double>(i) * dt) > 1e-9 * std::max(1.0, rows[i][0])) {
            throw ConfigError("estimate: observation times must be 0, dt, 2 dt, ...");
        }
    }
    Observation obs{TimeGrid::with_origin(0, rows.size() - 1, dt), Mat(n_slow, static_cast<Eigen::Index>(rows.size()))};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (Eigen::Index j = 0; j < n_slow; ++j) obs.slow(j, static_cast<Eigen::Index>(i)) = rows[i][static_cast<std::size_t>(j) + 1];
    }
    return obs;
}

json trace_json(const std::vector<NmTraceEntry>& trace) {
    json out = json::array();
    for (const auto& e : trace) {
        json simplex = json::array();
        for (const auto& v : e.simplex) simplex.push_back(std::vector<double>(v.data(), v.data() + v.size()));
        json values = json::array();
        for (double x : e.values) values.push_back(std::isfinite(x) ? json(x) : json(nullptr));
        out.push_back({{"simplex", simplex}, {"values", values}});
    }
    return out;
}

}  // namespace

void cmd_estimate(const RunConfig& rc, OutputDir& out) {
    Section s(rc.raw, "estimate");
    EstimationConfig c;
    c.T = s.number("T", c.T);
    c.dt = s.number("dt", c.dt);
    c.eps = s.number("eps", c.eps);
    c.mu = s.number("mu", c.mu);
    c.a_true = s.number("a_true", c.a_true);
    c.a_lo = s.number("a_lo", c.a_lo);
    c.a_hi = s.number("a_hi", c.a_hi);
    if (s.has("a0")) c.a0 = s.number("a0");
    c.xi0 = s.number("xi0", c.xi0);
    if (s.has("eta")) c.eta = s.number("eta");
    c.n_mc = count(s, "n_mc", 1);
    c.source = manifold_source_from_string(s.text("source", "expansion"));
    c.nm.tol_x = s.number("tol_x", c.nm.tol_x);
    c.nm.tol_f = s.number("tol_f", c.nm.tol_f);
    c.nm.max_iter = static_cast<int>(s.integer("nm_max_iter", c.nm.max_iter));
    Section lp = s.sub("fixed_point");
    c.lp = lp_options(lp);
    lp.finish();
    const auto variants = s.texts("variants", {"wz_reduced", "white_reduced"});
    const std::string obs_file = s.text("observation", "");
    s.finish();
    c.seed = rc.seed;
    c.validate();
    if (variants.empty()) throw ConfigError("estimate: variants list is empty");
    std::vector<ReducedNoise> kinds;
    for (const auto& v : variants) kinds.push_back(reduced_noise_from_string(v));

    const SlowFastModel m = checked_model(rc, c.eps);
    require_scalar(m, "estimate");

    Observation obs;
    if (!obs_file.empty()) {
        obs = read_observation(obs_file, c.dt);
    } else {
        obs = synthetic_observation(c, m);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < obs.grid.size(); ++i) rows.push_back({obs.grid.time(i), obs.slow(0, static_cast<Eigen::Index>(i))});
        out.write_csv("observation.csv", {"t", "v_1"}, rows);
    }

    json timing = json::object();
    for (ReducedNoise kind : kinds) {
        EstimationConfig ck = c;
        ck.noise = kind;
        const EstimationResult r = estimate_parameter(ck, m, obs);
        out.write_json("estimate_" + to_string(kind) + ".json",
                       {{"variant", to_string(kind)},
                        {"a_hat", r.a_hat},
                        {"objective", r.objective},
                        {"iterations", r.iterations},
                        {"evaluations", r.evaluations},
                        {"converged", r.converged},
                        {"a_true", obs_file.empty() ? json(c.a_true) : json(nullptr)},
                        {"trace", trace_json(r.trace)}});
        timing[to_string(kind)] = {{"wall_seconds", r.wall_seconds}};
    }
    out.write_timing(timing);
}

// ---------------------------------------------------------------------------------------------

void cmd_diagnose(const RunConfig& rc, OutputDir& out) {
    Section s(rc.raw, "diagnose");
    const double mu = s.number("mu", 1e-4);
    const auto eps_list = s.numbers("eps", {1e-1, 1e-2, 1e-3});
    const std::size_t n_seeds = count(s, "n_seeds", 50);
    const double dt = s.number("dt", 0.0);
    const std::string noise = s.text("noise", "brownian");
    s.finish();
    if (noise != "brownian" && noise != "zero") throw ConfigError("diagnose: noise must be 'brownian' or 'zero'");

    std::vector<std::vector<double>> rows;
    json fit;
    if (noise == "zero") {
        if (eps_list.empty()) throw ConfigError("diagnose: eps list is empty");
        const double step = dt > 0.0 ? dt : mu / 20.0;
        const double eps_max = *std::max_element(eps_list.begin(), eps_list.end());
        const TimeGrid g = TimeGrid::with_origin(steps_for(20.0 * std::max(eps_max, mu), step), 1, step);
        const BrownianPath b(g, std::vector<double>(g.n_steps(), 0.0), rc.seed);
        for (double eps : eps_list) {
            rows.push_back({eps, nonuniformity_value(b, eps, mu), 0.0,
                            std::sqrt(2.0 / M_PI) * std::sqrt(nonuniformity_variance(eps, mu))});
        }
        fit = {{"mu", mu}, {"slope", nullptr}, {"slope_stderr", nullptr}};
    } else {
        const NonuniformityTable t = nonuniformity_diagnostic(mu, eps_list, n_seeds, rc.seed, dt);
        for (const auto& r : t.rows) rows.push_back({r.eps, r.mean_abs_n, r.stderr_, r.analytic});
        fit = {{"mu", mu}, {"slope", t.slope}, {"slope_stderr", t.slope_stderr}};
    }
    out.write_csv("nonuniformity.csv", {"eps", "mean_abs_n", "stderr", "analytic"}, rows);
    out.write_json("nonuniformity_fit.json", fit);
}

// ---------------------------------------------------------------------------------------------

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"paths", "manifold", "converge", "track", "estimate", "diagnose"};
    return names;
}

void run_command(const RunConfig& rc) {
    // parse the model table up front so config errors surface before any output is written
    build_model(Section(rc.raw, "model"));
    OutputDir out(rc.out_dir);
    out.write_json("run.json", {{"command", rc.command}, {"seed", rc.seed}, {"config", rc.raw}});
    const auto start = std::chrono::steady_clock::now();
    if (rc.command == "paths") {
        cmd_paths(rc, out);
    } else if (rc.command == "manifold") {
        cmd_manifold(rc, out);
    } else if (rc.command == "converge") {
        cmd_converge(rc, out);
    } else if (rc.command == "track") {
        cmd_track(rc, out);
    } else if (rc.command == "estimate") {
        cmd_estimate(rc, out);
    } else if (rc.command == "diagnose") {
        cmd_diagnose(rc, out);
    } else {
        throw ConfigError("unknown command '" + rc.command + "'");
    }
    if (rc.command != "estimate") {
        out.write_timing({{"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}});
    }
    out.finish();
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Random slow manifolds of slow-fast stochastic systems and their Wong-Zakai approximations"};
    app.require_subcommand(1);
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    for (const auto& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "TOML or JSON configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "base seed (overrides SLOWMF_SEED and the config)");
        sub->add_option("--out", out_dir, "output directory (overrides SLOWMF_OUT and the config)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ExitCode::ok : ExitCode::usage;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        run_command(make_run_config(command, config, seed, out_dir));
    } catch (const std::exception& e) {
        std::cerr << "slowmf " << command << ": " << e.what() << "\n";
        return exit_code_for(e);
    }
    return ExitCode::ok;
}

}  // namespace slowmf::cli
