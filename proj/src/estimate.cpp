#include "slowmf/estimate.hpp"

#include "slowmf/errors.hpp"
#include "slowmf/expansion.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace slowmf {

std::string to_string(ReducedNoise r) { return r == ReducedNoise::white_reduced ? "white_reduced" : "wz_reduced"; }

ReducedNoise reduced_noise_from_string(const std::string& s) {
    if (s == "white_reduced") return ReducedNoise::white_reduced;
    if (s == "wz_reduced") return ReducedNoise::wz_reduced;
    throw ConfigError("unknown reduced noise kind '" + s + "'");
}

void EstimationConfig::validate() const {
    if (!(T > 0.0)) throw ConfigError("estimation: T must be positive");
    if (!(dt > 0.0)) throw ConfigError("estimation: dt must be positive");
    if (!(a_hi > a_lo)) throw ConfigError("estimation: parameter interval is empty");
    if (n_mc < 1) throw ConfigError("estimation: n_mc must be at least 1");
    if (!(eps > 0.0) || !(mu > 0.0)) throw ConfigError("estimation: eps and mu must be positive");
    if (a0 && (*a0 < a_lo || *a0 > a_hi)) throw ConfigError("estimation: a0 outside the parameter interval");
}

TimeGrid estimation_noise_grid(const EstimationConfig& cfg, const SlowFastModel& model) {
    double before = default_burn_in(cfg.eps, model.gamma1, cfg.mu);
    if (cfg.source == ManifoldSource::fixed_point) {
        before += cfg.lp.T_cut > 0.0 ? cfg.lp.T_cut : default_T_cut(cfg.eps, model.rho, model.gamma1, cfg.lp.tol);
    }
    const auto n_before = static_cast<std::size_t>(std::ceil(before / cfg.dt)) + 2;
    const auto n_after = static_cast<std::size_t>(std::llround(cfg.T / cfg.dt));
    return TimeGrid::with_origin(n_before, n_after, cfg.dt);
}

std::uint64_t sample_seed(const EstimationConfig& cfg, std::size_t k) {
    return cfg.seed + 1000003ULL * static_cast<std::uint64_t>(k);
}

namespace {

SlowFastModel estimation_model(const SlowFastModel& model, const EstimationConfig& cfg, double a) {
    return model.with_eps(cfg.eps).with_param(a);
}

}  // namespace

Observation synthetic_observation(const EstimationConfig& cfg, const SlowFastModel& model) {
    cfg.validate();
    const SlowFastModel m = estimation_model(model, cfg, cfg.a_true);
    const TimeGrid grid = estimation_noise_grid(cfg, m);
    const NoiseBundle noise = make_noise(grid, sample_seed(cfg, 0));
    double eta = 0.0;
    if (cfg.eta) {
        eta = *cfg.eta;
    } else {
        const ExpansionNoise en =
            expansion_noise(noise, m.eps, NoiseKind::white, default_burn_in(m.eps, m.gamma1, cfg.mu));
        eta = expansion_h(ExpansionCoefficients::from_model(m), en, cfg.xi0);
    }
    const TimeGrid window = grid.window(grid.origin(), grid.n_steps());
    const Trajectory tr = solve_sde(m, noise, State{Vec::Constant(1, eta), Vec::Constant(1, cfg.xi0)}, window);
    return {window, tr.slow};
}

struct ReducedObjective::Sample {
    std::shared_ptr<const ExpansionNoise> expansion;
    std::shared_ptr<const StationaryDriverPath> driver;
    std::size_t origin = 0;
};

ReducedObjective::ReducedObjective(const SlowFastModel& model, Observation obs, const EstimationConfig& cfg)
    : model_(model.with_eps(cfg.eps)), obs_(std::move(obs)), cfg_(cfg) {
    cfg_.validate();
    if (model_.n_fast() != 1 || model_.n_slow() != 1) {
        throw ValidationError("estimation: scalar fast and slow blocks required");
    }
    noise_grid_ = estimation_noise_grid(cfg_, model_);
    if (std::abs(obs_.grid.dt() - cfg_.dt) > 1e-15 || obs_.grid.t_start() != 0.0 ||
        obs_.grid.n_steps() > noise_grid_.n_steps() - noise_grid_.origin()) {
        throw ConfigError("estimation: observation grid must start at 0 with step dt and fit within T");
    }
    if (cfg_.noise == ReducedNoise::wz_reduced) {
        for (std::size_t k = 0; k < cfg_.n_mc; ++k) cached_.push_back(build_sample(k));
    }
}

std::shared_ptr<const ReducedObjective::Sample> ReducedObjective::build_sample(std::size_t k) const {
    const bool wz = cfg_.noise == ReducedNoise::wz_reduced;
    const NoiseKind kind = wz ? NoiseKind::colored : NoiseKind::white;
    const NoiseBundle noise = wz ? make_noise(noise_grid_, sample_seed(cfg_, k), cfg_.mu)
                                 : make_noise(noise_grid_, sample_seed(cfg_, k));
    const double burn_in = default_burn_in(model_.eps, model_.gamma1, cfg_.mu);
    auto s = std::make_shared<Sample>();
    s->origin = noise_grid_.origin();
    if (cfg_.source == ManifoldSource::expansion) {
        s->expansion = std::make_shared<const ExpansionNoise>(expansion_noise(noise, model_.eps, kind, burn_in));
    } else {
        s->driver = std::make_shared<const StationaryDriverPath>(
            stationary_driver(noise, model_.A, model_.sigma, model_.eps, kind, burn_in));
    }
    return s;
}

double ReducedObjective::evaluate_sample(const Sample& s, double a) const {
    const SlowFastModel m = model_.with_param(a);
    ManifoldFn hfn;
    if (s.expansion) {
        const auto c = ExpansionCoefficients::from_model(m);
        hfn = [&s, c](std::size_t step, double, const Vec& xi) -> Vec {
            return Vec::Constant(1, expansion_h(c, *s.expansion, xi[0], s.origin + step));
        };
    } else {
        const LpOptions lp = cfg_.lp;
        hfn = [&s, &m, lp](std::size_t step, double, const Vec& xi) -> Vec {
            return lp_fixed_point(m, *s.driver, xi, lp, s.origin + step).h;
        };
    }
    Trajectory red;
    try {
        red = solve_reduced(m.B, m.g, hfn, obs_.slow.col(0), a, obs_.grid);
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
    const double dt = obs_.grid.dt();
    double acc = 0.0;
    const Eigen::Index n = obs_.slow.cols();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sq = (red.slow.col(i) - obs_.slow.col(i)).squaredNorm();
        acc += (i == 0 || i == n - 1) ? 0.5 * sq : sq;
    }
    return acc * dt;
}

double ReducedObjective::operator()(double a) const {
    if (!std::isfinite(a) || a < cfg_.a_lo || a > cfg_.a_hi) return std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t k = 0; k < cfg_.n_mc; ++k) {
        if (cfg_.noise == ReducedNoise::wz_reduced) {
            total += evaluate_sample(*cached_[k], a);
        } else {
            total += evaluate_sample(*build_sample(k), a);
        }
    }
    return total / static_cast<double>(cfg_.n_mc);
}

double objective_F(double a_prime, const Observation& v_obs, const EstimationConfig& cfg,
                   const SlowFastModel& model) {
    return ReducedObjective(model, v_obs, cfg)(a_prime);
}

EstimationResult estimate_parameter(const EstimationConfig& cfg, const SlowFastModel& model,
                                    const std::optional<Observation>& observed) {
    cfg.validate();
    Observation obs = observed ? *observed : synthetic_observation(cfg, model);
    const auto start = std::chrono::steady_clock::now();
    const ReducedObjective objective(model, std::move(obs), cfg);
    const double a0 = cfg.a0 ? *cfg.a0 : 0.5 * (cfg.a_lo + cfg.a_hi);
    const double a1 = a0 + 0.1 * (cfg.a_hi - cfg.a_lo);
    const NmResult nm = nelder_mead([&](double a) { return objective(a); }, a0, a1, cfg.nm);
    const auto stop = std::chrono::steady_clock::now();

    EstimationResult r;
    r.a_hat = nm.argmin[0];
    r.objective = nm.value;
    r.iterations = nm.iterations;
    r.evaluations = nm.evaluations;
    r.converged = nm.converged;
    r.wall_seconds = std::chrono::duration<double>(stop - start).count();
    r.trace = nm.trace;
    return r;
}

}  // namespace slowmf
