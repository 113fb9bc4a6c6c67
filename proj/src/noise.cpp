#include "slowmf/noise.hpp"

#include "slowmf/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace slowmf {

namespace {

constexpr std::uint64_t kIncrementStream = 0;
constexpr std::uint64_t kStationaryStartStream = 1;

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

std::size_t pin_node(const TimeGrid& grid) { return grid.has_origin() ? grid.origin() : 0; }

/// Cumulative sum of per-step increments pinned to 0 at node `pin`.
std::vector<double> cumulate(const std::vector<double>& inc, std::size_t pin) {
    std::vector<double> v(inc.size() + 1, 0.0);
    for (std::size_t i = pin; i < inc.size(); ++i) v[i + 1] = v[i] + inc[i];
    for (std::size_t i = pin; i-- > 0;) v[i] = v[i + 1] - inc[i];
    return v;
}

}  // namespace

BrownianPath::BrownianPath(TimeGrid grid, std::vector<double> increments, std::uint64_t seed)
    : grid_(std::move(grid)), increments_(std::move(increments)), seed_(seed) {
    if (increments_.size() != grid_.n_steps()) {
        throw ValidationError("brownian path: increment count does not match the grid");
    }
    values_ = cumulate(increments_, pin_node(grid_));
}

BrownianPath sample_brownian(const TimeGrid& grid, std::uint64_t seed) {
    auto eng = make_engine(seed, kIncrementStream);
    std::normal_distribution<double> normal(0.0, std::sqrt(grid.dt()));
    std::vector<double> inc(grid.n_steps());
    for (auto& x : inc) x = normal(eng);
    return BrownianPath(grid, std::move(inc), seed);
}

BrownianPath wiener_shift(const BrownianPath& path, double t) {
    const TimeGrid& g = path.grid();
    if (!g.has_origin()) throw ConfigError("wiener shift: grid has no node at time 0");
    const std::size_t node = g.node_at(t);
    return BrownianPath(g.reorigin(node), path.increments(), path.seed());
}

BrownianPath wiener_shift(const BrownianPath& path, double t, double s_start, double s_end) {
    BrownianPath full = wiener_shift(path, t);
    const TimeGrid& g = full.grid();
    auto first = g.find_node(s_start);
    auto last = g.find_node(s_end);
    if (!first || !last || *last <= *first) {
        throw RangeError("wiener shift: window [" + std::to_string(s_start) + ", " +
                         std::to_string(s_end) + "] after shift by " + std::to_string(t) +
                         " is outside the stored grid");
    }
    std::vector<double> inc(full.increments().begin() + static_cast<std::ptrdiff_t>(*first),
                            full.increments().begin() + static_cast<std::ptrdiff_t>(*last));
    return BrownianPath(g.window(*first, *last), std::move(inc), path.seed());
}

SampledPath wiener_shift(const SampledPath& path, double t) {
    if (!path.grid.has_origin()) throw ConfigError("wiener shift: grid has no node at time 0");
    const std::size_t node = path.grid.node_at(t);
    SampledPath out{path.grid.reorigin(node), path.values};
    const double base = path.values[node];
    for (auto& v : out.values) v -= base;
    return out;
}

BrownianPath coarsen(const BrownianPath& path, std::size_t factor) {
    const TimeGrid& g = path.grid();
    if (factor == 0 || g.n_steps() % factor != 0) {
        throw ConfigError("coarsen: factor must divide the number of steps");
    }
    if (g.has_origin() && g.origin() % factor != 0) {
        throw ConfigError("coarsen: origin node is not on the coarse grid");
    }
    const std::size_t n = g.n_steps() / factor;
    std::vector<double> inc(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < factor; ++k) inc[i] += path.increments()[i * factor + k];
    }
    const double dt = g.dt() * static_cast<double>(factor);
    TimeGrid coarse = g.has_origin() ? TimeGrid::with_origin(g.origin() / factor, n - g.origin() / factor, dt)
                                     : TimeGrid(g.t_start(), g.t_end(), dt);
    return BrownianPath(coarse, std::move(inc), path.seed());
}

OuPath::OuPath(std::shared_ptr<const BrownianPath> driver, double mu, double z0,
               std::vector<double> values)
    : driver_(std::move(driver)), mu_(mu), z0_(z0), values_(std::move(values)) {}

OuPath ou_path(std::shared_ptr<const BrownianPath> b, double mu, Z0Mode mode) {
    if (!b) throw ValidationError("ou path: missing Brownian driver");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("ou path: mu must be positive");
    const double dt = b->grid().dt();
    if (dt > mu / 10.0 * (1.0 + 1e-12)) {
        throw ResolutionError("ou path: dt = " + std::to_string(dt) + " exceeds mu/10; need dt <= " +
                                  std::to_string(mu / 10.0),
                              mu / 10.0);
    }
    double z0 = 0.0;
    switch (mode.kind) {
        case Z0Mode::Kind::stationary_sample: {
            auto eng = make_engine(b->seed(), kStationaryStartStream);
            std::normal_distribution<double> normal(0.0, std::sqrt(1.0 / (2.0 * mu)));
            z0 = normal(eng);
            break;
        }
        case Z0Mode::Kind::explicit_value:
            z0 = mode.value;
            break;
        case Z0Mode::Kind::zero:
            break;
    }
    const auto& inc = b->increments();
    std::vector<double> z(inc.size() + 1);
    z[0] = z0;
    for (std::size_t i = 0; i < inc.size(); ++i) {
        z[i + 1] = z[i] - (dt / mu) * z[i] + inc[i] / mu;
    }
    return OuPath(std::move(b), mu, z0, std::move(z));
}

IntegratedOuPath::IntegratedOuPath(std::shared_ptr<const OuPath> ou, std::vector<double> values)
    : ou_(std::move(ou)), values_(std::move(values)) {}

IntegratedOuPath integrated_ou(std::shared_ptr<const OuPath> z) {
    if (!z) throw ValidationError("integrated ou: missing OU path");
    const double dt = z->grid().dt();
    const auto& zv = z->values();
    std::vector<double> inc(zv.size() - 1);
    for (std::size_t i = 0; i + 1 < zv.size(); ++i) inc[i] = zv[i] * dt;
    auto phi = cumulate(inc, pin_node(z->grid()));
    return IntegratedOuPath(std::move(z), std::move(phi));
}

double NoiseBundle::mu() const {
    if (!ou) throw ConfigError("noise bundle: no OU path attached");
    return ou->mu();
}

NoiseBundle make_noise(const TimeGrid& grid, std::uint64_t seed, std::optional<double> mu,
                       Z0Mode mode) {
    NoiseBundle nb;
    nb.brownian = std::make_shared<const BrownianPath>(sample_brownian(grid, seed));
    if (mu) return with_mu(nb, *mu, mode);
    return nb;
}

NoiseBundle with_mu(const NoiseBundle& noise, double mu, Z0Mode mode) {
    NoiseBundle nb;
    nb.brownian = noise.brownian;
    nb.ou = std::make_shared<const OuPath>(ou_path(noise.brownian, mu, mode));
    nb.phi = std::make_shared<const IntegratedOuPath>(integrated_ou(nb.ou));
    return nb;
}

NoiseBundle zero_noise(const TimeGrid& grid, std::optional<double> mu) {
    NoiseBundle nb;
    nb.brownian = std::make_shared<const BrownianPath>(
        BrownianPath(grid, std::vector<double>(grid.n_steps(), 0.0), 0));
    if (mu) return with_mu(nb, *mu, Z0Mode::zero());
    return nb;
}

double default_burn_in(double eps, double gamma1, double mu) {
    return std::max(10.0 * eps / gamma1, 10.0 * mu);
}

StationaryDriverPath stationary_driver(const NoiseBundle& noise, const Mat& A, const Vec& sigma,
                                       double eps, NoiseKind kind, double burn_in) {
    if (!(eps > 0.0)) throw ValidationError("stationary driver: eps must be positive");
    if (A.rows() != A.cols() || sigma.size() != A.rows()) {
        throw ValidationError("stationary driver: A and sigma dimensions disagree");
    }
    const double gamma1 = -log_norm(A);
    if (!(gamma1 > 0.0)) throw ValidationError("stationary driver: A is not dissipative");
    const double required = 10.0 * eps / gamma1;
    if (burn_in < required * (1.0 - 1e-12)) {
        throw ConfigError("stationary driver: burn-in " + std::to_string(burn_in) +
                          " is shorter than the required window " + std::to_string(required));
    }
    if (kind == NoiseKind::colored && !noise.has_ou()) {
        throw ConfigError("stationary driver: colored kind needs an OU path");
    }
    const TimeGrid& g = noise.grid();
    const double dt = g.dt();
    const auto warm = static_cast<std::size_t>(std::ceil(burn_in / dt - 1e-9));
    if (warm > g.n_steps()) {
        throw ConfigError("stationary driver: grid of length " + std::to_string(g.t_end() - g.t_start()) +
                          " cannot hold the required burn-in window " + std::to_string(burn_in));
    }

    StationaryDriverPath d;
    d.kind = kind;
    d.eps = eps;
    d.mu = kind == NoiseKind::colored ? noise.mu() : 0.0;
    d.grid = g;
    d.valid_from = warm;
    d.seed = noise.seed();

    const Eigen::Index n = A.rows();
    const Mat E = expm(A * (dt / eps));
    const Vec scale = sigma / std::sqrt(eps);
    d.values = Mat::Zero(n, static_cast<Eigen::Index>(g.size()));
    const auto& inc = noise.brownian->increments();
    const std::vector<double>* z = kind == NoiseKind::colored ? &noise.ou->values() : nullptr;
    Vec cur = Vec::Zero(n);
    for (std::size_t i = 0; i < g.n_steps(); ++i) {
        const double step = z ? (*z)[i] * dt : inc[i];
        cur = E * cur + scale * step;
        d.values.col(static_cast<Eigen::Index>(i + 1)) = cur;
    }
    return d;
}

}  // namespace slowmf
