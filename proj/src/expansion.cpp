#include "slowmf/expansion.hpp"

#include "slowmf/errors.hpp"

#include <cmath>
#include <string>

namespace slowmf {

ExpansionCoefficients ExpansionCoefficients::from_model(const SlowFastModel& m) {
    if (m.n_fast() != 1 || m.n_slow() != 1) {
        throw ValidationError("expansion: only the scalar Example system is supported");
    }
    return {m.a, m.sigma[0], m.B(0, 0), m.eps};
}

double ExpansionNoise::i1(std::size_t node) const { return -memory.at(node) / eps; }

double ExpansionNoise::i2(std::size_t node) const { return std::sqrt(eps) * drive.at(node); }

ExpansionNoise expansion_noise(const NoiseBundle& noise, double eps, NoiseKind kind, double burn_in) {
    const StationaryDriverPath d =
        stationary_driver(noise, Mat::Constant(1, 1, -1.0), Vec::Constant(1, 1.0), eps, kind, burn_in);
    ExpansionNoise out;
    out.kind = kind;
    out.eps = eps;
    out.mu = d.mu;
    out.grid = d.grid;
    out.valid_from = d.valid_from;
    const std::size_t n = d.grid.size();
    out.drive.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.drive[i] = d.values(0, static_cast<Eigen::Index>(i));

    const double h = d.grid.dt();
    const PhiSet p = phi_functions(Mat::Constant(1, 1, -h / eps));
    const double e = p.exp(0, 0);
    const double w0 = h * (p.phi1(0, 0) - p.phi2(0, 0));
    const double w1 = h * p.phi2(0, 0);
    out.memory.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        out.memory[i + 1] = e * out.memory[i] + w0 * out.drive[i] + w1 * out.drive[i + 1];
    }
    return out;
}

double expansion_h(const ExpansionCoefficients& c, const ExpansionNoise& noise, double xi,
                   std::size_t node) {
    if (node < noise.valid_from || node >= noise.drive.size()) {
        throw ConfigError("expansion: node " + std::to_string(node) +
                          " lies outside the burned-in part of the noise grid");
    }
    if (std::abs(noise.eps - c.eps) > 1e-15 * c.eps) {
        throw ValidationError("expansion: noise functionals built for a different eps");
    }
    const double xi2 = xi * xi;
    const double first = -c.b * xi2 / 300.0 + c.a * xi2 * xi2 / 180000.0 -
                         (c.a * c.sigma * xi2 / 300.0) * noise.i1(node);
    return xi2 / 600.0 + c.eps * first + (c.sigma / std::sqrt(c.eps)) * noise.i2(node);
}

double expansion_h(const ExpansionCoefficients& c, const ExpansionNoise& noise, double xi) {
    return expansion_h(c, noise, xi, noise.grid.origin());
}

}  // namespace slowmf
