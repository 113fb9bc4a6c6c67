#include "slowmf/model.hpp"

#include "slowmf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace slowmf {

SlowFastModel SlowFastModel::with_eps(double e) const {
    SlowFastModel m = *this;
    m.eps = e;
    return m;
}

SlowFastModel SlowFastModel::with_param(double value) const {
    SlowFastModel m = *this;
    m.a = value;
    return m;
}

SlowFastModel SlowFastModel::with_sigma(const Vec& s) const {
    SlowFastModel m = *this;
    m.sigma = s;
    return m;
}

namespace constants {

namespace {
double gap_sum(double K, double gamma1, double gamma2, double rho, double eps) {
    return K * (1.0 / (gamma1 - rho) + eps / (rho - eps * gamma2));
}
}  // namespace

double kappa(double K, double gamma1, double gamma2, double rho, double eps) {
    return K / (gamma1 - rho) + eps * K / (rho - eps * gamma2);
}

double kappa_star(double K, double gamma1, double gamma2, double rho, double eps) {
    const double denom =
        (gamma1 - rho) * (rho / eps - gamma2) * (1.0 - gap_sum(K, gamma1, gamma2, rho, eps));
    return kappa(K, gamma1, gamma2, rho, eps) + K * K / denom;
}

double eps_max(double K, double gamma1, double gamma2, double rho) {
    return rho / (gamma2 + 1.0 / (1.0 / K - 1.0 / (gamma1 - rho)));
}

double graph_lipschitz(double K, double gamma1, double gamma2, double rho, double eps) {
    return K / ((gamma1 - rho) * (1.0 - gap_sum(K, gamma1, gamma2, rho, eps)));
}

double tracking_c1(double K, double gamma1, double gamma2, double rho, double eps) {
    return 1.0 / (1.0 - gap_sum(K, gamma1, gamma2, rho, eps));
}

}  // namespace constants

AssumptionReport check_assumptions(const SlowFastModel& m) {
    const double vals[] = {m.gamma1, m.gamma2, m.K, m.rho, m.eps};
    for (double x : vals) {
        if (!std::isfinite(x)) throw ValidationError("assumptions: non-finite declared constant");
    }
    if (!(m.eps > 0.0)) throw ValidationError("assumptions: eps must be positive");
    if (!(m.gamma1 > 0.0) || !(m.gamma2 > 0.0) || !(m.K > 0.0) || !(m.rho > 0.0)) {
        throw ValidationError("assumptions: gamma1, gamma2, K, rho must be positive");
    }
    if (!m.A.allFinite() || !m.B.allFinite() || !m.sigma.allFinite()) {
        throw ValidationError("assumptions: non-finite model matrices");
    }

    AssumptionReport r;
    r.gamma1 = m.gamma1;
    r.gamma2 = m.gamma2;
    r.K = m.K;
    r.rho = m.rho;
    r.eps = m.eps;
    r.kappa = constants::kappa(m.K, m.gamma1, m.gamma2, m.rho, m.eps);
    r.kappa1 = r.kappa;
    r.kappa_star = constants::kappa_star(m.K, m.gamma1, m.gamma2, m.rho, m.eps);
    r.eps_max = constants::eps_max(m.K, m.gamma1, m.gamma2, m.rho);
    r.lipschitz_bound = constants::graph_lipschitz(m.K, m.gamma1, m.gamma2, m.rho, m.eps);
    r.c1 = constants::tracking_c1(m.K, m.gamma1, m.gamma2, m.rho, m.eps);
    r.c2 = m.rho / m.eps;
    r.log_norm_A = log_norm(m.A);
    r.log_norm_negB = log_norm(-m.B);

    if (!(m.K < m.gamma1 - m.rho)) r.violations.emplace_back("gap condition");
    if (!(m.eps < r.eps_max) || !(r.eps_max > 0.0)) r.violations.emplace_back("eps bound");
    if (!(r.log_norm_A <= -m.gamma1 + 1e-12)) r.violations.emplace_back("spectral condition (fast)");
    if (!(r.log_norm_negB <= m.gamma2 + 1e-12)) r.violations.emplace_back("spectral condition (slow)");
    if (!(r.kappa1 < 1.0)) r.violations.emplace_back("contraction");
    r.ok = r.violations.empty();
    r.tracking_ok = r.ok && r.kappa_star < 1.0;
    return r;
}

void require_assumptions(const AssumptionReport& report) {
    if (report.ok) return;
    std::string msg = "assumption check failed:";
    for (const auto& v : report.violations) msg += " [" + v + "]";
    throw AssumptionError(msg);
}

double bridge(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double x = s - 1.0;
    return 1.0 - 3.0 * x * x + 2.0 * x * x * x;
}

namespace {

double stacked_norm(const Vec& u, const Vec& v) {
    return std::sqrt(u.squaredNorm() + v.squaredNorm());
}

}  // namespace

FastFn cutoff(FastFn raw, double radius) {
    if (!(radius > 0.0)) throw ValidationError("cutoff: radius must be positive");
    return [raw = std::move(raw), radius](const Vec& u, const Vec& v) -> Vec {
        const double c = bridge(stacked_norm(u, v) / radius);
        if (c == 1.0) return raw(u, v);
        return c * raw(u, v);
    };
}

SlowFn cutoff(SlowFn raw, double radius) {
    if (!(radius > 0.0)) throw ValidationError("cutoff: radius must be positive");
    return [raw = std::move(raw), radius](const Vec& u, const Vec& v, double a) -> Vec {
        const double c = bridge(stacked_norm(u, v) / radius);
        if (c == 1.0) return raw(u, v, a);
        return c * raw(u, v, a);
    };
}

double example_fast_lipschitz(double radius) {
    // d/dv [bridge(v/R) v^2] = v^2 bridge'(v/R)/R + 2 v bridge(v/R), scaled by 1/600.
    const std::size_t n = 200000;
    double best = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double v = 2.0 * radius * static_cast<double>(i) / static_cast<double>(n);
        const double s = v / radius;
        double db = 0.0;
        if (s > 1.0 && s < 2.0) {
            const double x = s - 1.0;
            db = (-6.0 * x + 6.0 * x * x) / radius;
        }
        const double d = std::abs(v * v * db + 2.0 * v * bridge(s)) / 600.0;
        best = std::max(best, d);
    }
    return best * (1.0 + 1e-6);
}

SlowFastModel example_model(double a, double cutoff_radius, double eps) {
    if (!(cutoff_radius > 0.0)) throw ValidationError("example model: radius must be positive");
    SlowFastModel m;
    m.name = "example";
    m.A = Mat::Constant(1, 1, -1.0);
    m.B = Mat::Constant(1, 1, 0.001);
    auto nl = registered_nonlinearity("example", cutoff_radius);
    m.f = std::move(nl.f);
    m.g = std::move(nl.g);
    m.sigma = Vec::Constant(1, 0.1);
    m.eps = eps;
    m.a = a;
    m.gamma1 = 1.0;
    m.gamma2 = 0.001;
    m.K = example_fast_lipschitz(cutoff_radius);
    m.rho = 0.5;
    return m;
}

LipschitzSample sample_lipschitz(const SlowFastModel& m, double radius, std::size_t n_pairs,
                                 std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const Eigen::Index n1 = m.n_fast();
    const Eigen::Index n2 = m.n_slow();
    auto draw = [&](double scale) {
        Vec x(n1 + n2);
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = scale * unif(eng);
        return x;
    };
    LipschitzSample out;
    for (std::size_t k = 0; k < n_pairs; ++k) {
        const Vec x = draw(radius * 2.0);
        const double h = (k % 2 == 0) ? 1e-4 * radius : radius;
        const Vec y = x + draw(h);
        const Vec xu = x.head(n1), xv = x.tail(n2), yu = y.head(n1), yv = y.tail(n2);
        const double d = (x - y).norm();
        if (d == 0.0) continue;
        out.f = std::max(out.f, (m.f(xu, xv) - m.f(yu, yv)).norm() / d);
        out.g = std::max(out.g, (m.g(xu, xv, m.a) - m.g(yu, yv, m.a)).norm() / d);
    }
    return out;
}

Nonlinearity registered_nonlinearity(const std::string& name, double cutoff_radius) {
    if (name == "example") {
        const double R = cutoff_radius;
        if (!(R > 0.0)) throw ConfigError("nonlinearity 'example': cutoff radius must be positive");
        FastFn f = [R](const Vec& /*u*/, const Vec& v) -> Vec {
            const double x = v[0];
            return Vec::Constant(1, bridge(std::abs(x) / R) * x * x / 600.0);
        };
        SlowFn g = [R](const Vec& u, const Vec& v, double a) -> Vec {
            const double c = bridge(std::sqrt(u[0] * u[0] + v[0] * v[0]) / R);
            return Vec::Constant(1, -a * u[0] * v[0] * c);
        };
        return {std::move(f), std::move(g)};
    }
    if (name == "linear") {
        FastFn f = [](const Vec& u, const Vec& /*v*/) -> Vec { return Vec::Zero(u.size()); };
        SlowFn g = [](const Vec& /*u*/, const Vec& v, double /*a*/) -> Vec { return Vec::Zero(v.size()); };
        return {std::move(f), std::move(g)};
    }
    throw ConfigError("unknown nonlinearity '" + name + "'");
}

std::vector<std::string> registered_nonlinearity_names() { return {"example", "linear"}; }

}  // namespace slowmf
