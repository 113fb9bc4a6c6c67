#include "slowmf/nelder_mead.hpp"

#include "slowmf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace slowmf {

namespace {

double safe(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

double diameter(const std::vector<Vec>& s) {
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) d = std::max(d, (s[i] - s[j]).norm());
    }
    return d;
}

}  // namespace

NmResult nelder_mead(const std::function<double(const Vec&)>& objective, std::vector<Vec> simplex,
                     const NmOptions& opts) {
    if (simplex.size() < 2) throw ValidationError("nelder_mead: need at least two vertices");
    const Eigen::Index k = simplex.front().size();
    if (static_cast<Eigen::Index>(simplex.size()) != k + 1) {
        throw ValidationError("nelder_mead: simplex must have dimension + 1 vertices");
    }
    if (k == 0) throw ValidationError("nelder_mead: empty parameter vector");
    {
        Mat edges(k, k);
        for (Eigen::Index i = 0; i < k; ++i) edges.col(i) = simplex[static_cast<std::size_t>(i + 1)] - simplex[0];
        if (edges.fullPivLu().rank() < k) throw ValidationError("nelder_mead: degenerate initial simplex");
    }

    NmResult res;
    auto eval = [&](const Vec& x) {
        ++res.evaluations;
        return safe(objective(x));
    };
    std::vector<double> f(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) f[i] = eval(simplex[i]);

    const std::size_t n = simplex.size();
    std::vector<std::size_t> order(n);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        std::vector<Vec> s2;
        std::vector<double> f2;
        for (auto i : order) {
            s2.push_back(simplex[i]);
            f2.push_back(f[i]);
        }
        simplex.swap(s2);
        f.swap(f2);
    };
    sort_simplex();
    res.trace.push_back({simplex, f});

    for (int it = 0; it < opts.max_iter; ++it) {
        if (diameter(simplex) <= opts.tol_x || (std::isfinite(f.back()) && f.back() - f.front() <= opts.tol_f)) {
            res.converged = true;
            break;
        }
        Vec centroid = Vec::Zero(k);
        for (std::size_t i = 0; i + 1 < n; ++i) centroid += simplex[i];
        centroid /= static_cast<double>(n - 1);
        const Vec& worst = simplex.back();
        const double f_best = f.front();
        const double f_second = f[n - 2];
        const double f_worst = f.back();

        const Vec xr = centroid + (centroid - worst);
        const double fr = eval(xr);
        bool shrink = false;
        if (fr < f_best) {
            const Vec xe = centroid + 2.0 * (centroid - worst);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex.back() = xe;
                f.back() = fe;
            } else {
                simplex.back() = xr;
                f.back() = fr;
            }
        } else if (fr < f_second) {
            simplex.back() = xr;
            f.back() = fr;
        } else if (fr < f_worst) {
            const Vec xc = centroid + 0.5 * (xr - centroid);
            const double fc = eval(xc);
            if (fc <= fr) {
                simplex.back() = xc;
                f.back() = fc;
            } else {
                shrink = true;
            }
        } else {
            const Vec xc = centroid + 0.5 * (worst - centroid);
            const double fc = eval(xc);
            if (fc < f_worst) {
                simplex.back() = xc;
                f.back() = fc;
            } else {
                shrink = true;
            }
        }
        if (shrink) {
            for (std::size_t i = 1; i < n; ++i) {
                simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
                f[i] = eval(simplex[i]);
            }
        }
        sort_simplex();
        res.iterations = it + 1;
        res.trace.push_back({simplex, f});
    }
    if (!res.converged && (diameter(simplex) <= opts.tol_x)) res.converged = true;
    res.argmin = simplex.front();
    res.value = f.front();
    return res;
}

NmResult nelder_mead(const std::function<double(double)>& objective, double x0, double x1,
                     const NmOptions& opts) {
    return nelder_mead([&](const Vec& x) { return objective(x[0]); },
                       std::vector<Vec>{Vec::Constant(1, x0), Vec::Constant(1, x1)}, opts);
}

}  // namespace slowmf
