#pragma once

#include <cmath>
#include <deque>
#include <functional>

#include "gdd/types.hpp"

namespace gdd::detail {

struct LbfgsResult {
    std::size_t iterations = 0;
    double value = 0.0;
    double grad_inf_norm = 0.0;
    bool converged = false;
};

// Limited-memory BFGS with Armijo backtracking. `fg` returns the objective
// and writes the gradient. Stops when the gradient's infinity norm drops
// below `grad_tol`.
inline LbfgsResult minimize_lbfgs(const std::function<double(const Vector&, Vector&)>& fg, Vector& x,
                                  double grad_tol, std::size_t max_iters, std::size_t memory = 10) {
    struct Pair {
        Vector s;
        Vector y;
        double rho;
    };
    std::deque<Pair> hist;
    Vector g(x.size());
    double f = fg(x, g);
    LbfgsResult res;
    std::vector<double> alpha;

    for (std::size_t it = 0; it < max_iters; ++it) {
        res.grad_inf_norm = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
        if (res.grad_inf_norm < grad_tol) {
            res.converged = true;
            break;
        }

        // Two-loop recursion.
        Vector q = g;
        alpha.assign(hist.size(), 0.0);
        for (std::size_t i = hist.size(); i-- > 0;) {
            alpha[i] = hist[i].rho * hist[i].s.dot(q);
            q -= alpha[i] * hist[i].y;
        }
        if (!hist.empty()) {
            const auto& last = hist.back();
            q *= last.s.dot(last.y) / last.y.squaredNorm();
        }
        for (std::size_t i = 0; i < hist.size(); ++i) {
            const double beta = hist[i].rho * hist[i].y.dot(q);
            q += (alpha[i] - beta) * hist[i].s;
        }
        Vector dir = -q;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            hist.clear();
            dir = -g;
            slope = -g.squaredNorm();
        }

        double step = hist.empty() ? std::min(1.0, 1.0 / std::max(1e-12, g.norm())) : 1.0;
        Vector x_new(x.size());
        Vector g_new(x.size());
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + step * dir;
            f_new = fg(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        res.iterations = it + 1;
        if (!accepted) break;

        Vector s = x_new - x;
        Vector y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            hist.push_back({std::move(s), std::move(y), 1.0 / sy});
            if (hist.size() > memory) hist.pop_front();
        }
        x.swap(x_new);
        g.swap(g_new);
        f = f_new;
    }
    res.value = f;
    res.grad_inf_norm = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
    res.converged = res.converged || res.grad_inf_norm < grad_tol;
    return res;
}

}  // namespace gdd::detail
