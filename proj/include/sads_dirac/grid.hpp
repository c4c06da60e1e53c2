#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sads_dirac/error.hpp"
#include "sads_dirac/potentials.hpp"
#include "sads_dirac/spinor.hpp"

namespace sads_dirac {

enum class Anchor { Horizon, Boundary };
enum class JostKind { Phi1, Phi2, Phi3, Phi4 };

inline std::size_t component_index(JostKind k) { return static_cast<std::size_t>(k); }

inline const char* to_string(JostKind k) {
    switch (k) {
        case JostKind::Phi1: return "phi1";
        case JostKind::Phi2: return "phi2";
        case JostKind::Phi3: return "phi3";
        default: return "phi4";
    }
}

/** @brief Sampled solution of the radial system. */
struct SolutionCurve {
    cplx lambda{};
    Anchor anchor = Anchor::Horizon;
    std::string seed;
    std::vector<double> x;
    std::vector<Spinor4> values;

    std::size_t size() const { return x.size(); }

    std::size_t index_of(double xv) const {
        auto it = std::lower_bound(x.begin(), x.end(), xv);
        if (it != x.end() && *it == xv) return static_cast<std::size_t>(it - x.begin());
        if (it != x.begin() && *(it - 1) == xv) return static_cast<std::size_t>(it - x.begin() - 1);
        throw InvalidParameter("point is not on the curve grid");
    }
    const Spinor4& at(double xv) const { return values[index_of(xv)]; }
};

struct SolverOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double x_start_factor = 30.0;  // horizon start at -x_start_factor / kappa
    double strip_margin = 1e-3;    // relative to kappa
    double x0 = -1e-4;             // boundary start
    int series_terms = 0;          // 0: automatic
};

struct GridSpec {
    double x_min = -15.0;
    double x_end = -1e-4;
    double h_bulk = 0.01;
    double rel_step = 0.02;
    std::vector<double> extra;
};

/**
 * @brief Increasing grid on [x_min, x_end]: uniform spacing h_bulk in the bulk,
 * geometric (relative step rel_step) toward 0, plus extra points.
 */
inline std::vector<double> make_grid(const GridSpec& g) {
    if (!(g.x_end < 0.0) || !(g.x_min < g.x_end) || !(g.h_bulk > 0.0) || !(g.rel_step > 0.0))
        throw InvalidParameter("invalid grid specification");
    std::vector<double> x{g.x_end};
    double t = g.x_end;
    while (t > g.x_min) {
        t -= std::min(g.h_bulk, g.rel_step * std::abs(t));
        if (t - g.x_min < 1e-3 * g.h_bulk) t = g.x_min;
        x.push_back(std::max(t, g.x_min));
    }
    std::sort(x.begin(), x.end());
    // Each extra point replaces its nearest grid point, keeping the spacing smooth.
    for (double e : g.extra) {
        if (!(e > g.x_min && e < g.x_end)) continue;
        auto it = std::lower_bound(x.begin(), x.end(), e);
        if (it != x.begin() && (it == x.end() || e - *(it - 1) < *it - e)) --it;
        *it = e;
    }
    std::sort(x.begin(), x.end());
    std::vector<double> out;
    for (double v : x)
        if (out.empty() || v > out.back()) out.push_back(v);
    return out;
}

/** @brief Default grid for a potential evaluator: horizon start to x0. */
inline std::vector<double> standard_grid(const PotentialEvaluator& ev, const SolverOptions& opt = {},
                                         std::vector<double> extra = {-5.0, -3.0, -2.0, -1.0, -0.5, -0.1}) {
    GridSpec g;
    g.x_min = -opt.x_start_factor / ev.kappa();
    g.x_end = opt.x0;
    g.extra = std::move(extra);
    return make_grid(g);
}

/**
 * @brief Right-hand side of the profile system w = M_c(-x) phi.
 *
 * w' = M_c(-x) (-i Gamma^1 V_m) M_c(x) w.
 */
class ProfileSystem {
public:
    ProfileSystem(const PotentialEvaluator& ev, cplx lambda) : ev_(&ev), lambda_(lambda) {}

    Spinor4 operator()(double x, const Spinor4& w) const {
        const PotentialSample ps = ev_->sample(x);
        const double a = ev_->spin_factor() * ps.A;
        const double b = ev_->mode().m * ps.B;
        const cplx ph = 2.0 * kI * lambda_ * x;
        if (std::abs(ph.real()) < 600.0) {
            const cplx e = std::exp(ph);
            const cplx einv = 1.0 / e;
            const cplx ia = kI * a;
            return Spinor4((ia * w[1] - b * w[2]) * einv, (-ia * w[0] + b * w[3]) * e, (ia * w[3] - b * w[0]) * e,
                           (-ia * w[2] + b * w[1]) * einv);
        }
        // Deep horizon: combine the decaying potential and the exponential in log form.
        auto scaled = [](double c, cplx p) { return c > 0.0 ? std::exp(std::log(c) + p) : cplx{}; };
        const cplx ap = scaled(a, ph), am = scaled(a, -ph), bp = scaled(b, ph), bm = scaled(b, -ph);
        return Spinor4(kI * am * w[1] - bm * w[2], -kI * ap * w[0] + bp * w[3], kI * ap * w[3] - bp * w[0],
                       -kI * am * w[2] + bm * w[1]);
    }

    cplx lambda() const { return lambda_; }

private:
    const PotentialEvaluator* ev_;
    cplx lambda_;
};

inline Spinor4 profile_to_physical(const Spinor4& w, double x, cplx lambda) {
    const cplx e = std::exp(kI * lambda * x);
    const cplx f = std::exp(-kI * lambda * x);
    return Spinor4(e * w[0], f * w[1], f * w[2], e * w[3]);
}

inline Spinor4 physical_to_profile(const Spinor4& phi, double x, cplx lambda) {
    return profile_to_physical(phi, -x, lambda);
}

/**
 * @brief Sup-norm of the ODE residual phi' - i lambda Gamma^1 phi + i Gamma^1 V_m phi,
 * relative to (1 + |phi|)(1 + |lambda| + |V_m|), with 5-point finite differences
 * at interior samples.
 */
inline double ode_residual(const PotentialEvaluator& ev, const SolutionCurve& c) {
    const std::size_t n = c.size();
    if (n < 5) throw InvalidParameter("ode_residual needs >= 5 samples");
    const Matrix4C g1 = big_gamma1();
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const auto w = fornberg_weights(c.x[i], std::span<const double>(c.x).subspan(i - 2, 5), 1);
        Spinor4 d;
        for (std::size_t k = 0; k < 5; ++k) d += w[k] * c.values[i - 2 + k];
        const Spinor4& phi = c.values[i];
        const Matrix4C vm = ev.Vm(c.x[i]);
        Spinor4 rhs = (kI * c.lambda) * (g1 * phi);
        rhs -= kI * (g1 * (vm * phi));
        const double scale = (1.0 + phi.norm_inf()) * (1.0 + std::abs(c.lambda) + vm.norm_inf());
        worst = std::max(worst, (d - rhs).norm_inf() / scale);
    }
    return worst;
}

}  // namespace sads_dirac
