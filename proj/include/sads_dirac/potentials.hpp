#pragma once

#include <cmath>
#include <string>

#include "sads_dirac/error.hpp"
#include "sads_dirac/geometry.hpp"
#include "sads_dirac/spinor.hpp"

namespace sads_dirac {

enum class Regime { Sub, Super };

inline const char* to_string(Regime r) { return r == Regime::Sub ? "sub" : "super"; }

/** @brief Angular index s and field mass m. */
struct ModeParams {
    double s = 0.0;
    double m = 0.3;
};

/** Test hooks replacing the physical potentials. */
enum class PotentialHook {
    None,
    Free,         // A = B = 0, so V_m = 0
    CoulombOnly,  // A = 0, B = -l/x, so V_{lambda,m} = i lambda Gamma^1
};

struct PotentialSample {
    double A = 0.0;
    double B = 0.0;
    double B_plus = 0.0;  // B + l/x
};

/** @brief Radial potentials and the matrices V_m, V_{lambda,m} on the tortoise line. */
class PotentialEvaluator {
public:
    PotentialEvaluator(const TortoiseMap& map, ModeParams mode, PotentialHook hook = PotentialHook::None)
        : map_(map), mode_(mode), hook_(hook) {
        if (!(mode.s >= 0.0)) throw InvalidParameter("s must be >= 0");
        if (!(mode.m > 0.0)) throw InvalidParameter("m must be positive");
        g02_ = gamma(0) * gamma(2);
        g0_ = gamma(0);
        g12_ = gamma(1) * gamma(2);
        g1_ = gamma(1);
    }

    PotentialEvaluator with_hook(PotentialHook hook) const { return PotentialEvaluator(map_, mode_, hook); }

    const TortoiseMap& map() const { return map_; }
    const ModeParams& mode() const { return mode_; }
    PotentialHook hook() const { return hook_; }
    double l() const { return map_.params().l; }
    double kappa() const { return map_.params().kappa; }
    double ml() const { return mode_.m * map_.params().l; }
    double spin_factor() const { return mode_.s + 0.5; }
    Regime regime() const { return 2.0 * ml() < 1.0 ? Regime::Sub : Regime::Super; }

    PotentialSample sample(double x) const {
        if (!(x < 0.0)) throw DomainError("potentials require x < 0");
        PotentialSample ps;
        if (hook_ == PotentialHook::Free) {
            ps.B_plus = l() / x;
            return ps;
        }
        if (hook_ == PotentialHook::CoulombOnly) {
            ps.B = -l() / x;
            return ps;
        }
        const RadialPoint pt = map_.locate(x);
        const BlackHoleParams& p = map_.params();
        const double l2 = p.l * p.l;
        if (pt.horizon_side) {
            const double rh = p.r_sads;
            const double q = 3.0 * rh * rh + l2 + pt.delta * (3.0 * rh + pt.delta);
            ps.B = std::exp(0.5 * pt.log_delta) * std::sqrt(q / (l2 * pt.r));
            ps.A = ps.B / pt.r;
            ps.B_plus = ps.B + p.l / x;
            return ps;
        }
        const double u = pt.u;
        const double w = l2 * u * u * (1.0 - 2.0 * p.M * u);
        const double sg = std::sqrt(1.0 + w);
        ps.A = sg / p.l;
        ps.B = ps.A / u;
        if (u < map_.small_u_threshold()) {
            const double rem = map_.boundary_remainder(u);
            const double xs = -l2 * u + rem;
            const double num = -p.l * u * (w / (sg + 1.0)) + sg * rem / p.l;
            ps.B_plus = num / (u * xs);
        } else {
            ps.B_plus = ps.B + p.l / x;
        }
        return ps;
    }

    double A(double x) const { return sample(x).A; }
    double B(double x) const { return sample(x).B; }
    double B_plus(double x) const { return sample(x).B_plus; }

    /** @brief (s+1/2) gamma^0 gamma^2 A - m gamma^0 B. */
    Matrix4C Vm(double x) const { return Vm(sample(x)); }

    Matrix4C Vm(const PotentialSample& ps) const {
        Matrix4C v = cplx(spin_factor() * ps.A) * g02_;
        v -= cplx(mode_.m * ps.B) * g0_;
        return v;
    }

    /** @brief i lambda Gamma^1 - i (s+1/2) gamma^1 gamma^2 A + i m gamma^1 (B + l/x). */
    Matrix4C Vlm(double x, cplx lambda) const { return Vlm(sample(x), lambda); }

    Matrix4C Vlm(const PotentialSample& ps, cplx lambda) const {
        Matrix4C v = (kI * lambda) * big_gamma1();
        v -= (kI * spin_factor() * ps.A) * g12_;
        v += (kI * mode_.m * ps.B_plus) * g1_;
        return v;
    }

    /** @brief Fit C_A, C_B in A ~ C_A e^{kappa x}, B ~ C_B e^{kappa x} (diagnostic only). */
    std::pair<double, double> horizon_amplitudes() const {
        const double xs = -25.0 / kappa();
        const PotentialSample ps = sample(xs);
        const double e = std::exp(-kappa() * xs);
        return {ps.A * e, ps.B * e};
    }

private:
    TortoiseMap map_;
    ModeParams mode_;
    PotentialHook hook_;
    Matrix4C g02_, g0_, g12_, g1_;
};

}  // namespace sads_dirac
