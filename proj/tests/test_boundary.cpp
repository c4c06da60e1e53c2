#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sads_dirac/boundary.hpp"
#include "sads_dirac/jost.hpp"

using namespace sads_dirac;

namespace {

struct Unit {
    TortoiseMap map{BlackHoleParams::make(1.0, 1.0)};
    PotentialEvaluator sub{map, ModeParams{0.0, 0.3}};
    PotentialEvaluator super{map, ModeParams{0.0, 1.2}};
};

double rel(const Spinor4& a, const Spinor4& b) { return (a - b).norm_inf() / b.norm_inf(); }

double norm2sq(const Spinor4& v) { return v.norm2() * v.norm2(); }

std::vector<double> geometric(double a, double b, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(-std::exp(std::log(-a) + (std::log(-b) - std::log(-a)) * i / (n - 1)));
    return g;
}

}  // namespace

TEST(BoundarySeed, StartValue) {
    Unit u;
    const BoundarySeed s = BoundarySeed::canonical(Regime::Sub);
    const double x0 = -1e-4, p = 2.0 * std::pow(1e-4, -0.3);
    const Spinor4 v = boundary_leading_term(u.sub, s, x0);
    EXPECT_NEAR(std::abs(v[0] - p), 0.0, 1e-15 * p);
    EXPECT_EQ(v[1], cplx{});
    EXPECT_NEAR(std::abs(v[2] + p), 0.0, 1e-15 * p);
    EXPECT_EQ(v[3], cplx{});
    const Spinor4 w = series_correction(u.sub, cplx(0, 1), s, x0, 1);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(w[k], v[k]);
}

TEST(BoundarySeed, LeadingDirectionIsAnnihilated) {
    Unit u;
    const Matrix4C op = gamma(1) + kI * Matrix4C::identity();
    for (auto [c, d] : {std::pair{1.0, 0.0}, std::pair{0.3, -2.0}, std::pair{-1.5, 0.25}}) {
        const Spinor4 r = op * boundary_leading_term(u.sub, {Regime::Sub, c, d}, -0.01);
        for (int k = 0; k < 4; ++k) EXPECT_EQ(r[k], cplx{});
    }
}

TEST(BoundarySeed, TwistMapsSeedDirection) {
    for (auto [c, d] : {std::pair{1.0, 0.0}, std::pair{0.3, -2.0}}) {
        const BoundarySeed s{Regime::Sub, c, d};
        const Spinor4 t = twist(s.direction());
        const Spinor4 e = BoundarySeed{Regime::Sub, -d, -c}.direction();
        for (int k = 0; k < 4; ++k) EXPECT_EQ(t[k], e[k]);
    }
    EXPECT_TRUE((BoundarySeed{Regime::Sub, 1.0, 1.0}.twist_degenerate()));
    EXPECT_TRUE((BoundarySeed{Regime::Sub, 1.0, -1.0}.twist_degenerate()));
    EXPECT_FALSE((BoundarySeed{Regime::Sub, 1.0, 0.5}.twist_degenerate()));
}

TEST(BoundarySolution, GlobalBound) {
    Unit u;
    const cplx lam(0.0, 1.0);
    const auto g = standard_grid(u.sub);
    const BoundarySeed s = BoundarySeed::canonical(Regime::Sub);
    const SolutionCurve c = boundary_solution(u.sub, lam, s, g);
    const double c0 = boundary_growth_constant(u.sub, boundary_constant(u.sub, lam, g));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double z = -g[i];
        EXPECT_LE(c.values[i].norm_inf() * std::pow(z, u.sub.ml()), 4.0 * s.N() * std::exp(c0 * z)) << g[i];
    }
}

TEST(BoundarySeries, TermBoundsBothRegimes) {
    Unit u;
    const cplx lam(0.0, 1.0);
    for (const PotentialEvaluator* ev : {&u.sub, &u.super}) {
        const BoundarySeed s = BoundarySeed::canonical(ev->regime());
        const double zmax = 0.3;
        const BoundarySeries series(*ev, lam, s, zmax, 6);
        const double C = boundary_constant(*ev, lam, geometric(-zmax, -1e-10, 400));
        const double c0 = boundary_growth_constant(*ev, C);
        const double e = ev->regime() == Regime::Sub ? -ev->ml() : ev->ml();
        for (double x : {-0.3, -0.1, -0.01, -1e-4}) {
            double fact = 1.0;
            for (int n = 0; n <= 5; ++n) {
                if (n > 0) fact *= n;
                const double bound = s.N() * std::pow(-x, e) * std::pow(c0 * -x, n) / fact;
                const Spinor4 t = series.term(n, x);
                for (int j = 0; j < 4; ++j)
                    EXPECT_LE(std::abs(t[j]), bound * (1.0 + 1e-9)) << ev->ml() << " x=" << x << " n=" << n;
            }
        }
    }
}

TEST(BoundarySeries, AgreesWithMarchedSolution) {
    Unit u;
    for (const PotentialEvaluator* ev : {&u.sub, &u.super}) {
        for (cplx lam : {cplx(0.0, 1.0), cplx(1.0, 0.2)}) {
            const BoundarySeed s = BoundarySeed::canonical(ev->regime());
            const SolutionCurve c = boundary_solution(*ev, lam, s, standard_grid(*ev));
            const Spinor4 series = series_correction(*ev, lam, s, -0.1, 10);
            EXPECT_LT(rel(c.at(-0.1), series), 1e-6) << ev->ml() << " " << lam;
        }
    }
}

TEST(BoundaryCondition, SubDecayExponent) {
    Unit u;
    for (cplx lam : {cplx(0.0, 1.0), cplx(2.0, 0.3), cplx(0.5, -0.5)}) {
        for (auto [c, d] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}}) {
            const SolutionCurve cv = boundary_solution(u.sub, lam, {Regime::Sub, c, d}, standard_grid(u.sub));
            const BoundaryReport r = check_boundary_condition(cv, Regime::Sub);
            EXPECT_TRUE(r.satisfied);
            EXPECT_GE(r.exponent, 0.5 - u.sub.ml() - 1e-2) << lam;
        }
    }
}

TEST(BoundaryCondition, SuperVanishes) {
    Unit u;
    const SolutionCurve cv =
        boundary_solution(u.super, cplx(0.0, 1.0), BoundarySeed::canonical(Regime::Super), standard_grid(u.super));
    const BoundaryReport r = check_boundary_condition(cv, Regime::Super);
    EXPECT_TRUE(r.satisfied);
    EXPECT_NEAR(r.exponent, u.super.ml(), 2e-2);
    const auto [a, b] = boundary_limits(cv, u.super.ml(), Regime::Super);
    EXPECT_NEAR(std::abs(a - 2.0), 0.0, 1e-3);
    EXPECT_NEAR(std::abs(b), 0.0, 1e-3);
}

TEST(BoundaryCondition, CoulombHookHasZeroResidual) {
    Unit u;
    const PotentialEvaluator coul = u.sub.with_hook(PotentialHook::CoulombOnly);
    const SolutionCurve cv = boundary_solution(coul, cplx(0.0, 0.0), {Regime::Sub, 0.7, -0.2}, standard_grid(coul));
    const BoundaryReport r = check_boundary_condition(cv, Regime::Sub);
    EXPECT_EQ(r.residual, 0.0);
    EXPECT_TRUE(r.satisfied);
}

TEST(BoundaryCondition, JostCurveFlagged) {
    Unit u;
    for (cplx lam : {cplx(0.0, 1.0), cplx(1.3, 0.4)}) {
        const SolutionCurve j = jost_solution(u.sub, lam, JostKind::Phi3, standard_grid(u.sub));
        const BoundaryReport r = check_boundary_condition(j, Regime::Sub);
        EXPECT_FALSE(r.satisfied) << lam;
        EXPECT_LT(r.exponent, 0.0);
    }
}

TEST(BoundarySolution, SquareIntegrableUnderRefinement) {
    Unit u;
    const cplx lam(0.0, 1.0);
    const BoundarySeed s = BoundarySeed::canonical(Regime::Sub);
    auto integral = [&](double h, double rel_step, double x_end) {
        GridSpec gs;
        gs.x_min = -1.0;
        gs.x_end = x_end;
        gs.h_bulk = h;
        gs.rel_step = rel_step;
        SolverOptions o;
        o.x0 = x_end;
        const auto g = make_grid(gs);
        const SolutionCurve c = boundary_solution(u.sub, lam, s, g, o);
        std::vector<double> f;
        for (const auto& v : c.values) f.push_back(norm2sq(v));
        const double ml = u.sub.ml(), z = -x_end;
        const double tail = 4.0 * norm2sq(s.direction()) * std::pow(z, 1.0 - 2.0 * ml) / (1.0 - 2.0 * ml);
        return CumulativeIntegrator(g).total<double>(f) + tail;
    };
    const double coarse = integral(0.01, 0.02, -1e-4);
    const double fine = integral(0.005, 0.01, -1e-6);
    EXPECT_TRUE(std::isfinite(coarse));
    EXPECT_NEAR(coarse / fine, 1.0, 1e-2);
}

TEST(BoundarySolution, HorizonGrowthRate) {
    Unit u;
    for (cplx lam : {cplx(0.0, 1.0), cplx(0.8, 0.5), cplx(1.0, -0.5)}) {
        const double k = u.map.kappa();
        std::vector<double> g;
        for (int i = 0; i <= 50; ++i) g.push_back(-20.0 / k + (10.0 / k) * i / 50.0);
        g.push_back(-1e-3);
        const SolutionCurve c = boundary_solution(u.sub, lam, BoundarySeed::canonical(Regime::Sub), g);
        double mx = 0, my = 0;
        const int n = 51;
        for (int i = 0; i < n; ++i) mx += g[i], my += std::log(c.values[i].norm2());
        mx /= n;
        my /= n;
        double sxx = 0, sxy = 0;
        for (int i = 0; i < n; ++i) {
            sxx += (g[i] - mx) * (g[i] - mx);
            sxy += (g[i] - mx) * (std::log(c.values[i].norm2()) - my);
        }
        EXPECT_NEAR(-sxy / sxx, std::abs(lam.imag()), 0.05 * std::abs(lam.imag())) << lam;
    }
}

TEST(BoundarySolution, DeepHorizonMarch) {
    Unit u;
    std::vector<double> g;
    for (int i = 0; i <= 400; ++i) g.push_back(-400.0 + 399.0 * i / 400.0);
    g.push_back(-1e-3);
    const SolutionCurve c = boundary_solution(u.sub, cplx(0.0, 1.0), BoundarySeed::canonical(Regime::Sub), g);
    for (const Spinor4& v : c.values) ASSERT_TRUE(v.is_finite());
    const double slope = (std::log(c.values[100].norm_inf()) - std::log(c.values[0].norm_inf())) / (g[100] - g[0]);
    EXPECT_NEAR(-slope, 1.0, 1e-3);
}

TEST(BoundarySolution, HolomorphicInLambda) {
    Unit u;
    const std::vector<double> g{-2.0, -0.5, -0.01};
    const BoundarySeed s = BoundarySeed::canonical(Regime::Sub);
    const cplx c0(0.7, 0.5);
    const int n = 24;
    std::vector<Spinor4> mean(g.size());
    for (int k = 0; k < n; ++k) {
        const cplx z = c0 + 1e-2 * std::exp(kI * (2.0 * std::numbers::pi * k / n));
        const SolutionCurve c = boundary_solution(u.sub, z, s, g);
        for (std::size_t i = 0; i < g.size(); ++i) mean[i] += (1.0 / n) * c.values[i];
    }
    const SolutionCurve center = boundary_solution(u.sub, c0, s, g);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(rel(mean[i], center.values[i]), 1e-6) << g[i];
}

TEST(BoundarySolution, TwistGivesSwappedSeed) {
    Unit u;
    const cplx lam(0.4, 0.6);
    const auto g = standard_grid(u.sub);
    const SolutionCurve c = boundary_solution(u.sub, lam, {Regime::Sub, 1.0, 0.5}, g);
    const SolutionCurve t = jost_tilde(c);
    const auto [tc, td] = boundary_limits(t, u.sub.ml(), Regime::Sub);
    EXPECT_NEAR(std::abs(tc - 2.0 * -0.5), 0.0, 1e-3);
    EXPECT_NEAR(std::abs(td - 2.0 * -1.0), 0.0, 1e-3);
    const SolutionCurve ref = boundary_solution(u.sub, lam, {Regime::Sub, -0.5, -1.0}, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, rel(t.values[i], ref.values[i]));
    EXPECT_LT(worst, 1e-6);
    EXPECT_TRUE(check_boundary_condition(t, Regime::Sub).satisfied);
}

TEST(BoundarySolution, OdeResidualSmall) {
    Unit u;
    for (const PotentialEvaluator* ev : {&u.sub, &u.super}) {
        const SolutionCurve c =
            boundary_solution(*ev, cplx(1.0, 0.2), BoundarySeed::canonical(ev->regime()), standard_grid(*ev));
        EXPECT_LT(ode_residual(*ev, c), 1e-5) << ev->ml();
    }
}

TEST(BoundarySolution, Errors) {
    Unit u;
    const auto g = standard_grid(u.sub);
    EXPECT_THROW(boundary_solution(u.sub, cplx(0, 1), {Regime::Super, 1.0, 0.0}, g), InvalidParameter);
    EXPECT_THROW(boundary_solution(u.super, cplx(0, 1), {Regime::Sub, 1.0, 0.0}, g), InvalidParameter);
    EXPECT_THROW(boundary_solution(u.sub, cplx(0, 1), {Regime::Sub, 0.0, 0.0}, g), InvalidParameter);
    EXPECT_THROW(boundary_solution(u.sub, cplx(0, -1.0), BoundarySeed::canonical(Regime::Sub), g), OutOfStrip);
    EXPECT_THROW(series_correction(u.sub, cplx(0, 1), BoundarySeed::canonical(Regime::Sub), 0.1, 3), DomainError);
    EXPECT_THROW(BoundarySeries(u.sub, cplx(0, 1), BoundarySeed::canonical(Regime::Sub), 0.1, 0), InvalidParameter);
}

TEST(BoundarySolution, HalfIsSuper) {
    const TortoiseMap map(BlackHoleParams::make(1.0, 1.0));
    const PotentialEvaluator ev(map, ModeParams{0.0, 0.5});
    EXPECT_EQ(ev.regime(), Regime::Super);
    const SolutionCurve c = boundary_solution(ev, cplx(0, 1), BoundarySeed::canonical(Regime::Super), standard_grid(ev));
    EXPECT_TRUE(check_boundary_condition(c, Regime::Super).satisfied);
    EXPECT_THROW(boundary_solution(ev, cplx(0, 1), BoundarySeed::canonical(Regime::Sub), standard_grid(ev)),
                 InvalidParameter);
}
