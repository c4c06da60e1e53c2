#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "sads_dirac/error.hpp"

namespace sads_dirac {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 200000;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
    long evaluations = 0;
};

/**
 * @brief Dormand-Prince 8(5,3) integrator for a vector-space state type.
 *
 * State needs operator+, operator-, scalar (double) multiplication and a free
 * function max_abs(State). Errors are measured relative to the sup-norm of the
 * whole state, not per component.
 */
template <class State, class Rhs>
class Dop853 {
public:
    Dop853(Rhs rhs, OdeOptions opt = {}) : f_(std::move(rhs)), opt_(opt) {}

    const OdeStats& stats() const { return stats_; }
    double last_step() const { return h_; }

    /** @brief Integrate y from x0 to x1 (either direction) and return y(x1). */
    State advance(double x0, State y, double x1) {
        if (x1 == x0) return y;
        const double dir = x1 > x0 ? 1.0 : -1.0;
        const double span = std::abs(x1 - x0);
        double x = x0;
        State k1 = f_(x, y);
        ++stats_.evaluations;
        double h = std::abs(h_);
        if (!(h > 0.0)) h = initial_step(x, y, k1, dir, span);
        h = std::min({h, span, opt_.h_max});
        long steps = 0;
        bool reject = false;
        while (true) {
            if (++steps > opt_.max_steps) throw ConvergenceError("integrator exceeded max_steps");
            bool last = false;
            if (std::abs(x1 - x) <= h * (1.0 + 1e-12)) {
                h = std::abs(x1 - x);
                last = true;
            }
            if (h < 1e-14 * std::max(1.0, std::abs(x)))
                throw ConvergenceError("integrator step size underflow");
            const double hs = dir * h;
            State ynew, e5, e3;
            step(x, y, k1, hs, ynew, e5, e3);
            stats_.evaluations += 11;
            const double sk =
                opt_.atol + opt_.rtol * std::max(max_abs(y), max_abs(ynew));
            if (!std::isfinite(max_abs(ynew))) {
                ++stats_.rejected;
                h *= 0.25;
                reject = true;
                continue;
            }
            const double err5 = max_abs(e5) / sk;
            const double err3 = max_abs(e3) / sk;
            const double deno = err5 * err5 + 0.01 * err3 * err3;
            const double err = deno > 0.0 ? h * err5 * err5 / std::sqrt(deno) : 0.0;
            const double fac11 = std::pow(err, 0.125);
            double fac = fac11 / 0.9;
            fac = std::clamp(fac, 1.0 / 6.0, 1.0 / 0.333);
            double hnew = h / fac;
            if (err <= 1.0) {
                ++stats_.accepted;
                x = last ? x1 : x + hs;
                y = ynew;
                if (last) {
                    h_ = std::min(hnew, opt_.h_max);
                    return y;
                }
                k1 = f_(x, y);
                ++stats_.evaluations;
                hnew = std::min(hnew, opt_.h_max);
                if (reject) hnew = std::min(hnew, h);
                reject = false;
                h = hnew;
            } else {
                ++stats_.rejected;
                reject = true;
                h = h / std::min(1.0 / 0.333, fac11 / 0.9);
            }
        }
    }

private:
    double initial_step(double x, const State& y, const State& k1, double dir, double span) {
        const double sk = opt_.atol + opt_.rtol * max_abs(y);
        const double dnf = max_abs(k1) / sk;
        const double dny = max_abs(y) / sk;
        double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
        h = std::min({h, span, opt_.h_max});
        const State y1 = y + (dir * h) * k1;
        const State k2 = f_(x + dir * h, y1);
        ++stats_.evaluations;
        const double der2 = max_abs(k2 - k1) / sk / h;
        const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
        const double h1 =
            der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
        return std::min({100.0 * h, h1, span, opt_.h_max});
    }

    void step(double x, const State& y, const State& k1, double h, State& ynew, State& e5, State& e3) {
        constexpr double c2 = 0.526001519587677318785587544488E-01, c3 = 0.789002279381515978178381316732E-01,
                         c4 = 0.118350341907227396726757197510E+00, c5 = 0.281649658092772603273242802490E+00,
                         c6 = 0.333333333333333333333333333333E+00, c7 = 0.25E+00,
                         c8 = 0.307692307692307692307692307692E+00, c9 = 0.651282051282051282051282051282E+00,
                         c10 = 0.6E+00, c11 = 0.857142857142857142857142857142E+00;
        constexpr double b1 = 5.42937341165687622380535766363E-2, b6 = 4.45031289275240888144113950566E0,
                         b7 = 1.89151789931450038304281599044E0, b8 = -5.8012039600105847814672114227E0,
                         b9 = 3.1116436695781989440891606237E-1, b10 = -1.52160949662516078556178806805E-1,
                         b11 = 2.01365400804030348374776537501E-1, b12 = 4.47106157277725905176885569043E-2;
        constexpr double a21 = 5.26001519587677318785587544488E-2, a31 = 1.97250569845378994544595329183E-2,
                         a32 = 5.91751709536136983633785987549E-2, a41 = 2.95875854768068491816892993775E-2,
                         a43 = 8.87627564304205475450678981324E-2, a51 = 2.41365134159266685502369798665E-1,
                         a53 = -8.84549479328286085344864962717E-1, a54 = 9.24834003261792003115737966543E-1,
                         a61 = 3.7037037037037037037037037037E-2, a64 = 1.70828608729473871279604482173E-1,
                         a65 = 1.25467687566822425016691814123E-1, a71 = 3.7109375E-2,
                         a74 = 1.70252211019544039314978060272E-1, a75 = 6.02165389804559606850219397283E-2,
                         a76 = -1.7578125E-2;
        constexpr double a81 = 3.70920001185047927108779319836E-2, a84 = 1.70383925712239993810214054705E-1,
                         a85 = 1.07262030446373284651809199168E-1, a86 = -1.53194377486244017527936158236E-2,
                         a87 = 8.27378916381402288758473766002E-3, a91 = 6.24110958716075717114429577812E-1,
                         a94 = -3.36089262944694129406857109825E0, a95 = -8.68219346841726006818189891453E-1,
                         a96 = 2.75920996994467083049415600797E1, a97 = 2.01540675504778934086186788979E1,
                         a98 = -4.34898841810699588477366255144E1, a101 = 4.77662536438264365890433908527E-1,
                         a104 = -2.48811461997166764192642586468E0, a105 = -5.90290826836842996371446475743E-1,
                         a106 = 2.12300514481811942347288949897E1, a107 = 1.52792336328824235832596922938E1,
                         a108 = -3.32882109689848629194453265587E1, a109 = -2.03312017085086261358222928593E-2;
        constexpr double a111 = -9.3714243008598732571704021658E-1, a114 = 5.18637242884406370830023853209E0,
                         a115 = 1.09143734899672957818500254654E0, a116 = -8.14978701074692612513997267357E0,
                         a117 = -1.85200656599969598641566180701E1, a118 = 2.27394870993505042818970056734E1,
                         a119 = 2.49360555267965238987089396762E0, a1110 = -3.0467644718982195003823669022E0,
                         a121 = 2.27331014751653820792359768449E0, a124 = -1.05344954667372501984066689879E1,
                         a125 = -2.00087205822486249909675718444E0, a126 = -1.79589318631187989172765950534E1,
                         a127 = 2.79488845294199600508499808837E1, a128 = -2.85899827713502369474065508674E0,
                         a129 = -8.87285693353062954433549289258E0, a1210 = 1.23605671757943030647266201528E1,
                         a1211 = 6.43392746015763530355970484046E-1;
        constexpr double bhh1 = 0.244094488188976377952755905512E+00, bhh2 = 0.733846688281611857341361741547E+00,
                         bhh3 = 0.220588235294117647058823529412E-01;
        constexpr double er1 = 0.1312004499419488073250102996E-01, er6 = -0.1225156446376204440720569753E+01,
                         er7 = -0.4957589496572501915214079952E+00, er8 = 0.1664377182454986536961530415E+01,
                         er9 = -0.3503288487499736816886487290E+00, er10 = 0.3341791187130174790297318841E+00,
                         er11 = 0.8192320648511571246570742613E-01, er12 = -0.2235530786388629525884427845E-01;

        const State k2 = f_(x + c2 * h, y + (h * a21) * k1);
        const State k3 = f_(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const State k4 = f_(x + c4 * h, y + h * (a41 * k1 + a43 * k3));
        const State k5 = f_(x + c5 * h, y + h * (a51 * k1 + a53 * k3 + a54 * k4));
        const State k6 = f_(x + c6 * h, y + h * (a61 * k1 + a64 * k4 + a65 * k5));
        const State k7 = f_(x + c7 * h, y + h * (a71 * k1 + a74 * k4 + a75 * k5 + a76 * k6));
        const State k8 = f_(x + c8 * h, y + h * (a81 * k1 + a84 * k4 + a85 * k5 + a86 * k6 + a87 * k7));
        const State k9 =
            f_(x + c9 * h, y + h * (a91 * k1 + a94 * k4 + a95 * k5 + a96 * k6 + a97 * k7 + a98 * k8));
        const State k10 = f_(x + c10 * h, y + h * (a101 * k1 + a104 * k4 + a105 * k5 + a106 * k6 + a107 * k7 +
                                                    a108 * k8 + a109 * k9));
        const State k11 = f_(x + c11 * h, y + h * (a111 * k1 + a114 * k4 + a115 * k5 + a116 * k6 + a117 * k7 +
                                                    a118 * k8 + a119 * k9 + a1110 * k10));
        const State k12 = f_(x + h, y + h * (a121 * k1 + a124 * k4 + a125 * k5 + a126 * k6 + a127 * k7 +
                                              a128 * k8 + a129 * k9 + a1210 * k10 + a1211 * k11));
        const State kb = b1 * k1 + b6 * k6 + b7 * k7 + b8 * k8 + b9 * k9 + b10 * k10 + b11 * k11 + b12 * k12;
        ynew = y + h * kb;
        e3 = kb - bhh1 * k1 - bhh2 * k9 - bhh3 * k12;
        e5 = er1 * k1 + er6 * k6 + er7 * k7 + er8 * k8 + er9 * k9 + er10 * k10 + er11 * k11 + er12 * k12;
    }

    Rhs f_;
    OdeOptions opt_;
    OdeStats stats_;
    double h_ = 0.0;
};

template <class State, class Rhs>
Dop853<State, Rhs> make_dop853(Rhs rhs, OdeOptions opt = {}) {
    return Dop853<State, Rhs>(std::move(rhs), opt);
}

}  // namespace sads_dirac
