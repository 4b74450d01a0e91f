#pragma once

// Adaptive eighth-order Dormand-Prince integrator with seventh-order dense
// output, after the DOP853.F code of Hairer and Wanner (Solving Ordinary
// Differential Equations I, 2nd ed., Springer 1993).

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "biconserve/errors.hpp"

namespace biconserve {

template <int N>
struct DenseStep {
    double t0 = 0.0;
    double t1 = 0.0;
    std::array<std::array<double, N>, 8> rc{};  // interpolation corrections

    double span() const { return t1 - t0; }
    std::array<double, N> eval(double t) const {
        const double s = (t - t0) / (t1 - t0), s1 = 1.0 - s;
        std::array<double, N> y;
        for (int i = 0; i < N; ++i) {
            y[i] = rc[0][i] +
                   s * (rc[1][i] +
                        s1 * (rc[2][i] +
                              s * (rc[3][i] +
                                   s1 * (rc[4][i] +
                                         s * (rc[5][i] + s1 * (rc[6][i] + s * rc[7][i]))))));
        }
        return y;
    }
};

struct Dop853Options {
    double rtol = 1e-12;
    double atol = 1e-14;
    long max_steps = 100000000;
};

// RHS signature: void(double t, const std::array<double,N>& y,
//                     std::array<double,N>& dydt)
template <int N, class Rhs>
class Dop853 {
public:
    Dop853(Rhs rhs, Dop853Options opt = {}) : rhs_(std::move(rhs)), opt_(opt) {}

    // Integrates y from t0 to t1 (t1 > t0), invoking
    // observer(const DenseStep<N>&, const std::array<double,N>& y_end) after
    // every accepted step. The observer may return false to stop early.
    template <class Obs>
    std::array<double, N> integrate(double t0, std::array<double, N> y, double t1, Obs&& observer) {
        constexpr double uround = 2.3e-16;
        const double hmax = t1 - t0;
        double t = t0, h = 0.0;
        long nstep = 0;
        bool reject = false, last = false;

        std::array<double, N> k1;
        rhs_(t, y, k1);
        h = initial_step(t, y, k1, hmax);

        while (true) {
            if (++nstep > opt_.max_steps) {
                throw IntegrationError("dop853: step count exceeded " +
                                       std::to_string(opt_.max_steps));
            }
            if (0.1 * h <= std::abs(t) * uround) {
                throw IntegrationError("dop853: step-size underflow at t=" + std::to_string(t));
            }
            if (t + 1.01 * h - t1 > 0.0) {
                h = t1 - t;
                last = true;
            }

            std::array<double, N> y1;
            core_step(t, y, k1, h, y1);
            const double err = error_norm(y, y1, k1, h);

            const double fac11 = std::pow(err, 1.0 / 8.0);
            const double fac = std::clamp(fac11 / 0.9, 1.0 / 6.0, 3.0);
            double hnew = h / fac;

            if (err <= 1.0) {
                std::array<double, N> k_end;
                rhs_(t + h, y1, k_end);
                DenseStep<N> ds = dense_coeffs(t, y, k1, y1, k_end, h);
                t += h;
                y = y1;
                k1 = k_end;
                if (!observer(ds, y)) return y;
                if (last) return y;
                if (hnew > hmax) hnew = hmax;
                if (reject) hnew = std::min(hnew, h);
                reject = false;
            } else {
                hnew = h / std::min(3.0, fac11 / 0.9);
                reject = true;
                last = false;
            }
            h = hnew;
        }
    }

private:
    Rhs rhs_;
    Dop853Options opt_;
    // Stages retained between core_step and dense_coeffs.
    std::array<double, N> s2_, s3_, s4_, s5_, s6_, s7_, s8_, s9_, s10_, s11_, s12_, b_;

    double initial_step(double t, const std::array<double, N>& y, const std::array<double, N>& k1,
                        double hmax) {
        double dnf = 0.0, dny = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sk = opt_.atol + opt_.rtol * std::abs(y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
        h = std::min(h, hmax);

        std::array<double, N> y2, k2;
        for (int i = 0; i < N; ++i) y2[i] = y[i] + h * k1[i];
        rhs_(t + h, y2, k2);
        double der2 = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sk = opt_.atol + opt_.rtol * std::abs(y[i]);
            der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                         : std::pow(0.01 / der12, 1.0 / 8.0);
        return std::min({100.0 * h, h1, hmax});
    }

    void core_step(double t, const std::array<double, N>& y, const std::array<double, N>& k1,
                   double h, std::array<double, N>& y1) {
        // clang-format off
        constexpr double
            c2 = 0.526001519587677318785587544488e-01, c3 = 0.789002279381515978178381316732e-01,
            c4 = 0.118350341907227396726757197510e+00, c5 = 0.281649658092772603273242802490e+00,
            c6 = 1.0/3.0, c7 = 0.25,
            c8 = 0.307692307692307692307692307692e+00, c9 = 0.651282051282051282051282051282e+00,
            c10 = 0.6, c11 = 0.857142857142857142857142857142e+00,
            b1 = 5.42937341165687622380535766363e-2,  b6 = 4.45031289275240888144113950566e0,
            b7 = 1.89151789931450038304281599044e0,   b8 = -5.8012039600105847814672114227e0,
            b9 = 3.1116436695781989440891606237e-1,   b10 = -1.52160949662516078556178806805e-1,
            b11 = 2.01365400804030348374776537501e-1, b12 = 4.47106157277725905176885569043e-2,
            a21 = 5.26001519587677318785587544488e-2,
            a31 = 1.97250569845378994544595329183e-2, a32 = 5.91751709536136983633785987549e-2,
            a41 = 2.95875854768068491816892993775e-2, a43 = 8.87627564304205475450678981324e-2,
            a51 = 2.41365134159266685502369798665e-1, a53 = -8.84549479328286085344864962717e-1,
            a54 = 9.24834003261792003115737966543e-1,
            a61 = 3.7037037037037037037037037037e-2,  a64 = 1.70828608729473871279604482173e-1,
            a65 = 1.25467687566822425016691814123e-1,
            a71 = 3.7109375e-2,                       a74 = 1.70252211019544039314978060272e-1,
            a75 = 6.02165389804559606850219397283e-2, a76 = -1.7578125e-2,
            a81 = 3.70920001185047927108779319836e-2, a84 = 1.70383925712239993810214054705e-1,
            a85 = 1.07262030446373284651809199168e-1, a86 = -1.53194377486244017527936158236e-2,
            a87 = 8.27378916381402288758473766002e-3,
            a91 = 6.24110958716075717114429577812e-1, a94 = -3.36089262944694129406857109825e0,
            a95 = -8.68219346841726006818189891453e-1, a96 = 2.75920996994467083049415600797e1,
            a97 = 2.01540675504778934086186788979e1,  a98 = -4.34898841810699588477366255144e1,
            a101 = 4.77662536438264365890433908527e-1, a104 = -2.48811461997166764192642586468e0,
            a105 = -5.90290826836842996371446475743e-1, a106 = 2.12300514481811942347288949897e1,
            a107 = 1.52792336328824235832596922938e1, a108 = -3.32882109689848629194453265587e1,
            a109 = -2.03312017085086261358222928593e-2,
            a111 = -9.3714243008598732571704021658e-1, a114 = 5.18637242884406370830023853209e0,
            a115 = 1.09143734899672957818500254654e0, a116 = -8.14978701074692612513997267357e0,
            a117 = -1.85200656599969598641566180701e1, a118 = 2.27394870993505042818970056734e1,
            a119 = 2.49360555267965238987089396762e0, a1110 = -3.0467644718982195003823669022e0,
            a121 = 2.27331014751653820792359768449e0, a124 = -1.05344954667372501984066689879e1,
            a125 = -2.00087205822486249909675718444e0, a126 = -1.79589318631187989172765950534e1,
            a127 = 2.79488845294199600508499808837e1, a128 = -2.85899827713502369474065508674e0,
            a129 = -8.87285693353062954433549289258e0, a1210 = 1.23605671757943030647266201528e1,
            a1211 = 6.43392746015763530355970484046e-1;
        // clang-format on
        std::array<double, N> w;
        auto stage = [&](double c, std::array<double, N>& out) { rhs_(t + c * h, w, out); };

        for (int i = 0; i < N; ++i) w[i] = y[i] + h * a21 * k1[i];
        stage(c2, s2_);
        for (int i = 0; i < N; ++i) w[i] = y[i] + h * (a31 * k1[i] + a32 * s2_[i]);
        stage(c3, s3_);
        for (int i = 0; i < N; ++i) w[i] = y[i] + h * (a41 * k1[i] + a43 * s3_[i]);
        stage(c4, s4_);
        for (int i = 0; i < N; ++i) w[i] = y[i] + h * (a51 * k1[i] + a53 * s3_[i] + a54 * s4_[i]);
        stage(c5, s5_);
        for (int i = 0; i < N; ++i) w[i] = y[i] + h * (a61 * k1[i] + a64 * s4_[i] + a65 * s5_[i]);
        stage(c6, s6_);
        for (int i = 0; i < N; ++i)
            w[i] = y[i] + h * (a71 * k1[i] + a74 * s4_[i] + a75 * s5_[i] + a76 * s6_[i]);
        stage(c7, s7_);
        for (int i = 0; i < N; ++i)
            w[i] = y[i] +
                   h * (a81 * k1[i] + a84 * s4_[i] + a85 * s5_[i] + a86 * s6_[i] + a87 * s7_[i]);
        stage(c8, s8_);
        for (int i = 0; i < N; ++i)
            w[i] = y[i] + h * (a91 * k1[i] + a94 * s4_[i] + a95 * s5_[i] + a96 * s6_[i] +
                               a97 * s7_[i] + a98 * s8_[i]);
        stage(c9, s9_);
        for (int i = 0; i < N; ++i)
            w[i] = y[i] + h * (a101 * k1[i] + a104 * s4_[i] + a105 * s5_[i] + a106 * s6_[i] +
                               a107 * s7_[i] + a108 * s8_[i] + a109 * s9_[i]);
        stage(c10, s10_);
        for (int i = 0; i < N; ++i)
            w[i] = y[i] + h * (a111 * k1[i] + a114 * s4_[i] + a115 * s5_[i] + a116 * s6_[i] +
                               a117 * s7_[i] + a118 * s8_[i] + a119 * s9_[i] + a1110 * s10_[i]);
        stage(c11, s11_);
        for (int i = 0; i < N; ++i)
            w[i] = y[i] +
                   h * (a121 * k1[i] + a124 * s4_[i] + a125 * s5_[i] + a126 * s6_[i] +
                        a127 * s7_[i] + a128 * s8_[i] + a129 * s9_[i] + a1210 * s10_[i] +
                        a1211 * s11_[i]);
        rhs_(t + h, w, s12_);
        for (int i = 0; i < N; ++i) {
            b_[i] = b1 * k1[i] + b6 * s6_[i] + b7 * s7_[i] + b8 * s8_[i] + b9 * s9_[i] +
                    b10 * s10_[i] + b11 * s11_[i] + b12 * s12_[i];
            y1[i] = y[i] + h * b_[i];
        }
    }

    double error_norm(const std::array<double, N>& y, const std::array<double, N>& y1,
                      const std::array<double, N>& k1, double h) const {
        // clang-format off
        constexpr double
            bhh1 = 0.244094488188976377952755905512e+00,
            bhh2 = 0.733846688281611857341361741547e+00,
            bhh3 = 0.220588235294117647058823529412e-01,
            er1 = 0.1312004499419488073250102996e-01, er6 = -0.1225156446376204440720569753e+01,
            er7 = -0.4957589496572501915214079952e+00, er8 = 0.1664377182454986536961530415e+01,
            er9 = -0.3503288487499736816886487290e+00, er10 = 0.3341791187130174790297318841e+00,
            er11 = 0.8192320648511571246570742613e-01, er12 = -0.2235530786388629525884427845e-01;
        // clang-format on
        double err = 0.0, err2 = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sk =
                1.0 / (opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(y1[i])));
            double sqr = (b_[i] - bhh1 * k1[i] - bhh2 * s9_[i] - bhh3 * s12_[i]) * sk;
            err2 += sqr * sqr;
            sqr = (er1 * k1[i] + er6 * s6_[i] + er7 * s7_[i] + er8 * s8_[i] + er9 * s9_[i] +
                   er10 * s10_[i] + er11 * s11_[i] + er12 * s12_[i]) *
                  sk;
            err += sqr * sqr;
        }
        const double deno = err + 0.01 * err2;
        return std::abs(h) * err * std::sqrt(1.0 / (deno <= 0.0 ? N : deno * N));
    }

    // ke is the derivative at the step endpoint, f(t+h, y1); the original
    // code reuses the K4 slot for it throughout the continuation setup.
    DenseStep<N> dense_coeffs(double t, const std::array<double, N>& y,
                              const std::array<double, N>& k1, const std::array<double, N>& y1,
                              const std::array<double, N>& ke, double h) {
        // clang-format off
        constexpr double
            c14 = 0.1, c15 = 0.2, c16 = 0.777777777777777777777777777778e+00,
            a141 = 5.61675022830479523392909219681e-2,  a147 = 2.53500210216624811088794765333e-1,
            a148 = -2.46239037470802489917441475441e-1, a149 = -1.24191423263816360469010140626e-1,
            a1410 = 1.5329179827876569731206322685e-1,  a1411 = 8.20105229563468988491666602057e-3,
            a1412 = 7.56789766054569976138603589584e-3, a1413 = -8.298e-3,
            a151 = 3.18346481635021405060768473261e-2,  a156 = 2.83009096723667755288322961402e-2,
            a157 = 5.35419883074385676223797384372e-2,  a158 = -5.49237485713909884646569340306e-2,
            a1511 = -1.08347328697249322858509316994e-4, a1512 = 3.82571090835658412954920192323e-4,
            a1513 = -3.40465008687404560802977114492e-4, a1514 = 1.41312443674632500278074618366e-1,
            a161 = -4.28896301583791923408573538692e-1, a166 = -4.69762141536116384314449447206e0,
            a167 = 7.68342119606259904184240953878e0,   a168 = 4.06898981839711007970213554331e0,
            a169 = 3.56727187455281109270669543021e-1,  a1613 = -1.39902416515901462129418009734e-3,
            a1614 = 2.9475147891527723389556272149e0,   a1615 = -9.15095847217987001081870187138e0,
            d41 = -0.84289382761090128651353491142e+01, d46 = 0.56671495351937776962531783590e+00,
            d47 = -0.30689499459498916912797304727e+01, d48 = 0.23846676565120698287728149680e+01,
            d49 = 0.21170345824450282767155149946e+01,  d410 = -0.87139158377797299206789907490e+00,
            d411 = 0.22404374302607882758541771650e+01, d412 = 0.63157877876946881815570249290e+00,
            d413 = -0.88990336451333310820698117400e-01, d414 = 0.18148505520854727256656404962e+02,
            d415 = -0.91946323924783554000451984436e+01, d416 = -0.44360363875948939664310572000e+01,
            d51 = 0.10427508642579134603413151009e+02,  d56 = 0.24228349177525818288430175319e+03,
            d57 = 0.16520045171727028198505394887e+03,  d58 = -0.37454675472269020279518312152e+03,
            d59 = -0.22113666853125306036270938578e+02, d510 = 0.77334326684722638389603898808e+01,
            d511 = -0.30674084731089398182061213626e+02, d512 = -0.93321305264302278729567221706e+01,
            d513 = 0.15697238121770843886131091075e+02, d514 = -0.31139403219565177677282850411e+02,
            d515 = -0.93529243588444783865713862664e+01, d516 = 0.35816841486394083752465898540e+02,
            d61 = 0.19985053242002433820987653617e+02,  d66 = -0.38703730874935176555105901742e+03,
            d67 = -0.18917813819516756882830838328e+03, d68 = 0.52780815920542364900561016686e+03,
            d69 = -0.11573902539959630126141871134e+02, d610 = 0.68812326946963000169666922661e+01,
            d611 = -0.10006050966910838403183860980e+01, d612 = 0.77771377980534432092869265740e+00,
            d613 = -0.27782057523535084065932004339e+01, d614 = -0.60196695231264120758267380846e+02,
            d615 = 0.84320405506677161018159903784e+02, d616 = 0.11992291136182789328035130030e+02,
            d71 = -0.25693933462703749003312586129e+02, d76 = -0.15418974869023643374053993627e+03,
            d77 = -0.23152937917604549567536039109e+03, d78 = 0.35763911791061412378285349910e+03,
            d79 = 0.93405324183624310003907691704e+02,  d710 = -0.37458323136451633156875139351e+02,
            d711 = 0.10409964950896230045147246184e+03, d712 = 0.29840293426660503123344363579e+02,
            d713 = -0.43533456590011143754432175058e+02, d714 = 0.96324553959188282948394950600e+02,
            d715 = -0.39177261675615439165231486172e+02, d716 = -0.14972683625798562581422125276e+03;
        // clang-format on
        DenseStep<N> ds;
        ds.t0 = t;
        ds.t1 = t + h;
        std::array<double, N> w, e14, e15, e16;
        for (int i = 0; i < N; ++i) {
            ds.rc[0][i] = y[i];
            const double ydiff = y1[i] - y[i];
            ds.rc[1][i] = ydiff;
            const double bspl = h * k1[i] - ydiff;
            ds.rc[2][i] = bspl;
            ds.rc[3][i] = ydiff - h * ke[i] - bspl;
            ds.rc[4][i] = d41 * k1[i] + d46 * s6_[i] + d47 * s7_[i] + d48 * s8_[i] + d49 * s9_[i] +
                          d410 * s10_[i] + d411 * s11_[i] + d412 * s12_[i];
            ds.rc[5][i] = d51 * k1[i] + d56 * s6_[i] + d57 * s7_[i] + d58 * s8_[i] + d59 * s9_[i] +
                          d510 * s10_[i] + d511 * s11_[i] + d512 * s12_[i];
            ds.rc[6][i] = d61 * k1[i] + d66 * s6_[i] + d67 * s7_[i] + d68 * s8_[i] + d69 * s9_[i] +
                          d610 * s10_[i] + d611 * s11_[i] + d612 * s12_[i];
            ds.rc[7][i] = d71 * k1[i] + d76 * s6_[i] + d77 * s7_[i] + d78 * s8_[i] + d79 * s9_[i] +
                          d710 * s10_[i] + d711 * s11_[i] + d712 * s12_[i];
        }
        for (int i = 0; i < N; ++i)
            w[i] = y[i] + h * (a141 * k1[i] + a147 * s7_[i] + a148 * s8_[i] + a149 * s9_[i] +
                               a1410 * s10_[i] + a1411 * s11_[i] + a1412 * s12_[i] + a1413 * ke[i]);
        rhs_(t + c14 * h, w, e14);
        for (int i = 0; i < N; ++i)
            w[i] = y[i] + h * (a151 * k1[i] + a156 * s6_[i] + a157 * s7_[i] + a158 * s8_[i] +
                               a1511 * s11_[i] + a1512 * s12_[i] + a1513 * ke[i] + a1514 * e14[i]);
        rhs_(t + c15 * h, w, e15);
        for (int i = 0; i < N; ++i)
            w[i] = y[i] + h * (a161 * k1[i] + a166 * s6_[i] + a167 * s7_[i] + a168 * s8_[i] +
                               a169 * s9_[i] + a1613 * ke[i] + a1614 * e14[i] + a1615 * e15[i]);
        rhs_(t + c16 * h, w, e16);
        for (int i = 0; i < N; ++i) {
            ds.rc[4][i] = h * (ds.rc[4][i] + d413 * ke[i] + d414 * e14[i] + d415 * e15[i] +
                               d416 * e16[i]);
            ds.rc[5][i] = h * (ds.rc[5][i] + d513 * ke[i] + d514 * e14[i] + d515 * e15[i] +
                               d516 * e16[i]);
            ds.rc[6][i] = h * (ds.rc[6][i] + d613 * ke[i] + d614 * e14[i] + d615 * e15[i] +
                               d616 * e16[i]);
            ds.rc[7][i] = h * (ds.rc[7][i] + d713 * ke[i] + d714 * e14[i] + d715 * e15[i] +
                               d716 * e16[i]);
        }
        return ds;
    }
};

}  // namespace biconserve
