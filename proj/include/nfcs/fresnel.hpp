// nfcs - near-field wideband channel estimation for XL-RIS mmWave arrays
// Copyright (C) 2026 the nfcs contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Fresnel integrals
//
//        x                      x
//   C(x) = | cos(pi/2 t^2) dt,   S(x) = | sin(pi/2 t^2) dt
//        0                      0
//
// computed from the entire-function Taylor series below x = 3, from the
// asymptotic auxiliary functions f, g above x = 3.6, and in between by
// quadrature of the defining integral from an anchor at x = 3. The series
// are summed by term recurrence until the terms hit the rounding floor;
// the Taylor side loses ~6 digits to cancellation against its 1e6 peak
// term at the branch point, the asymptotic side truncates at its minimum
// term exp(-pi x^2 / 2). Absolute error <= 1e-9 everywhere.

#pragma once

#include "nfcs/types.hpp"

namespace nfcs
{

struct FresnelCS
{
    double c;
    double s;
};

namespace detail
{

//   C(x) = x sum_n (-1)^n q^(2n)   / ((2n)!   (4n+1))
//   S(x) = x sum_n (-1)^n q^(2n+1) / ((2n+1)! (4n+3))
// with q = (pi/2) x^2, summed with a shared q^m/m! factor. Usable up to
// x ~ 3 before cancellation bites.
inline FresnelCS fresnel_taylor(double ax)
{
    const double q = 0.5 * pi * ax * ax;
    double a = 1.0; // q^m / m!
    double sign = 1.0;
    double c = 0.0, s = 0.0;
    for (int n = 0; n < 80; n++)
    {
        c += sign * a / double(4 * n + 1);
        a *= q / double(2 * n + 1);
        s += sign * a / double(4 * n + 3);
        a *= q / double(2 * n + 2);
        sign = -sign;
        if (a < 1e-18 * (1.0 + std::fabs(c)) && double(2 * n) > q)
            break;
    }
    return FresnelCS{c * ax, s * ax};
}

} // namespace detail

inline FresnelCS fresnel_cs(double x)
{
    detail::require_finite(x, "fresnel_cs");

    const double ax = std::fabs(x);
    double c, s;
    if (ax <= 3.0)
    {
        const FresnelCS t = detail::fresnel_taylor(ax);
        c = t.c;
        s = t.s;
    }
    else if (ax <= 3.6)
    {
        // March the defining integral from the anchor with composite
        // 8-point Gauss-Legendre panels; the phase advances well under a
        // panel period, so the rule is at machine accuracy.
        static const FresnelCS anchor = detail::fresnel_taylor(3.0);
        static const double gx[4] = {0.1834346424956498, 0.5255324099163290,
                                     0.7966664774136267, 0.9602898564975363};
        static const double gw[4] = {0.3626837833783620, 0.3137066458778873,
                                     0.2223810344533745, 0.1012285362903763};
        const int panels = 4;
        const double h = (ax - 3.0) / panels;
        c = anchor.c;
        s = anchor.s;
        for (int i = 0; i < panels; i++)
        {
            const double mid = 3.0 + (i + 0.5) * h;
            for (int j = 0; j < 4; j++)
            {
                const double tp = mid + 0.5 * h * gx[j];
                const double tm = mid - 0.5 * h * gx[j];
                const double w = 0.5 * h * gw[j];
                c += w * (std::cos(0.5 * pi * tp * tp) + std::cos(0.5 * pi * tm * tm));
                s += w * (std::sin(0.5 * pi * tp * tp) + std::sin(0.5 * pi * tm * tm));
            }
        }
    }
    else
    {
        //   C(x) = 1/2 + f sin(q) - g cos(q),  S(x) = 1/2 - f cos(q) - g sin(q)
        // with the alternating series f = (1/(pi x)) sum_m (-1)^m (4m-1)!! v^(2m)
        // and g = (1/(pi x)) sum_m (-1)^m (4m+1)!! v^(2m+1), v = 1/(pi x^2),
        // truncated at the minimum term.
        const double v = 1.0 / (pi * ax * ax);
        const double v2 = v * v;
        double f = 0.0, g = 0.0;
        double tf = 1.0, tg = v;
        double sign = 1.0;
        for (int m = 0; m < 80; m++)
        {
            f += sign * tf;
            g += sign * tg;
            const double rf = double(4 * m + 1) * double(4 * m + 3) * v2;
            const double rg = double(4 * m + 3) * double(4 * m + 5) * v2;
            if (rf >= 1.0 || tf < 1e-18)
                break;
            tf *= rf;
            tg *= rg;
            sign = -sign;
        }
        const double inv = 1.0 / (pi * ax);
        f *= inv;
        g *= inv;
        const double arg = 0.5 * pi * ax * ax;
        const double sa = std::sin(arg);
        const double ca = std::cos(arg);
        c = 0.5 + f * sa - g * ca;
        s = 0.5 - f * ca - g * sa;
    }
    if (x < 0.0)
    {
        c = -c;
        s = -s;
    }
    return FresnelCS{c, s};
}

// Normalized quadratic-phase aperture gain of an n-element uniform linear
// axis under a phase curvature mismatch zeta,
//
//   g(zeta) = (1/n) | integral_{-n/2}^{n/2} exp(j pi zeta m^2) dm |
//           = | C(u) + j S(u) | / u,   u = (n/2) sqrt(2 |zeta|),
//
// with g(0) = 1. Even in zeta, monotone over the main lobe, -> 0 as
// zeta -> inf.
inline double squint_gain(double zeta, int n)
{
    detail::require_finite(zeta, "squint_gain");
    if (n < 1)
        throw std::invalid_argument("squint_gain: axis size must be positive");

    const double u = 0.5 * double(n) * std::sqrt(2.0 * std::fabs(zeta));
    if (u == 0.0)
        return 1.0;
    const FresnelCS cs = fresnel_cs(u);
    return std::hypot(cs.c, cs.s) / u;
}

} // namespace nfcs
