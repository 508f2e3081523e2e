#pragma once

// Closed-form angles, roots and energies for the analytically understood
// cubic-graph patterns.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "phaselock/errors.hpp"

namespace phaselock {

using Phases = Eigen::VectorXd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct RootResult {
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double residual = 0.0;  // |f(value)|
};

/// Brent's method on a sign-changing bracket. Throws NumericalError if the
/// bracket does not change sign.
inline RootResult brent_root(const std::function<double(double)>& f, double lo, double hi, double xtol = 1e-14,
                             int max_iter = 200) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, lo, hi, 0.0};
    if (fb == 0.0) return {b, lo, hi, 0.0};
    if ((fa > 0) == (fb > 0)) throw NumericalError("brent_root: bracket does not change sign");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) break;
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol ? d : (m > 0 ? tol : -tol);
        fb = f(b);
    }
    return {b, lo, hi, std::abs(fb)};
}

/// Root b_m of 2 sin((m-1) b) + sin(b) in (2pi/m, 2pi/(m-1)); sets the
/// phase step of the crossed double-ring pattern. Needs m >= 5.
inline RootResult twisted_root(int m) {
    if (m < 5) throw DomainError("twisted_root requires m >= 5");
    const double md = m;
    auto g = [md](double b) { return 2.0 * std::sin((md - 1.0) * b) + std::sin(b); };
    return brent_root(g, kTwoPi / md, kTwoPi / (md - 1.0));
}

/// Root of 2 sin(4x) + sin(x) in (2pi/5, pi/2).
inline RootResult beta_star() {
    auto g = [](double x) { return 2.0 * std::sin(4.0 * x) + std::sin(x); };
    return brent_root(g, kTwoPi / 5.0, std::numbers::pi / 2.0);
}

/// Energy of an equidistant twist around an isolated m-cycle.
inline double loop_energy(int m) {
    if (m < 3) throw DomainError("loop_energy requires m >= 3");
    // cos(2pi/m) written as sin(pi(m-4)/2m) so m = 4 comes out exact
    return m * (1.0 - std::sin(std::numbers::pi * (m - 4) / (2.0 * m)));
}

/// Energy of the 5-wave construction on n vertices.
inline double e_energy(int n) {
    if (n < 10) throw DomainError("e_energy requires n >= 10");
    return 10.0 * (n / 10) * (1.0 - std::cos(kTwoPi / 5.0));
}

/// Energy of one crossed 5-ring block: eight links at beta*, four at 4 beta*.
inline double f_block_energy() {
    const double b = beta_star().value;
    return 8.0 * (1.0 - std::cos(b)) + 4.0 * (1.0 - std::cos(4.0 * b));
}

/// Energy of m chained crossed 5-rings (n = 10 m).
inline double f_energy(int n) {
    if (n < 10 || n % 10 != 0) throw DomainError("f_energy requires n = 10 m with m >= 1");
    return (n / 10) * f_block_energy();
}

/// Double-ring 2-twist: theta_j = 4 pi j / n on both rings (j taken mod n/2).
/// Also a fixed point of the Moebius ladder with the same labeling.
inline Phases double_ring_phases(int n) {
    if (n < 10 || n % 2 != 0) throw DomainError("double_ring_phases requires even n >= 10");
    const int half = n / 2;
    Phases th(n);
    for (int v = 0; v < n; ++v) th[v] = 2.0 * kTwoPi * (v % half) / n;
    return th;
}

/// Ring position where the crossed double ring swaps its two rungs; the
/// rungs at s and s+1 are exchanged.
inline int twisted_swap_position(int m) { return (m + 1) / 2 - 1; }

/// Crossed double-ring pattern on twisted_ring(2m): ring position j gets
/// j b_m up to the swap, and -(m-j) b_m after it, on both rings.
inline Phases twisted_phases(int m) {
    const double b = twisted_root(m).value;
    const int s = twisted_swap_position(m);
    Phases th(2 * m);
    for (int j = 0; j < m; ++j) {
        const double a = j <= s ? j * b : -(m - j) * b;
        th[j] = a;
        th[m + j] = a;
    }
    return th;
}

struct LongLinkAngles {
    double a = 0.0;
    double b = 0.0;
};

/// Angles of the 12-vertex long-link pattern: sin(b-a) = 2 sin(a) and
/// sin(b-a) = sin(b).
inline LongLinkAngles g50_angles() {
    return {2.0 * std::asin(0.25), std::numbers::pi - std::atan(std::sqrt(15.0))};
}

struct AlphaBeta {
    double alpha = 0.0;
    double beta = 0.0;
    double residual = 0.0;  // max |equation|
};

inline std::array<double, 2> two_pattern_equations(double alpha, double beta) {
    return {std::sin(beta - alpha) - std::sin(2.0 * alpha) - std::sin(alpha),
            std::sin(beta - alpha) - 2.0 * std::sin(1.5 * beta - 0.5 * alpha)};
}

/// Angle gamma fixed by 2 gamma + beta - alpha = 2 pi.
inline double two_pattern_gamma(double alpha, double beta) { return 0.5 * (kTwoPi - beta + alpha); }

/// All solutions of the two-angle system with alpha, beta in (0, pi),
/// found by damped Newton from a grid of starts and deduplicated.
inline std::vector<AlphaBeta> solve_two_pattern_system(int grid = 24) {
    std::vector<AlphaBeta> roots;
    const double pi = std::numbers::pi;
    for (int i = 1; i < grid; ++i) {
        for (int j = 1; j < grid; ++j) {
            double x = pi * i / grid, y = pi * j / grid;
            bool ok = false;
            for (int it = 0; it < 100; ++it) {
                auto r = two_pattern_equations(x, y);
                const double norm = std::hypot(r[0], r[1]);
                if (norm < 1e-14) {
                    ok = true;
                    break;
                }
                // Jacobian of (F1, F2) in (alpha, beta)
                const double c = std::cos(y - x);
                const double c2 = std::cos(1.5 * y - 0.5 * x);
                const double j11 = -c - 2.0 * std::cos(2.0 * x) - std::cos(x), j12 = c;
                const double j21 = -c + c2, j22 = c - 3.0 * c2;
                const double det = j11 * j22 - j12 * j21;
                if (std::abs(det) < 1e-14) break;
                double dx = -(r[0] * j22 - j12 * r[1]) / det;
                double dy = -(j11 * r[1] - j21 * r[0]) / det;
                double lambda = 1.0;
                while (lambda > 1e-6) {
                    auto rn = two_pattern_equations(x + lambda * dx, y + lambda * dy);
                    if (std::hypot(rn[0], rn[1]) < norm) break;
                    lambda *= 0.5;
                }
                x += lambda * dx;
                y += lambda * dy;
            }
            if (!ok || x <= 1e-6 || y <= 1e-6 || x >= pi - 1e-6 || y >= pi - 1e-6) continue;
            bool dup = false;
            for (const auto& r : roots)
                if (std::abs(r.alpha - x) < 1e-8 && std::abs(r.beta - y) < 1e-8) dup = true;
            if (dup) continue;
            auto r = two_pattern_equations(x, y);
            roots.push_back({x, y, std::max(std::abs(r[0]), std::abs(r[1]))});
        }
    }
    std::sort(roots.begin(), roots.end(), [](const AlphaBeta& a, const AlphaBeta& b) { return a.alpha < b.alpha; });
    return roots;
}

}  // namespace phaselock
