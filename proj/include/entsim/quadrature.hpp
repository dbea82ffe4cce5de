#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace entsim::quad {

/// sin(x)/x with the removable singularity filled in.
double sinc(double x);

template <std::size_t N>
using VectorIntegrand = std::function<std::array<double, N>(double)>;

struct QuadratureOptions {
    double rel_tol = 1e-6;
    int max_intervals = 200000;
};

template <std::size_t N>
struct QuadratureResult {
    std::array<double, N> value{};
    double error = 0.0;      // summed Gauss-Kronrod error estimate (L-inf over components)
    long evaluations = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod nodes/weights with embedded 7-point Gauss rule (QUADPACK dqk15).
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679,  0.1903505780647854,  0.2044329400752989, 0.2094821410847278};
inline constexpr std::array<double, 4> gauss_weights = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

template <std::size_t N>
struct Panel {
    double a = 0.0, b = 0.0;
    std::array<double, N> value{};
    double error = 0.0;
};

template <std::size_t N>
Panel<N> gk15(const VectorIntegrand<N>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    std::array<double, N> kron{}, gauss{};
    for (std::size_t i = 0; i < 8; ++i) {
        const double dx = half * kronrod_nodes[i];
        std::array<double, N> fsum{};
        if (i == 7) {
            fsum = f(mid);
        } else {
            const auto lo = f(mid - dx);
            const auto hi = f(mid + dx);
            for (std::size_t c = 0; c < N; ++c) fsum[c] = lo[c] + hi[c];
        }
        for (std::size_t c = 0; c < N; ++c) kron[c] += kronrod_weights[i] * fsum[c];
        if (i % 2 == 1) {
            for (std::size_t c = 0; c < N; ++c) gauss[c] += gauss_weights[i / 2] * fsum[c];
        }
    }
    Panel<N> p;
    p.a = a;
    p.b = b;
    double err = 0.0;
    for (std::size_t c = 0; c < N; ++c) {
        p.value[c] = kron[c] * half;
        err = std::max(err, std::abs((kron[c] - gauss[c]) * half));
    }
    p.error = err;
    return p;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration over a pre-split panel list.
/// The breakpoints seed the subdivision so that narrow features (filter
/// envelopes, sinc lobes) are never skipped by the error estimator.
template <std::size_t N>
QuadratureResult<N> integrate_panels(const VectorIntegrand<N>& f,
                                     const std::vector<double>& breakpoints,
                                     const QuadratureOptions& opt = {}) {
    QuadratureResult<N> out;
    if (breakpoints.size() < 2) return out;

    std::vector<detail::Panel<N>> panels;
    panels.reserve(breakpoints.size() + 64);
    std::array<double, N> total{};
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (breakpoints[i + 1] <= breakpoints[i]) continue;
        panels.push_back(detail::gk15(f, breakpoints[i], breakpoints[i + 1]));
        out.evaluations += 15;
        for (std::size_t c = 0; c < N; ++c) total[c] += panels.back().value[c];
        total_err += panels.back().error;
    }

    while (static_cast<int>(panels.size()) < opt.max_intervals) {
        double scale = 0.0;
        for (std::size_t c = 0; c < N; ++c) scale = std::max(scale, std::abs(total[c]));
        if (total_err <= opt.rel_tol * std::max(scale, 1e-300)) {
            out.value = total;
            out.error = total_err;
            out.converged = true;
            return out;
        }
        // split the worst panel; deterministic tie-break on the left edge
        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i) {
            if (panels[i].error > panels[worst].error ||
                (panels[i].error == panels[worst].error && panels[i].a < panels[worst].a)) {
                worst = i;
            }
        }
        const double a = panels[worst].a, b = panels[worst].b;
        const double m = 0.5 * (a + b);
        if (!(a < m && m < b)) break;  // interval exhausted at double precision
        for (std::size_t c = 0; c < N; ++c) total[c] -= panels[worst].value[c];
        total_err -= panels[worst].error;
        panels[worst] = detail::gk15(f, a, m);
        panels.push_back(detail::gk15(f, m, b));
        out.evaluations += 30;
        for (const auto* p : {&panels[worst], &panels.back()}) {
            for (std::size_t c = 0; c < N; ++c) total[c] += p->value[c];
            total_err += p->error;
        }
    }

    // re-sum to shed accumulated cancellation in the running totals
    total = {};
    total_err = 0.0;
    for (const auto& p : panels) {
        for (std::size_t c = 0; c < N; ++c) total[c] += p.value[c];
        total_err += p.error;
    }
    out.value = total;
    out.error = total_err;
    out.converged = false;
    return out;
}

}  // namespace entsim::quad
