#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "evgrow/evariable.hpp"
#include "evgrow/expfam.hpp"
#include "evgrow/meanset.hpp"

namespace evgrow {

struct Projection {
    Vec mu_star;
    double kkt_residual;
};

// Seeded rejection sampler for probe means in M1 (intersected with the open
// mean space), drawn from a bounded window around the anchor point.
inline std::vector<Vec> probe_means(const FamilySpec& fam, const MeanSet& set,
                                    const Vec& anchor, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double radius = 2.0 * (1.0 + anchor.norm());
    std::vector<Vec> probes;
    probes.reserve(count);
    int guard = 0;
    while (int(probes.size()) < count) {
        if (++guard > 100'000 * count)
            throw NoConvergence("probe_means: rejection sampling stalled");
        Vec mu(fam.d);
        for (int i = 0; i < fam.d; ++i) {
            double lo = std::max(fam.mean_space.lo[i], anchor[i] - radius);
            double hi = std::min(fam.mean_space.hi[i], anchor[i] + radius);
            mu[i] = lo + (hi - lo) * u(rng);
        }
        if (set.contains(fam, mu) && fam.mean_space.contains_interior(mu, 1e-9))
            probes.push_back(std::move(mu));
    }
    return probes;
}

namespace detail {

// Euclidean projection of x onto an intersection of halfspaces, by Dykstra's
// algorithm. Throws InfeasibleSet when the intersection appears empty.
inline Vec dykstra_project(const ConvexPolytope& poly, Vec x, double tol = 1e-12,
                           int max_pass = 20'000) {
    std::vector<Vec> corr(poly.faces.size(), Vec::Zero(x.size()));
    for (int pass = 0; pass < max_pass; ++pass) {
        double moved = 0.0;
        for (std::size_t i = 0; i < poly.faces.size(); ++i) {
            const auto& [v, a] = poly.faces[i];
            const Vec y = x + corr[i];
            Vec proj = y;
            const double gap = a - v.dot(y);
            if (gap > 0.0) proj = y + gap * v;
            corr[i] = y - proj;
            moved += (proj - x).norm();
            x = proj;
        }
        if (moved <= tol) break;
    }
    for (const auto& [v, a] : poly.faces)
        if (v.dot(x) < a - 1e-9)
            throw InfeasibleSet("polytope: no feasible point found");
    return x;
}

inline Projection project_halfspace(const FamilySpec& fam, const HalfSpace& hs) {
    // KKT: the minimizer satisfies theta(mu*) = lambda v with v^T mu* = a,
    // so mu* = mean_map(lambda v) for the unique lambda >= 0 solving
    // v^T mean_map(lambda v) = a. The map is strictly increasing in lambda.
    auto g = [&](double lam) { return hs.v.dot(fam.mean_map(lam * hs.v)); };
    double hi = 1.0;
    bool bracketed = false;
    for (int it = 0; it < 200; ++it) {
        if (g(hi) > hs.a) {
            bracketed = true;
            break;
        }
        hi *= 2.0;
    }
    if (!bracketed)
        throw InfeasibleSet("halfspace: offset unreachable within the mean space");
    const double lam = newton_increasing(
        g, [&](double t) { return hs.v.dot(fam.covariance(t * hs.v) * hs.v); }, hs.a, 0.0,
        hi, 1e-12 * std::max(1.0, std::abs(hs.a)));
    const Vec mu_star = fam.mean_map(lam * hs.v);
    if (!fam.mean_space.contains_interior(mu_star))
        throw InfeasibleSet("halfspace: projection left the mean space");
    return {mu_star, std::abs(hs.v.dot(mu_star) - hs.a)};
}

inline Projection project_interval(const FamilySpec& fam, const Interval1D& iv) {
    // KL is strictly increasing in |mu|, so the minimizer is the endpoint
    // nearest to 0.
    const double mu = iv.lo > 0.0 ? iv.lo : iv.hi;
    if (!fam.mean_space.contains_interior(vec1(mu)))
        throw InfeasibleSet("interval: endpoint outside the mean space");
    return {vec1(mu), 0.0};
}

inline Projection project_polytope(const FamilySpec& fam, const ConvexPolytope& poly) {
    Vec mu = dykstra_project(poly, Vec::Zero(fam.d));
    double kl_mu = kl(fam, mu, 1);
    double residual = kInf;
    for (int it = 0; it < 5'000; ++it) {
        const Vec grad = natural_of_mean(fam, mu);  // grad of kl in mu is theta(mu)
        const Vec proj_step = dykstra_project(poly, mu - grad);
        residual = (mu - proj_step).norm() / (1.0 + grad.norm());
        if (residual <= 1e-8) break;
        double eta = 1.0;
        for (int bt = 0; bt < 60; ++bt) {
            const Vec cand = dykstra_project(poly, mu - eta * grad);
            const double kl_cand = kl(fam, cand, 1);
            if (kl_cand < kl_mu) {
                mu = cand;
                kl_mu = kl_cand;
                break;
            }
            eta *= 0.5;
            if (bt == 59) return {mu, residual};  // at the constrained minimum
        }
    }
    if (residual > 1e-8)
        throw NoConvergence("polytope projection: gradient residual did not converge");
    return {mu, residual};
}

}  // namespace detail

// Information projection of P0 onto a convex mean set: the mu* in M1 uniquely
// minimizing D(Pbar_mu || P0). Audits the result against 100 seeded probes.
inline Projection info_project_convex(const FamilySpec& fam, const MeanSet& set) {
    if (!set.is_convex_variant())
        throw Error("info_project_convex: mean set is not a convex variant");
    if (set.contains(fam, Vec::Zero(fam.d)))
        throw Degenerate("info_project_convex: null mean lies in closure(M1)");
    Projection proj = std::visit(
        [&](const auto& s) -> Projection {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, HalfSpace>)
                return detail::project_halfspace(fam, s);
            else if constexpr (std::is_same_v<T, Interval1D>)
                return detail::project_interval(fam, s);
            else if constexpr (std::is_same_v<T, ConvexPolytope>)
                return detail::project_polytope(fam, s);
            else
                throw Error("info_project_convex: unsupported variant");
        },
        set.variant());
    const double kl_star = kl(fam, proj.mu_star, 1);
    for (const Vec& mu : probe_means(fam, set, proj.mu_star, 100, 0x9e1d7a5b)) {
        if (kl(fam, mu, 1) < kl_star - 1e-9)
            throw NoConvergence("info_project_convex: probe beats the claimed minimum");
    }
    return proj;
}

// The convex-case GROW e-variable S = pbar_{mu*}(Y) / p0(Y) at sample size n,
// with grow_value = D(Pbar_{mu*} || P0) = n * kl(mu*, 1).
inline EVariable grow_convex(const FamilySpec& fam, const MeanSet& set, int n) {
    const Projection proj = info_project_convex(fam, set);
    const Vec theta = natural_of_mean(fam, proj.mu_star);
    const double log_z = fam.log_partition(theta);
    EVariable ev;
    ev.log_value = [theta, log_z, n](const Vec& y) {
        return n * (theta.dot(y) - log_z);
    };
    ev.grow_value = n * (theta.dot(proj.mu_star) - log_z);
    ev.provenance = Provenance::convex_grow;
    ev.family = fam.name;
    ev.n = n;
    return ev;
}

// Pythagorean inequality residuals D(P||P0) - D(P||P1*) - D(P1*||P0) for the
// given probe means; each must be >= 0 up to rounding.
inline std::vector<double> pythagorean_residuals(const FamilySpec& fam, const MeanSet& set,
                                                 const std::vector<Vec>& probes) {
    const Projection proj = info_project_convex(fam, set);
    const double kl_star = kl(fam, proj.mu_star, 1);
    std::vector<double> residuals;
    residuals.reserve(probes.size());
    for (const Vec& mu : probes)
        residuals.push_back(kl(fam, mu, 1) - kl_between(fam, mu, proj.mu_star, 1) - kl_star);
    return residuals;
}

}  // namespace evgrow
