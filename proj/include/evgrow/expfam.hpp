#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "evgrow/family.hpp"
#include "evgrow/numerics.hpp"
#include "evgrow/quadrature.hpp"

namespace evgrow {

namespace detail {

// Expands a bracket [lo, hi] in theta until mean_map straddles target (d = 1).
inline void bracket_mean_1d(const FamilySpec& fam, double target, double& lo, double& hi) {
    lo = -1.0;
    hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const bool lo_ok = fam.mean_map(vec1(lo))[0] < target;
        const bool hi_ok = fam.mean_map(vec1(hi))[0] > target;
        if (lo_ok && hi_ok) return;
        if (!lo_ok) lo *= 2.0;
        if (!hi_ok) hi *= 2.0;
    }
    throw NoConvergence("natural_of_mean: failed to bracket the target mean");
}

}  // namespace detail

// Inverse of the mean map: theta with mean_map(theta) = mu. Safeguarded
// Newton with bisection fallback for d = 1, damped Newton on grad logZ for
// d > 1. Tolerance 1e-10 componentwise, at most 200 iterations.
inline Vec natural_of_mean(const FamilySpec& fam, const Vec& mu) {
    if (!fam.mean_space.contains_interior(mu))
        throw MeanOutOfRange("natural_of_mean: mean outside the mean-value space");
    const double tol = 1e-10;
    if (fam.d == 1) {
        const double target = mu[0];
        double lo, hi;
        detail::bracket_mean_1d(fam, target, lo, hi);
        const double th = newton_increasing(
            [&](double t) { return fam.mean_map(vec1(t))[0]; },
            [&](double t) { return fam.covariance(vec1(t))(0, 0); }, target, lo, hi, tol);
        return vec1(th);
    }
    Vec theta = Vec::Zero(fam.d);
    Vec resid = fam.mean_map(theta) - mu;
    for (int it = 0; it < 200; ++it) {
        if (resid.lpNorm<Eigen::Infinity>() <= tol) return theta;
        const Mat cov = fam.covariance(theta);
        const Vec step = cov.ldlt().solve(-resid);
        double alpha = 1.0;
        for (int bt = 0; bt < 60; ++bt) {
            const Vec cand = theta + alpha * step;
            if (fam.natural_domain(cand)) {
                const Vec r = fam.mean_map(cand) - mu;
                if (r.norm() < resid.norm()) {
                    theta = cand;
                    resid = r;
                    break;
                }
            }
            alpha *= 0.5;
            if (bt == 59) throw NoConvergence("natural_of_mean: damped Newton stalled");
        }
    }
    throw NoConvergence("natural_of_mean: iteration budget exhausted");
}

// D(Pbar_mu || P0) at sample size n: n * (theta(mu)^T mu - logZ(theta(mu))).
inline double kl(const FamilySpec& fam, const Vec& mu, int n = 1) {
    const Vec theta = natural_of_mean(fam, mu);
    return n * (theta.dot(mu) - fam.log_partition(theta));
}

// D(Pbar_mu || Pbar_nu) at sample size n, in closed form from logZ.
inline double kl_between(const FamilySpec& fam, const Vec& mu, const Vec& nu, int n = 1) {
    const Vec th_mu = natural_of_mean(fam, mu);
    const Vec th_nu = natural_of_mean(fam, nu);
    return n * ((th_mu - th_nu).dot(mu) - fam.log_partition(th_mu) + fam.log_partition(th_nu));
}

// log pbar_mu(y) / p0(y) for the n-sample mean; equals kl(fam, mu, n) at y = mu.
inline double log_density_ratio(const FamilySpec& fam, const Vec& mu, const Vec& y,
                                int n = 1) {
    const Vec theta = natural_of_mean(fam, mu);
    return n * (theta.dot(y) - fam.log_partition(theta));
}

// Same ratio evaluated from a precomputed natural parameter (hot loops).
inline double log_density_ratio_at(const FamilySpec& fam, const Vec& theta, const Vec& y,
                                   int n = 1) {
    return n * (theta.dot(y) - fam.log_partition(theta));
}

struct Outcome {
    Vec y;
    double log_p;  // log-probability under P0 of the n-sample mean
};

namespace detail {

inline std::vector<Outcome> enumerate_two_atoms(const std::vector<Atom>& atoms, int n) {
    const Atom& a0 = atoms[0];
    const Atom& a1 = atoms[1];
    std::vector<Outcome> out;
    out.reserve(n + 1);
    for (int m = 0; m <= n; ++m) {
        const double log_binom =
            std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
        Vec y = (double(m) / n) * a1.y + (double(n - m) / n) * a0.y;
        if (m == n) y = a1.y;  // keep extreme outcomes exactly on the atoms
        if (m == 0) y = a0.y;
        out.push_back({std::move(y), log_binom + m * a1.log_w + (n - m) * a0.log_w});
    }
    return out;
}

// n-fold convolution over an integer lattice, in log space. Atoms must sit at
// base + step * index for integer indices.
inline std::vector<Outcome> enumerate_lattice(const std::vector<Atom>& atoms, int n,
                                              double base, double step,
                                              const std::vector<int>& idx,
                                              std::int64_t cap) {
    const int max_idx = *std::max_element(idx.begin(), idx.end());
    const std::int64_t size = std::int64_t(max_idx) * n + 1;
    if (size > cap) throw TooLarge("enumerate_outcomes: lattice size exceeds cap");
    std::vector<double> cur(1, 0.0);  // log-probs of the partial sum, offset 0
    for (int draw = 0; draw < n; ++draw) {
        std::vector<double> next(cur.size() + max_idx, -kInf);
        for (std::size_t s = 0; s < cur.size(); ++s) {
            if (cur[s] == -kInf) continue;
            for (std::size_t a = 0; a < atoms.size(); ++a)
                next[s + idx[a]] = log_add_exp(next[s + idx[a]], cur[s] + atoms[a].log_w);
        }
        cur = std::move(next);
    }
    std::vector<Outcome> out;
    out.reserve(cur.size());
    for (std::size_t s = 0; s < cur.size(); ++s) {
        if (cur[s] == -kInf) continue;
        out.push_back({vec1((n * base + double(s) * step) / n), cur[s]});
    }
    return out;
}

}  // namespace detail

// Exact support of the n-sample mean of a discrete family, with log-masses
// under P0. Two-atom families collapse binomially to n + 1 outcomes; other
// one-dimensional families are convolved over their integer lattice.
inline std::vector<Outcome> enumerate_outcomes(const FamilySpec& fam, int n,
                                               std::int64_t cap = 4'000'000) {
    if (!fam.is_discrete()) throw NotDiscrete("enumerate_outcomes: continuous support");
    const auto& atoms = fam.discrete().atoms;
    if (atoms.size() == 1) return {{atoms[0].y, 0.0}};
    if (atoms.size() == 2) {
        if (n + 1 > cap) throw TooLarge("enumerate_outcomes: outcome count exceeds cap");
        return detail::enumerate_two_atoms(atoms, n);
    }
    if (fam.d != 1)
        throw TooLarge("enumerate_outcomes: multi-atom enumeration only for d = 1");
    // detect an arithmetic lattice
    double base = atoms[0].y[0];
    for (const auto& a : atoms) base = std::min(base, a.y[0]);
    double step = kInf;
    for (const auto& a : atoms)
        if (a.y[0] > base) step = std::min(step, a.y[0] - base);
    std::vector<int> idx;
    for (const auto& a : atoms) {
        const double k = (a.y[0] - base) / step;
        const double r = std::round(k);
        if (std::abs(k - r) > 1e-9 * std::max(1.0, std::abs(k)))
            throw TooLarge("enumerate_outcomes: atoms not on a lattice");
        idx.push_back(int(r));
    }
    return detail::enumerate_lattice(atoms, n, base, step, idx, cap);
}

// One draw of the n-sample mean under the family member with mean mu,
// deterministic given cfg.seed.
inline Vec sample_mean(const FamilySpec& fam, const Vec& mu, const SampleConfig& cfg) {
    cfg.validate();
    if (!fam.mean_space.contains_interior(mu))
        throw MeanOutOfRange("sample_mean: mean outside the mean-value space");
    std::mt19937_64 rng(cfg.seed);
    if (fam.is_discrete()) {
        const Vec theta = natural_of_mean(fam, mu);
        const double lz = fam.log_partition(theta);
        const auto& atoms = fam.discrete().atoms;
        std::vector<double> probs;
        probs.reserve(atoms.size());
        for (const auto& a : atoms)
            probs.push_back(std::exp(a.log_w + theta.dot(a.y) - lz));
        std::discrete_distribution<int> pick(probs.begin(), probs.end());
        Vec sum = Vec::Zero(fam.d);
        for (int i = 0; i < cfg.n; ++i) sum += atoms[pick(rng)].y;
        return sum / cfg.n;
    }
    const auto& cs = fam.continuous();
    Vec sum = Vec::Zero(fam.d);
    for (int i = 0; i < cfg.n; ++i) sum += cs.sample_x(mu, rng);
    return sum / cfg.n;
}

// E over the law of the n-sample mean under Pbar_mu of a scalar integrand.
// Exact tilted sums for discrete families; adaptive quadrature for d = 1
// continuous families.
inline double expect_mean_law(const FamilySpec& fam, const Vec& mu, int n,
                              const std::function<double(const Vec&)>& f,
                              double abs_tol = 1e-10) {
    if (fam.is_discrete()) {
        const Vec theta = natural_of_mean(fam, mu);
        const double lz = fam.log_partition(theta);
        double total = 0.0;
        for (const auto& o : enumerate_outcomes(fam, n)) {
            const double log_mass = o.log_p + n * (theta.dot(o.y) - lz);
            total += std::exp(log_mass) * f(o.y);
        }
        return total;
    }
    if (fam.d != 1)
        throw UnsupportedDimension("expect_mean_law: continuous quadrature only for d = 1");
    const auto& cs = fam.continuous();
    auto integrand = [&](double y) {
        const Vec yv = vec1(y);
        const double ld = cs.log_density_mean_n(mu, yv, n);
        // the density underflows long before any tilt factor overflows;
        // skipping the tail avoids 0 * inf at the extreme quadrature nodes
        if (!(ld > -700.0)) return 0.0;
        return std::exp(ld) * f(yv);
    };
    return integrate(integrand, cs.lo[0], cs.hi[0], abs_tol);
}

// Legendre transform of logZ at y for d = 1: the best achievable log-ratio
// sup_mu log pbar_mu(y)/p0(y) at sample size n. Interior outcomes give
// n * kl(y); extreme discrete atoms give the -n log-weight limit.
inline double sup_log_ratio_1d(const FamilySpec& fam, const Vec& y, int n) {
    if (fam.d != 1) throw UnsupportedDimension("sup_log_ratio_1d: requires d = 1");
    if (fam.mean_space.contains_interior(y)) return kl(fam, y, n);
    if (fam.is_discrete()) {
        const auto& atoms = fam.discrete().atoms;
        for (const auto& a : atoms)
            if (std::abs(a.y[0] - y[0]) <= 1e-12 * std::max(1.0, std::abs(a.y[0])))
                return -n * a.log_w;
    }
    throw MeanOutOfRange("sup_log_ratio_1d: outcome outside the closed mean space");
}

}  // namespace evgrow
