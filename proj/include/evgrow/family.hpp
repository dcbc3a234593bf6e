#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "evgrow/errors.hpp"
#include "evgrow/numerics.hpp"

namespace evgrow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Vec vec1(double x) {
    Vec v(1);
    v << x;
    return v;
}

inline Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

// One support point of a discrete null with its base log-weight.
struct Atom {
    Vec y;
    double log_w;
};

struct DiscreteSupport {
    std::vector<Atom> atoms;
};

struct ContinuousSupport {
    // log-density of P0 w.r.t. Lebesgue measure
    std::function<double(const Vec&)> log_density0;
    // log-density of the n-sample mean Y under the family member with mean mu;
    // at n = 1 this must coincide with the tilted single-outcome density
    std::function<double(const Vec& mu, const Vec& y, int n)> log_density_mean_n;
    // one draw of X under the family member with mean mu
    std::function<Vec(const Vec& mu, std::mt19937_64&)> sample_x;
    // optional: one draw of the n-sample mean directly (fast path when the
    // mean's law has a closed form); falls back to averaging n draws
    std::function<Vec(const Vec& mu, int n, std::mt19937_64&)> sample_mean_direct;
    // integration domain per coordinate (entries may be +-inf)
    Vec lo, hi;
};

using Support = std::variant<DiscreteSupport, ContinuousSupport>;

// Axis-aligned descriptor of the attainable-means region M. All shipped
// families have box-shaped (possibly unbounded) mean spaces.
struct MeanSpace {
    Vec lo, hi;  // open box (lo, hi)

    bool contains_interior(const Vec& mu, double margin = 0.0) const {
        for (Eigen::Index i = 0; i < mu.size(); ++i)
            if (!(mu[i] > lo[i] + margin && mu[i] < hi[i] - margin)) return false;
        return true;
    }
};

struct SampleConfig {
    int n = 1;
    std::uint64_t seed = 0;
    std::int64_t mc_samples = 1'000'000;

    void validate() const {
        if (n < 1) throw ConfigError("SampleConfig: n must be >= 1");
        if (mc_samples < 1) throw ConfigError("SampleConfig: mc_samples must be >= 1");
    }
};

// A natural exponential family generated by a zero-mean null P0. The family
// for the n-sample mean is represented implicitly through the multiplier n in
// the operations; no separate FamilySpec is ever derived for it.
struct FamilySpec {
    std::string name;
    int d = 1;
    std::function<double(const Vec&)> log_partition;
    std::function<bool(const Vec&)> natural_domain;
    std::function<Vec(const Vec&)> mean_map;
    std::function<Mat(const Vec&)> covariance;  // Hessian of log_partition
    Support support;
    MeanSpace mean_space;
    // density depends on y - mu only through its norm (enables closed-form
    // boundary MLEs over spheres)
    bool isotropic = false;
    std::vector<std::pair<std::string, double>> metadata;

    bool is_discrete() const { return std::holds_alternative<DiscreteSupport>(support); }
    const DiscreteSupport& discrete() const { return std::get<DiscreteSupport>(support); }
    const ContinuousSupport& continuous() const {
        return std::get<ContinuousSupport>(support);
    }
};

namespace detail {

// Generic parameter maps for a finite-support family, computed directly from
// the atom table. Exact up to rounding, so truncated families stay
// self-consistent with their own enumeration oracles.
inline double discrete_log_partition(const std::vector<Atom>& atoms, const Vec& theta) {
    std::vector<double> terms;
    terms.reserve(atoms.size());
    for (const auto& a : atoms) terms.push_back(a.log_w + theta.dot(a.y));
    return log_sum_exp(terms);
}

inline Vec discrete_mean(const std::vector<Atom>& atoms, const Vec& theta) {
    const double lz = discrete_log_partition(atoms, theta);
    Vec mu = Vec::Zero(theta.size());
    for (const auto& a : atoms) mu += std::exp(a.log_w + theta.dot(a.y) - lz) * a.y;
    return mu;
}

inline Mat discrete_cov(const std::vector<Atom>& atoms, const Vec& theta) {
    const double lz = discrete_log_partition(atoms, theta);
    const Vec mu = discrete_mean(atoms, theta);
    Mat cov = Mat::Zero(theta.size(), theta.size());
    for (const auto& a : atoms) {
        const Vec c = a.y - mu;
        cov += std::exp(a.log_w + theta.dot(a.y) - lz) * (c * c.transpose());
    }
    return cov;
}

inline FamilySpec make_discrete_family(std::string name, int d, std::vector<Atom> atoms,
                                       MeanSpace space) {
    FamilySpec fam;
    fam.name = std::move(name);
    fam.d = d;
    fam.support = DiscreteSupport{atoms};
    fam.mean_space = std::move(space);
    fam.log_partition = [atoms](const Vec& th) { return discrete_log_partition(atoms, th); };
    fam.natural_domain = [](const Vec&) { return true; };
    fam.mean_map = [atoms](const Vec& th) { return discrete_mean(atoms, th); };
    fam.covariance = [atoms](const Vec& th) { return discrete_cov(atoms, th); };
    return fam;
}

}  // namespace detail

// Standard normal location family on R^d with identity covariance.
inline FamilySpec gaussian_location(int d) {
    FamilySpec fam;
    fam.name = "gaussian(" + std::to_string(d) + ")";
    fam.d = d;
    fam.log_partition = [](const Vec& th) { return 0.5 * th.squaredNorm(); };
    fam.natural_domain = [](const Vec&) { return true; };
    fam.mean_map = [](const Vec& th) { return th; };
    fam.covariance = [d](const Vec&) { return Mat::Identity(d, d); };
    ContinuousSupport cs;
    cs.log_density0 = [d](const Vec& y) {
        return -0.5 * d * std::log(2.0 * M_PI) - 0.5 * y.squaredNorm();
    };
    cs.log_density_mean_n = [d](const Vec& mu, const Vec& y, int n) {
        return -0.5 * d * std::log(2.0 * M_PI / n) - 0.5 * n * (y - mu).squaredNorm();
    };
    cs.sample_x = [d](const Vec& mu, std::mt19937_64& rng) {
        std::normal_distribution<double> z(0.0, 1.0);
        Vec x(d);
        for (int i = 0; i < d; ++i) x[i] = mu[i] + z(rng);
        return x;
    };
    cs.sample_mean_direct = [d](const Vec& mu, int n, std::mt19937_64& rng) {
        std::normal_distribution<double> z(0.0, 1.0);
        const double scale = 1.0 / std::sqrt(double(n));
        Vec y(d);
        for (int i = 0; i < d; ++i) y[i] = mu[i] + scale * z(rng);
        return y;
    };
    cs.lo = Vec::Constant(d, -kInf);
    cs.hi = Vec::Constant(d, kInf);
    fam.support = std::move(cs);
    fam.mean_space = MeanSpace{Vec::Constant(d, -kInf), Vec::Constant(d, kInf)};
    fam.isotropic = true;
    return fam;
}

// Two-atom family on {1/p, -1/(1-p)}: the centered, scaled Bernoulli whose
// n-sample mean is a linear transform of a Binomial(n, p) count.
inline FamilySpec scaled_bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("scaled_bernoulli: p must be in (0,1)");
    const double y_plus = 1.0 / p;
    const double y_minus = -1.0 / (1.0 - p);
    std::vector<Atom> atoms{{vec1(y_minus), std::log1p(-p)}, {vec1(y_plus), std::log(p)}};
    MeanSpace space{vec1(y_minus), vec1(y_plus)};
    auto fam = detail::make_discrete_family("scaled_bernoulli(" + std::to_string(p) + ")",
                                            1, std::move(atoms), std::move(space));
    fam.metadata.emplace_back("p", p);
    return fam;
}

// Poisson(lambda0) shifted to zero mean, with the support truncated where the
// null upper-tail mass drops below 1e-14 and the retained weights renormalized.
inline FamilySpec poisson(double lambda0) {
    if (!(lambda0 > 0.0)) throw ConfigError("poisson: lambda0 must be > 0");
    const double tail_cut = 1e-14;
    std::vector<double> log_pmf;
    double cum = 0.0;
    for (int k = 0;; ++k) {
        const double lp = k * std::log(lambda0) - lambda0 - std::lgamma(k + 1.0);
        log_pmf.push_back(lp);
        cum += std::exp(lp);
        if (k > lambda0 && 1.0 - cum < tail_cut) break;
        if (k > 10'000) throw NoConvergence("poisson: truncation point not found");
    }
    const double norm = log_sum_exp(log_pmf);
    std::vector<Atom> atoms;
    atoms.reserve(log_pmf.size());
    for (std::size_t k = 0; k < log_pmf.size(); ++k)
        atoms.push_back({vec1(double(k) - lambda0), log_pmf[k] - norm});
    MeanSpace space{vec1(-lambda0), vec1(double(log_pmf.size() - 1) - lambda0)};
    auto fam = detail::make_discrete_family("poisson(" + std::to_string(lambda0) + ")", 1,
                                            std::move(atoms), std::move(space));
    fam.metadata.emplace_back("lambda0", lambda0);
    fam.metadata.emplace_back("truncation_k", double(log_pmf.size() - 1));
    return fam;
}

// Construction-invariant audit used by the verification suite. Returns a list
// of violated invariants; empty means the family description is coherent.
inline std::vector<std::string> check_family_invariants(const FamilySpec& fam) {
    std::vector<std::string> bad;
    const Vec zero = Vec::Zero(fam.d);
    if (std::abs(fam.log_partition(zero)) > 1e-12) bad.push_back("log_partition(0) != 0");
    if (fam.mean_map(zero).norm() > 1e-10) bad.push_back("mean_map(0) != 0");
    if (fam.is_discrete()) {
        std::vector<double> lw;
        for (const auto& a : fam.discrete().atoms) lw.push_back(a.log_w);
        if (std::abs(std::exp(log_sum_exp(lw)) - 1.0) > 1e-12)
            bad.push_back("discrete base weights do not sum to 1");
    }
    if (fam.d == 1) {
        // strict convexity of logZ <=> strictly increasing mean map
        double prev = -kInf;
        bool increasing = true;
        for (int i = 0; i <= 40; ++i) {
            const double th = -2.0 + 4.0 * i / 40.0;
            const double m = fam.mean_map(vec1(th))[0];
            if (!(m > prev)) increasing = false;
            prev = m;
        }
        if (!increasing) bad.push_back("mean_map not strictly increasing on grid");
    }
    return bad;
}

}  // namespace evgrow
