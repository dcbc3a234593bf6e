#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "evgrow/evariable.hpp"
#include "evgrow/expfam.hpp"

namespace evgrow {

// Finitely supported prior W on boundary mean points, with the Bayes mixture
// log-density relative to p0.
struct BoundaryPrior {
    std::vector<std::pair<Vec, double>> atoms;  // (mean, weight)
    std::function<double(const Vec&)> log_mixture_ratio;
};

namespace detail {

struct TwoPointMixture {
    Vec th_minus, th_plus;
    double lz_minus, lz_plus;
    double lw_minus, lw_plus;  // log prior weights
    int n;

    double log_ratio(const Vec& y) const {
        const double l_minus = lw_minus + n * (th_minus.dot(y) - lz_minus);
        const double l_plus = lw_plus + n * (th_plus.dot(y) - lz_plus);
        return log_add_exp(l_minus, l_plus);
    }
};

inline TwoPointMixture make_mixture(const FamilySpec& fam, double mu_minus, double mu_plus,
                                    double w, int n) {
    TwoPointMixture mix;
    mix.th_minus = natural_of_mean(fam, vec1(mu_minus));
    mix.th_plus = natural_of_mean(fam, vec1(mu_plus));
    mix.lz_minus = fam.log_partition(mix.th_minus);
    mix.lz_plus = fam.log_partition(mix.th_plus);
    mix.lw_minus = w < 1.0 ? std::log1p(-w) : -kInf;
    mix.lw_plus = w > 0.0 ? std::log(w) : -kInf;
    mix.n = n;
    return mix;
}

inline void check_surround_preconditions(const FamilySpec& fam, double mu_minus,
                                         double mu_plus) {
    if (fam.d != 1) throw UnsupportedDimension("surround1d: requires d = 1");
    if (!(mu_minus < 0.0 && 0.0 < mu_plus))
        throw MeanOutOfRange("surround1d: needs mu_minus < 0 < mu_plus");
    if (!fam.mean_space.contains_interior(vec1(mu_minus)) ||
        !fam.mean_space.contains_interior(vec1(mu_plus)))
        throw MeanOutOfRange("surround1d: boundary points must be interior means");
}

}  // namespace detail

// f(mu, w) = E_{Pbar_mu}[ log( ((1-w) pbar_{mu-} + w pbar_{mu+})(Y) / p0(Y) ) ]
// at sample size n; the balance objective of the two-point boundary prior.
inline double balance_objective(const FamilySpec& fam, double mu_minus, double mu_plus,
                                double mu, double w, int n) {
    detail::check_surround_preconditions(fam, mu_minus, mu_plus);
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("balance_objective: w must be in [0,1]");
    if (!fam.mean_space.contains_interior(vec1(mu)))
        throw MeanOutOfRange("balance_objective: evaluation mean out of range");
    const auto mix = detail::make_mixture(fam, mu_minus, mu_plus, w, n);
    return expect_mean_law(fam, vec1(mu), n,
                           [&mix](const Vec& y) { return mix.log_ratio(y); });
}

struct BalanceResult {
    double w0 = 0.5;
    BoundaryPrior prior;
    double residual = 0.0;  // |f(mu-, w0) - f(mu+, w0)|
};

// Solves the balance equation f(mu-, w) = f(mu+, w) for the prior weight on
// mu+. The difference h(w) is positive at w = 0 and negative at w = 1, so
// bisection (tolerance 1e-12 in w) is unconditionally safe.
inline BalanceResult solve_balance(const FamilySpec& fam, double mu_minus, double mu_plus,
                                   int n) {
    detail::check_surround_preconditions(fam, mu_minus, mu_plus);
    auto h = [&](double w) {
        return balance_objective(fam, mu_minus, mu_plus, mu_minus, w, n) -
               balance_objective(fam, mu_minus, mu_plus, mu_plus, w, n);
    };
    if (!(h(0.0) > 0.0 && h(1.0) < 0.0))
        throw BracketFailure("solve_balance: endpoint signs do not bracket");
    const double w0 = bisect(h, 0.0, 1.0, 1e-12);
    BalanceResult res;
    res.w0 = w0;
    res.residual = std::abs(h(w0));
    if (res.residual >= 1e-9)
        throw NoConvergence("solve_balance: residual above 1e-9 after bisection");
    const auto mix = detail::make_mixture(fam, mu_minus, mu_plus, w0, n);
    res.prior.atoms = {{vec1(mu_minus), 1.0 - w0}, {vec1(mu_plus), w0}};
    res.prior.log_mixture_ratio = [mix](const Vec& y) { return mix.log_ratio(y); };
    return res;
}

struct SurroundGrow {
    EVariable ev;
    double w0 = 0.5;
    double grow_direct = 0.0;   // D(Pbar_W* || P0) by quadrature/enumeration
    double grow_balance = 0.0;  // the f(mu-, w0) route of the balance identity
};

// The d = 1 surrounding GROW e-variable: the boundary mixture under the
// balance-equation prior. grow_value is computed by two independent routes
// which must agree to 1e-8.
inline SurroundGrow grow_surround_1d(const FamilySpec& fam, double mu_minus,
                                     double mu_plus, int n) {
    const BalanceResult bal = solve_balance(fam, mu_minus, mu_plus, n);
    const auto mix = detail::make_mixture(fam, mu_minus, mu_plus, bal.w0, n);

    SurroundGrow out;
    out.w0 = bal.w0;
    out.grow_balance = balance_objective(fam, mu_minus, mu_plus, mu_minus, bal.w0, n);

    // direct route: expectation of the log-ratio under the mixture law itself
    auto log_ratio = [mix](const Vec& y) { return mix.log_ratio(y); };
    const double part_minus = expect_mean_law(fam, vec1(mu_minus), n, log_ratio);
    const double part_plus = expect_mean_law(fam, vec1(mu_plus), n, log_ratio);
    out.grow_direct = (1.0 - bal.w0) * part_minus + bal.w0 * part_plus;
    if (std::abs(out.grow_direct - out.grow_balance) > 1e-8)
        throw NoConvergence("grow_surround_1d: the two growth-rate routes disagree");

    out.ev.log_value = log_ratio;
    out.ev.grow_value = out.grow_direct;
    out.ev.provenance = Provenance::surround_mixture;
    out.ev.family = fam.name;
    out.ev.n = n;
    return out;
}

// Adjacent grid pairs violating the expected monotonicity of f(., w0): f must
// increase on {mu >= mu_plus} and decrease on {mu <= mu_minus}. An empty
// result means the Lemma-1 shape holds on the grid.
inline std::vector<std::pair<double, double>> monotonicity_scan(
    const FamilySpec& fam, double mu_minus, double mu_plus, double w0,
    const std::vector<double>& grid, int n) {
    detail::check_surround_preconditions(fam, mu_minus, mu_plus);
    std::vector<double> left, right;
    for (double mu : grid) {
        if (mu <= mu_minus) left.push_back(mu);
        if (mu >= mu_plus) right.push_back(mu);
    }
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    auto f = [&](double mu) { return balance_objective(fam, mu_minus, mu_plus, mu, w0, n); };
    std::vector<std::pair<double, double>> violations;
    auto scan = [&](const std::vector<double>& side, double dir) {
        if (side.size() < 2) return;
        double prev = f(side.front());
        for (std::size_t i = 1; i < side.size(); ++i) {
            const double cur = f(side[i]);
            if (dir * (cur - prev) < -1e-10)
                violations.emplace_back(side[i - 1], side[i]);
            prev = cur;
        }
    };
    scan(left, -1.0);  // decreasing towards mu_minus from the left tail
    scan(right, 1.0);
    return violations;
}

}  // namespace evgrow
