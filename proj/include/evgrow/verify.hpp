#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "evgrow/csc_convex.hpp"
#include "evgrow/nml.hpp"
#include "evgrow/projection.hpp"
#include "evgrow/surround1d.hpp"

namespace evgrow {

struct PropertyResult {
    std::string name;
    std::string config;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline double bern_y_mean(double p, double q) { return (q - p) / (p * (1.0 - p)); }

inline void check_normalization(std::vector<PropertyResult>& out, const FamilySpec& fam,
                                const EVariable& ev, const std::string& cfg,
                                const SampleConfig& mc) {
    const auto ne = e_variable_null_expectation(fam, ev, mc);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "E_P0[S]=%.10g kind=%s se=%.3g", ne.value,
                  ne.kind.c_str(), ne.se);
    out.push_back({"e-variable-normalization", cfg, ne.within_e_bound(), buf});
}

}  // namespace detail

// The default verification suite: construction invariants, e-variable
// normalizations, Pythagorean residuals, Lemma-1 monotonicity, balance
// residuals, constant regret and bound validity on the shipped configs.
// Monte Carlo checks carry 3-SE slack, so verdicts are seed-stable.
inline std::vector<PropertyResult> run_verify_suite(std::uint64_t seed,
                                                    std::int64_t mc_samples = 200'000) {
    std::vector<PropertyResult> out;
    SampleConfig mc;
    mc.seed = seed;
    mc.mc_samples = mc_samples;

    const auto gauss1 = gaussian_location(1);
    const auto gauss2 = gaussian_location(2);
    const auto bern = scaled_bernoulli(0.3);
    const auto pois = poisson(2.0);

    // construction invariants
    for (const auto* fam : {&gauss1, &gauss2, &bern, &pois}) {
        const auto bad = check_family_invariants(*fam);
        std::string detail = bad.empty() ? "all invariants hold" : bad.front();
        out.push_back({"family-invariants", fam->name, bad.empty(), detail});
    }

    // e-variable normalizations across the three constructions
    detail::check_normalization(out, gauss1,
                                grow_convex(gauss1, MeanSet::interval(1.0, kInf), 1),
                                "convex gaussian(1) [1,inf)", mc);
    detail::check_normalization(
        out, gauss2, grow_convex(gauss2, MeanSet::half_space(vec2(1.0, 0.0), 2.0), 1),
        "convex gaussian(2) halfspace a=2", mc);
    detail::check_normalization(
        out, bern,
        grow_convex(bern, MeanSet::interval(detail::bern_y_mean(0.3, 0.5), kInf), 30),
        "convex scaled_bernoulli(0.3) n=30", mc);
    detail::check_normalization(out, gauss1, grow_surround_1d(gauss1, -1.0, 1.0, 1).ev,
                                "surround gaussian(1) (-1,1)", mc);
    {
        const auto set = MeanSet::surround_interval(-1.0, 1.0);
        const auto part =
            PartitionSpec::cones({vec1(-1.0), vec1(1.0)}, EstimatorKind::boundary_mle);
        detail::check_normalization(out, gauss1, nml_evariable(gauss1, set, part, 1),
                                    "nml gaussian(1) two-point", mc);
    }
    {
        const auto set = MeanSet::surround_interval(-0.5, 0.8);
        const auto part = PartitionSpec::cones({vec1(-0.5), vec1(0.8)},
                                               EstimatorKind::boundary_mle);
        detail::check_normalization(out, bern, nml_evariable(bern, set, part, 20),
                                    "nml scaled_bernoulli(0.3) n=20", mc);
    }

    // Pythagorean residuals on two convex configs
    {
        const auto set = MeanSet::half_space(vec2(1.0, 0.0), 2.0);
        const auto proj = info_project_convex(gauss2, set);
        const auto probes = probe_means(gauss2, set, proj.mu_star, 100, seed ^ 0x11);
        double worst = kInf;
        for (double r : pythagorean_residuals(gauss2, set, probes))
            worst = std::min(worst, r);
        out.push_back({"pythagorean-residuals", "gaussian(2) halfspace a=2",
                       worst >= -1e-9, "min residual " + std::to_string(worst)});
    }
    {
        const auto set = MeanSet::interval(detail::bern_y_mean(0.3, 0.5), kInf);
        const auto proj = info_project_convex(bern, set);
        const auto probes = probe_means(bern, set, proj.mu_star, 100, seed ^ 0x12);
        double worst = kInf;
        for (double r : pythagorean_residuals(bern, set, probes))
            worst = std::min(worst, r);
        out.push_back({"pythagorean-residuals", "scaled_bernoulli(0.3) interval",
                       worst >= -1e-9, "min residual " + std::to_string(worst)});
    }

    // balance residuals and two-route growth agreement
    for (const auto& [famp, lo, hi] :
         {std::tuple<const FamilySpec*, double, double>{&gauss1, -1.0, 1.0},
          {&gauss1, -1.0, 2.0},
          {&bern, -0.5, 0.8}}) {
        std::string cfg = famp->name + " (" + std::to_string(lo) + "," +
                          std::to_string(hi) + ")";
        try {
            const auto g = grow_surround_1d(*famp, lo, hi, 1);
            const auto bal = solve_balance(*famp, lo, hi, 1);
            char buf[128];
            std::snprintf(buf, sizeof(buf), "w0=%.12g residual=%.3g", bal.w0,
                          bal.residual);
            out.push_back({"balance-residual", cfg, bal.residual < 1e-9, buf});
        } catch (const Error& e) {
            out.push_back({"balance-residual", cfg, false, e.what()});
        }
    }

    // Lemma-1 monotonicity scans
    {
        const auto g = grow_surround_1d(gauss1, -1.0, 1.0, 1);
        std::vector<double> grid;
        for (int i = 0; i < 200; ++i) grid.push_back(1.0 + 3.0 * i / 199.0);
        for (int i = 0; i < 200; ++i) grid.push_back(-1.0 - 3.0 * i / 199.0);
        const auto bad = monotonicity_scan(gauss1, -1.0, 1.0, g.w0, grid, 1);
        out.push_back({"monotonicity-scan", "gaussian(1) (-1,1)", bad.empty(),
                       std::to_string(bad.size()) + " violations"});
    }
    {
        const auto g = grow_surround_1d(bern, -0.5, 0.8, 1);
        std::vector<double> grid;
        for (int i = 0; i < 200; ++i) grid.push_back(0.8 + 2.4 * i / 199.0);
        for (int i = 0; i < 200; ++i) grid.push_back(-0.5 - 0.9 * i / 199.0);
        const auto bad = monotonicity_scan(bern, -0.5, 0.8, g.w0, grid, 1);
        out.push_back({"monotonicity-scan", "scaled_bernoulli(0.3) (-0.5,0.8)",
                       bad.empty(), std::to_string(bad.size()) + " violations"});
    }

    // constant regret of the Shtarkov e-variable
    {
        const auto set = MeanSet::surround_interval(-1.0, 1.0);
        const auto part =
            PartitionSpec::cones({vec1(-1.0), vec1(1.0)}, EstimatorKind::boundary_mle);
        const auto ev = nml_evariable(gauss1, set, part, 2);
        std::mt19937_64 rng(seed ^ 0x21);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        double lo = kInf, hi = -kInf;
        for (int i = 0; i < 100; ++i) {
            const Vec y = vec1(u(rng));
            const Vec r = estimate_r(gauss1, set, part, y);
            const double reg = log_density_ratio(gauss1, r, y, 2) - ev.log_value(y);
            lo = std::min(lo, reg);
            hi = std::max(hi, reg);
        }
        out.push_back({"constant-regret", "gaussian(1) two-point n=2", hi - lo < 1e-9,
                       "spread " + std::to_string(hi - lo)});
    }

    // bound validity: exact and Monte Carlo oracles against their bounds
    {
        const auto set = MeanSet::interval(detail::bern_y_mean(0.3, 0.5), kInf);
        const auto rep = csc_convex_bound_with_oracle(bern, set, 30, mc);
        out.push_back({"bound-validity", "csc-convex scaled_bernoulli(0.3) n=30",
                       rep.bound_holds(),
                       "oracle " + std::to_string(*rep.oracle_prob) + " <= bound " +
                           std::to_string(rep.bound)});
    }
    {
        const auto rep =
            csc_convex_bound_with_oracle(gauss1, MeanSet::interval(1.0, kInf), 1, mc);
        out.push_back({"bound-validity", "csc-convex gaussian(1) [1,inf)",
                       rep.bound_holds(),
                       "oracle " + std::to_string(*rep.oracle_prob) + " <= bound " +
                           std::to_string(rep.bound)});
    }
    {
        const auto ball = MeanSet::surround_kl_ball(0.5);
        const auto rep = csc_surround_bound_with_oracle(
            gauss1, ball, PartitionSpec::radial(EstimatorKind::boundary_mle), 16, mc);
        out.push_back({"bound-validity", "nml-bound gaussian(1) klball n=16",
                       rep.bound_holds(),
                       "oracle " + std::to_string(*rep.oracle_prob) + " <= bound " +
                           std::to_string(rep.bound)});
    }
    {
        const auto set = MeanSet::surround_interval(-0.5, 0.8);
        const auto part = PartitionSpec::cones({vec1(-0.5), vec1(0.8)},
                                               EstimatorKind::boundary_mle);
        const auto rep = csc_surround_bound_with_oracle(bern, set, part, 32, mc);
        out.push_back({"bound-validity", "nml-bound scaled_bernoulli(0.3) n=32",
                       rep.bound_holds(),
                       "oracle " + std::to_string(*rep.oracle_prob) + " <= bound " +
                           std::to_string(rep.bound)});
    }

    // exact scaling identities
    {
        const Vec mu = vec1(detail::bern_y_mean(0.3, 0.45));
        const bool ok = kl(bern, mu, 23) == 23.0 * kl(bern, mu, 1);
        out.push_back({"scaling-identity", "kl n-linearity scaled_bernoulli(0.3)", ok,
                       ok ? "exact" : "mismatch"});
    }
    return out;
}

}  // namespace evgrow
