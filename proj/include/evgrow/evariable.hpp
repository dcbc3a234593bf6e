#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "evgrow/expfam.hpp"
#include "evgrow/family.hpp"
#include "evgrow/numerics.hpp"

namespace evgrow {

enum class Provenance { convex_grow, surround_mixture, shtarkov_nml };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::convex_grow: return "convex-GROW";
        case Provenance::surround_mixture: return "surround-mixture";
        case Provenance::shtarkov_nml: return "shtarkov-NML";
    }
    return "?";
}

// A nonnegative statistic S = exp(log_value(Y)) with E_P0[S] <= 1.
struct EVariable {
    std::function<double(const Vec&)> log_value;
    std::optional<double> grow_value;  // worst-case growth rate, nats
    Provenance provenance = Provenance::convex_grow;
    std::string family;
    int n = 1;
    // known kinks of log_value for d = 1 (estimator switch points); quadrature
    // splits there
    std::vector<double> breaks_1d;
};

struct NullExpectation {
    double value = 0.0;
    double se = 0.0;                // 0 for exact/quadrature evaluation
    std::string kind = "exact";    // exact | quadrature | montecarlo

    // The defining e-variable inequality, with 3-SE slack for Monte Carlo.
    bool within_e_bound(double tol = 1e-6) const {
        return value <= 1.0 + tol + 3.0 * se;
    }
};

// E_{P0}[S] for the n-sample mean: exact sums for discrete families,
// quadrature for 1-d continuous ones, Monte Carlo otherwise.
inline NullExpectation e_variable_null_expectation(const FamilySpec& fam,
                                                   const EVariable& ev,
                                                   const SampleConfig& cfg) {
    if (fam.is_discrete()) {
        double total = 0.0;
        for (const auto& o : enumerate_outcomes(fam, ev.n))
            total += std::exp(o.log_p + ev.log_value(o.y));
        return {total, 0.0, "exact"};
    }
    const auto& cs = fam.continuous();
    if (fam.d == 1) {
        const Vec zero = Vec::Zero(1);
        auto integrand = [&](double y) {
            const Vec yv = vec1(y);
            const double ld = cs.log_density_mean_n(zero, yv, ev.n);
            if (!(ld > -700.0)) return 0.0;
            return std::exp(ld + ev.log_value(yv));
        };
        return {integrate_piecewise(integrand, cs.lo[0], cs.hi[0], ev.breaks_1d, 1e-10),
                0.0, "quadrature"};
    }
    const Vec zero = Vec::Zero(fam.d);
    double sum = 0.0, sum_sq = 0.0;
    const std::int64_t chunk = 1 << 14;
    std::int64_t done = 0;
    for (std::uint64_t c = 0; done < cfg.mc_samples; ++c) {
        std::mt19937_64 rng(split_seed(cfg.seed, c));
        const std::int64_t m = std::min<std::int64_t>(chunk, cfg.mc_samples - done);
        for (std::int64_t i = 0; i < m; ++i) {
            Vec acc = Vec::Zero(fam.d);
            for (int k = 0; k < ev.n; ++k) acc += cs.sample_x(zero, rng);
            const double s = std::exp(ev.log_value(acc / ev.n));
            sum += s;
            sum_sq += s * s;
        }
        done += m;
    }
    const double mean = sum / double(cfg.mc_samples);
    const double var =
        std::max(0.0, sum_sq / double(cfg.mc_samples) - mean * mean);
    return {mean, std::sqrt(var / double(cfg.mc_samples)), "montecarlo"};
}

}  // namespace evgrow
