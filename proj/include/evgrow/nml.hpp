#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "evgrow/csc_convex.hpp"
#include "evgrow/evariable.hpp"
#include "evgrow/expfam.hpp"
#include "evgrow/meanset.hpp"
#include "evgrow/numerics.hpp"
#include "evgrow/quadrature.hpp"

namespace evgrow {

enum class EstimatorKind { self_consistent_radial, boundary_mle };

inline const char* to_string(EstimatorKind k) {
    return k == EstimatorKind::boundary_mle ? "mle" : "radial";
}

// Finitely many boundary corners; cells are the cones from 0 through
// consecutive corners. Choosing a finite partition replaces bd(M1^c) by the
// polygon through the corners, so the effective complement shrinks and the
// cell representatives become the per-facet KL minimizers.
struct FiniteCones {
    std::vector<Vec> corners;
};

// R = bd(M1^c) itself; cells are the rays from 0 through boundary points.
struct ContinuousRadial {};

struct PartitionSpec {
    std::variant<FiniteCones, ContinuousRadial> kind;
    EstimatorKind estimator = EstimatorKind::self_consistent_radial;

    static PartitionSpec cones(std::vector<Vec> corners, EstimatorKind est) {
        return {FiniteCones{std::move(corners)}, est};
    }
    static PartitionSpec radial(EstimatorKind est) { return {ContinuousRadial{}, est}; }

    bool is_continuous() const { return std::holds_alternative<ContinuousRadial>(kind); }

    std::string describe() const {
        if (is_continuous()) return "radial";
        return "cones:" + std::to_string(std::get<FiniteCones>(kind).corners.size());
    }
};

namespace detail {

inline bool lex_less(const Vec& a, const Vec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

// A boundary representative with its cached natural parameter.
struct RepInfo {
    Vec r;
    Vec theta;
    double log_z = 0.0;
    double kl1 = 0.0;  // D(Pbar_r || P0) at n = 1

    double log_ratio(const Vec& y, int n) const {
        return n * (theta.dot(y) - log_z);
    }
};

inline RepInfo make_rep(const FamilySpec& fam, Vec r) {
    RepInfo info;
    info.theta = natural_of_mean(fam, r);
    info.log_z = fam.log_partition(info.theta);
    info.kl1 = info.theta.dot(r) - info.log_z;
    info.r = std::move(r);
    return info;
}

inline double angle_of(const Vec& y) { return std::atan2(y[1], y[0]); }

// KL minimizer over the segment [a, b]; KL is strictly convex along it.
inline Vec segment_kl_argmin(const FamilySpec& fam, const Vec& a, const Vec& b) {
    auto f = [&](double t) { return kl(fam, a + t * (b - a), 1); };
    const double t = golden_min(f, 0.0, 1.0, 1e-12);
    return a + t * (b - a);
}

struct PreparedCells {
    std::vector<RepInfo> reps;   // one per cell, in angular order (d = 2)
    std::vector<double> angles;  // d = 2 corner angles, sorted; cells wrap
    double D_lower_unit = 0.0;   // min KL over the polygon boundary, n = 1
};

inline PreparedCells prepare_cones(const FamilySpec& fam, const MeanSet& set,
                                   const FiniteCones& cones) {
    if (cones.corners.empty()) throw ConfigError("FiniteCones: needs at least one corner");
    for (const Vec& c : cones.corners) {
        const double norm = c.norm();
        if (norm == 0.0) throw ConfigError("FiniteCones: corner at the origin");
        const double r = boundary_radius(fam, set, c / norm);
        if (std::abs(norm - r) > 1e-8 * std::max(1.0, r))
            throw NotNice("FiniteCones: corner not on bd(M1^c)");
        if (!fam.mean_space.contains_interior(c))
            throw NotNice("FiniteCones: corner outside the interior of the mean space");
    }
    PreparedCells cells;
    if (fam.d == 1) {
        std::vector<Vec> sorted = cones.corners;
        std::sort(sorted.begin(), sorted.end(),
                  [](const Vec& a, const Vec& b) { return a[0] < b[0]; });
        cells.D_lower_unit = kInf;
        for (const Vec& r : sorted) {
            cells.reps.push_back(make_rep(fam, r));
            cells.D_lower_unit = std::min(cells.D_lower_unit, cells.reps.back().kl1);
        }
        return cells;
    }
    if (fam.d != 2)
        throw UnsupportedDimension("FiniteCones: only d <= 2 is supported");
    std::vector<Vec> sorted = cones.corners;
    std::sort(sorted.begin(), sorted.end(),
              [](const Vec& a, const Vec& b) { return angle_of(a) < angle_of(b); });
    const std::size_t k = sorted.size();
    cells.D_lower_unit = kInf;
    for (std::size_t j = 0; j < k; ++j) {
        cells.angles.push_back(angle_of(sorted[j]));
        const Vec rep =
            k == 1 ? sorted[j] : segment_kl_argmin(fam, sorted[j], sorted[(j + 1) % k]);
        cells.reps.push_back(make_rep(fam, rep));
        cells.D_lower_unit = std::min(cells.D_lower_unit, cells.reps.back().kl1);
    }
    return cells;
}

// Index of the angular cell [angles[j], angles[j+1]) containing phi; the last
// cell wraps around the cut at pi.
inline std::size_t sector_index(const std::vector<double>& angles, double phi) {
    const auto it = std::upper_bound(angles.begin(), angles.end(), phi);
    if (it == angles.begin() || it == angles.end()) return angles.size() - 1;
    return std::size_t(it - angles.begin()) - 1;
}

inline const RepInfo& mle_over_reps(const std::vector<RepInfo>& reps, const Vec& y) {
    const RepInfo* best = &reps.front();
    double best_val = -kInf;
    for (const RepInfo& rep : reps) {
        const double val = rep.theta.dot(y) - rep.log_z;
        if (val > best_val || (val == best_val && lex_less(best->r, rep.r))) {
            best_val = val;
            best = &rep;
        }
    }
    return *best;
}

// Estimator resolved against a family, a surrounding set and a partition,
// with representatives and their natural parameters cached. Total on all of
// conv(Y): the value off M1 follows the same radial/MLE rule, and y = 0 maps
// to the lexicographically largest representative.
class BoundaryEstimator {
  public:
    // owns copies so that closures built on top of it cannot dangle
    BoundaryEstimator(FamilySpec fam, MeanSet set, PartitionSpec partition)
        : fam_(std::move(fam)), set_(std::move(set)), partition_(std::move(partition)) {
        if (!partition_.is_continuous()) {
            cells_ = prepare_cones(fam_, set_, std::get<FiniteCones>(partition_.kind));
        } else if (fam_.d == 1) {
            const auto [lo, hi] = surround_endpoints_1d(fam_, set_);
            cells_.emplace();
            cells_->reps.push_back(make_rep(fam_, vec1(lo)));
            cells_->reps.push_back(make_rep(fam_, vec1(hi)));
            cells_->D_lower_unit = std::min(cells_->reps[0].kl1, cells_->reps[1].kl1);
        } else if (fam_.d == 2) {
            // detect a constant boundary radius (spheres)
            const_radius_ = true;
            radius0_ = boundary_radius(fam_, set_, vec2(1.0, 0.0));
            for (int i = 1; i < 16 && const_radius_; ++i) {
                const double phi = 2.0 * M_PI * i / 16.0;
                const double ri =
                    boundary_radius(fam_, set_, vec2(std::cos(phi), std::sin(phi)));
                if (std::abs(ri - radius0_) > 1e-10 * std::max(1.0, radius0_))
                    const_radius_ = false;
            }
        } else {
            throw UnsupportedDimension("BoundaryEstimator: continuous only for d <= 2");
        }
    }

    const PartitionSpec& partition() const { return partition_; }

    // the representative depends on y only through its direction
    bool direction_only() const {
        if (partition_.estimator == EstimatorKind::self_consistent_radial) return true;
        if (cells_) {
            if (!fam_.isotropic) return false;
            double lo = kInf, hi = 0.0;
            for (const auto& rep : cells_->reps) {
                lo = std::min(lo, rep.r.norm());
                hi = std::max(hi, rep.r.norm());
            }
            return hi - lo <= 1e-12 * std::max(1.0, hi);
        }
        return fam_.isotropic && const_radius_;  // MLE on a sphere = radial
    }

    RepInfo select(const Vec& y) const {
        if (y.norm() == 0.0) return origin_convention();
        if (cells_) {
            if (partition_.estimator == EstimatorKind::boundary_mle)
                return mle_over_reps(cells_->reps, y);
            if (fam_.d == 1)
                return y[0] < 0.0 || cells_->reps.size() == 1 ? cells_->reps.front()
                                                              : cells_->reps.back();
            return cells_->reps[sector_index(cells_->angles, angle_of(y))];
        }
        // continuous boundary, d = 2
        const Vec u = y / y.norm();
        if (partition_.estimator == EstimatorKind::self_consistent_radial ||
            (fam_.isotropic && const_radius_)) {
            const double r = const_radius_ ? radius0_ : boundary_radius(fam_, set_, u);
            return make_rep(fam_, r * u);
        }
        return mle_continuous(y);
    }

    const std::optional<PreparedCells>& cells() const { return cells_; }

    // angular breakpoints where the selected representative can change
    std::vector<double> angular_breaks() const {
        std::vector<double> breaks;
        if (!cells_) return breaks;
        for (double a : cells_->angles) breaks.push_back(a);
        if (partition_.estimator == EstimatorKind::boundary_mle &&
            cells_->reps.size() > 1) {
            const auto& reps = cells_->reps;
            for (std::size_t j = 0; j < reps.size(); ++j) {
                const double a0 = angle_of(reps[j].r);
                const double a1 = angle_of(reps[(j + 1) % reps.size()].r);
                double mid = 0.5 * (a0 + a1);
                if (a1 < a0) mid += M_PI;
                breaks.push_back(std::remainder(mid, 2.0 * M_PI));
            }
        }
        for (double& b : breaks) b = std::remainder(b, 2.0 * M_PI);
        return breaks;
    }

  private:
    RepInfo origin_convention() const {
        if (cells_) {
            if (partition_.estimator == EstimatorKind::boundary_mle)
                return mle_over_reps(cells_->reps, Vec::Zero(fam_.d));
            const RepInfo* best = &cells_->reps.front();
            for (const auto& rep : cells_->reps)
                if (lex_less(best->r, rep.r)) best = &rep;
            return *best;
        }
        if (partition_.estimator == EstimatorKind::boundary_mle)
            return mle_continuous(Vec::Zero(fam_.d));
        Vec e1 = Vec::Zero(fam_.d);
        e1[0] = 1.0;
        return make_rep(fam_, boundary_radius(fam_, set_, e1) * e1);
    }

    // golden-section over the boundary angle for non-spherical MLEs
    RepInfo mle_continuous(const Vec& y) const {
        auto value = [&](double phi) {
            const Vec u = vec2(std::cos(phi), std::sin(phi));
            const RepInfo rep =
                make_rep(fam_, boundary_radius(fam_, set_, u) * u);
            return -(rep.theta.dot(y) - rep.log_z);
        };
        const int coarse = 256;
        double best_phi = 0.0, best_val = kInf;
        for (int i = 0; i < coarse; ++i) {
            const double phi = -M_PI + 2.0 * M_PI * i / coarse;
            const double v = value(phi);
            if (v < best_val) {
                best_val = v;
                best_phi = phi;
            }
        }
        const double h = 2.0 * M_PI / coarse;
        const double phi = golden_min(value, best_phi - h, best_phi + h, 1e-10);
        const Vec u = vec2(std::cos(phi), std::sin(phi));
        return make_rep(fam_, boundary_radius(fam_, set_, u) * u);
    }

    FamilySpec fam_;
    MeanSet set_;
    PartitionSpec partition_;
    std::optional<PreparedCells> cells_;
    bool const_radius_ = false;
    double radius0_ = 0.0;
};

// Switch points of the estimator on the line (kinks of the plug-in density).
inline std::vector<double> estimator_breaks_1d(const PartitionSpec& partition,
                                               const BoundaryEstimator& est) {
    const auto& reps = est.cells()->reps;
    if (reps.size() < 2) return {};
    if (partition.estimator == EstimatorKind::boundary_mle) {
        const auto& lo = reps.front();
        const auto& hi = reps.back();
        return {(hi.log_z - lo.log_z) / (hi.theta[0] - lo.theta[0])};
    }
    return {0.0};
}

// d = 1 continuous normalizer: integrate exp(log pbar_{r(y),n}(y)) over the
// line, split where the estimator switches representatives.
inline double normalizer_continuous_1d(const FamilySpec& fam,
                                       const PartitionSpec& partition, int n,
                                       const BoundaryEstimator& est) {
    const auto& cs = fam.continuous();
    const std::vector<double> breaks = estimator_breaks_1d(partition, est);
    auto integrand = [&](double y) {
        const Vec yv = vec1(y);
        const RepInfo rep = est.select(yv);
        return std::exp(cs.log_density_mean_n(rep.r, yv, n));
    };
    return integrate_piecewise(integrand, cs.lo[0], cs.hi[0], breaks, 1e-10);
}

// d = 2 continuous normalizer in polar coordinates: outer adaptive quadrature
// over the angle (split at cell boundaries), inner over the radius with the
// concentration window around the representative integrated separately.
inline double normalizer_continuous_2d(const FamilySpec& fam,
                                       const PartitionSpec& partition, int n,
                                       const BoundaryEstimator& est) {
    if (!est.direction_only())
        throw UnsupportedDimension(
            "log_shtarkov_normalizer: d = 2 requires a direction-determined estimator "
            "(radial rule, or MLE over a sphere / equal-divergence corners)");
    (void)partition;
    const auto& cs = fam.continuous();
    const std::vector<double> breaks = est.angular_breaks();
    auto outer = [&](double phi) {
        const Vec u = vec2(std::cos(phi), std::sin(phi));
        const RepInfo rep = est.select(u);
        const double along = rep.r.norm();
        const double sd = std::sqrt(u.dot(fam.covariance(rep.theta) * u) / double(n));
        const double w_lo = std::max(0.0, along - 14.0 * sd);
        const double w_hi = along + 14.0 * sd;
        auto inner = [&](double s) {
            return s * std::exp(cs.log_density_mean_n(rep.r, s * u, n));
        };
        double total = integrate(inner, w_lo, w_hi, 1e-11);
        total += integrate(inner, 0.0, w_lo, 1e-11);
        total += integrate(inner, w_hi, kInf, 1e-11);
        return total;
    };
    return integrate_piecewise(outer, -M_PI, M_PI, breaks, 1e-9);
}

}  // namespace detail

// The hindsight boundary estimator: the ray-boundary crossing for the
// self-consistent radial rule, the likelihood argmax over R for the MLE rule;
// ties break to the lexicographically largest point.
inline Vec estimate_r(const FamilySpec& fam, const MeanSet& set,
                      const PartitionSpec& partition, const Vec& y) {
    if (y.norm() == 0.0) throw OriginRay("estimate_r: no ray through the origin");
    detail::BoundaryEstimator est(fam, set, partition);
    return est.select(y).r;
}

// Minimax regret: log of the Shtarkov normalizer \int pbar_{r(y)}(y) dnu(y)
// for the n-sample mean. Exact sums for discrete families; piecewise or polar
// quadrature for continuous d = 1 / d = 2.
inline double log_shtarkov_normalizer(const FamilySpec& fam, const MeanSet& set,
                                      const PartitionSpec& partition, int n) {
    if (!set.is_surrounding_variant())
        throw Error("log_shtarkov_normalizer: requires a surrounding mean set");
    detail::BoundaryEstimator est(fam, set, partition);
    double mmreg;
    if (fam.is_discrete()) {
        std::vector<double> terms;
        for (const auto& o : enumerate_outcomes(fam, n)) {
            const detail::RepInfo rep = est.select(o.y);
            terms.push_back(o.log_p + rep.log_ratio(o.y, n));
        }
        mmreg = log_sum_exp(terms);
    } else if (fam.d == 1) {
        mmreg = std::log(detail::normalizer_continuous_1d(fam, partition, n, est));
    } else if (fam.d == 2) {
        mmreg = std::log(detail::normalizer_continuous_2d(fam, partition, n, est));
    } else {
        throw UnsupportedDimension(
            "log_shtarkov_normalizer: continuous boundaries only for d <= 2");
    }
    if (mmreg < -1e-10)
        throw Error("log_shtarkov_normalizer: negative regret indicates lost mass");
    return mmreg;
}

// The relative-GROW e-variable S_rel = q_shtarkov(Y) / p0(Y): the plug-in
// likelihood ratio at the estimated boundary point minus the constant regret.
inline EVariable nml_evariable(const FamilySpec& fam, const MeanSet& set,
                               const PartitionSpec& partition, int n) {
    const double mmreg = log_shtarkov_normalizer(fam, set, partition, n);
    auto est = std::make_shared<detail::BoundaryEstimator>(fam, set, partition);
    EVariable ev;
    ev.log_value = [est, mmreg, n](const Vec& y) {
        const detail::RepInfo rep = est->select(y);
        return rep.log_ratio(y, n) - mmreg;
    };
    if (fam.d == 1 && est->cells())
        ev.breaks_1d = detail::estimator_breaks_1d(est->partition(), *est);
    ev.grow_value = std::nullopt;
    ev.provenance = Provenance::shtarkov_nml;
    ev.family = fam.name;
    ev.n = n;
    return ev;
}

// The surrounding-case CSC bound: P0(Y in M1) <= exp(mmreg - D_lower). For a
// KL-ball complement D_lower is n * D1 by definition; finite partitions use
// the KL minimum over the polygon through their corners.
inline BoundReport csc_surround_bound(const FamilySpec& fam, const MeanSet& set,
                                      const PartitionSpec& partition, int n) {
    if (!set.is_surrounding_variant())
        throw Error("csc_surround_bound: requires a surrounding mean set");
    BoundReport rep;
    if (!partition.is_continuous()) {
        const auto cells =
            detail::prepare_cones(fam, set, std::get<FiniteCones>(partition.kind));
        rep.D_lower = n * cells.D_lower_unit;
    } else if (const auto* ball = std::get_if<SurroundKLBallComplement>(&set.variant())) {
        rep.D_lower = n * ball->D1;
    } else if (fam.d == 1) {
        const auto [lo, hi] = surround_endpoints_1d(fam, set);
        rep.D_lower = n * std::min(kl(fam, vec1(lo), 1), kl(fam, vec1(hi), 1));
    } else {
        // boundary KL minimum over the angle: coarse scan + golden refinement
        auto bd_kl = [&](double phi) {
            const Vec u = vec2(std::cos(phi), std::sin(phi));
            return kl(fam, boundary_radius(fam, set, u) * u, 1);
        };
        const int grid = 512;
        double best_phi = 0.0, dmin = kInf;
        for (int i = 0; i < grid; ++i) {
            const double phi = 2.0 * M_PI * i / grid;
            const double v = bd_kl(phi);
            if (v < dmin) {
                dmin = v;
                best_phi = phi;
            }
        }
        const double h = 2.0 * M_PI / grid;
        const double phi = golden_min(bd_kl, best_phi - h, best_phi + h, 1e-10);
        rep.D_lower = n * std::min(dmin, bd_kl(phi));
    }
    rep.regret = log_shtarkov_normalizer(fam, set, partition, n);
    rep.log_bound = rep.regret - rep.D_lower;
    rep.bound = std::exp(rep.log_bound);
    rep.n = n;
    rep.family = fam.name;
    rep.meanset = set.describe();
    rep.partition = partition.describe();
    rep.estimator = to_string(partition.estimator);
    return rep;
}

inline BoundReport csc_surround_bound_with_oracle(const FamilySpec& fam,
                                                  const MeanSet& set,
                                                  const PartitionSpec& partition, int n,
                                                  const SampleConfig& cfg) {
    BoundReport rep = csc_surround_bound(fam, set, partition, n);
    const OracleResult o = oracle_prob(fam, set, n, cfg);
    rep.oracle_prob = o.prob;
    rep.oracle_se = o.se;
    rep.oracle_kind = o.kind;
    return rep;
}

struct RegretScan {
    std::vector<std::pair<int, double>> rows;  // (n, mmreg_n)
    double slope = 0.0;                        // least squares against log n
};

// Minimax regret along a geometric schedule of sample sizes, with the fitted
// log-n slope (the empirical exponent of the (d-1)/2 law).
inline RegretScan regret_scan(const FamilySpec& fam, const MeanSet& set,
                              const PartitionSpec& partition,
                              const std::vector<int>& n_list) {
    if (n_list.size() < 5) throw ConfigError("regret_scan: need at least 5 sample sizes");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw ConfigError("regret_scan: n_list must be strictly increasing");
    RegretScan scan;
    std::vector<double> xs, ys;
    for (int n : n_list) {
        const double m = log_shtarkov_normalizer(fam, set, partition, n);
        scan.rows.emplace_back(n, m);
        xs.push_back(std::log(double(n)));
        ys.push_back(m);
    }
    scan.slope = ls_slope(xs, ys);
    return scan;
}

struct GrowSandwich {
    double lower = 0.0;  // n D1 - mmreg_n(mle)
    double upper = 0.0;  // n D1
    double gap = 0.0;    // mmreg_n(mle)
};

// Two-sided bracket on GROW_n for a KL-ball complement: the Shtarkov route
// gives the lower bound, the boundary KL the upper one. The MLE estimator is
// used regardless of the partition's estimator field, matching the bound's
// derivation.
inline GrowSandwich grow_sandwich(const FamilySpec& fam, const MeanSet& set,
                                  const PartitionSpec& partition, int n) {
    const auto* ball = std::get_if<SurroundKLBallComplement>(&set.variant());
    if (!ball) throw Error("grow_sandwich: requires a KL-ball complement");
    PartitionSpec mle = partition;
    mle.estimator = EstimatorKind::boundary_mle;
    GrowSandwich s;
    s.gap = log_shtarkov_normalizer(fam, set, mle, n);
    s.upper = n * ball->D1;
    s.lower = s.upper - s.gap;
    return s;
}

struct PartitionComparison {
    struct Row {
        int k = 0;  // 0 marks the continuous partition
        double D_lower_unit = 0.0;
        double D_lower = 0.0;
        double mmreg = 0.0;
        double log_bound = 0.0;
    };
    std::vector<Row> rows;
};

// Finite polygon partitions (corners equally spaced on bd(M1^c)) against the
// continuous radial partition, all with the MLE estimator, at sample size n.
// Asserts that the continuous bound beats every finite k.
inline PartitionComparison compare_partitions(const FamilySpec& fam, const MeanSet& set,
                                              const std::vector<int>& k_list, int n) {
    if (fam.d != 2) throw UnsupportedDimension("compare_partitions: requires d = 2");
    const auto* ball = std::get_if<SurroundKLBallComplement>(&set.variant());
    if (!ball) throw Error("compare_partitions: requires a KL-ball complement");
    PartitionComparison cmp;
    for (int k : k_list) {
        if (k < 3) throw ConfigError("compare_partitions: k must be >= 3");
        std::vector<Vec> corners;
        corners.reserve(k);
        for (int j = 0; j < k; ++j) {
            const double phi = 2.0 * M_PI * j / k;
            const Vec u = vec2(std::cos(phi), std::sin(phi));
            corners.push_back(boundary_radius(fam, set, u) * u);
        }
        const auto part = PartitionSpec::cones(corners, EstimatorKind::boundary_mle);
        const auto cells =
            detail::prepare_cones(fam, set, std::get<FiniteCones>(part.kind));
        PartitionComparison::Row row;
        row.k = k;
        row.D_lower_unit = cells.D_lower_unit;
        row.D_lower = n * cells.D_lower_unit;
        row.mmreg = log_shtarkov_normalizer(fam, set, part, n);
        row.log_bound = row.mmreg - row.D_lower;
        cmp.rows.push_back(row);
    }
    const auto cont = PartitionSpec::radial(EstimatorKind::boundary_mle);
    PartitionComparison::Row row;
    row.k = 0;
    row.D_lower_unit = ball->D1;
    row.D_lower = n * ball->D1;
    row.mmreg = log_shtarkov_normalizer(fam, set, cont, n);
    row.log_bound = row.mmreg - row.D_lower;
    cmp.rows.push_back(row);
    for (const auto& r : cmp.rows)
        if (r.k != 0 && !(row.log_bound < r.log_bound))
            throw Error("compare_partitions: continuous bound did not beat k=" +
                        std::to_string(r.k));
    return cmp;
}

}  // namespace evgrow
