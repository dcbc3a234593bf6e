#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "evgrow/expfam.hpp"
#include "evgrow/family.hpp"

namespace evgrow {

// {mu : v^T mu >= a} with unit normal v and offset a > 0.
struct HalfSpace {
    Vec v;
    double a;
};

// Closed interval [lo, hi]; either end may be infinite. Must exclude 0.
struct Interval1D {
    double lo, hi;
};

// Intersection of halfspaces {mu : v_i^T mu >= a_i}.
struct ConvexPolytope {
    std::vector<std::pair<Vec, double>> faces;
};

// d = 1 surrounding set M \ (mu_minus, mu_plus) with mu_minus < 0 < mu_plus.
struct SurroundIntervalComplement {
    double mu_minus, mu_plus;
};

// Complement is the open KL ball {mu : D(Pbar_mu || P0) < D1} at n = 1.
struct SurroundKLBallComplement {
    double D1;
};

// Complement is star-shaped with boundary radius given per unit direction.
struct SurroundRadial {
    std::function<double(const Vec&)> radius;
};

using MeanSetVariant = std::variant<HalfSpace, Interval1D, ConvexPolytope,
                                    SurroundIntervalComplement,
                                    SurroundKLBallComplement, SurroundRadial>;

class MeanSet {
  public:
    static MeanSet half_space(Vec v, double a) {
        const double norm = v.norm();
        if (norm == 0.0) throw Degenerate("half_space: zero normal");
        v /= norm;
        a /= norm;
        if (!(a > 0.0)) throw Degenerate("half_space: offset must be > 0 (separation)");
        return MeanSet(HalfSpace{std::move(v), a});
    }

    static MeanSet interval(double lo, double hi) {
        if (!(lo <= hi)) throw Degenerate("interval: empty interval");
        if (lo <= 0.0 && hi >= 0.0)
            throw Degenerate("interval: contains the null mean (separation)");
        return MeanSet(Interval1D{lo, hi});
    }

    static MeanSet polytope(std::vector<std::pair<Vec, double>> faces) {
        if (faces.empty()) throw Degenerate("polytope: no faces");
        bool separated = false;
        for (auto& [v, a] : faces) {
            const double norm = v.norm();
            if (norm == 0.0) throw Degenerate("polytope: zero normal");
            v /= norm;
            a /= norm;
            if (a > 0.0) separated = true;
        }
        if (!separated) throw Degenerate("polytope: contains the null mean (separation)");
        return MeanSet(ConvexPolytope{std::move(faces)});
    }

    static MeanSet surround_interval(double mu_minus, double mu_plus) {
        if (!(mu_minus < 0.0 && 0.0 < mu_plus))
            throw Degenerate("surround_interval: needs mu_minus < 0 < mu_plus");
        return MeanSet(SurroundIntervalComplement{mu_minus, mu_plus});
    }

    static MeanSet surround_kl_ball(double D1) {
        if (!(D1 > 0.0)) throw Degenerate("surround_kl_ball: D1 must be > 0");
        return MeanSet(SurroundKLBallComplement{D1});
    }

    static MeanSet surround_radial(std::function<double(const Vec&)> radius) {
        return MeanSet(SurroundRadial{std::move(radius)});
    }

    bool is_convex_variant() const {
        return std::holds_alternative<HalfSpace>(v_) ||
               std::holds_alternative<Interval1D>(v_) ||
               std::holds_alternative<ConvexPolytope>(v_);
    }

    bool is_surrounding_variant() const { return !is_convex_variant(); }

    // Exact membership; boundary outcomes count as inside (M1 is closed).
    bool contains(const FamilySpec& fam, const Vec& mu) const {
        return std::visit(
            [&](const auto& s) -> bool { return contains_impl(fam, s, mu); }, v_);
    }

    const MeanSetVariant& variant() const { return v_; }

    std::string describe() const {
        std::ostringstream os;
        std::visit(
            [&os](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, HalfSpace>) {
                    os << "halfspace(a=" << s.a << ";v=";
                    for (Eigen::Index i = 0; i < s.v.size(); ++i)
                        os << (i ? " " : "") << s.v[i];
                    os << ")";
                } else if constexpr (std::is_same_v<T, Interval1D>) {
                    os << "interval[" << s.lo << ";" << s.hi << "]";
                } else if constexpr (std::is_same_v<T, ConvexPolytope>) {
                    os << "polytope(" << s.faces.size() << " faces)";
                } else if constexpr (std::is_same_v<T, SurroundIntervalComplement>) {
                    os << "surround(" << s.mu_minus << ";" << s.mu_plus << ")";
                } else if constexpr (std::is_same_v<T, SurroundKLBallComplement>) {
                    os << "klball(D1=" << s.D1 << ")";
                } else {
                    os << "radial";
                }
            },
            v_);
        return os.str();
    }

  private:
    explicit MeanSet(MeanSetVariant v) : v_(std::move(v)) {}

    static bool contains_impl(const FamilySpec&, const HalfSpace& s, const Vec& mu) {
        return s.v.dot(mu) >= s.a;
    }
    static bool contains_impl(const FamilySpec&, const Interval1D& s, const Vec& mu) {
        return mu[0] >= s.lo && mu[0] <= s.hi;
    }
    static bool contains_impl(const FamilySpec&, const ConvexPolytope& s, const Vec& mu) {
        for (const auto& [v, a] : s.faces)
            if (v.dot(mu) < a) return false;
        return true;
    }
    static bool contains_impl(const FamilySpec&, const SurroundIntervalComplement& s,
                              const Vec& mu) {
        return mu[0] <= s.mu_minus || mu[0] >= s.mu_plus;
    }
    static bool contains_impl(const FamilySpec& fam, const SurroundKLBallComplement& s,
                              const Vec& mu) {
        // points outside the open mean space cannot be in the (nice) ball
        if (!fam.mean_space.contains_interior(mu)) return true;
        return kl(fam, mu, 1) >= s.D1;
    }
    static bool contains_impl(const FamilySpec&, const SurroundRadial& s, const Vec& mu) {
        const double norm = mu.norm();
        if (norm == 0.0) return false;
        return norm >= s.radius(mu / norm);
    }

    MeanSetVariant v_;
};

// Distance along a unit direction from 0 to the edge of the open mean space.
inline double mean_space_extent(const FamilySpec& fam, const Vec& dir) {
    double t = kInf;
    for (Eigen::Index i = 0; i < dir.size(); ++i) {
        if (dir[i] > 0.0) t = std::min(t, fam.mean_space.hi[i] / dir[i]);
        if (dir[i] < 0.0) t = std::min(t, fam.mean_space.lo[i] / dir[i]);
    }
    return t;
}

// Radius at which the ray through `dir` crosses bd(M1^c). Unique by
// 0-star-shapedness. Throws NotNice if the crossing is not strictly inside
// the mean space.
inline double boundary_radius(const FamilySpec& fam, const MeanSet& set, const Vec& dir) {
    const double extent = mean_space_extent(fam, dir);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SurroundIntervalComplement>) {
                const double r = dir[0] > 0.0 ? s.mu_plus : -s.mu_minus;
                if (r >= extent) throw NotNice("boundary exits the mean space");
                return r;
            } else if constexpr (std::is_same_v<T, SurroundKLBallComplement>) {
                // kl is strictly increasing along the ray; grow a bracket and
                // polish with Newton (the gradient of kl at mu is theta(mu))
                double hi = 1.0;
                const double cap = std::isfinite(extent) ? 0.999999 * extent : 1e12;
                while (kl(fam, hi * dir, 1) < s.D1) {
                    hi = std::min(2.0 * hi, cap);
                    if (hi == cap && kl(fam, hi * dir, 1) < s.D1)
                        throw NotNice("KL ball boundary exits the mean space");
                }
                auto g = [&](double t) { return kl(fam, t * dir, 1); };
                auto dg = [&](double t) {
                    return natural_of_mean(fam, t * dir).dot(dir);
                };
                return newton_increasing(g, dg, s.D1, 0.0, hi,
                                         1e-13 * std::max(1.0, s.D1));
            } else if constexpr (std::is_same_v<T, SurroundRadial>) {
                const double r = s.radius(dir);
                if (!(r > 0.0)) throw NotNice("radial boundary must be positive");
                if (r >= extent) throw NotNice("boundary exits the mean space");
                return r;
            } else {
                throw Error("boundary_radius: not a surrounding mean set");
            }
        },
        set.variant());
}

// Endpoints {mu_minus, mu_plus} of bd(M1^c) for d = 1 surrounding sets.
inline std::pair<double, double> surround_endpoints_1d(const FamilySpec& fam,
                                                       const MeanSet& set) {
    if (fam.d != 1) throw UnsupportedDimension("surround_endpoints_1d: requires d = 1");
    const double plus = boundary_radius(fam, set, vec1(1.0));
    const double minus = -boundary_radius(fam, set, vec1(-1.0));
    return {minus, plus};
}

}  // namespace evgrow
