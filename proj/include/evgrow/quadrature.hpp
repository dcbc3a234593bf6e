#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "evgrow/errors.hpp"
#include "evgrow/numerics.hpp"

namespace evgrow {

// Adaptive integration of f over (lo, hi); either endpoint may be infinite.
// Infinite domains go through the double-exponential (tanh-sinh family)
// variable transforms. Throws QuadratureFailure when the error estimate
// exceeds the requested absolute tolerance or the result is not finite.
inline double integrate(const std::function<double(double)>& f, double lo, double hi,
                        double abs_tol = 1e-10) {
    namespace bq = boost::math::quadrature;
    const double term_tol = 1e-12;  // termination tolerance of the DE rules
    double value = 0.0, error = 0.0, l1 = 0.0;
    if (std::isfinite(lo) && std::isfinite(hi)) {
        if (lo == hi) return 0.0;
        bq::tanh_sinh<double> integ;
        value = integ.integrate(f, lo, hi, term_tol, &error, &l1);
    } else if (std::isfinite(lo) && hi == kInf) {
        bq::exp_sinh<double> integ;
        auto g = [&f, lo](double t) { return f(lo + t); };
        value = integ.integrate(g, term_tol, &error, &l1);
    } else if (lo == -kInf && std::isfinite(hi)) {
        bq::exp_sinh<double> integ;
        auto g = [&f, hi](double t) { return f(hi - t); };
        value = integ.integrate(g, term_tol, &error, &l1);
    } else {
        bq::sinh_sinh<double> integ;
        value = integ.integrate(f, term_tol, &error, &l1);
    }
    if (!std::isfinite(value))
        throw QuadratureFailure("integrate: non-finite result");
    // boost reports the absolute difference of the last two refinement levels
    if (error > std::max(abs_tol, 1e-10 * std::max(l1, std::abs(value)))) {
        std::ostringstream os;
        os << "integrate: error estimate " << error << " exceeds tolerance " << abs_tol
           << " (value " << value << ", L1 " << l1 << ", domain " << lo << ".." << hi
           << ")";
        throw QuadratureFailure(os.str());
    }
    return value;
}

// Integrate over (lo, hi) split at the given interior breakpoints. Used when
// the integrand has known kinks (e.g. estimator switchovers).
inline double integrate_piecewise(const std::function<double(double)>& f, double lo,
                                  double hi, std::vector<double> breaks,
                                  double abs_tol = 1e-10) {
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                                [&](double b) { return !(b > lo && b < hi); }),
                 breaks.end());
    std::sort(breaks.begin(), breaks.end());
    // merge near-duplicate breakpoints; degenerate slivers produce garbage
    // error estimates and contribute nothing
    const double width = (std::isfinite(lo) && std::isfinite(hi)) ? hi - lo : 1.0;
    const double min_gap = 1e-9 * std::max(width, 1.0);
    std::vector<double> kept;
    double prev = lo;
    for (double b : breaks) {
        if (b - prev >= min_gap && hi - b >= min_gap) {
            kept.push_back(b);
            prev = b;
        }
    }
    double total = 0.0;
    double a = lo;
    for (double b : kept) {
        total += integrate(f, a, b, abs_tol);
        a = b;
    }
    total += integrate(f, a, hi, abs_tol);
    return total;
}

}  // namespace evgrow
