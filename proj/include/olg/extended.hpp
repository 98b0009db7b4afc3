#pragma once
#include <cmath>

#include "olg/equilibrium.hpp"
#include "olg/roots.hpp"

namespace olg {

// Normalized wage w/I at and above which the constraint stops binding in the
// generalized model: (1+beta)(1-lambda)/beta. Equals 2(1-lambda) at beta = 1.
inline double extended_plateau_threshold(double lambda, double beta) {
    return (1.0 + beta) * (1.0 - lambda) / beta;
}

// Investor utility level beta^beta / (1+beta)^(1+beta); 1/4 at beta = 1.
inline double investor_utility_level(double beta) {
    return std::pow(beta, beta) / std::pow(1.0 + beta, 1.0 + beta);
}

// Entrepreneurial rent with discount factor beta and minimum investment size
// I, as a function of the normalized wage u = w/I. On the binding branch phi
// solves the indifference condition
//   (1 - (1 - lambda phi)/u) ((1-lambda) phi / u)^beta = beta^beta/(1+beta)^(1+beta),
// which has no closed form for beta != 1. The residual is negative at phi = 1
// and positive at phi = 1/lambda, so the root is found by bracketed bisection;
// if rounding ever breaks the initial bracket, the lower endpoint is moved
// geometrically toward 1/lambda before giving up (the left factor of the
// residual turns negative where 1 - lambda phi > u).
inline double rent_extended(double w_over_i, double lambda, double beta) {
    detail::check_lambda(lambda);
    if (!(beta > 0.0)) throw invalid_parameter("discount must be positive");
    if (!(w_over_i > 0.0))
        throw invalid_parameter("normalized wage must be positive");
    if (w_over_i >= extended_plateau_threshold(lambda, beta) - 1e-12) return 1.0;

    const double u = w_over_i;
    const double level = investor_utility_level(beta);
    auto residual = [&](double phi) {
        return (1.0 - (1.0 - lambda * phi) / u) *
                   std::pow((1.0 - lambda) * phi / u, beta) -
               level;
    };

    double lo = 1.0 + 1e-9;
    const double hi = 1.0 / lambda - 1e-9;
    double flo = residual(lo);
    const double fhi = residual(hi);
    if ((flo > 0.0) == (fhi > 0.0)) {
        bool bracketed = false;
        for (double span = 0.5 * (hi - lo); span > 1e-12; span *= 0.5) {
            const double candidate = hi - span;
            const double fc = residual(candidate);
            if ((fc > 0.0) != (fhi > 0.0)) {
                lo = candidate;
                flo = fc;
                bracketed = true;
                break;
            }
        }
        if (!bracketed)
            throw bracket_error(
                "rent_extended: indifference residual does not change sign over "
                "(1, 1/lambda)",
                flo, fhi);
    }
    return bisect(residual, lo, hi, {1e-12, 200});
}

struct ExtendedEquilibrium {
    double normalized_wage;        // u = w/I
    double rent;                   // phi
    double entrepreneur_saving;    // s^b
    double investor_saving;        // beta/(1+beta)
    double national_saving;        // s
    double entrepreneur_fraction;  // s u = pi/I, mass of entrepreneurs per unit I
    double discount;               // beta
    double min_investment;         // I
};

// Static equilibrium of the generalized model at wage w. On the binding
// branch
//   s^b = (1 - lambda phi(u,lambda))/u,
//   s   = beta / (beta u + (1+beta) lambda phi(u,lambda)),
// and both collapse to beta/(1+beta) on the plateau. Reduces to the base
// model field-by-field at beta = 1, I = 1.
inline ExtendedEquilibrium extended_equilibrium(double w, const EconomyParams& params) {
    params.validate();
    const double beta = params.discount;
    const double inv = params.min_investment;
    const double u = w / inv;
    if (!(u > 0.0 && u < (1.0 + beta) / beta))
        throw invalid_parameter(
            "extended_equilibrium: normalized wage must lie in (0, (1+beta)/beta)");
    const double lambda = params.pledgeability;
    const double investor = beta / (1.0 + beta);
    ExtendedEquilibrium eq{u, 1.0, investor, investor, investor, 0.0, beta, inv};
    if (u < extended_plateau_threshold(lambda, beta) - 1e-12) {
        const double phi = rent_extended(u, lambda, beta);
        eq.rent = phi;
        eq.entrepreneur_saving = (1.0 - lambda * phi) / u;
        eq.national_saving = beta / (beta * u + (1.0 + beta) * lambda * phi);
    }
    eq.entrepreneur_fraction = eq.national_saving * u;
    return eq;
}

// lhs - rhs of the extended clearing condition
//   (s w / I)(I - s^b w) = (1 - s w / I) beta w / (1 + beta).
inline double clearing_residual(const ExtendedEquilibrium& eq) {
    const double w = eq.normalized_wage * eq.min_investment;
    const double lhs = eq.entrepreneur_fraction *
                       (eq.min_investment - eq.entrepreneur_saving * w);
    const double rhs = (1.0 - eq.entrepreneur_fraction) * eq.discount * w /
                       (1.0 + eq.discount);
    return lhs - rhs;
}

}  // namespace olg
