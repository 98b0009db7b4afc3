#pragma once
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "olg/errors.hpp"
#include "olg/production.hpp"

namespace olg {

// Wage at and above which the credit constraint stops binding: 2(1-lambda).
inline double plateau_wage(double lambda) { return 2.0 * (1.0 - lambda); }

namespace detail {

inline void check_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw invalid_parameter("pledgeability must lie strictly in (0,1)");
}

inline void check_wage(double w) {
    if (!(w > 0.0 && w < 2.0)) throw invalid_parameter("wage must lie in (0,2)");
}

// Wages within 1e-12 of the branch point are routed to the constant branch;
// both branches agree there in the limit.
inline bool binding(double w, double lambda) {
    return w < plateau_wage(lambda) - 1e-12;
}

}  // namespace detail

// psi(w,lambda) = sqrt(1 - 2w + w^2/(1-lambda)) for 0 < w < 2(1-lambda).
// The radicand is minimized at w = 1-lambda where it equals lambda, so it is
// strictly positive on the whole branch.
inline double psi(double w, double lambda) {
    detail::check_lambda(lambda);
    if (!(w > 0.0)) throw invalid_parameter("psi: wage must be positive");
    if (!(w < plateau_wage(lambda)))
        throw invalid_parameter("psi: wage must lie below 2(1-lambda)");
    const double radicand = 1.0 - 2.0 * w + w * w / (1.0 - lambda);
    if (!(radicand > 0.0))
        throw std::logic_error("psi: nonpositive radicand on the valid branch");
    return std::sqrt(radicand);
}

// Equilibrium entrepreneurial rent, the value of phi making young agents
// indifferent between the two occupations:
//   phi(w,lambda) = (1 - w + psi(w,lambda)) / (2 lambda)   if w < 2(1-lambda)
//   phi(w,lambda) = 1                                       otherwise.
inline double rent(double w, double lambda) {
    detail::check_lambda(lambda);
    detail::check_wage(w);
    if (!detail::binding(w, lambda)) return 1.0;
    return (1.0 - w + psi(w, lambda)) / (2.0 * lambda);
}

struct SavingChoice {
    double saving_rate;
    double utility;  // value of (1-s)((phi-1)/w + s) at the optimum
};

// Optimal saving rate of an entrepreneur facing wage w, rent phi and
// pledgeability lambda:
//   s^b = max{ (1/2)(1 - (phi-1)/w), (1 - lambda phi)/w }  clipped to [0,1].
// Returns nullopt when w < 1 - lambda phi: the project cannot be funded even
// by saving the entire wage.
inline std::optional<SavingChoice> optimal_entrepreneur_saving(double w, double phi,
                                                               double lambda) {
    detail::check_lambda(lambda);
    if (!(w > 0.0)) throw invalid_parameter("wage must be positive");
    if (!(phi >= 1.0)) throw invalid_parameter("rent must be at least 1");
    const double floor = (1.0 - lambda * phi) / w;  // credit-constraint minimum
    if (floor > 1.0) return std::nullopt;
    const double excess = (phi - 1.0) / w;
    const double unconstrained = 0.5 * (1.0 - excess);
    const double s = std::clamp(std::max(unconstrained, floor), 0.0, 1.0);
    double utility;
    if (w >= 1.0 - (2.0 * lambda - 1.0) * phi) {
        utility = 0.25 * (1.0 + excess) * (1.0 + excess);
    } else {
        utility = (1.0 - floor) * ((1.0 - lambda) * phi / w);
    }
    return SavingChoice{s, utility};
}

// Equilibrium saving rate of entrepreneurs, (1 - lambda phi(w,lambda))/w on
// the binding branch and 1/2 on the plateau. The binding branch is evaluated
// as (4 - w lambda/(1-lambda)) / (2 (1 + w + psi)), which is algebraically
// identical and stays accurate as w -> 0 where the direct form is 0/0.
inline double entrepreneur_saving_rate(double w, double lambda) {
    detail::check_lambda(lambda);
    detail::check_wage(w);
    if (!detail::binding(w, lambda)) return 0.5;
    return (4.0 - w * lambda / (1.0 - lambda)) / (2.0 * (1.0 + w + psi(w, lambda)));
}

// National saving rate: 1/(1 + psi(w,lambda)) = 1/(w + 2 lambda phi) on the
// binding branch, 1/2 on the plateau. Hump-shaped with peak at w = 1-lambda.
inline double national_saving_rate(double w, double lambda) {
    detail::check_lambda(lambda);
    detail::check_wage(w);
    if (!detail::binding(w, lambda)) return 0.5;
    return 1.0 / (1.0 + psi(w, lambda));
}

// Fraction of the young who become entrepreneurs: pi = s(w,lambda) w.
inline double entrepreneur_fraction(double w, double lambda) {
    return national_saving_rate(w, lambda) * w;
}

struct EquilibriumState {
    double wage;                   // w
    double rent;                   // phi
    double entrepreneur_saving;    // s^b
    double investor_saving;        // s^l, 1/2 in the base model
    double national_saving;        // s
    double entrepreneur_fraction;  // pi = s w
    double capital;                // k = w^{-1}(wage)
    double output;                 // y = f(k)
};

// lhs - rhs of the credit-market clearing condition
//   pi (1 - s^b w) = (1 - pi) w/2.
inline double clearing_residual(const EquilibriumState& st) {
    return st.entrepreneur_fraction * (1.0 - st.entrepreneur_saving * st.wage) -
           (1.0 - st.entrepreneur_fraction) * st.wage * 0.5;
}

struct EconomyParams {
    double pledgeability;    // lambda in (0,1)
    double project_return;   // R in (0, R+): capital produced per unit invested
    CobbDouglas production{1.0, 0.33};
    double discount = 1.0;        // beta
    double min_investment = 1.0;  // I

    void validate() const {
        detail::check_lambda(pledgeability);
        if (!(project_return > 0.0 && project_return < r_plus(production)))
            throw invalid_parameter("project_return must lie in (0, R+)");
        if (!(discount > 0.0)) throw invalid_parameter("discount must be positive");
        if (!(min_investment > 0.0))
            throw invalid_parameter("min_investment must be positive");
    }
};

// Assembles the full within-period equilibrium at a given wage.
inline EquilibriumState equilibrium_at(double w, const EconomyParams& params) {
    params.validate();
    detail::check_wage(w);
    const double lambda = params.pledgeability;
    const double k = params.production.capital_of_wage(w);
    return EquilibriumState{w,
                            rent(w, lambda),
                            entrepreneur_saving_rate(w, lambda),
                            0.5,
                            national_saving_rate(w, lambda),
                            entrepreneur_fraction(w, lambda),
                            k,
                            params.production.output(k)};
}

// w s_1(w,lambda)/s(w,lambda) = s^2 w/(1-s) (1 - w/(1-lambda)).
// Positive below w = 1-lambda, zero at it, negative above; exactly 0 on the
// plateau.
inline double saving_elasticity_w(double w, double lambda) {
    detail::check_lambda(lambda);
    detail::check_wage(w);
    if (!detail::binding(w, lambda)) return 0.0;
    const double s = national_saving_rate(w, lambda);
    return s * s * w / (1.0 - s) * (1.0 - w / (1.0 - lambda));
}

// lambda s_2(w,lambda)/s(w,lambda) = -lambda s^2/(2(1-s)) (w/(1-lambda))^2.
// Strictly negative on the binding branch; exactly 0 on the plateau.
inline double saving_elasticity_lambda(double w, double lambda) {
    detail::check_lambda(lambda);
    detail::check_wage(w);
    if (!detail::binding(w, lambda)) return 0.0;
    const double s = national_saving_rate(w, lambda);
    const double ratio = w / (1.0 - lambda);
    return -lambda * s * s / (2.0 * (1.0 - s)) * ratio * ratio;
}

}  // namespace olg
