#pragma once
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "olg/equilibrium.hpp"

namespace olg {

// One step of the closed-economy wage map: w_{t+1} = w(R pi(w_t, lambda)).
// With R in (0, R+) and w in (0,2) the image lies in (0, w(R)) subset (0,2).
inline double step(double w, const EconomyParams& params) {
    params.validate();
    detail::check_wage(w);
    const double k_next =
        params.project_return * entrepreneur_fraction(w, params.pledgeability);
    return params.production.wage(k_next);
}

struct Trajectory {
    EconomyParams params;
    std::vector<EquilibriumState> states;  // indexed by period t = 0..T
    std::optional<int> converged_at;       // first t with |w_t - w_{t-1}| < 1e-10
};

// Iterates the wage map for `horizon` periods from w0, assembling the full
// equilibrium state each period. When stop_on_convergence is set the
// trajectory ends at the first period with |dw| < 1e-10; otherwise it always
// has horizon+1 states. converged_at records which occurred.
inline Trajectory simulate(double w0, int horizon, const EconomyParams& params,
                           bool stop_on_convergence = false) {
    params.validate();
    detail::check_wage(w0);
    if (horizon < 1) throw invalid_parameter("simulate: horizon must be >= 1");
    Trajectory traj{params, {}, std::nullopt};
    traj.states.reserve(static_cast<std::size_t>(horizon) + 1);
    traj.states.push_back(equilibrium_at(w0, params));
    double w = w0;
    for (int t = 1; t <= horizon; ++t) {
        const double w_next = step(w, params);
        traj.states.push_back(equilibrium_at(w_next, params));
        if (!traj.converged_at && std::abs(w_next - w) < 1e-10) traj.converged_at = t;
        w = w_next;
        if (stop_on_convergence && traj.converged_at) break;
    }
    return traj;
}

struct SteadyStateRoot {
    double wage;
    double map_slope;  // central-difference slope of the wage map at the root
    bool stable;       // |map_slope| < 1
};

struct SteadyStateReport {
    std::vector<SteadyStateRoot> interior;  // sorted by wage
    bool unique;       // elasticity criterion held on the whole scan range
    std::string corner_note;
};

// Enumerates interior steady states: wages solving Pi(w,lambda) = R where
// Pi(w,lambda) = w^{-1}(w) / (s(w,lambda) w). Scans grid_n intervals for sign
// changes of Pi - R over (eps, min(2, w(R)) - eps) and refines each bracket
// by bisection. The report's `unique` flag is true when
//   (1-alpha)/alpha - w s_1/s > 0
// holds at every scan point, in which case Pi is strictly increasing and the
// interior steady state is unique (alpha < 1/2 is sufficient).
inline SteadyStateReport steady_states(const EconomyParams& params, int grid_n = 10000) {
    params.validate();
    if (grid_n < 1000) throw invalid_parameter("steady_states: grid_n must be >= 1000");
    const double lambda = params.pledgeability;
    const auto& prod = params.production;

    const double eps = 1e-9;
    const double lo = eps;
    const double hi = std::min(2.0, prod.wage(params.project_return)) - eps;

    auto excess = [&](double w) {
        return prod.capital_of_wage(w) / entrepreneur_fraction(w, lambda) -
               params.project_return;
    };
    auto map_at = [&](double w) { return step(w, params); };

    SteadyStateReport report;
    report.corner_note =
        "w = 0 is always a corner steady state: pi(0,lambda) = 0 and w(0) = 0";
    report.unique = true;

    const double critical = (1.0 - prod.alpha()) / prod.alpha();
    double w_prev = lo;
    double g_prev = excess(lo);
    for (int i = 1; i <= grid_n; ++i) {
        const double w_i = lo + (hi - lo) * static_cast<double>(i) / grid_n;
        const double g_i = excess(w_i);
        if (report.unique && !(critical - saving_elasticity_w(w_i, lambda) > 0.0))
            report.unique = false;
        double root = std::numeric_limits<double>::quiet_NaN();
        if (g_prev == 0.0) {
            root = w_prev;
        } else if (g_i != 0.0 && (g_prev > 0.0) != (g_i > 0.0)) {
            root = bisect(excess, w_prev, w_i, {1e-12, 200});
        }
        if (std::isfinite(root)) {
            const double h = 1e-7;
            const double slope = (map_at(root + h) - map_at(root - h)) / (2.0 * h);
            report.interior.push_back({root, slope, std::abs(slope) < 1.0});
        }
        w_prev = w_i;
        g_prev = g_i;
    }
    return report;
}

// Small-open-economy wage map: k_{t+1} = (f')^{-1}(r* phi(w,lambda)/R) and
// w_{t+1} = w(k_{t+1}). Nondecreasing in w since (f')^{-1} is decreasing and
// phi is nonincreasing. Throws inversion_error when r* phi/R falls outside
// the range of f'.
inline double open_economy_step(double w, double world_interest_rate,
                                const EconomyParams& params) {
    params.validate();
    detail::check_wage(w);
    const double target =
        world_interest_rate * rent(w, params.pledgeability) / params.project_return;
    const double k_next = params.production.capital_of_marginal_product(target);
    return params.production.wage(k_next);
}

}  // namespace olg
