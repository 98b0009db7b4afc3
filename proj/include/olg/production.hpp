#pragma once
#include <cmath>

#include "olg/errors.hpp"
#include "olg/roots.hpp"

namespace olg {

// Intensive-form production technology: f(0) = 0, f strictly increasing and
// strictly concave. The wage w(k) = f(k) - k f'(k) is then strictly
// increasing (w'(k) = -k f''(k) > 0), so it has a well-defined inverse.
//
// The virtual inverses default to monotone bisection so an instance only has
// to supply f and f'; instances with closed forms override them.
class ProductionFunction {
public:
    virtual ~ProductionFunction() = default;

    virtual double output(double capital) const = 0;            // f(k)
    virtual double marginal_product(double capital) const = 0;  // f'(k)

    // w(k) = f(k) - k f'(k)
    virtual double wage(double capital) const {
        require_nonnegative(capital, "capital");
        if (capital == 0.0) return output(0.0);
        return output(capital) - capital * marginal_product(capital);
    }

    // w^{-1}. Tolerance 0 lets the bracket collapse to machine precision
    // within the 200-iteration cap (well past the 1e-12 guarantee), which
    // the finite-difference elasticity default needs at small k.
    virtual double capital_of_wage(double w) const {
        require_nonnegative(w, "wage");
        if (w == 0.0) return 0.0;
        const double hi = expand_upper([&](double k) { return wage(k) >= w; });
        return bisect([&](double k) { return wage(k) - w; }, 0.0, hi, {0.0, 200});
    }

    // f^{-1}
    virtual double capital_of_output(double y) const {
        require_nonnegative(y, "output");
        if (y == 0.0) return 0.0;
        const double hi = expand_upper([&](double k) { return output(k) >= y; });
        return bisect([&](double k) { return output(k) - y; }, 0.0, hi, {0.0, 200});
    }

    // (f')^{-1}; f' is strictly decreasing on (0, inf).
    virtual double capital_of_marginal_product(double m) const {
        if (!(m > 0.0))
            throw inversion_error(
                "capital_of_marginal_product: target outside the range of f' "
                "(must be positive)");
        double lo = 1.0;
        for (int i = 0; i < 2048 && marginal_product(lo) <= m; ++i) lo *= 0.5;
        if (marginal_product(lo) <= m)
            throw inversion_error("capital_of_marginal_product: no lower bracket");
        const double hi = expand_upper(
            [&](double k) { return marginal_product(k) <= m; }, 2.0 * lo);
        return bisect([&](double k) { return m - marginal_product(k); }, lo, hi,
                      {0.0, 200});
    }

    // (w o f^{-1})(y): the wage at the capital stock producing output y.
    double wage_of_output(double y) const { return wage(capital_of_output(y)); }

    // y (w o f^{-1})'(y) / (w o f^{-1})(y); central difference by default.
    virtual double wage_output_elasticity(double y) const {
        if (!(y > 0.0)) throw invalid_parameter("wage_output_elasticity: output must be positive");
        const double h = 1e-6;
        const double up = wage_of_output(y * (1.0 + h));
        const double dn = wage_of_output(y * (1.0 - h));
        return (std::log(up) - std::log(dn)) / (2.0 * h);
    }

protected:
    static void require_nonnegative(double v, const char* name) {
        if (!(v >= 0.0))
            throw invalid_parameter(std::string(name) + " must be nonnegative");
    }
};

// f(k) = A k^alpha with A > 0 and alpha in (0,1). The wage is
// w(k) = (1-alpha) A k^alpha, equivalently w = (1-alpha) y.
class CobbDouglas final : public ProductionFunction {
public:
    CobbDouglas(double tfp, double alpha) : tfp_(tfp), alpha_(alpha) {
        if (!(tfp > 0.0) || !std::isfinite(tfp))
            throw invalid_parameter("CobbDouglas: tfp must be positive and finite");
        if (!(alpha > 0.0 && alpha < 1.0))
            throw invalid_parameter("CobbDouglas: alpha must lie in (0,1)");
    }

    double tfp() const { return tfp_; }
    double alpha() const { return alpha_; }

    double output(double k) const override {
        require_nonnegative(k, "capital");
        return tfp_ * std::pow(k, alpha_);
    }

    double marginal_product(double k) const override {
        require_nonnegative(k, "capital");
        return alpha_ * tfp_ * std::pow(k, alpha_ - 1.0);
    }

    double wage(double k) const override {
        require_nonnegative(k, "capital");
        return (1.0 - alpha_) * tfp_ * std::pow(k, alpha_);
    }

    double capital_of_wage(double w) const override {
        require_nonnegative(w, "wage");
        return std::pow(w / ((1.0 - alpha_) * tfp_), 1.0 / alpha_);
    }

    double capital_of_output(double y) const override {
        require_nonnegative(y, "output");
        return std::pow(y / tfp_, 1.0 / alpha_);
    }

    double capital_of_marginal_product(double m) const override {
        if (!(m > 0.0))
            throw inversion_error(
                "capital_of_marginal_product: target outside the range of f' "
                "(must be positive)");
        return std::pow(alpha_ * tfp_ / m, 1.0 / (1.0 - alpha_));
    }

    double wage_output_elasticity(double y) const override {
        if (!(y > 0.0)) throw invalid_parameter("wage_output_elasticity: output must be positive");
        return 1.0;  // w o f^{-1} is linear
    }

private:
    double tfp_;
    double alpha_;
};

inline double wage_of_capital(double k, const ProductionFunction& p) { return p.wage(k); }

inline double capital_of_wage(double w, const ProductionFunction& p) {
    return p.capital_of_wage(w);
}

// Largest project yield R with w(R) < 2, i.e. the solution of
// (1-alpha) A R^alpha = 2. For A = 1 this is (2/(1-alpha))^(1/alpha);
// otherwise solved numerically.
inline double r_plus(const CobbDouglas& p) {
    if (p.tfp() == 1.0) return std::pow(2.0 / (1.0 - p.alpha()), 1.0 / p.alpha());
    const double hi = expand_upper([&](double k) { return p.wage(k) >= 2.0; });
    return bisect([&](double k) { return p.wage(k) - 2.0; }, 0.0, hi);
}

}  // namespace olg
