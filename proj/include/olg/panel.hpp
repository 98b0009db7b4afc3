#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "olg/dynamics.hpp"
#include "olg/io.hpp"

namespace olg {

struct ElasticityCoefficients {
    double income;  // gamma: elasticity of s in y
    double credit;  // theta: elasticity of s in lambda
};

// gamma = (w s_1/s) * (y (w o f^{-1})'(y) / (w o f^{-1})(y)). The second
// factor is identically 1 for Cobb-Douglas, so gamma inherits the sign
// switch of the saving elasticity at w = 1-lambda.
inline double gamma_coefficient(double w, double lambda, const ProductionFunction& p) {
    const double y = p.output(p.capital_of_wage(w));
    return saving_elasticity_w(w, lambda) * p.wage_output_elasticity(y);
}

inline ElasticityCoefficients elasticity_coefficients(double w, double lambda,
                                                      const ProductionFunction& p) {
    return {gamma_coefficient(w, lambda, p), saving_elasticity_lambda(w, lambda)};
}

struct InteractionCoefficients {
    double gamma_prime;  // -y_hat F_1 - lambda_hat F_2
    double delta;        // F_2, coefficient on dlny * lambda_i
    double zeta;         // F_1, coefficient on dlny * y_i
    double y_hat;        // solves (w o f^{-1})(y) = 1 - lambda_hat
    double lambda_hat;
};

// First-order expansion of F(y,lambda) = gamma around the point where the
// income elasticity vanishes: y_hat solving (w o f^{-1})(y) = 1 - lambda_hat.
// F_1 and F_2 are computed by central differences with relative step 1e-6.
// F(y_hat, lambda_hat) = 0 is verified to 1e-8; a larger residual means the
// wage inversion is broken.
inline InteractionCoefficients interaction_coefficients(double lambda_hat,
                                                        const ProductionFunction& p) {
    detail::check_lambda(lambda_hat);
    const double y_hat = p.output(p.capital_of_wage(1.0 - lambda_hat));
    auto F = [&](double y, double lambda) {
        return gamma_coefficient(p.wage(p.capital_of_output(y)), lambda, p);
    };
    const double center = F(y_hat, lambda_hat);
    if (!(std::abs(center) <= 1e-8))
        throw inversion_error(
            "interaction_coefficients: F(y_hat, lambda_hat) is not zero; "
            "wage inversion inconsistent");
    const double h = 1e-6;
    const double f1 = (F(y_hat * (1.0 + h), lambda_hat) - F(y_hat * (1.0 - h), lambda_hat)) /
                      (2.0 * y_hat * h);
    const double f2 = (F(y_hat, lambda_hat * (1.0 + h)) - F(y_hat, lambda_hat * (1.0 - h))) /
                      (2.0 * lambda_hat * h);
    return {-y_hat * f1 - lambda_hat * f2, f2, f1, y_hat, lambda_hat};
}

// One synthetic panel cell: consecutive-year log differences plus the
// country means used to build interaction regressors.
struct PanelObservation {
    std::string country;
    int year;
    double dlns;     // d ln s
    double dlny;     // d ln y
    double dlnlam;   // d ln lambda
    double y_bar;    // country mean output per capita
    double lam_bar;  // country mean pledgeability
};

struct CountrySpec {
    std::string name;
    double pledgeability;   // initial lambda_i
    double pledge_drift;    // per-period drift of ln lambda
    double tfp;             // A_i
    double alpha;           // capital share
    double project_return;  // R_i
    double initial_wage;    // w_0 in (0,2)
};

struct WorldSpec {
    std::vector<CountrySpec> countries;
    double sigma = 0.01;         // stdev of iid log TFP shocks
    double pledge_noise = 0.005; // stdev of iid log pledgeability noise
    int horizon = 40;            // simulated periods; horizon differences emitted
};

// Synthetic world with a poor block (steady-state wage below 1-lambda, where
// the income elasticity of saving is positive) and a rich block (wage in
// (1-lambda, 2(1-lambda)), elasticity negative). Each country starts at its
// steady state: project returns are backed out from the target wage via
// Pi(w*) = R. Pledgeability levels cycle over {0.3,...,0.7} with alternating
// slow log drift so the credit elasticity is identified.
inline WorldSpec default_world(int n_countries = 60, int horizon = 40,
                               double sigma = 0.01, double pledge_drift = 0.002,
                               double pledge_noise = 0.005) {
    if (n_countries < 2) throw invalid_parameter("default_world: need at least 2 countries");
    if (horizon < 2) throw invalid_parameter("default_world: horizon must be >= 2");
    const double alpha = 0.33;
    const CobbDouglas prod(1.0, alpha);
    const double lambdas[] = {0.3, 0.4, 0.5, 0.6, 0.7};

    auto make = [&](const std::string& name, int i, double frac_of_branch,
                    double drift_sign) {
        const double lambda = lambdas[i % 5];
        const double w_star = frac_of_branch * (1.0 - lambda);
        const double r = prod.capital_of_wage(w_star) / entrepreneur_fraction(w_star, lambda);
        return CountrySpec{name, lambda, drift_sign * pledge_drift, 1.0, alpha, r, w_star};
    };

    WorldSpec spec;
    spec.sigma = sigma;
    spec.pledge_noise = pledge_noise;
    spec.horizon = horizon;
    const int n_poor = n_countries / 2;
    const int n_rich = n_countries - n_poor;
    char buf[16];
    for (int i = 0; i < n_poor; ++i) {
        std::snprintf(buf, sizeof buf, "P%03d", i);
        const double frac = 0.45 + 0.40 * i / std::max(1, n_poor - 1);
        spec.countries.push_back(make(buf, i, frac, i % 2 == 0 ? 1.0 : -1.0));
    }
    for (int i = 0; i < n_rich; ++i) {
        std::snprintf(buf, sizeof buf, "R%03d", i);
        const double frac = 1.25 + 0.60 * i / std::max(1, n_rich - 1);
        spec.countries.push_back(make(buf, i, frac, i % 2 == 0 ? 1.0 : -1.0));
    }
    return spec;
}

namespace detail {

// Deterministic per-country engine: streams depend only on (seed, index), so
// generation order (and threading) cannot change the output.
inline std::mt19937_64 country_engine(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    return std::mt19937_64(seq);
}

inline std::vector<PanelObservation> simulate_country(const CountrySpec& c,
                                                      const WorldSpec& spec,
                                                      std::uint64_t seed,
                                                      std::size_t index) {
    check_lambda(c.pledgeability);
    check_wage(c.initial_wage);
    const CobbDouglas prod(c.tfp, c.alpha);
    if (!(c.project_return > 0.0 && c.project_return < r_plus(prod)))
        throw invalid_parameter("generate_panel: project_return outside (0, R+) for " +
                                c.name);
    auto rng = country_engine(seed, index);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int t_end = spec.horizon;
    std::vector<double> ln_s(t_end + 1), ln_y(t_end + 1), ln_lam(t_end + 1);
    double sum_y = 0.0, sum_lam = 0.0;
    double k = prod.capital_of_wage(c.initial_wage);
    for (int t = 0; t <= t_end; ++t) {
        // TFP shock enters the wage contemporaneously; draws pushing the wage
        // out of (0,2) are redrawn, at most 100 times per cell.
        double w = 0.0, y = 0.0;
        for (int tries = 0;; ++tries) {
            const double eps = spec.sigma > 0.0 ? spec.sigma * gauss(rng) : 0.0;
            const double a = c.tfp * std::exp(eps);
            y = a * std::pow(k, c.alpha);
            w = (1.0 - c.alpha) * y;
            if (w > 0.0 && w < 2.0) break;
            if (spec.sigma == 0.0 || tries >= 100)
                throw numeric_error("generate_panel: wage left (0,2) for " + c.name +
                                    " at t=" + std::to_string(t));
        }
        double lam = 0.0;
        for (int tries = 0;; ++tries) {
            const double eta = spec.pledge_noise > 0.0 ? spec.pledge_noise * gauss(rng) : 0.0;
            lam = c.pledgeability * std::exp(c.pledge_drift * t + eta);
            if (lam > 0.01 && lam < 0.99) break;
            if (spec.pledge_noise == 0.0 || tries >= 100)
                throw numeric_error("generate_panel: pledgeability left (0.01,0.99) for " +
                                    c.name + " at t=" + std::to_string(t));
        }
        ln_s[t] = std::log(national_saving_rate(w, lam));
        ln_y[t] = std::log(y);
        ln_lam[t] = std::log(lam);
        sum_y += y;
        sum_lam += lam;
        k = c.project_return * entrepreneur_fraction(w, lam);
    }

    const double y_bar = sum_y / (t_end + 1);
    const double lam_bar = sum_lam / (t_end + 1);
    std::vector<PanelObservation> out;
    out.reserve(t_end);
    for (int t = 1; t <= t_end; ++t)
        out.push_back({c.name, t, ln_s[t] - ln_s[t - 1], ln_y[t] - ln_y[t - 1],
                       ln_lam[t] - ln_lam[t - 1], y_bar, lam_bar});
    return out;
}

}  // namespace detail

// Simulates every country of the world under multiplicative TFP shocks and
// emits consecutive-year log differences. Deterministic given the seed;
// countries run in parallel on independent RNG streams.
inline std::vector<PanelObservation> generate_panel(const WorldSpec& spec,
                                                    std::uint64_t seed) {
    if (spec.countries.empty()) throw invalid_parameter("generate_panel: empty world");
    if (spec.horizon < 1) throw invalid_parameter("generate_panel: horizon must be >= 1");
    if (!(spec.sigma >= 0.0) || !(spec.pledge_noise >= 0.0))
        throw invalid_parameter("generate_panel: shock volatilities must be >= 0");

    const std::size_t n = spec.countries.size();
    std::vector<std::vector<PanelObservation>> blocks(n);
    const unsigned workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(n)));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&](std::size_t begin, std::size_t end) {
        try {
            for (std::size_t i = begin; i < end; ++i)
                blocks[i] = detail::simulate_country(spec.countries[i], spec, seed, i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (workers <= 1) {
        run(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            if (begin >= n) break;
            pool.emplace_back(run, begin, std::min(n, begin + chunk));
        }
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<PanelObservation> panel;
    for (auto& block : blocks)
        panel.insert(panel.end(), block.begin(), block.end());
    return panel;
}

struct FeEstimates {
    std::vector<std::string> regressors;
    std::vector<double> coefficients;

    double operator[](const std::string& name) const {
        for (std::size_t i = 0; i < regressors.size(); ++i)
            if (regressors[i] == name) return coefficients[i];
        throw invalid_parameter("no such regressor: " + name);
    }
};

// Two-way fixed-effects within estimator: country and year means are removed
// by alternating projections until the maximum change is below 1e-12, then
// the demeaned system is solved by least squares. With interactions the
// regressors are (dlny, dlny*lam_bar, dlny*y_bar, dlnlam), matching the
// interaction model; otherwise (dlny, dlnlam). Point estimates only.
inline FeEstimates within_fe_ols(std::span<const PanelObservation> panel,
                                 bool with_interactions) {
    std::map<std::string, int> countries;
    std::map<int, int> years;
    for (const auto& obs : panel) {
        countries.emplace(obs.country, 0);
        years.emplace(obs.year, 0);
    }
    if (countries.size() < 2 || years.size() < 2)
        throw invalid_parameter("within_fe_ols: need at least 2 countries and 2 years");
    int next = 0;
    for (auto& [name, id] : countries) id = next++;
    next = 0;
    for (auto& [year, id] : years) id = next++;

    const std::vector<std::string> names =
        with_interactions
            ? std::vector<std::string>{"dlny", "dlny_x_lambar", "dlny_x_ybar", "dlnlam"}
            : std::vector<std::string>{"dlny", "dlnlam"};
    const int p = static_cast<int>(names.size());
    const int n = static_cast<int>(panel.size());

    Eigen::MatrixXd data(n, p + 1);
    std::vector<std::vector<int>> by_country(countries.size()), by_year(years.size());
    for (int i = 0; i < n; ++i) {
        const auto& obs = panel[i];
        data(i, 0) = obs.dlns;
        data(i, 1) = obs.dlny;
        if (with_interactions) {
            data(i, 2) = obs.dlny * obs.lam_bar;
            data(i, 3) = obs.dlny * obs.y_bar;
            data(i, 4) = obs.dlnlam;
        } else {
            data(i, 2) = obs.dlnlam;
        }
        by_country[countries[obs.country]].push_back(i);
        by_year[years[obs.year]].push_back(i);
    }

    bool converged = false;
    for (int iter = 0; iter < 10000 && !converged; ++iter) {
        double change = 0.0;
        for (const auto* groups : {&by_country, &by_year}) {
            for (const auto& rows : *groups) {
                Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(p + 1);
                for (int r : rows) mean += data.row(r);
                mean /= static_cast<double>(rows.size());
                change = std::max(change, mean.cwiseAbs().maxCoeff());
                for (int r : rows) data.row(r) -= mean;
            }
        }
        converged = change < 1e-12;
    }
    if (!converged)
        throw numeric_error("within_fe_ols: two-way demeaning did not converge");

    const Eigen::VectorXd y = data.col(0);
    const Eigen::MatrixXd x = data.rightCols(p);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        // Name the first column that adds no rank.
        Eigen::MatrixXd kept(n, 0);
        for (int j = 0; j < p; ++j) {
            Eigen::MatrixXd trial(n, kept.cols() + 1);
            trial << kept, x.col(j);
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> probe(trial);
            probe.setThreshold(1e-10);
            if (probe.rank() == trial.cols()) {
                kept = std::move(trial);
            } else {
                throw rank_error("within_fe_ols: regressor '" + names[j] +
                                     "' is collinear or constant after demeaning",
                                 names[j]);
            }
        }
    }
    const Eigen::VectorXd beta = qr.solve(y);
    return FeEstimates{names, {beta.data(), beta.data() + p}};
}

// Panel CSV: header `country,year,dlns,dlny,dlnlam,y_bar,lam_bar`, UTF-8,
// RFC 4180 quoting, numbers at 12 significant digits.
inline constexpr const char* panel_csv_header = "country,year,dlns,dlny,dlnlam,y_bar,lam_bar";

inline void write_panel_csv(std::ostream& os, std::span<const PanelObservation> panel) {
    os << panel_csv_header << '\n';
    for (const auto& obs : panel) {
        os << csv_field(obs.country) << ',' << obs.year << ',' << format_number(obs.dlns)
           << ',' << format_number(obs.dlny) << ',' << format_number(obs.dlnlam) << ','
           << format_number(obs.y_bar) << ',' << format_number(obs.lam_bar) << '\n';
    }
}

inline std::vector<PanelObservation> read_panel_csv(std::istream& is) {
    std::vector<std::string> fields;
    if (!read_csv_record(is, fields))
        throw invalid_parameter("panel csv: empty input");
    {
        std::ostringstream joined;
        for (std::size_t i = 0; i < fields.size(); ++i)
            joined << (i ? "," : "") << fields[i];
        if (joined.str() != panel_csv_header)
            throw invalid_parameter("panel csv: unexpected header '" + joined.str() + "'");
    }
    std::vector<PanelObservation> panel;
    while (read_csv_record(is, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing newline
        if (fields.size() != 7)
            throw invalid_parameter("panel csv: expected 7 fields, got " +
                                    std::to_string(fields.size()));
        PanelObservation obs;
        obs.country = fields[0];
        const double year = parse_number(fields[1], "year");
        if (year != std::floor(year))
            throw invalid_parameter("panel csv: year must be an integer");
        obs.year = static_cast<int>(year);
        obs.dlns = parse_number(fields[2], "dlns");
        obs.dlny = parse_number(fields[3], "dlny");
        obs.dlnlam = parse_number(fields[4], "dlnlam");
        obs.y_bar = parse_number(fields[5], "y_bar");
        obs.lam_bar = parse_number(fields[6], "lam_bar");
        for (double v : {obs.dlns, obs.dlny, obs.dlnlam, obs.y_bar, obs.lam_bar})
            if (!std::isfinite(v))
                throw invalid_parameter("panel csv: non-finite value in row for " +
                                        obs.country);
        panel.push_back(std::move(obs));
    }
    return panel;
}

}  // namespace olg
