// olgsim: command-line front end for the credit-constrained OLG saving model.
// Subcommands: simulate, figures, steady, panel, sweep. Outputs are CSV
// (RFC 4180, header row) or a single JSON document, numbers at 12
// significant digits. Exit codes: 0 success, 2 usage/config error,
// 3 numerical failure.
#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "olg/dynamics.hpp"
#include "olg/extended.hpp"
#include "olg/io.hpp"
#include "olg/panel.hpp"

namespace {

using json = nlohmann::ordered_json;

double out_num(double v) { return olg::round_to_output_precision(v); }

void emit(const std::string& content, const std::string& path) {
    if (path.empty()) {
        std::cout << content;
    } else {
        olg::write_file_atomic(path, content);
    }
}

std::string single_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ';');
    return s;
}

struct SimulateOpts {
    double lambda = 0.5, r = 2.0, alpha = 0.33, tfp = 1.0, w0 = 0.1;
    int horizon = 100;
    std::string format = "csv", out;
};

int run_simulate(const SimulateOpts& o) {
    const olg::EconomyParams params{o.lambda, o.r, olg::CobbDouglas(o.tfp, o.alpha)};
    const auto traj = olg::simulate(o.w0, o.horizon, params);
    if (o.format == "csv") {
        std::ostringstream os;
        os << "t,w,k,y,phi,s_b,s,pi\n";
        for (std::size_t t = 0; t < traj.states.size(); ++t) {
            const auto& st = traj.states[t];
            os << t << ',' << olg::format_number(st.wage) << ','
               << olg::format_number(st.capital) << ',' << olg::format_number(st.output)
               << ',' << olg::format_number(st.rent) << ','
               << olg::format_number(st.entrepreneur_saving) << ','
               << olg::format_number(st.national_saving) << ','
               << olg::format_number(st.entrepreneur_fraction) << '\n';
        }
        emit(os.str(), o.out);
    } else {
        json doc;
        doc["params"] = {{"lambda", o.lambda}, {"r", o.r},      {"alpha", o.alpha},
                         {"tfp", o.tfp},       {"w0", o.w0},    {"t", o.horizon}};
        doc["columns"] = {"t", "w", "k", "y", "phi", "s_b", "s", "pi"};
        doc["rows"] = json::array();
        for (std::size_t t = 0; t < traj.states.size(); ++t) {
            const auto& st = traj.states[t];
            doc["rows"].push_back({t, out_num(st.wage), out_num(st.capital),
                                   out_num(st.output), out_num(st.rent),
                                   out_num(st.entrepreneur_saving),
                                   out_num(st.national_saving),
                                   out_num(st.entrepreneur_fraction)});
        }
        if (traj.converged_at) doc["converged_at"] = *traj.converged_at;
        emit(doc.dump(2) + "\n", o.out);
    }
    return 0;
}

struct FiguresOpts {
    std::vector<double> lambdas;
    int grid_n = 1000;
    double beta = 0.7, min_investment = 1.0;
    std::string outdir = ".";
};

int run_figures(const FiguresOpts& o) {
    namespace fs = std::filesystem;
    const std::vector<double> lambdas =
        o.lambdas.empty() ? std::vector<double>{0.3, 0.5, 0.7} : o.lambdas;
    if (o.grid_n < 2) throw olg::invalid_parameter("figures: grid-n must be >= 2");
    fs::create_directories(o.outdir);
    const double margin = 1e-6;

    auto sweep_csv = [&](const std::string& file, auto&& value, double x_max) {
        std::ostringstream os;
        os << "w,value,lambda\n";
        for (double lambda : lambdas) {
            for (int j = 0; j < o.grid_n; ++j) {
                const double x =
                    margin + (x_max - 2.0 * margin) * static_cast<double>(j) / (o.grid_n - 1);
                os << olg::format_number(x) << ',' << olg::format_number(value(x, lambda))
                   << ',' << olg::format_number(lambda) << '\n';
            }
        }
        olg::write_file_atomic(fs::path(o.outdir) / file, os.str());
    };

    sweep_csv("figure1a_rent.csv",
              [](double w, double l) { return olg::rent(w, l); }, 2.0);
    sweep_csv("figure1b_entrepreneur_saving.csv",
              [](double w, double l) { return olg::entrepreneur_saving_rate(w, l); }, 2.0);
    sweep_csv("figure2a_national_saving.csv",
              [](double w, double l) { return olg::national_saving_rate(w, l); }, 2.0);
    sweep_csv("figure2b_entrepreneur_fraction.csv",
              [](double w, double l) { return olg::entrepreneur_fraction(w, l); }, 2.0);

    // Extended model panels: x is the normalized wage w/I over the domain
    // (0, (1+beta)/beta), which covers every plateau onset.
    auto extended_at = [&](double u, double lambda) {
        const olg::EconomyParams params{lambda, 1.0, olg::CobbDouglas(1.0, 0.33), o.beta,
                                        o.min_investment};
        return olg::extended_equilibrium(u * o.min_investment, params);
    };
    const double u_max = (1.0 + o.beta) / o.beta;
    sweep_csv("figure4a_extended_saving.csv",
              [&](double u, double l) { return extended_at(u, l).national_saving; }, u_max);
    sweep_csv("figure4b_extended_fraction.csv",
              [&](double u, double l) { return extended_at(u, l).entrepreneur_fraction; },
              u_max);
    return 0;
}

struct SteadyOpts {
    double lambda = 0.5, r = 2.0, alpha = 0.33, tfp = 1.0;
    int grid_n = 10000;
    std::string out;
};

int run_steady(const SteadyOpts& o) {
    const olg::EconomyParams params{o.lambda, o.r, olg::CobbDouglas(o.tfp, o.alpha)};
    const auto report = olg::steady_states(params, o.grid_n);
    json doc;
    doc["params"] = {{"lambda", o.lambda}, {"r", o.r}, {"alpha", o.alpha}, {"tfp", o.tfp},
                     {"grid_n", o.grid_n}};
    doc["interior"] = json::array();
    for (const auto& root : report.interior)
        doc["interior"].push_back({{"w", out_num(root.wage)},
                                   {"map_slope", out_num(root.map_slope)},
                                   {"stable", root.stable}});
    doc["unique"] = report.unique;
    doc["corner"] = {{"w", 0.0}, {"note", report.corner_note}};
    emit(doc.dump(2) + "\n", o.out);
    return 0;
}

struct PanelOpts {
    int countries = 60, horizon = 40;
    double sigma = 0.01, lambda_drift = 0.002, lambda_noise = 0.005;
    std::uint64_t seed = 42;
    std::string out_panel = "panel.csv", out_estimates = "estimates.json", from_csv;
};

int run_panel(const PanelOpts& o) {
    std::vector<olg::PanelObservation> panel;
    if (!o.from_csv.empty()) {
        std::ifstream in(o.from_csv, std::ios::binary);
        if (!in) throw olg::invalid_parameter("panel: cannot open " + o.from_csv);
        panel = olg::read_panel_csv(in);
    } else {
        const auto spec = olg::default_world(o.countries, o.horizon, o.sigma,
                                             o.lambda_drift, o.lambda_noise);
        const auto generated = olg::generate_panel(spec, o.seed);
        std::ostringstream os;
        olg::write_panel_csv(os, generated);
        const std::string csv = os.str();
        olg::write_file_atomic(o.out_panel, csv);
        // Estimate from the emitted 12-digit values so re-ingesting the CSV
        // reproduces the coefficients exactly.
        std::istringstream round_trip(csv);
        panel = olg::read_panel_csv(round_trip);
    }

    std::vector<olg::PanelObservation> poor, rich;
    for (const auto& obs : panel) {
        if (!obs.country.empty() && obs.country.front() == 'P') poor.push_back(obs);
        if (!obs.country.empty() && obs.country.front() == 'R') rich.push_back(obs);
    }
    auto cluster_ready = [](const std::vector<olg::PanelObservation>& subset) {
        std::map<std::string, int> c;
        std::map<int, int> y;
        for (const auto& obs : subset) {
            c.emplace(obs.country, 0);
            y.emplace(obs.year, 0);
        }
        return c.size() >= 2 && y.size() >= 2;
    };

    json doc;
    doc["observations"] = panel.size();
    {
        std::map<std::string, int> c;
        for (const auto& obs : panel) c.emplace(obs.country, 0);
        doc["countries"] = c.size();
    }
    const auto pooled = olg::within_fe_ols(panel, false);
    doc["pooled"] = {{"gamma", out_num(pooled["dlny"])}, {"theta", out_num(pooled["dlnlam"])}};
    json signs;
    signs["theta"] = "negative";
    json match;
    match["theta"] = pooled["dlnlam"] < 0.0;
    if (cluster_ready(poor)) {
        const auto est = olg::within_fe_ols(poor, false);
        doc["poor"] = {{"gamma", out_num(est["dlny"])}, {"theta", out_num(est["dlnlam"])}};
        signs["gamma_poor"] = "positive";
        match["gamma_poor"] = est["dlny"] > 0.0;
    }
    if (cluster_ready(rich)) {
        const auto est = olg::within_fe_ols(rich, false);
        doc["rich"] = {{"gamma", out_num(est["dlny"])}, {"theta", out_num(est["dlnlam"])}};
        signs["gamma_rich"] = "negative";
        match["gamma_rich"] = est["dlny"] < 0.0;
    }
    const auto inter = olg::within_fe_ols(panel, true);
    doc["interactions"] = {{"gamma_prime", out_num(inter["dlny"])},
                           {"delta", out_num(inter["dlny_x_lambar"])},
                           {"zeta", out_num(inter["dlny_x_ybar"])},
                           {"theta_prime", out_num(inter["dlnlam"])}};
    signs["gamma_prime"] = "positive";
    signs["delta"] = "negative";
    signs["zeta"] = "negative";
    match["gamma_prime"] = inter["dlny"] > 0.0;
    match["delta"] = inter["dlny_x_lambar"] < 0.0;
    match["zeta"] = inter["dlny_x_ybar"] < 0.0;
    doc["predicted_signs"] = signs;
    doc["sign_match"] = match;
    emit(doc.dump(2) + "\n", o.out_estimates);
    return 0;
}

struct SweepOpts {
    std::vector<double> lambdas;
    double wmin = 1e-6, wmax = 2.0 - 1e-6;
    int grid_n = 201;
    std::string format = "csv", out;
};

int run_sweep(const SweepOpts& o) {
    const std::vector<double> lambdas =
        o.lambdas.empty() ? std::vector<double>{0.3, 0.5, 0.7} : o.lambdas;
    if (o.grid_n < 2) throw olg::invalid_parameter("sweep: grid-n must be >= 2");
    if (!(o.wmin > 0.0 && o.wmax < 2.0 && o.wmin < o.wmax))
        throw olg::invalid_parameter("sweep: need 0 < wmin < wmax < 2");
    const char* columns[] = {"w", "lambda", "phi", "s_b", "s", "pi", "eps_w", "eps_lambda"};
    std::vector<std::array<double, 8>> rows;
    for (double lambda : lambdas) {
        for (int j = 0; j < o.grid_n; ++j) {
            const double w = o.wmin + (o.wmax - o.wmin) * static_cast<double>(j) / (o.grid_n - 1);
            rows.push_back({w, lambda, olg::rent(w, lambda),
                            olg::entrepreneur_saving_rate(w, lambda),
                            olg::national_saving_rate(w, lambda),
                            olg::entrepreneur_fraction(w, lambda),
                            olg::saving_elasticity_w(w, lambda),
                            olg::saving_elasticity_lambda(w, lambda)});
        }
    }
    if (o.format == "csv") {
        std::ostringstream os;
        for (std::size_t i = 0; i < 8; ++i) os << (i ? "," : "") << columns[i];
        os << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < 8; ++i)
                os << (i ? "," : "") << olg::format_number(row[i]);
            os << '\n';
        }
        emit(os.str(), o.out);
    } else {
        json doc;
        doc["columns"] = columns;
        doc["rows"] = json::array();
        for (const auto& row : rows) {
            json r = json::array();
            for (double v : row) r.push_back(out_num(v));
            doc["rows"].push_back(r);
        }
        emit(doc.dump(2) + "\n", o.out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for a credit-constrained OLG saving model"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; command-line flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);

    SimulateOpts sim;
    auto* cmd_sim = app.add_subcommand("simulate", "simulate the wage dynamics");
    cmd_sim->configurable();
    cmd_sim->add_option("--lambda", sim.lambda, "pledgeability in (0,1)")->required();
    cmd_sim->add_option("--r", sim.r, "project return R in (0, R+)")->required();
    cmd_sim->add_option("--alpha", sim.alpha, "capital share");
    cmd_sim->add_option("--tfp", sim.tfp, "total factor productivity");
    cmd_sim->add_option("--w0", sim.w0, "initial wage in (0,2)")->required();
    cmd_sim->add_option("--t", sim.horizon, "number of periods");
    cmd_sim->add_option("--format", sim.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd_sim->add_option("--out", sim.out, "output path (default stdout)");

    FiguresOpts fig;
    auto* cmd_fig = app.add_subcommand("figures", "emit plot-ready figure datasets");
    cmd_fig->configurable();
    cmd_fig->add_option("--lambda", fig.lambdas, "lambda series (default 0.3 0.5 0.7)");
    cmd_fig->add_option("--grid-n", fig.grid_n, "points per series");
    cmd_fig->add_option("--beta", fig.beta, "discount factor for the extended panels");
    cmd_fig->add_option("--i", fig.min_investment, "minimum investment size");
    cmd_fig->add_option("--outdir", fig.outdir, "output directory");

    SteadyOpts sst;
    auto* cmd_sst = app.add_subcommand("steady", "enumerate interior steady states");
    cmd_sst->configurable();
    cmd_sst->add_option("--lambda", sst.lambda, "pledgeability in (0,1)")->required();
    cmd_sst->add_option("--r", sst.r, "project return R in (0, R+)")->required();
    cmd_sst->add_option("--alpha", sst.alpha, "capital share");
    cmd_sst->add_option("--tfp", sst.tfp, "total factor productivity");
    cmd_sst->add_option("--grid-n", sst.grid_n, "scan resolution (>= 1000)");
    cmd_sst->add_option("--out", sst.out, "output path (default stdout)");

    PanelOpts pan;
    auto* cmd_pan = app.add_subcommand("panel", "generate a synthetic panel and estimate");
    cmd_pan->configurable();
    cmd_pan->add_option("--countries", pan.countries, "number of countries");
    cmd_pan->add_option("--horizon", pan.horizon, "periods per country");
    cmd_pan->add_option("--sigma", pan.sigma, "stdev of log TFP shocks");
    cmd_pan->add_option("--seed", pan.seed, "RNG seed");
    cmd_pan->add_option("--lambda-drift", pan.lambda_drift, "pledgeability log drift");
    cmd_pan->add_option("--lambda-noise", pan.lambda_noise, "pledgeability log noise stdev");
    cmd_pan->add_option("--out-panel", pan.out_panel, "panel CSV path");
    cmd_pan->add_option("--out-estimates", pan.out_estimates, "estimates JSON path");
    cmd_pan->add_option("--from-csv", pan.from_csv,
                        "re-estimate from an existing panel CSV instead of generating");

    SweepOpts swp;
    auto* cmd_swp = app.add_subcommand("sweep", "equilibrium quantities over a wage grid");
    cmd_swp->configurable();
    cmd_swp->add_option("--lambda", swp.lambdas, "lambda series (default 0.3 0.5 0.7)");
    cmd_swp->add_option("--wmin", swp.wmin, "grid lower endpoint");
    cmd_swp->add_option("--wmax", swp.wmax, "grid upper endpoint");
    cmd_swp->add_option("--grid-n", swp.grid_n, "points per series");
    cmd_swp->add_option("--format", swp.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd_swp->add_option("--out", swp.out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: usage: " << single_line(e.what()) << "\n";
        return 2;
    }

    try {
        if (*cmd_sim) return run_simulate(sim);
        if (*cmd_fig) return run_figures(fig);
        if (*cmd_sst) return run_steady(sst);
        if (*cmd_pan) return run_panel(pan);
        if (*cmd_swp) return run_sweep(swp);
    } catch (const olg::invalid_parameter& e) {
        std::cerr << "error: config: " << single_line(e.what()) << "\n";
        return 2;
    } catch (const olg::numeric_error& e) {
        std::cerr << "error: numeric: " << single_line(e.what()) << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << single_line(e.what()) << "\n";
        return 1;
    }
    return 0;
}
