// Command-line front end: simulate heavy-tailed series, fit blockwise
// top-two / max-only estimators, compute return levels with bootstrap
// intervals, run Monte Carlo experiments, and print asymptotic matrices.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "toptwo/toptwo.hpp"

using nlohmann::json;
using namespace toptwo;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_data = 3;
constexpr int exit_numerical = 4;

void write_output(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw data_error("cannot open output file: " + out);
    f << text;
}

ModelSpec parse_model(const std::string& model, double alpha, double beta,
                      std::uint64_t seed, std::size_t burn_in) {
    if (model == "iid" || model == "iid_pareto") return ModelSpec::iid(alpha, seed);
    if (model == "armax" || model == "armax_pareto")
        return ModelSpec::armax(alpha, beta, seed, burn_in);
    if (model == "ar" || model == "ar_pareto") return ModelSpec::ar(alpha, beta, seed, burn_in);
    throw config_error("unknown model: " + model);
}

std::vector<double> read_series(const std::string& path, const std::string& value_column,
                                char delim) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open input file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw config_error("empty input file: " + path);
    const auto header = split_line(line, delim);
    std::ptrdiff_t idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == value_column) idx = static_cast<std::ptrdiff_t>(i);
    if (idx < 0) throw config_error("input is missing column: " + value_column);
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_line(line, delim);
        double v;
        if (fields.size() <= static_cast<std::size_t>(idx) || !parse_double(fields[idx], v))
            throw data_error("unparsable row in " + path + ": " + line);
        values.push_back(v);
    }
    if (values.empty()) throw data_error("no data rows in " + path);
    return values;
}

json fit_to_json(const FitResult& fit) {
    json j;
    j["alpha"] = fit.alpha_hat;
    j["sigma"] = fit.sigma_hat;
    j["method"] = fit.method == FitMethod::toptwo ? "toptwo" : "maxonly";
    if (fit.blocks)
        j["blocks"] = *fit.blocks == BlockMode::disjoint ? "disjoint" : "sliding";
    j["loglik"] = fit.loglik;
    j["iterations"] = fit.iterations;
    if (fit.bias_corrected) {
        j["bias_correction"] = {{"rho0", fit.bias_corrected->rho0_hat},
                                {"varpi", fit.bias_corrected->varpi_hat},
                                {"sigma_factor", fit.bias_corrected->factor_sigma}};
    }
    return j;
}

template <class Mat>
json mat_to_json(const Mat& m) {
    json j = json::array();
    for (const auto& row : m) j.push_back(row);
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig config;
    config.seed = j.value("seed", 1ull);
    config.replications = j.value("replications", std::size_t{200});
    config.threads = j.value("threads", std::size_t{1});
    config.rl_mc_budget = j.value("rl_mc_budget", std::size_t{1000000});
    config.trunc_c = j.value("trunc_c", 1e-6);
    config.emit_uncorrected = j.value("emit_uncorrected", true);
    if (!j.contains("models")) throw config_error("config: missing models");
    config.models.clear();
    for (const auto& m : j.at("models")) {
        const std::string kind = m.value("kind", "iid_pareto");
        const double alpha = m.value("alpha", 1.0);
        const double beta = m.value("beta", 0.5);
        const std::size_t burn_in = m.value("burn_in", std::size_t{1000});
        config.models.push_back(parse_model(kind, alpha, beta, 0, burn_in));
    }
    config.block_sizes = j.value("block_sizes", std::vector<std::size_t>{});
    config.block_counts = j.value("block_counts", std::vector<std::size_t>{});
    config.sample_sizes = j.value("sample_sizes", std::vector<std::size_t>{});
    if (j.contains("estimators")) {
        config.estimators.clear();
        for (const auto& e : j.at("estimators"))
            config.estimators.push_back(estimator_from_name(e.get<std::string>()));
    }
    if (j.contains("targets")) {
        const auto& t = j.at("targets");
        config.target_shape = t.value("shape", true);
        config.target_scale = t.value("scale", false);
        config.rl_T = t.value("rl_T", std::vector<double>{});
    }
    if (j.contains("r_prime")) {
        const auto& rp = j.at("r_prime");
        if (rp.is_string()) {
            if (rp.get<std::string>() != "half")
                throw config_error("config: r_prime must be \"half\" or an integer");
            config.r_prime = 0;
        } else {
            config.r_prime = rp.get<std::size_t>();
        }
    }
    return config;
}

json experiment_to_json(const ExperimentConfig& config, const ExperimentResult& result) {
    json cells = json::array();
    for (const auto& row : result.rows) {
        json c;
        c["model"] = row.model;
        c["alpha0"] = row.alpha0;
        c["beta"] = row.beta;
        c["r"] = row.r;
        c["k"] = row.k;
        c["n"] = row.n;
        c["estimator"] = row.estimator;
        c["target"] = row.target;
        if (!std::isnan(row.T)) c["T"] = row.T;
        c["truth"] = row.truth;
        c["mean"] = row.mean;
        c["bias"] = row.bias;
        c["variance"] = row.variance;
        c["mse"] = row.mse;
        if (!std::isnan(row.rel_mse)) c["rel_mse"] = row.rel_mse;
        c["n_errors"] = row.n_errors;
        c["n_used"] = row.n_used;
        c["status"] = row.cell_ok ? "ok" : "failed";
        cells.push_back(std::move(c));
    }
    json j;
    j["seed"] = config.seed;
    j["replications"] = config.replications;
    j["cells"] = std::move(cells);
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"blockwise top-two extreme value estimation"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "emit a synthetic series as CSV");
    std::string sim_model = "iid";
    double sim_alpha = 1.0, sim_beta = 0.5;
    std::size_t sim_n = 1000, sim_burn = 1000;
    std::uint64_t sim_seed = 1;
    std::string sim_out, sim_daily_start;
    sim->add_option("--model", sim_model, "iid | armax | ar");
    sim->add_option("--alpha", sim_alpha, "tail index");
    sim->add_option("--beta", sim_beta, "dependence parameter (armax/ar)");
    sim->add_option("--n", sim_n, "series length");
    sim->add_option("--seed", sim_seed, "rng seed");
    sim->add_option("--burn-in", sim_burn, "burn-in steps for dependent models");
    sim->add_option("--daily-start", sim_daily_start,
                    "emit a date column starting at this ISO date");
    sim->add_option("--out", sim_out, "output file (default stdout)");

    auto* fit_cmd = app.add_subcommand("fit", "fit one estimator, print JSON");
    std::string fit_in, fit_out, fit_col = "value";
    std::string fit_method = "toptwo", fit_mode = "sliding";
    std::size_t fit_r = 100, fit_rp = 0;
    bool fit_no_bc = false;
    double fit_trunc = 1e-6;
    fit_cmd->add_option("--in", fit_in, "input CSV")->required();
    fit_cmd->add_option("--column", fit_col, "value column name");
    fit_cmd->add_option("--r", fit_r, "block size");
    fit_cmd->add_option("--method", fit_method, "toptwo | maxonly");
    fit_cmd->add_option("--block-mode", fit_mode, "disjoint | sliding");
    fit_cmd->add_option("--r-prime", fit_rp, "block size for the rho0 estimator");
    fit_cmd->add_flag("--no-bias-correct", fit_no_bc, "skip the top-two bias correction");
    fit_cmd->add_option("--trunc", fit_trunc, "lower truncation constant");
    fit_cmd->add_option("--out", fit_out, "output file (default stdout)");

    auto* rl_cmd = app.add_subcommand("rl", "return-level table for all five methods");
    std::string rl_in, rl_out, rl_col = "value", rl_date_col, rl_delim = ",";
    std::size_t rl_r = 365, rl_rp = 0, rl_B = 0;
    std::vector<double> rl_T{100.0};
    std::uint64_t rl_seed = 1;
    double rl_q = 0.95;
    rl_cmd->add_option("--in", rl_in, "input CSV")->required();
    rl_cmd->add_option("--column", rl_col, "value column name");
    rl_cmd->add_option("--date-column", rl_date_col,
                       "station mode: require this ISO date column and skip bad rows");
    rl_cmd->add_option("--delim", rl_delim, "field delimiter (single character)");
    rl_cmd->add_option("--r", rl_r, "block size (365 = annual blocks of daily data)");
    rl_cmd->add_option("--r-prime", rl_rp, "block size for the rho0 estimator");
    rl_cmd->add_option("--T", rl_T, "return periods");
    rl_cmd->add_option("--B", rl_B, "bootstrap replicates (0 = point estimates only)");
    rl_cmd->add_option("--q", rl_q, "confidence level for bootstrap intervals");
    rl_cmd->add_option("--seed", rl_seed, "bootstrap rng seed");
    rl_cmd->add_option("--out", rl_out, "output file (default stdout)");

    auto* bs_cmd = app.add_subcommand("bootstrap", "circular block bootstrap CI, JSON");
    std::string bs_in, bs_out, bs_col = "value", bs_method = "tt_sb", bs_target = "shape";
    std::size_t bs_r = 100, bs_rp = 0, bs_B = 500;
    double bs_T = 100.0, bs_q = 0.95;
    std::uint64_t bs_seed = 1;
    bs_cmd->add_option("--in", bs_in, "input CSV")->required();
    bs_cmd->add_option("--column", bs_col, "value column name");
    bs_cmd->add_option("--r", bs_r, "block size");
    bs_cmd->add_option("--r-prime", bs_rp, "block size for the rho0 estimator");
    bs_cmd->add_option("--method", bs_method, "max_db | max_sb | tt_db | tt_sb | botw");
    bs_cmd->add_option("--target", bs_target, "shape | scale | rl");
    bs_cmd->add_option("--T", bs_T, "return period when target = rl");
    bs_cmd->add_option("--B", bs_B, "bootstrap replicates");
    bs_cmd->add_option("--q", bs_q, "confidence level");
    bs_cmd->add_option("--seed", bs_seed, "rng seed");
    bs_cmd->add_option("--out", bs_out, "output file (default stdout)");

    auto* mc_cmd = app.add_subcommand("mc", "run a Monte Carlo experiment from a JSON config");
    std::string mc_config, mc_out = "experiment";
    std::size_t mc_threads = 0;
    std::uint64_t mc_seed = 0;
    bool mc_seed_set = false;
    mc_cmd->add_option("--config", mc_config, "JSON config file")->required();
    mc_cmd->add_option("--out", mc_out, "output prefix (<prefix>.csv, <prefix>.json)");
    mc_cmd->add_option("--threads", mc_threads, "worker threads (overrides config)");
    mc_cmd->add_option("--seed", mc_seed, "seed (overrides config)")
        ->each([&](const std::string&) { mc_seed_set = true; });

    auto* as_cmd = app.add_subcommand("asymptotics", "closed-form asymptotic matrices, JSON");
    double as_alpha = 1.0, as_rho0 = 1.0;
    std::string as_scheme = "disjoint", as_out;
    double as_tau = 0.0;
    bool as_tau_set = false;
    double as_l1 = 0.0, as_l2 = 0.0;
    as_cmd->add_option("--alpha", as_alpha, "tail index");
    as_cmd->add_option("--rho0", as_rho0, "cluster-size-one probability");
    as_cmd->add_option("--scheme", as_scheme, "disjoint | sliding");
    as_cmd->add_option("--tau", as_tau, "second-order index (enables the bias vector)")
        ->each([&](const std::string&) { as_tau_set = true; });
    as_cmd->add_option("--lambda1", as_l1, "bias weight lambda1");
    as_cmd->add_option("--lambda2", as_l2, "bias weight lambda2");
    as_cmd->add_option("--out", as_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    if (sim->parsed()) {
        const ModelSpec spec = parse_model(sim_model, sim_alpha, sim_beta, sim_seed, sim_burn);
        const auto series = simulate(spec, sim_n);
        std::string text;
        if (sim_daily_start.empty()) {
            text = "t,value\n";
            for (std::size_t t = 0; t < series.size(); ++t)
                text += std::to_string(t + 1) + ',' + fmt_double(series[t]) + '\n';
        } else {
            if (!looks_like_iso_date(sim_daily_start))
                throw config_error("--daily-start must be an ISO date (YYYY-MM-DD)");
            const int y = std::stoi(sim_daily_start.substr(0, 4));
            const int m = std::stoi(sim_daily_start.substr(5, 2));
            const int d = std::stoi(sim_daily_start.substr(8, 2));
            std::int64_t day = days_from_civil(y, m, d);
            text = "date,value\n";
            for (double v : series) text += iso_date(day++) + ',' + fmt_double(v) + '\n';
        }
        write_output(sim_out, text);
        return exit_ok;
    }

    if (fit_cmd->parsed()) {
        const auto series = read_series(fit_in, fit_col, ',');
        PipelineOptions opts;
        opts.trunc_c = fit_trunc;
        opts.r_prime = fit_rp;
        opts.bias_correct = !fit_no_bc;
        Estimator est;
        if (fit_mode != "disjoint" && fit_mode != "sliding")
            throw config_error("--block-mode must be disjoint or sliding");
        if (fit_method == "toptwo")
            est = fit_mode == "disjoint" ? Estimator::tt_db : Estimator::tt_sb;
        else if (fit_method == "maxonly")
            est = fit_mode == "disjoint" ? Estimator::max_db : Estimator::max_sb;
        else
            throw config_error("--method must be toptwo or maxonly");
        const FitResult fit = fit_series(series, fit_r, est, opts);
        write_output(fit_out, fit_to_json(fit).dump(2) + "\n");
        return exit_ok;
    }

    if (rl_cmd->parsed()) {
        if (rl_delim.size() != 1) throw config_error("--delim must be a single character");
        std::vector<double> series;
        if (!rl_date_col.empty()) {
            StationColumnSpec spec;
            spec.date_column = rl_date_col;
            spec.value_column = rl_col;
            spec.delimiter = rl_delim[0];
            std::size_t skipped = 0;
            series = read_station_csv(rl_in, spec, skipped);
            if (skipped > 0) std::cerr << "skipped " << skipped << " unusable rows\n";
        } else {
            series = read_series(rl_in, rl_col, rl_delim[0]);
        }
        PipelineOptions opts;
        opts.r_prime = rl_rp;
        if (rl_B > 0) {
            const StationReport report =
                fit_station_series(series, rl_r, rl_T, rl_B, rl_seed, rl_q, opts);
            write_output(rl_out, report.to_csv());
        } else {
            std::string text = "method,T,return_level,alpha,sigma\n";
            for (Estimator est : {Estimator::max_db, Estimator::max_sb, Estimator::tt_db,
                                  Estimator::tt_sb, Estimator::botw}) {
                for (double T : rl_T) {
                    const auto rl = fit_return_level(series, rl_r, T, est, opts);
                    text += std::string(estimator_name(est)) + ',' + fmt_double(T) + ',' +
                            fmt_double(rl.level) + ',' + fmt_double(rl.alpha_hat) + ',' +
                            fmt_double(rl.sigma_hat) + '\n';
                }
            }
            write_output(rl_out, text);
        }
        return exit_ok;
    }

    if (bs_cmd->parsed()) {
        const auto series = read_series(bs_in, bs_col, ',');
        const Estimator est = estimator_from_name(bs_method);
        if (bs_target != "shape" && bs_target != "scale" && bs_target != "rl")
            throw config_error("--target must be shape, scale or rl");
        PipelineOptions opts;
        opts.r_prime = bs_rp;
        auto statistic = [&](std::span<const double> s) -> double {
            if (bs_target == "rl") return fit_return_level(s, bs_r, bs_T, est, opts).level;
            double alpha, sigma;
            if (est == Estimator::botw) {
                const auto rl = fit_return_level(s, bs_r, std::max(bs_T, 2.0), est, opts);
                alpha = rl.alpha_hat;
                sigma = rl.sigma_hat;
            } else {
                const auto fit = fit_series(s, bs_r, est, opts);
                alpha = fit.alpha_hat;
                sigma = fit.sigma_hat;
            }
            return bs_target == "shape" ? alpha : sigma;
        };
        Rng rng(bs_seed);
        const BootstrapResult result =
            circular_block_bootstrap(series, bs_r, bs_B, statistic, rng, bs_q);
        json j;
        j["method"] = bs_method;
        j["target"] = bs_target;
        if (bs_target == "rl") j["T"] = bs_T;
        j["point"] = result.point;
        j["B"] = bs_B;
        double mean = 0.0;
        for (double v : result.replicates) mean += v;
        mean /= static_cast<double>(result.replicates.size());
        double sd = 0.0;
        for (double v : result.replicates) sd += (v - mean) * (v - mean);
        if (result.replicates.size() > 1)
            sd = std::sqrt(sd / static_cast<double>(result.replicates.size() - 1));
        j["replicate_mean"] = mean;
        j["replicate_sd"] = sd;
        if (result.ci_level > 0.0) {
            j["ci"] = {{"level", result.ci_level},
                       {"lower", result.ci_basic.first},
                       {"upper", result.ci_basic.second}};
        }
        write_output(bs_out, j.dump(2) + "\n");
        return exit_ok;
    }

    if (mc_cmd->parsed()) {
        std::ifstream in(mc_config);
        if (!in) throw data_error("cannot open config file: " + mc_config);
        json parsed;
        try {
            parsed = json::parse(in);
        } catch (const json::exception& e) {
            throw config_error(std::string("config parse error: ") + e.what());
        }
        ExperimentConfig config;
        try {
            config = config_from_json(parsed);
        } catch (const json::exception& e) {
            throw config_error(std::string("config error: ") + e.what());
        }
        if (mc_threads > 0) config.threads = mc_threads;
        if (mc_seed_set) config.seed = mc_seed;
        const ExperimentResult result = run_experiment(config);
        write_output(mc_out + ".csv", result.to_csv());
        write_output(mc_out + ".json", experiment_to_json(config, result).dump(2) + "\n");
        std::cerr << "wrote " << mc_out << ".csv and " << mc_out << ".json\n";
        return exit_ok;
    }

    if (as_cmd->parsed()) {
        CovScheme scheme;
        if (as_scheme == "disjoint")
            scheme = CovScheme::disjoint;
        else if (as_scheme == "sliding")
            scheme = CovScheme::sliding;
        else
            throw config_error("--scheme must be disjoint or sliding");
        const auto rep = asymptotic_report(as_rho0, as_alpha, scheme,
                                           as_tau_set ? std::optional<double>(as_tau)
                                                      : std::nullopt,
                                           as_l1, as_l2);
        json j;
        j["alpha0"] = as_alpha;
        j["rho0"] = as_rho0;
        j["varpi"] = rep.varpi;
        j["alpha1"] = rep.alpha1;
        j["s1"] = rep.s1;
        j["m_matrix"] = mat_to_json(rep.m_matrix);
        j["m_matrix_bc"] = mat_to_json(rep.m_matrix_bc);
        j["sigma4"] = mat_to_json(rep.sigma4);
        j["estimator_cov_toptwo"] = mat_to_json(rep.estimator_cov_toptwo);
        j["estimator_cov_max"] = mat_to_json(rep.estimator_cov_max);
        if (rep.bias2) j["bias2"] = *rep.bias2;
        write_output(as_out, j.dump(2) + "\n");
        return exit_ok;
    }

    return exit_config;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const insufficient_data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const degeneracy_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const support_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
}
