#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "toptwo/bootstrap.hpp"
#include "toptwo/csv.hpp"
#include "toptwo/errors.hpp"
#include "toptwo/models.hpp"
#include "toptwo/returns.hpp"

namespace toptwo {

// Monte Carlo experiment over a grid of models, block sizes and block counts
// (or total sample sizes). For the top-two estimators both the bias-corrected
// and the uncorrected variant are evaluated, labelled explicitly.
struct ExperimentConfig {
    std::vector<ModelSpec> models;
    std::vector<std::size_t> block_sizes;
    std::vector<std::size_t> block_counts; // exactly one of these two
    std::vector<std::size_t> sample_sizes; // grids may be non-empty
    std::vector<Estimator> estimators{Estimator::max_db, Estimator::max_sb,
                                      Estimator::tt_db, Estimator::tt_sb, Estimator::botw};
    bool target_shape = true;
    bool target_scale = false;
    std::vector<double> rl_T; // return-level targets, one per T
    std::size_t replications = 200;
    std::size_t r_prime = 0; // 0: the "half" policy r' = max(2, r/2)
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::size_t rl_mc_budget = 1000000;
    double trunc_c = 1e-6;
    bool emit_uncorrected = true;

    void validate() const {
        if (models.empty()) throw config_error("experiment: no models");
        if (block_sizes.empty()) throw config_error("experiment: no block sizes");
        if (block_counts.empty() == sample_sizes.empty())
            throw config_error("experiment: give exactly one of block_counts / sample_sizes");
        if (estimators.empty()) throw config_error("experiment: no estimators");
        if (replications < 1) throw config_error("experiment: need at least 1 replication");
        if (!target_shape && !target_scale && rl_T.empty())
            throw config_error("experiment: no targets");
        for (double T : rl_T)
            if (!(T >= 2.0)) throw config_error("experiment: return-level T must be >= 2");
    }
};

struct ExperimentRow {
    std::string model;
    double alpha0 = 0.0;
    double beta = 0.0;
    std::size_t r = 0;
    std::size_t k = 0;
    std::size_t n = 0;
    std::string estimator; // e.g. "tt_sb" or "tt_sb_raw"
    std::string target;    // "shape", "scale" or "rl"
    double T = std::numeric_limits<double>::quiet_NaN();
    double truth = std::numeric_limits<double>::quiet_NaN();
    double mean = std::numeric_limits<double>::quiet_NaN();
    double bias = std::numeric_limits<double>::quiet_NaN();
    double variance = std::numeric_limits<double>::quiet_NaN();
    double mse = std::numeric_limits<double>::quiet_NaN();
    double rel_mse = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_errors = 0;
    std::size_t n_used = 0;
    bool cell_ok = true;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;

    std::string to_csv() const {
        std::ostringstream os;
        os << "model,alpha0,beta,r,k,n,estimator,target,T,truth,mean,bias,variance,mse,"
              "rel_mse,n_errors,n_used,status\n";
        for (const auto& row : rows) {
            os << row.model << ',' << fmt_double(row.alpha0) << ',' << fmt_double(row.beta)
               << ',' << row.r << ',' << row.k << ',' << row.n << ',' << row.estimator << ','
               << row.target << ',' << fmt_double(row.T) << ',' << fmt_double(row.truth) << ','
               << fmt_double(row.mean) << ',' << fmt_double(row.bias) << ','
               << fmt_double(row.variance) << ',' << fmt_double(row.mse) << ','
               << fmt_double(row.rel_mse) << ',' << row.n_errors << ',' << row.n_used << ','
               << (row.cell_ok ? "ok" : "failed") << '\n';
        }
        return os.str();
    }

    const ExperimentRow* find(const std::string& estimator, const std::string& target,
                              double T = std::numeric_limits<double>::quiet_NaN()) const {
        for (const auto& row : rows) {
            if (row.estimator != estimator || row.target != target) continue;
            if (target == "rl" && !(std::isnan(T) || row.T == T)) continue;
            return &row;
        }
        return nullptr;
    }
};

namespace detail {

inline const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::iid_pareto: return "iid_pareto";
        case ModelKind::armax_pareto: return "armax_pareto";
        case ModelKind::ar_pareto: return "ar_pareto";
    }
    return "?";
}

template <class Fn>
void parallel_for(std::size_t total, std::size_t threads, Fn&& fn) {
    if (threads <= 1 || total <= 1) {
        for (std::size_t i = 0; i < total; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t count = std::min(threads, total);
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct TargetDesc {
    std::string name; // shape | scale | rl
    double T = std::numeric_limits<double>::quiet_NaN();
};

struct ColumnDesc {
    Estimator est;
    bool corrected = true; // raw top-two variants get a _raw suffix
    std::string label;
};

// One replication's estimates: columns x targets, NaN where the pipeline
// errored.
struct RepValues {
    std::vector<double> values;
    std::vector<bool> errored; // per column
};

// The e^{-1} quantile of the block-maximum law: the scale normalization the
// Frechet fit is estimating. T = 1/(1 - e^{-1}).
inline double scale_truth_T() { return 1.0 / (1.0 - std::exp(-1.0)); }

} // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const bool by_blocks = !config.block_counts.empty();
    const auto& counts = by_blocks ? config.block_counts : config.sample_sizes;

    // Column layout shared by every cell.
    std::vector<detail::ColumnDesc> cols;
    for (Estimator est : config.estimators) {
        cols.push_back({est, true, estimator_name(est)});
        const bool toptwo = est == Estimator::tt_db || est == Estimator::tt_sb;
        if (toptwo && config.emit_uncorrected)
            cols.push_back({est, false, std::string(estimator_name(est)) + "_raw"});
    }
    std::vector<detail::TargetDesc> targets;
    if (config.target_shape) targets.push_back({"shape"});
    if (config.target_scale) targets.push_back({"scale"});
    for (double T : config.rl_T) targets.push_back({"rl", T});

    // Cache of sorted MC block maxima for dependent-model truths, keyed by
    // (model index, r); shared by the scale and all rl targets.
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> maxima_cache;
    auto dependent_quantile = [&](std::size_t model_idx, const ModelSpec& spec, std::size_t r,
                                  double p) {
        auto& maxima = maxima_cache[{model_idx, r}];
        if (maxima.empty()) {
            Rng rng = Rng::stream(config.seed, 0xabcd0000u + model_idx * 1024 + r);
            std::vector<double> collected;
            collected.reserve(config.rl_mc_budget);
            if (spec.kind == ModelKind::armax_pareto) {
                detail::ArmaxState st(spec.beta, rng);
                for (std::size_t t = 0; t < spec.burn_in; ++t) st.step(rng);
                for (std::size_t b = 0; b < config.rl_mc_budget; ++b) {
                    double m = -std::numeric_limits<double>::infinity();
                    for (std::size_t t = 0; t < r; ++t) m = std::fmax(m, st.step(rng));
                    auto peak = st;
                    peak.latent = m;
                    collected.push_back(peak.emit(spec.alpha));
                }
            } else {
                detail::ArState st(spec.beta, rng);
                for (std::size_t t = 0; t < spec.burn_in; ++t) st.step(rng);
                for (std::size_t b = 0; b < config.rl_mc_budget; ++b) {
                    double m = -std::numeric_limits<double>::infinity();
                    for (std::size_t t = 0; t < r; ++t) m = std::fmax(m, st.step(rng));
                    auto peak = st;
                    peak.latent = m;
                    collected.push_back(peak.emit(spec.alpha));
                }
            }
            std::sort(collected.begin(), collected.end());
            maxima = std::move(collected);
        }
        const double h = p * static_cast<double>(maxima.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        if (lo + 1 >= maxima.size()) return maxima.back();
        return maxima[lo] + (h - static_cast<double>(lo)) * (maxima[lo + 1] - maxima[lo]);
    };
    auto block_max_quantile = [&](std::size_t model_idx, const ModelSpec& spec, std::size_t r,
                                  double T) {
        if (spec.kind == ModelKind::iid_pareto) {
            const double root = -std::expm1(std::log1p(-1.0 / T) / static_cast<double>(r));
            return std::pow(root, -1.0 / spec.alpha);
        }
        return dependent_quantile(model_idx, spec, r, 1.0 - 1.0 / T);
    };

    ExperimentResult result;
    std::size_t cell_index = 0;
    for (std::size_t mi = 0; mi < config.models.size(); ++mi) {
        const ModelSpec& model = config.models[mi];
        const SeriesMeta meta = model_meta(model);
        for (std::size_t r : config.block_sizes) {
            for (std::size_t count : counts) {
                const std::size_t n = by_blocks ? count * r : count;
                const std::size_t k = n / r;
                if (n < 2 * r)
                    throw config_error("experiment: cell with fewer than 2 blocks");
                const std::size_t rp = config.r_prime ? config.r_prime : default_r_prime(r);

                std::vector<double> truths(targets.size());
                for (std::size_t ti = 0; ti < targets.size(); ++ti) {
                    if (targets[ti].name == "shape") {
                        truths[ti] = meta.true_alpha0;
                    } else if (targets[ti].name == "scale") {
                        truths[ti] = block_max_quantile(mi, model, r, detail::scale_truth_T());
                    } else {
                        truths[ti] = block_max_quantile(mi, model, r, targets[ti].T);
                    }
                }

                // Replications, each on an independent derived stream.
                std::vector<detail::RepValues> reps(config.replications);
                const std::uint64_t cell_tag = cell_index * 0x100000000ull;
                detail::parallel_for(config.replications, config.threads, [&](std::size_t rep) {
                    Rng rng = Rng::stream(config.seed, cell_tag + rep);
                    const std::vector<double> series = simulate(model, n, rng);

                    PipelineOptions opts;
                    opts.trunc_c = config.trunc_c;
                    opts.r_prime = rp;

                    // Fit each required basic pipeline once.
                    std::optional<FitResult> max_db, max_sb, tt_db_raw, tt_sb_raw;
                    std::optional<double> rho0_hat;
                    auto need = [&](Estimator e) {
                        for (const auto& c : cols)
                            if (c.est == e || (c.est == Estimator::botw &&
                                               (e == Estimator::tt_sb || e == Estimator::max_sb)))
                                return true;
                        return false;
                    };
                    auto run_fit = [&](Estimator e) -> std::optional<FitResult> {
                        try {
                            PipelineOptions raw = opts;
                            raw.bias_correct = false;
                            return fit_series(series, r, e, raw);
                        } catch (const error&) {
                            return std::nullopt;
                        }
                    };
                    if (need(Estimator::max_db)) max_db = run_fit(Estimator::max_db);
                    if (need(Estimator::max_sb)) max_sb = run_fit(Estimator::max_sb);
                    if (need(Estimator::tt_db)) tt_db_raw = run_fit(Estimator::tt_db);
                    if (need(Estimator::tt_sb)) tt_sb_raw = run_fit(Estimator::tt_sb);
                    if (tt_db_raw || tt_sb_raw) {
                        try {
                            rho0_hat = estimate_rho0(series, rp);
                        } catch (const error&) {
                        }
                    }
                    auto corrected = [&](const std::optional<FitResult>& raw)
                        -> std::optional<FitResult> {
                        if (!raw || !rho0_hat) return std::nullopt;
                        return bias_correct_fit(*raw, *rho0_hat);
                    };
                    const std::optional<FitResult> tt_db_fit = corrected(tt_db_raw);
                    const std::optional<FitResult> tt_sb_fit = corrected(tt_sb_raw);

                    auto column_fit = [&](const detail::ColumnDesc& c)
                        -> std::optional<std::pair<double, double>> {
                        switch (c.est) {
                            case Estimator::max_db:
                                if (max_db) return {{max_db->alpha_hat, max_db->sigma_hat}};
                                return std::nullopt;
                            case Estimator::max_sb:
                                if (max_sb) return {{max_sb->alpha_hat, max_sb->sigma_hat}};
                                return std::nullopt;
                            case Estimator::tt_db: {
                                const auto& f = c.corrected ? tt_db_fit : tt_db_raw;
                                if (f) return {{f->alpha_hat, f->sigma_hat}};
                                return std::nullopt;
                            }
                            case Estimator::tt_sb: {
                                const auto& f = c.corrected ? tt_sb_fit : tt_sb_raw;
                                if (f) return {{f->alpha_hat, f->sigma_hat}};
                                return std::nullopt;
                            }
                            case Estimator::botw:
                                if (tt_sb_fit && max_sb)
                                    return {{tt_sb_fit->alpha_hat, max_sb->sigma_hat}};
                                return std::nullopt;
                        }
                        return std::nullopt;
                    };

                    detail::RepValues rv;
                    rv.values.assign(cols.size() * targets.size(),
                                     std::numeric_limits<double>::quiet_NaN());
                    rv.errored.assign(cols.size(), false);
                    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
                        const auto fit = column_fit(cols[ci]);
                        if (!fit) {
                            rv.errored[ci] = true;
                            continue;
                        }
                        for (std::size_t ti = 0; ti < targets.size(); ++ti) {
                            double v;
                            if (targets[ti].name == "shape") v = fit->first;
                            else if (targets[ti].name == "scale") v = fit->second;
                            else v = return_level(fit->first, fit->second, targets[ti].T);
                            rv.values[ci * targets.size() + ti] = v;
                        }
                    }
                    reps[rep] = std::move(rv);
                });

                // Ordered fold over replications.
                std::vector<ExperimentRow> cell_rows;
                std::vector<double> cell_mse(cols.size() * targets.size(), 0.0);
                bool cell_ok = true;
                for (std::size_t ci = 0; ci < cols.size(); ++ci) {
                    std::size_t n_errors = 0;
                    for (const auto& rv : reps) n_errors += rv.errored[ci] ? 1 : 0;
                    if (static_cast<double>(n_errors) >
                        0.01 * static_cast<double>(config.replications))
                        cell_ok = false;
                    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
                        double sum = 0.0, sum_sq_err = 0.0;
                        std::size_t used = 0;
                        for (const auto& rv : reps) {
                            const double v = rv.values[ci * targets.size() + ti];
                            if (std::isnan(v)) continue;
                            sum += v;
                            const double e = v - truths[ti];
                            sum_sq_err += e * e;
                            ++used;
                        }
                        ExperimentRow row;
                        row.model = detail::model_kind_name(model.kind);
                        row.alpha0 = model.alpha;
                        row.beta = model.beta;
                        row.r = r;
                        row.k = k;
                        row.n = n;
                        row.estimator = cols[ci].label;
                        row.target = targets[ti].name;
                        row.T = targets[ti].T;
                        row.truth = truths[ti];
                        row.n_errors = n_errors;
                        row.n_used = used;
                        if (used > 0) {
                            row.mean = sum / static_cast<double>(used);
                            row.bias = row.mean - truths[ti];
                            row.mse = sum_sq_err / static_cast<double>(used);
                            row.variance = row.mse - row.bias * row.bias;
                        }
                        cell_mse[ci * targets.size() + ti] = row.mse;
                        cell_rows.push_back(std::move(row));
                    }
                }
                // Relative MSE against the disjoint max baseline.
                std::ptrdiff_t base_col = -1;
                for (std::size_t ci = 0; ci < cols.size(); ++ci)
                    if (cols[ci].est == Estimator::max_db && cols[ci].corrected)
                        base_col = static_cast<std::ptrdiff_t>(ci);
                for (std::size_t ci = 0; ci < cols.size(); ++ci) {
                    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
                        auto& row = cell_rows[ci * targets.size() + ti];
                        row.cell_ok = cell_ok;
                        if (base_col >= 0) {
                            const double base =
                                cell_mse[static_cast<std::size_t>(base_col) * targets.size() + ti];
                            if (base > 0.0) row.rel_mse = row.mse / base;
                        }
                    }
                }
                for (auto& row : cell_rows) result.rows.push_back(std::move(row));
                ++cell_index;
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Station case study: annual-block fits from a date/value CSV.

struct StationColumnSpec {
    std::string date_column = "date";
    std::string value_column = "value";
    char delimiter = ',';
};

struct StationMethodRow {
    Estimator method = Estimator::max_db;
    double T = 0.0;
    double rl = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double width = 0.0;
    double rel_width = 0.0; // relative to the max_db interval for the same T
};

struct StationReport {
    std::size_t rows_used = 0;
    std::size_t rows_skipped = 0;
    std::size_t r = 365;
    std::size_t B = 0;
    double ci_level = 0.95;
    // point fits on the full series, in Estimator enum order
    std::array<std::pair<double, double>, 5> fits{}; // (alpha, sigma)
    std::vector<StationMethodRow> rows;

    std::string to_csv() const {
        std::ostringstream os;
        os << "method,T,return_level,lower,upper,width,rel_width\n";
        for (const auto& row : rows) {
            os << estimator_name(row.method) << ',' << fmt_double(row.T) << ','
               << fmt_double(row.rl) << ',' << fmt_double(row.lower) << ','
               << fmt_double(row.upper) << ',' << fmt_double(row.width) << ','
               << fmt_double(row.rel_width) << '\n';
        }
        return os.str();
    }
};

inline std::vector<double> read_station_csv(const std::string& path,
                                            const StationColumnSpec& spec,
                                            std::size_t& skipped) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw config_error("empty CSV file: " + path);
    const auto header = split_line(line, spec.delimiter);
    std::ptrdiff_t date_idx = -1, value_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == spec.date_column) date_idx = static_cast<std::ptrdiff_t>(i);
        if (header[i] == spec.value_column) value_idx = static_cast<std::ptrdiff_t>(i);
    }
    if (date_idx < 0) throw config_error("CSV is missing column: " + spec.date_column);
    if (value_idx < 0) throw config_error("CSV is missing column: " + spec.value_column);

    std::vector<double> values;
    skipped = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_line(line, spec.delimiter);
        const std::size_t need =
            static_cast<std::size_t>(std::max(date_idx, value_idx)) + 1;
        double v;
        if (fields.size() < need || !looks_like_iso_date(fields[date_idx]) ||
            !parse_double(fields[value_idx], v) || !std::isfinite(v) || v < 0.0) {
            ++skipped;
            continue;
        }
        values.push_back(v);
    }
    return values;
}

// Fit all five methods on annual blocks of a station series, with circular
// block bootstrap confidence intervals for each requested return period.
inline StationReport fit_station_series(std::span<const double> values, std::size_t r,
                                        const std::vector<double>& T_list, std::size_t B,
                                        std::uint64_t seed, double ci_level = 0.95,
                                        const PipelineOptions& opts_in = {}) {
    if (values.size() < 2 * r)
        throw insufficient_data_error("station fit: need at least 2 full blocks");
    if (T_list.empty()) throw config_error("station fit: no return periods requested");

    PipelineOptions opts = opts_in;
    const Estimator methods[5] = {Estimator::max_db, Estimator::max_sb, Estimator::tt_db,
                                  Estimator::tt_sb, Estimator::botw};

    StationReport report;
    report.r = r;
    report.B = B;
    report.ci_level = ci_level;

    auto all_fits = [&](std::span<const double> series,
                        std::array<std::pair<double, double>, 5>& out) {
        const FitResult max_db = fit_series(series, r, Estimator::max_db, opts);
        const FitResult max_sb = fit_series(series, r, Estimator::max_sb, opts);
        const FitResult tt_db = fit_series(series, r, Estimator::tt_db, opts);
        const FitResult tt_sb = fit_series(series, r, Estimator::tt_sb, opts);
        out[0] = {max_db.alpha_hat, max_db.sigma_hat};
        out[1] = {max_sb.alpha_hat, max_sb.sigma_hat};
        out[2] = {tt_db.alpha_hat, tt_db.sigma_hat};
        out[3] = {tt_sb.alpha_hat, tt_sb.sigma_hat};
        out[4] = {tt_sb.alpha_hat, max_sb.sigma_hat}; // botw
    };
    all_fits(values, report.fits);

    // One resampling pass serves every method and every T.
    Rng rng = Rng::stream(seed, 0x0b00537e);
    std::vector<std::array<std::pair<double, double>, 5>> boot_fits;
    boot_fits.reserve(B);
    for (std::size_t b = 0; b < B; ++b) {
        const auto replicate = circular_block_resample(values, r, rng);
        std::array<std::pair<double, double>, 5> fits;
        all_fits(replicate, fits);
        boot_fits.push_back(fits);
    }

    for (double T : T_list) {
        double base_width = 0.0;
        for (int m = 0; m < 5; ++m) {
            StationMethodRow row;
            row.method = methods[m];
            row.T = T;
            row.rl = return_level(report.fits[m].first, report.fits[m].second, T);
            std::vector<double> replicates;
            replicates.reserve(B);
            for (const auto& fits : boot_fits)
                replicates.push_back(return_level(fits[m].first, fits[m].second, T));
            const auto [lo, hi] = basic_ci(row.rl, replicates, ci_level);
            row.lower = lo;
            row.upper = hi;
            row.width = hi - lo;
            if (m == 0) base_width = row.width;
            row.rel_width = base_width > 0.0 ? row.width / base_width : 1.0;
            report.rows.push_back(row);
        }
    }
    return report;
}

inline StationReport fit_station_csv(const std::string& path, const StationColumnSpec& spec,
                                     std::size_t r, const std::vector<double>& T_list,
                                     std::size_t B, std::uint64_t seed,
                                     double ci_level = 0.95) {
    std::size_t skipped = 0;
    const std::vector<double> values = read_station_csv(path, spec, skipped);
    if (values.size() < 2 * r)
        throw insufficient_data_error("station fit: fewer than 2 blocks after cleaning");
    StationReport report = fit_station_series(values, r, T_list, B, seed, ci_level);
    report.rows_used = values.size();
    report.rows_skipped = skipped;
    return report;
}

} // namespace toptwo
