#include "sentrade/panel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "sentrade/errors.hpp"

namespace sentrade {

Panel make_panel(std::vector<PanelObservation> rows, std::vector<std::string> regressor_names) {
    Panel panel;
    for (const auto& r : rows) {
        panel.n_firms = std::max(panel.n_firms, r.firm_id + 1);
        panel.n_dates = std::max(panel.n_dates, r.date_id + 1);
    }
    panel.rows = std::move(rows);
    panel.regressor_names = std::move(regressor_names);
    return panel;
}

void validate_panel(const Panel& panel) {
    std::set<std::pair<std::size_t, std::size_t>> cells;
    for (const auto& r : panel.rows) {
        if (r.regressors.size() != panel.n_regressors()) {
            throw std::invalid_argument("panel row has " + std::to_string(r.regressors.size()) + " regressors, expected " +
                                        std::to_string(panel.n_regressors()));
        }
        if (r.firm_id >= panel.n_firms || r.date_id >= panel.n_dates) {
            throw std::invalid_argument("panel row id out of range");
        }
        if (!cells.emplace(r.firm_id, r.date_id).second) {
            throw std::invalid_argument("duplicate panel cell (firm " + std::to_string(r.firm_id) + ", date " +
                                        std::to_string(r.date_id) + ")");
        }
    }
}

Panel assemble_panel(std::span<const LabeledExample> events, const ScoreTable& scores, const MarketData& market,
                     std::span<const std::string> models) {
    struct Cell {
        std::vector<double> sum;
        std::vector<std::size_t> count;
    };
    const std::size_t k = models.size();
    std::map<std::pair<std::string, Date>, Cell> cells;
    for (const auto& e : events) {
        auto& cell = cells[{e.ticker, e.event_date}];
        if (cell.sum.empty()) {
            cell.sum.assign(k, 0.0);
            cell.count.assign(k, 0);
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (auto s = scores.find(e.article_id, models[j])) {
                cell.sum[j] += *s;
                ++cell.count[j];
            }
        }
    }

    struct Pending {
        std::string ticker;
        Date date;
        double ret;
        std::vector<double> x;
    };
    std::vector<Pending> pending;
    Panel panel;
    panel.regressor_names.assign(models.begin(), models.end());
    for (const auto& [key, cell] : cells) {
        if (std::any_of(cell.count.begin(), cell.count.end(), [](std::size_t c) { return c == 0; })) {
            ++panel.dropped_missing_score;
            continue;
        }
        const auto next = market.calendar().next(key.second);
        const DailyBar* bar = next ? market.find(key.first, *next) : nullptr;
        if (bar == nullptr) {
            ++panel.dropped_no_next_day;
            continue;
        }
        std::vector<double> x(k);
        for (std::size_t j = 0; j < k; ++j) {
            x[j] = cell.sum[j] / static_cast<double>(cell.count[j]);
        }
        pending.push_back({key.first, key.second, 100.0 * bar->total_return, std::move(x)});
    }

    std::set<std::string> tickers;
    std::set<Date> dates;
    for (const auto& p : pending) {
        tickers.insert(p.ticker);
        dates.insert(p.date);
    }
    panel.firm_labels.assign(tickers.begin(), tickers.end());
    panel.date_labels.assign(dates.begin(), dates.end());
    panel.n_firms = panel.firm_labels.size();
    panel.n_dates = panel.date_labels.size();
    for (auto& p : pending) {
        const auto fid = static_cast<std::size_t>(
            std::lower_bound(panel.firm_labels.begin(), panel.firm_labels.end(), p.ticker) - panel.firm_labels.begin());
        const auto did = static_cast<std::size_t>(
            std::lower_bound(panel.date_labels.begin(), panel.date_labels.end(), p.date) - panel.date_labels.begin());
        panel.rows.push_back({fid, did, p.ret, std::move(p.x)});
    }
    return panel;
}

Demeaned two_way_demean(const Panel& panel, const Eigen::MatrixXd& columns, const DemeanOptions& options) {
    const auto n = static_cast<Eigen::Index>(panel.size());
    if (columns.rows() != n) {
        throw std::invalid_argument("two_way_demean: row count mismatch");
    }
    const Eigen::Index cols = columns.cols();
    const auto nf = static_cast<Eigen::Index>(panel.n_firms);
    const auto nd = static_cast<Eigen::Index>(panel.n_dates);

    Eigen::VectorXd firm_count = Eigen::VectorXd::Zero(nf);
    Eigen::VectorXd date_count = Eigen::VectorXd::Zero(nd);
    for (const auto& r : panel.rows) {
        firm_count(static_cast<Eigen::Index>(r.firm_id)) += 1.0;
        date_count(static_cast<Eigen::Index>(r.date_id)) += 1.0;
    }

    Demeaned out;
    out.values = columns;
    out.firm_part = Eigen::MatrixXd::Zero(nf, cols);
    out.date_part = Eigen::MatrixXd::Zero(nd, cols);
    const double scale = std::max(1.0, columns.size() > 0 ? columns.cwiseAbs().maxCoeff() : 0.0);
    const double limit = options.tolerance * scale;

    // Removes group means along one dimension; returns the largest |mean| removed.
    auto sweep = [&](bool by_firm, const Eigen::VectorXd& counts, Eigen::MatrixXd& part) {
        Eigen::MatrixXd means = Eigen::MatrixXd::Zero(counts.size(), cols);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& r = panel.rows[static_cast<std::size_t>(i)];
            const auto g = static_cast<Eigen::Index>(by_firm ? r.firm_id : r.date_id);
            means.row(g) += out.values.row(i);
        }
        for (Eigen::Index g = 0; g < counts.size(); ++g) {
            if (counts(g) > 0.0) {
                means.row(g) /= counts(g);
            }
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& r = panel.rows[static_cast<std::size_t>(i)];
            const auto g = static_cast<Eigen::Index>(by_firm ? r.firm_id : r.date_id);
            out.values.row(i) -= means.row(g);
        }
        part += means;
        return means.size() > 0 ? means.cwiseAbs().maxCoeff() : 0.0;
    };

    for (int s = 1; s <= options.max_sweeps; ++s) {
        const double df = sweep(true, firm_count, out.firm_part);
        const double dd = sweep(false, date_count, out.date_part);
        out.sweeps = s;
        if (std::max(df, dd) <= limit) {
            return out;
        }
    }
    throw ConvergenceError("two-way demeaning did not converge within " + std::to_string(options.max_sweeps) +
                           " sweeps");
}

RegressionFit fit_two_way_fe(const Panel& panel, std::span<const std::size_t> selection, const DemeanOptions& options) {
    validate_panel(panel);
    if (panel.n_firms < 2 || panel.n_dates < 2) {
        throw std::invalid_argument("two-way fixed effects need at least 2 firms and 2 dates");
    }
    RegressionFit fit;
    if (selection.empty()) {
        for (std::size_t j = 0; j < panel.n_regressors(); ++j) {
            fit.selection.push_back(j);
        }
    } else {
        fit.selection.assign(selection.begin(), selection.end());
    }
    if (fit.selection.empty()) {
        throw std::invalid_argument("no regressors selected");
    }
    for (auto j : fit.selection) {
        if (j >= panel.n_regressors()) {
            throw std::invalid_argument("regressor index out of range");
        }
        fit.names.push_back(panel.regressor_names[j]);
    }

    const auto n = static_cast<Eigen::Index>(panel.size());
    const auto k = static_cast<Eigen::Index>(fit.selection.size());
    Eigen::MatrixXd data(n, k + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = panel.rows[static_cast<std::size_t>(i)];
        data(i, 0) = r.next_day_return;
        for (Eigen::Index j = 0; j < k; ++j) {
            data(i, j + 1) = r.regressors[fit.selection[static_cast<std::size_t>(j)]];
        }
    }
    if (!data.allFinite()) {
        throw NumericalError("panel contains non-finite values");
    }

    Demeaned dm = two_way_demean(panel, data, options);
    fit.sweeps = dm.sweeps;
    fit.demeaned_response = dm.values.col(0);
    fit.demeaned_regressors = dm.values.rightCols(k);

    for (Eigen::Index j = 0; j < k; ++j) {
        const double raw = data.col(j + 1).norm();
        const double within = fit.demeaned_regressors.col(j).norm();
        if (within <= 1e-8 * raw || within == 0.0) {
            throw CollinearityError("regressor '" + fit.names[static_cast<std::size_t>(j)] +
                                    "' has no variation after removing firm and date effects");
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(fit.demeaned_regressors);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) {
        throw CollinearityError("regressors are collinear after removing firm and date effects");
    }
    fit.gamma = qr.solve(fit.demeaned_response);
    fit.residuals = fit.demeaned_response - fit.demeaned_regressors * fit.gamma;

    // Fixed-effect component of y - X gamma, normalized to zero-sum firm and date effects.
    const Eigen::VectorXd firm_total = dm.firm_part.col(0) - dm.firm_part.rightCols(k) * fit.gamma;
    const Eigen::VectorXd date_total = dm.date_part.col(0) - dm.date_part.rightCols(k) * fit.gamma;
    const double firm_mean = firm_total.mean();
    const double date_mean = date_total.mean();
    fit.firm_effects = firm_total.array() - firm_mean;
    fit.date_effects = date_total.array() - date_mean;
    fit.intercept = firm_mean + date_mean;
    return fit;
}

Eigen::MatrixXd clustered_covariance(const RegressionFit& fit, const Panel& panel, const ClusterOptions& options) {
    const Eigen::MatrixXd& x = fit.demeaned_regressors;
    const Eigen::Index k = x.cols();
    const auto n = static_cast<Eigen::Index>(panel.size());
    if (x.rows() != n || fit.residuals.size() != n) {
        throw std::invalid_argument("clustered_covariance: fit does not match panel");
    }
    const Eigen::MatrixXd bread = (x.transpose() * x).ldlt().solve(Eigen::MatrixXd::Identity(k, k));

    auto cluster_meat = [&](bool by_firm, std::size_t groups) {
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(groups), k);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& r = panel.rows[static_cast<std::size_t>(i)];
            const auto g = static_cast<Eigen::Index>(by_firm ? r.firm_id : r.date_id);
            sums.row(g) += fit.residuals(i) * x.row(i);
        }
        Eigen::MatrixXd meat = sums.transpose() * sums;
        if (options.small_sample && groups > 1) {
            meat *= static_cast<double>(groups) / static_cast<double>(groups - 1);
        }
        return meat;
    };
    auto robust_meat = [&]() {
        const Eigen::MatrixXd scores = x.array().colwise() * fit.residuals.array();
        Eigen::MatrixXd meat = scores.transpose() * scores;
        if (options.small_sample && n > 1) {
            meat *= static_cast<double>(n) / static_cast<double>(n - 1);
        }
        return meat;
    };

    Eigen::MatrixXd meat;
    switch (options.mode) {
        case ClusterMode::TwoWay:
            meat = cluster_meat(true, panel.n_firms) + cluster_meat(false, panel.n_dates) - robust_meat();
            break;
        case ClusterMode::Firm:
            meat = cluster_meat(true, panel.n_firms);
            break;
        case ClusterMode::Date:
            meat = cluster_meat(false, panel.n_dates);
            break;
        case ClusterMode::Robust:
            meat = robust_meat();
            break;
    }
    return bread * meat * bread;
}

Eigen::VectorXd clustered_se(const RegressionFit& fit, const Panel& panel, const ClusterOptions& options) {
    const Eigen::MatrixXd v = clustered_covariance(fit, panel, options);
    Eigen::VectorXd se(v.rows());
    for (Eigen::Index j = 0; j < v.rows(); ++j) {
        if (v(j, j) < 0.0 || !std::isfinite(v(j, j))) {
            throw NumericalError("clustered variance for '" + fit.names[static_cast<std::size_t>(j)] +
                                 "' is negative (" + std::to_string(v(j, j)) + ")");
        }
        se(j) = std::sqrt(v(j, j));
    }
    return se;
}

FitStatistics fit_statistics(const RegressionFit& fit, const Panel& panel) {
    const auto n = static_cast<Eigen::Index>(panel.size());
    if (fit.residuals.size() != n || fit.demeaned_response.size() != n) {
        throw std::invalid_argument("fit_statistics: fit does not match panel");
    }
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = panel.rows[static_cast<std::size_t>(i)].next_day_return;
    }
    const double ssr = fit.residuals.squaredNorm();
    const double sst = (y.array() - y.mean()).matrix().squaredNorm();
    const double sst_within = fit.demeaned_response.squaredNorm();
    if (!(sst > 0.0) || !(sst_within > 0.0)) {
        throw NumericalError("response has no variation; R-squared undefined");
    }

    FitStatistics s;
    s.observations = panel.size();
    s.parameters = static_cast<std::size_t>(fit.gamma.size()) + (panel.n_firms - 1) + (panel.n_dates - 1) + 1;
    const double nn = static_cast<double>(s.observations);
    const double kk = static_cast<double>(s.parameters);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.r2 = 1.0 - ssr / sst;
    s.r2_within = 1.0 - ssr / sst_within;
    const double penalty = nn > kk ? (nn - 1.0) / (nn - kk) : nan;
    s.r2_adjusted = 1.0 - (1.0 - s.r2) * penalty;
    s.r2_within_adjusted = 1.0 - (1.0 - s.r2_within) * penalty;
    s.rmse = std::sqrt(ssr / nn);
    const double log_term = nn * std::log(ssr / nn);
    s.aic = log_term + 2.0 * kk;
    s.bic = log_term + kk * std::log(nn);
    return s;
}

Regression run_regression(const Panel& panel, std::span<const std::size_t> selection, const DemeanOptions& demean,
                          const ClusterOptions& cluster) {
    Regression out;
    out.fit = fit_two_way_fe(panel, selection, demean);
    out.se = clustered_se(out.fit, panel, cluster);
    out.t_stats = out.fit.gamma.cwiseQuotient(out.se);
    out.stats = fit_statistics(out.fit, panel);
    return out;
}

}  // namespace sentrade
