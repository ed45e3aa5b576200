#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sentrade/marketdata.hpp"
#include "sentrade/scoring.hpp"
#include "sentrade/time.hpp"

namespace sentrade {

struct PanelObservation {
    std::size_t firm_id = 0;
    std::size_t date_id = 0;
    double next_day_return = 0.0;  // percent
    std::vector<double> regressors;
};

/// Firm-day observations for next-day return regressions. Ids are dense:
/// firm_id < n_firms, date_id < n_dates.
struct Panel {
    std::vector<PanelObservation> rows;
    std::vector<std::string> regressor_names;
    std::size_t n_firms = 0;
    std::size_t n_dates = 0;
    std::vector<std::string> firm_labels;  // optional, indexed by firm_id
    std::vector<Date> date_labels;         // optional, indexed by date_id
    std::size_t dropped_no_next_day = 0;
    std::size_t dropped_missing_score = 0;

    std::size_t size() const { return rows.size(); }
    std::size_t n_regressors() const { return regressor_names.size(); }
};

/// Builds a panel from rows, deriving n_firms and n_dates from the largest ids.
Panel make_panel(std::vector<PanelObservation> rows, std::vector<std::string> regressor_names);

/// Checks regressor lengths, id ranges and that every (firm, date) cell appears once.
/// Throws std::invalid_argument.
void validate_panel(const Panel& panel);

/// One row per (ticker, event day) carrying the per-model mean score on that day and
/// the ticker's return (in percent) on the following trading day.
Panel assemble_panel(std::span<const LabeledExample> events, const ScoreTable& scores, const MarketData& market,
                     std::span<const std::string> models);

struct DemeanOptions {
    double tolerance = 1e-10;
    int max_sweeps = 10000;
};

struct Demeaned {
    Eigen::MatrixXd values;     // columns with firm and date means swept out
    Eigen::MatrixXd firm_part;  // n_firms x cols, total firm means removed
    Eigen::MatrixXd date_part;  // n_dates x cols, total date means removed
    int sweeps = 0;
};

/// Alternating firm/date demeaning until the largest mean removed in a sweep is at
/// most tolerance * max(1, max|input|). Throws ConvergenceError past max_sweeps.
Demeaned two_way_demean(const Panel& panel, const Eigen::MatrixXd& columns, const DemeanOptions& options = {});

struct FitStatistics {
    std::size_t observations = 0;
    std::size_t parameters = 0;  // slopes + (firms - 1) + (dates - 1) + 1
    double r2 = 0.0;
    double r2_adjusted = 0.0;
    double r2_within = 0.0;
    double r2_within_adjusted = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    double rmse = 0.0;
};

struct RegressionFit {
    std::vector<std::string> names;
    std::vector<std::size_t> selection;  // panel regressor columns used
    Eigen::VectorXd gamma;
    double intercept = 0.0;
    Eigen::VectorXd firm_effects;  // sums to zero
    Eigen::VectorXd date_effects;  // sums to zero
    Eigen::VectorXd residuals;
    Eigen::VectorXd demeaned_response;
    Eigen::MatrixXd demeaned_regressors;
    int sweeps = 0;
};

/// Two-way fixed-effects OLS of next_day_return on the selected regressors (all when
/// `selection` is empty). Throws CollinearityError when a regressor has no
/// within variation or the slopes are not identified.
RegressionFit fit_two_way_fe(const Panel& panel, std::span<const std::size_t> selection = {},
                             const DemeanOptions& options = {});

enum class ClusterMode { TwoWay, Firm, Date, Robust };

struct ClusterOptions {
    ClusterMode mode = ClusterMode::TwoWay;
    bool small_sample = false;  // scale each meat term by G / (G - 1)
};

/// Sandwich covariance. Two-way: V_firm + V_date - V_cell, where a cell holds one
/// observation so V_cell is the heteroskedasticity-robust term.
Eigen::MatrixXd clustered_covariance(const RegressionFit& fit, const Panel& panel, const ClusterOptions& options = {});

/// Square roots of the covariance diagonal. Throws NumericalError on a negative variance.
Eigen::VectorXd clustered_se(const RegressionFit& fit, const Panel& panel, const ClusterOptions& options = {});

/// Throws NumericalError when the response has no variation (raw or within).
FitStatistics fit_statistics(const RegressionFit& fit, const Panel& panel);

struct Regression {
    RegressionFit fit;
    Eigen::VectorXd se;
    Eigen::VectorXd t_stats;
    FitStatistics stats;
};

Regression run_regression(const Panel& panel, std::span<const std::size_t> selection = {},
                          const DemeanOptions& demean = {}, const ClusterOptions& cluster = {});

}  // namespace sentrade
