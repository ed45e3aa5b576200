#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>

#include "sentrade/corpus.hpp"
#include "sentrade/marketdata.hpp"
#include "sentrade/panel.hpp"
#include "sentrade/random.hpp"
#include "sentrade/time.hpp"

namespace testing {

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("sentrade_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline sentrade::NewsArticle article(const std::string& id, const std::string& ticker, const std::string& when,
                                     const std::string& text, std::vector<std::string> mentions = {}) {
    sentrade::NewsArticle a;
    a.article_id = id;
    a.ticker = ticker;
    a.timestamp = sentrade::parse_timestamp(when);
    a.text = text;
    a.tickers_mentioned = mentions.empty() ? std::vector<std::string>{ticker} : std::move(mentions);
    return a;
}

inline sentrade::DailyBar bar(const std::string& ticker, const std::string& date, double open, double close,
                              double ret, double cap) {
    return {ticker, sentrade::parse_date(date), open, close, ret, cap};
}

// Runs a shell command and returns its exit status.
inline int run_command(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1) {
        return -1;
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Random unbalanced panel. Row 0 and column 0 of the firm x date grid are always
// filled, which keeps the bipartite firm/date graph connected.
inline sentrade::Panel random_panel(sentrade::Rng& rng, std::size_t n_firms, std::size_t n_dates,
                                    std::size_t n_regressors, double fill = 0.8) {
    std::vector<double> a(n_firms), b(n_dates);
    for (auto& v : a) v = rng.normal(0.0, 1.0);
    for (auto& v : b) v = rng.normal(0.0, 1.0);
    std::vector<double> gamma(n_regressors);
    for (auto& g : gamma) g = rng.normal(0.0, 1.0);

    std::vector<sentrade::PanelObservation> rows;
    for (std::size_t i = 0; i < n_firms; ++i) {
        for (std::size_t t = 0; t < n_dates; ++t) {
            if (i != 0 && t != 0 && !rng.bernoulli(fill)) {
                continue;
            }
            sentrade::PanelObservation o;
            o.firm_id = i;
            o.date_id = t;
            double y = a[i] + b[t];
            for (std::size_t k = 0; k < n_regressors; ++k) {
                // regressors correlate with both effects so the fixed effects matter
                const double x = 0.5 * a[i] - 0.3 * b[t] + rng.normal(0.0, 1.0);
                o.regressors.push_back(x);
                y += gamma[k] * x;
            }
            // heteroskedastic noise so the cluster terms differ
            o.next_day_return = y + rng.normal(0.0, 0.5 + 0.5 * rng.uniform());
            rows.push_back(std::move(o));
        }
    }
    std::vector<std::string> names;
    for (std::size_t k = 0; k < n_regressors; ++k) names.push_back("x" + std::to_string(k + 1));
    return sentrade::make_panel(std::move(rows), std::move(names));
}

// OLS with an explicit intercept, firm dummies (first firm dropped), date dummies
// (first date dropped) and the regressors, solved on the full design matrix.
struct DenseFit {
    Eigen::MatrixXd design;
    Eigen::VectorXd beta;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd xtx_inv;
    Eigen::Index slope_offset = 0;

    Eigen::VectorXd gamma() const { return beta.tail(beta.size() - slope_offset); }
};

inline DenseFit dense_dummy_ols(const sentrade::Panel& panel) {
    const auto n = static_cast<Eigen::Index>(panel.size());
    const auto nf = static_cast<Eigen::Index>(panel.n_firms);
    const auto nd = static_cast<Eigen::Index>(panel.n_dates);
    const auto p = static_cast<Eigen::Index>(panel.n_regressors());
    DenseFit out;
    out.slope_offset = 1 + (nf - 1) + (nd - 1);
    out.design = Eigen::MatrixXd::Zero(n, out.slope_offset + p);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& o = panel.rows[static_cast<std::size_t>(r)];
        out.design(r, 0) = 1.0;
        if (o.firm_id > 0) out.design(r, static_cast<Eigen::Index>(o.firm_id)) = 1.0;
        if (o.date_id > 0) out.design(r, nf - 1 + static_cast<Eigen::Index>(o.date_id)) = 1.0;
        for (Eigen::Index k = 0; k < p; ++k) {
            out.design(r, out.slope_offset + k) = o.regressors[static_cast<std::size_t>(k)];
        }
        y(r) = o.next_day_return;
    }
    const Eigen::MatrixXd xtx = out.design.transpose() * out.design;
    out.xtx_inv = xtx.ldlt().solve(Eigen::MatrixXd::Identity(xtx.rows(), xtx.cols()));
    out.beta = out.design.householderQr().solve(y);
    out.residuals = y - out.design * out.beta;
    return out;
}

// Sandwich covariance of the slope block computed from the full design. Each meat
// term sums score outer products within clusters by explicit grouping.
inline Eigen::MatrixXd dense_cluster_meat(const DenseFit& fit, const sentrade::Panel& panel, int by) {
    // by: 0 firm, 1 date, 2 observation
    const auto cols = fit.design.cols();
    std::map<std::size_t, Eigen::VectorXd> sums;
    for (std::size_t r = 0; r < panel.size(); ++r) {
        const auto& o = panel.rows[r];
        const std::size_t key = by == 0 ? o.firm_id : by == 1 ? o.date_id : r;
        auto [it, fresh] = sums.try_emplace(key, Eigen::VectorXd::Zero(cols));
        it->second += fit.design.row(static_cast<Eigen::Index>(r)).transpose() *
                      fit.residuals(static_cast<Eigen::Index>(r));
    }
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(cols, cols);
    for (const auto& [key, s] : sums) {
        meat += s * s.transpose();
    }
    return meat;
}

inline Eigen::MatrixXd dense_cluster_cov(const DenseFit& fit, const sentrade::Panel& panel,
                                         sentrade::ClusterMode mode) {
    Eigen::MatrixXd meat;
    switch (mode) {
        case sentrade::ClusterMode::TwoWay:
            meat = dense_cluster_meat(fit, panel, 0) + dense_cluster_meat(fit, panel, 1) -
                   dense_cluster_meat(fit, panel, 2);
            break;
        case sentrade::ClusterMode::Firm:
            meat = dense_cluster_meat(fit, panel, 0);
            break;
        case sentrade::ClusterMode::Date:
            meat = dense_cluster_meat(fit, panel, 1);
            break;
        case sentrade::ClusterMode::Robust:
            meat = dense_cluster_meat(fit, panel, 2);
            break;
    }
    const Eigen::MatrixXd full = fit.xtx_inv * meat * fit.xtx_inv;
    const auto p = full.rows() - fit.slope_offset;
    return full.bottomRightCorner(p, p);
}

inline double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

inline double elapsed_seconds(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace testing
