#pragma once

#include "polarkit/data_table.hpp"
#include "polarkit/linalg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace polarkit {

struct CategoricalSpec {
    std::string column;
    std::string baseline; // level absorbed by the intercept
};

/// What to fit: outcome, ordered continuous regressors, categorical columns
/// expanded to L-1 dummies, optional extra column for the omitted-variable
/// probe.
struct ModelSpec {
    std::string name; // report label
    std::string outcome;
    std::vector<std::string> regressors;
    std::vector<CategoricalSpec> categoricals;
    bool include_intercept = true;
    std::optional<std::string> extra;
};

struct DesignMatrix {
    Matrix x;
    std::vector<double> y;
    std::vector<std::string> names;   // column names, intercept first when on
    std::vector<std::uint8_t> is_dummy;
    bool has_intercept = true;
    std::size_t dropped_rows = 0; // listwise deletions
    std::string outcome;

    std::size_t n() const { return x.rows; }
    std::size_t k() const { return x.cols; }
};

struct RegressionResult {
    std::string model_name;
    std::string outcome;
    std::vector<std::string> names;
    std::vector<double> beta;
    std::vector<double> se;
    std::vector<double> t_stats;
    std::vector<double> p_values;
    std::vector<std::uint8_t> is_dummy;
    std::vector<double> residuals;
    std::vector<double> fitted;
    double rss = 0.0;
    double tss = 0.0;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double f_stat = 0.0;
    double f_p_value = 1.0;
    double sigma2 = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
    bool has_intercept = true;
    std::size_t dropped_rows = 0;
};

struct VifEntry {
    std::string name;
    double vif = 1.0;
    bool infinite = false; // perfectly collinear (R_j^2 within 1e-12 of 1)
};

struct VifReport {
    std::vector<VifEntry> entries;
};

/// Builds the design matrix. Rows missing any required value are dropped
/// listwise and counted. Column order is deterministic: intercept,
/// continuous regressors in spec order, then per categorical its non-baseline
/// levels in sorted order (named "column:level").
/// Throws MissingColumn, EmptyAfterFiltering, BaselineLevelAbsent,
/// InvalidConfig.
DesignMatrix build_design(const DataTable& table, const ModelSpec& spec);

/// OLS via Householder QR with column pivoting. Classical (homoskedastic)
/// standard errors; R^2 uses centered TSS when an intercept is present.
/// Throws RankDeficient, naming the dependent columns, when any pivoted
/// diagonal falls below 1e-10 of the largest.
RegressionResult ols_fit(const DesignMatrix& d);

/// Variance inflation factors via auxiliary regressions: each non-intercept
/// column on all the others (intercept included). VIF_j = 1/(1 - R_j^2);
/// columns with R_j^2 within 1e-12 of 1 (or degenerate fits) are flagged
/// infinite. Requires an intercept and at least two non-intercept columns.
VifReport vif(const DesignMatrix& d);

struct OvbComparison {
    RegressionResult base;
    RegressionResult augmented;
};

/// Refits the model with the extra column (default "poverty_rate") appended
/// as a regressor, for omitted-variable-bias inspection.
OvbComparison auxiliary_ovb(const DataTable& table, const ModelSpec& spec);

struct CoefficientDelta {
    std::string name;
    double base = 0.0;
    double augmented = 0.0;
    double delta = 0.0;
    double delta_in_base_se = 0.0; // |delta| / base se, 0 when se is 0
};

/// Side-by-side coefficient movement for the regressors common to both fits.
std::vector<CoefficientDelta> coefficient_deltas(const OvbComparison& cmp);

} // namespace polarkit
