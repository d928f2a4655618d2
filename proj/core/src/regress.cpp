#include "polarkit/regress.hpp"

#include "polarkit/csv.hpp"
#include "polarkit/error.hpp"
#include "polarkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace polarkit {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kVifInfiniteR2 = 1.0 - 1e-12;

// Level labels for a categorical column; numeric columns use the
// round-tripping double format.
std::vector<std::string> level_labels(const DataTable::Column& col) {
    std::set<std::string> levels;
    if (col.numeric) {
        for (double v : col.num)
            if (!is_absent(v)) levels.insert(csv::format_double(v));
    } else {
        for (const auto& s : col.text)
            if (!s.empty()) levels.insert(s);
    }
    return {levels.begin(), levels.end()};
}

std::string cell_label(const DataTable::Column& col, std::size_t row) {
    if (col.numeric)
        return is_absent(col.num[row]) ? std::string() : csv::format_double(col.num[row]);
    return col.text[row];
}

} // namespace

DesignMatrix build_design(const DataTable& table, const ModelSpec& spec) {
    for (const auto& r : spec.regressors)
        if (r == spec.outcome)
            throw Error(errc::invalid_config, "outcome '" + spec.outcome + "' is also a regressor");

    const auto& y_col = table.numeric_column(spec.outcome);

    std::vector<const std::vector<double>*> reg_cols;
    reg_cols.reserve(spec.regressors.size());
    for (const auto& r : spec.regressors) reg_cols.push_back(&table.numeric_column(r));

    struct CatInfo {
        const DataTable::Column* col;
        std::vector<std::string> dummy_levels; // sorted, baseline removed
    };
    std::vector<CatInfo> cats;
    for (const auto& c : spec.categoricals) {
        CatInfo info;
        info.col = &table.column(c.column);
        auto levels = level_labels(*info.col);
        if (std::find(levels.begin(), levels.end(), c.baseline) == levels.end())
            throw Error(errc::baseline_level_absent,
                        "baseline level '" + c.baseline + "' not present in column '" + c.column +
                            "'");
        for (auto& l : levels)
            if (l != c.baseline) info.dummy_levels.push_back(std::move(l));
        cats.push_back(std::move(info));
    }

    // Listwise deletion over the spec's columns only.
    const std::size_t nrows = table.row_count();
    std::vector<std::size_t> keep;
    keep.reserve(nrows);
    for (std::size_t r = 0; r < nrows; ++r) {
        bool ok = !is_absent(y_col[r]);
        for (const auto* col : reg_cols)
            ok = ok && !is_absent((*col)[r]);
        for (const auto& c : cats)
            ok = ok && !cell_label(*c.col, r).empty();
        if (ok) keep.push_back(r);
    }
    if (keep.empty())
        throw Error(errc::empty_after_filtering,
                    "no rows remain after listwise deletion for outcome '" + spec.outcome + "'");

    DesignMatrix d;
    d.outcome = spec.outcome;
    d.has_intercept = spec.include_intercept;
    d.dropped_rows = nrows - keep.size();

    if (spec.include_intercept) {
        d.names.push_back("const");
        d.is_dummy.push_back(0);
    }
    for (const auto& r : spec.regressors) {
        d.names.push_back(r);
        d.is_dummy.push_back(0);
    }
    for (std::size_t c = 0; c < cats.size(); ++c)
        for (const auto& level : cats[c].dummy_levels) {
            d.names.push_back(spec.categoricals[c].column + ":" + level);
            d.is_dummy.push_back(1);
        }

    const std::size_t n = keep.size();
    const std::size_t k = d.names.size();
    d.x = Matrix(n, k);
    d.y.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = keep[i];
        std::size_t j = 0;
        if (spec.include_intercept) d.x(i, j++) = 1.0;
        for (const auto* col : reg_cols) d.x(i, j++) = (*col)[r];
        for (const auto& c : cats) {
            const std::string label = cell_label(*c.col, r);
            for (const auto& level : c.dummy_levels) d.x(i, j++) = (label == level) ? 1.0 : 0.0;
        }
        d.y[i] = y_col[r];
    }
    for (double v : d.x.a)
        if (!std::isfinite(v))
            throw Error(errc::value_out_of_range, "design matrix contains a non-finite entry");
    for (double v : d.y)
        if (!std::isfinite(v))
            throw Error(errc::value_out_of_range, "outcome contains a non-finite entry");
    return d;
}

namespace {

// Names the columns behind a rank failure: the pivoted-out tail plus any
// earlier column it duplicates (|correlation| ~ 1).
std::string describe_dependent_columns(const DesignMatrix& d, const QrDecomposition& qr,
                                       std::size_t rank) {
    const auto& perm = qr.permutation();
    std::set<std::string> named;
    for (std::size_t j = rank; j < qr.col_count(); ++j) {
        const std::size_t dep = perm[j];
        named.insert(d.names[dep]);
        for (std::size_t other = 0; other < d.k(); ++other) {
            if (other == dep) continue;
            std::vector<double> a(d.n()), b(d.n());
            for (std::size_t i = 0; i < d.n(); ++i) {
                a[i] = d.x(i, dep);
                b[i] = d.x(i, other);
            }
            if (std::abs(pearson_correlation(a, b)) > 1.0 - 1e-8) named.insert(d.names[other]);
        }
    }
    std::string msg = "linearly dependent columns:";
    for (const auto& n : named) msg += " " + n;
    return msg;
}

} // namespace

RegressionResult ols_fit(const DesignMatrix& d) {
    const std::size_t n = d.n();
    const std::size_t k = d.k();
    if (n <= k)
        throw Error(errc::rank_deficient, "N = " + std::to_string(n) +
                                              " rows but k = " + std::to_string(k) +
                                              " columns leaves no residual degrees of freedom");

    QrDecomposition qr(d.x);
    const std::size_t rank = qr.rank(kRankTolerance);
    if (rank < k)
        throw Error(errc::rank_deficient, describe_dependent_columns(d, qr, rank));

    RegressionResult res;
    res.outcome = d.outcome;
    res.names = d.names;
    res.is_dummy = d.is_dummy;
    res.has_intercept = d.has_intercept;
    res.dropped_rows = d.dropped_rows;
    res.n = n;
    res.k = k;

    res.beta = qr.solve(d.y);
    res.fitted = mat_vec(d.x, res.beta);
    res.residuals.resize(n);

    long double rss = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        res.residuals[i] = d.y[i] - res.fitted[i];
        rss += static_cast<long double>(res.residuals[i]) * res.residuals[i];
    }
    res.rss = static_cast<double>(rss);

    long double tss = 0.0L;
    if (d.has_intercept) {
        long double mean = 0.0L;
        for (double v : d.y) mean += v;
        mean /= static_cast<long double>(n);
        for (double v : d.y) {
            const long double dv = v - mean;
            tss += dv * dv;
        }
    } else {
        for (double v : d.y) tss += static_cast<long double>(v) * v;
    }
    res.tss = static_cast<double>(tss);

    const double dof = static_cast<double>(n - k);
    res.sigma2 = res.rss / dof;
    res.r2 = res.tss > 0.0 ? 1.0 - res.rss / res.tss : 0.0;
    res.adj_r2 = 1.0 - (1.0 - res.r2) * (static_cast<double>(n) - 1.0) / dof;

    const Matrix xtx_inv = qr.xtx_inverse();
    res.se.resize(k);
    res.t_stats.resize(k);
    res.p_values.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double var = res.sigma2 * xtx_inv(j, j);
        res.se[j] = var > 0.0 ? std::sqrt(var) : 0.0;
        if (res.se[j] > 0.0) {
            res.t_stats[j] = res.beta[j] / res.se[j];
            res.p_values[j] = student_t_two_sided_p(res.t_stats[j], dof);
        } else {
            res.t_stats[j] = res.beta[j] == 0.0
                                 ? 0.0
                                 : std::copysign(std::numeric_limits<double>::infinity(), res.beta[j]);
            res.p_values[j] = res.beta[j] == 0.0 ? 1.0 : 0.0;
        }
    }

    const double model_df = d.has_intercept ? static_cast<double>(k) - 1.0 : static_cast<double>(k);
    if (model_df > 0.0 && res.rss > 0.0 && res.tss > res.rss) {
        res.f_stat = ((res.tss - res.rss) / model_df) / (res.rss / dof);
        res.f_p_value = incomplete_beta(dof / 2.0, model_df / 2.0, dof / (dof + model_df * res.f_stat));
    } else if (model_df > 0.0 && res.rss == 0.0) {
        res.f_stat = std::numeric_limits<double>::infinity();
        res.f_p_value = 0.0;
    }
    return res;
}

VifReport vif(const DesignMatrix& d) {
    if (!d.has_intercept)
        throw Error(errc::invalid_config, "VIF requires a design with an intercept");
    std::size_t intercept_idx = 0; // build_design puts it first
    const std::size_t k = d.k();
    if (k < 3)
        throw Error(errc::invalid_config, "VIF requires at least two non-intercept regressors");

    const std::size_t n = d.n();
    VifReport report;
    for (std::size_t j = 0; j < k; ++j) {
        if (j == intercept_idx) continue;
        VifEntry entry;
        entry.name = d.names[j];

        // Regress column j on every other column (intercept included).
        Matrix inner(n, k - 1);
        std::vector<double> target(n);
        for (std::size_t i = 0; i < n; ++i) {
            target[i] = d.x(i, j);
            std::size_t c = 0;
            for (std::size_t l = 0; l < k; ++l) {
                if (l == j) continue;
                inner(i, c++) = d.x(i, l);
            }
        }

        long double mean = 0.0L;
        for (double v : target) mean += v;
        mean /= static_cast<long double>(n);
        long double tss = 0.0L;
        for (double v : target) {
            const long double dv = v - mean;
            tss += dv * dv;
        }
        if (tss <= 0.0L) {
            entry.infinite = true; // constant column duplicates the intercept
            report.entries.push_back(entry);
            continue;
        }

        try {
            QrDecomposition qr(inner);
            if (qr.rank(kRankTolerance) < k - 1) {
                // Degenerate inner design; the auxiliary R^2 is ill-posed and
                // the column is reported as perfectly collinear.
                entry.infinite = true;
                report.entries.push_back(entry);
                continue;
            }
            const auto beta = qr.solve(target);
            const auto fitted = mat_vec(inner, beta);
            long double rss = 0.0L;
            for (std::size_t i = 0; i < n; ++i) {
                const long double e = target[i] - fitted[i];
                rss += e * e;
            }
            const double r2 = 1.0 - static_cast<double>(rss / tss);
            if (r2 >= kVifInfiniteR2) {
                entry.infinite = true;
            } else {
                entry.vif = 1.0 / (1.0 - r2);
            }
        } catch (const Error&) {
            entry.infinite = true;
        }
        report.entries.push_back(entry);
    }
    return report;
}

OvbComparison auxiliary_ovb(const DataTable& table, const ModelSpec& spec) {
    const std::string extra = spec.extra.value_or("poverty_rate");
    if (!table.has_column(extra))
        throw Error(errc::missing_column,
                    "auxiliary model needs column '" + extra + "' in the analysis table");

    OvbComparison cmp;
    cmp.base = ols_fit(build_design(table, spec));

    ModelSpec augmented = spec;
    augmented.name = spec.name.empty() ? "auxiliary" : spec.name + "+" + extra;
    augmented.regressors.push_back(extra);
    cmp.augmented = ols_fit(build_design(table, augmented));
    return cmp;
}

std::vector<CoefficientDelta> coefficient_deltas(const OvbComparison& cmp) {
    std::vector<CoefficientDelta> out;
    for (std::size_t j = 0; j < cmp.base.names.size(); ++j) {
        auto it = std::find(cmp.augmented.names.begin(), cmp.augmented.names.end(),
                            cmp.base.names[j]);
        if (it == cmp.augmented.names.end()) continue;
        const std::size_t aj = static_cast<std::size_t>(it - cmp.augmented.names.begin());
        CoefficientDelta delta;
        delta.name = cmp.base.names[j];
        delta.base = cmp.base.beta[j];
        delta.augmented = cmp.augmented.beta[aj];
        delta.delta = delta.augmented - delta.base;
        delta.delta_in_base_se = cmp.base.se[j] > 0.0 ? std::abs(delta.delta) / cmp.base.se[j] : 0.0;
        out.push_back(delta);
    }
    return out;
}

} // namespace polarkit
