#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcr/error.hpp"
#include "pcr/table.hpp"

namespace pcr {

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz. Converges fast for
// x < (a + 1) / (a + b + 2); callers use the symmetry relation otherwise.
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            return h;
        }
    }
    throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw ConfigError("incomplete beta needs a > 0 and b > 0");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ConfigError("incomplete beta needs x in [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(T <= t) for Student's t with `df` degrees of freedom.
inline double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) {
        throw ConfigError("degrees of freedom must be positive");
    }
    if (std::isnan(t)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (std::isinf(t)) {
        return t > 0 ? 1.0 : 0.0;
    }
    const double tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    return t > 0 ? 1.0 - tail : tail;
}

/// P(|T| >= |t|).
inline double student_t_two_tailed_p(double t, double df) {
    if (!(df > 0.0)) {
        throw ConfigError("degrees of freedom must be positive");
    }
    if (std::isinf(t)) {
        return 0.0;
    }
    const double p = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    return std::fmin(1.0, std::fmax(0.0, p));
}

struct TTestResult {
    std::size_t n = 0;
    double mean_diff = 0.0;
    double sd = 0.0;  // sample (n - 1) standard deviation of the differences
    double t_statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    double cohens_d = 0.0;
};

/// Paired t-test on per-query differences a - b. Cohen's d uses the SD of
/// the differences, so d == t / sqrt(n).
inline TTestResult paired_ttest(std::span<const double> diffs) {
    if (diffs.size() < 2) {
        throw EmptyInputError("paired t-test needs at least two differences");
    }
    const double n = static_cast<double>(diffs.size());
    double sum = 0.0;
    for (double x : diffs) {
        sum += x;
    }
    const double mean = sum / n;
    bool constant = true;
    double ss = 0.0;
    for (double x : diffs) {
        constant = constant && x == diffs.front();
        ss += (x - mean) * (x - mean);
    }
    if (constant || ss == 0.0) {
        throw DegenerateVarianceError(mean);
    }
    TTestResult r;
    r.n = diffs.size();
    r.mean_diff = mean;
    r.sd = std::sqrt(ss / (n - 1.0));
    r.cohens_d = mean / r.sd;
    r.t_statistic = r.cohens_d * std::sqrt(n);
    r.df = n - 1.0;
    r.p_value = student_t_two_tailed_p(r.t_statistic, r.df);
    return r;
}

/// "Yes" below 0.05, "Marginal" below 0.10, otherwise "No".
inline std::string significance_label(double p) {
    if (p < 0.05) return "Yes";
    if (p < 0.10) return "Marginal";
    return "No";
}

struct PairedComparison {
    std::string label_a;
    std::string label_b;
    std::string metric;
    std::vector<double> diffs;
    double mean_diff = 0.0;
    /// Absent when the differences have zero variance.
    std::optional<TTestResult> test;

    std::size_t n() const noexcept { return diffs.size(); }
};

inline PairedComparison compare_paired(std::string label_a, std::string label_b, std::string metric,
                                       std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ConfigError("paired samples differ in length");
    }
    PairedComparison c{std::move(label_a), std::move(label_b), std::move(metric), {}, 0.0, std::nullopt};
    c.diffs.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        c.diffs.push_back(a[i] - b[i]);
    }
    double sum = 0.0;
    for (double d : c.diffs) {
        sum += d;
    }
    c.mean_diff = c.diffs.empty() ? 0.0 : sum / static_cast<double>(c.diffs.size());
    try {
        c.test = paired_ttest(c.diffs);
    } catch (const DegenerateVarianceError&) {
        c.test.reset();
    }
    return c;
}

inline nlohmann::json to_json(const PairedComparison& c) {
    nlohmann::json j = {{"a", c.label_a}, {"b", c.label_b}, {"metric", c.metric}, {"n", c.n()},
                        {"mean_diff", c.mean_diff}};
    if (c.test) {
        j["t_statistic"] = c.test->t_statistic;
        j["p_value"] = c.test->p_value;
        j["cohens_d"] = c.test->cohens_d;
        j["significant"] = significance_label(c.test->p_value);
    } else {
        j["t_statistic"] = nullptr;
        j["p_value"] = nullptr;
        j["cohens_d"] = nullptr;
        j["significant"] = "degenerate";
    }
    return j;
}

inline std::string render_comparison_table(const std::vector<PairedComparison>& rows) {
    TextTable t({"Comparison", "Mean Diff.", "t-statistic", "p-value", "Cohen's d", "Significant", "n"});
    for (const auto& c : rows) {
        if (c.test) {
            t.add_row({c.label_a + " vs " + c.label_b, fixed(c.mean_diff), fixed(c.test->t_statistic),
                       fixed(c.test->p_value, 3), fixed(c.test->cohens_d), significance_label(c.test->p_value),
                       std::to_string(c.n())});
        } else {
            t.add_row({c.label_a + " vs " + c.label_b, fixed(c.mean_diff), "-", "-", "-", "degenerate",
                       std::to_string(c.n())});
        }
    }
    return t.render();
}

}  // namespace pcr
