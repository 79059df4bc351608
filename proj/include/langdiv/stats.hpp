#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace langdiv {

enum class HcFlavor { hc0, hc1, hc2, hc3 };

const char* hc_name(HcFlavor flavor);
HcFlavor hc_from_string(const std::string& name); // throws ConfigError

struct RegressionFit {
    Eigen::VectorXd coefficients;
    Eigen::MatrixXd vcov_homoskedastic;
    Eigen::MatrixXd vcov_robust; // at the flavor passed to ols_fit
    Eigen::VectorXd residuals;
    Eigen::Index n = 0;
    std::vector<std::string> column_names;    // kept columns, in design order
    std::vector<std::string> dropped_columns; // zero-variance columns removed
    HcFlavor flavor = HcFlavor::hc1;

    // retained so robust_se can evaluate any HC flavor after the fit
    Eigen::MatrixXd design;
    Eigen::MatrixXd xtx_inverse;
    double sigma2 = 0.0; // SSR / (n - p)

    // Position of a named column in `coefficients`, -1 when dropped/unknown.
    Eigen::Index index_of(const std::string& name) const;
};

// OLS via rank-revealing column-pivoted QR. Column 0 is treated as the
// intercept and never dropped; other zero-variance columns are dropped and
// reported in dropped_columns. Rank deficiency after drops is an
// AnalysisError naming the collinear columns.
RegressionFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      std::vector<std::string> column_names = {},
                      HcFlavor flavor = HcFlavor::hc1);

// Square roots of the sandwich-estimator vcov diagonal at the given flavor.
Eigen::VectorXd robust_se(const RegressionFit& fit, HcFlavor flavor);

// coefficient +/- z(level) * robust SE, normal critical values.
std::pair<double, double> confidence_interval(const RegressionFit& fit,
                                              Eigen::Index index, double level);

// Inverse standard normal CDF, accurate to ~1e-15.
double normal_quantile(double p);

} // namespace langdiv
