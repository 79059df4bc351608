#include "langdiv/stats.hpp"

#include "langdiv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace langdiv {

const char* hc_name(HcFlavor flavor) {
    switch (flavor) {
    case HcFlavor::hc0: return "HC0";
    case HcFlavor::hc1: return "HC1";
    case HcFlavor::hc2: return "HC2";
    case HcFlavor::hc3: return "HC3";
    }
    return "?";
}

HcFlavor hc_from_string(const std::string& name) {
    std::string up = name;
    std::transform(up.begin(), up.end(), up.begin(), ::toupper);
    if (up == "HC0") return HcFlavor::hc0;
    if (up == "HC1") return HcFlavor::hc1;
    if (up == "HC2") return HcFlavor::hc2;
    if (up == "HC3") return HcFlavor::hc3;
    throw ConfigError("unknown robust SE flavor: " + name);
}

Eigen::Index RegressionFit::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < column_names.size(); ++i) {
        if (column_names[i] == name) return static_cast<Eigen::Index>(i);
    }
    return -1;
}

namespace {

bool is_constant_column(const Eigen::MatrixXd& X, Eigen::Index j) {
    const double first = X(0, j);
    for (Eigen::Index i = 1; i < X.rows(); ++i) {
        if (X(i, j) != first) return false;
    }
    return true;
}

Eigen::MatrixXd sandwich(const RegressionFit& fit, HcFlavor flavor) {
    const Eigen::Index n = fit.design.rows();
    const Eigen::Index p = fit.design.cols();
    Eigen::VectorXd w = fit.residuals.array().square();
    switch (flavor) {
    case HcFlavor::hc0:
        break;
    case HcFlavor::hc1:
        w *= static_cast<double>(n) / static_cast<double>(n - p);
        break;
    case HcFlavor::hc2:
    case HcFlavor::hc3: {
        // leverage h_ii = x_i' (X'X)^-1 x_i
        const Eigen::VectorXd h =
            ((fit.design * fit.xtx_inverse).array() * fit.design.array())
                .rowwise()
                .sum();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double denom = 1.0 - h(i);
            w(i) /= flavor == HcFlavor::hc2 ? denom : denom * denom;
        }
        break;
    }
    }
    const Eigen::MatrixXd meat =
        fit.design.transpose() * w.asDiagonal() * fit.design;
    return fit.xtx_inverse * meat * fit.xtx_inverse;
}

} // namespace

RegressionFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      std::vector<std::string> column_names, HcFlavor flavor) {
    const Eigen::Index n = X.rows();
    if (n != y.size()) throw AnalysisError("ols_fit: X and y row counts differ");
    if (n == 0 || X.cols() == 0) throw AnalysisError("ols_fit: empty design");

    if (column_names.empty()) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            column_names.push_back("x" + std::to_string(j));
        }
    }
    if (static_cast<Eigen::Index>(column_names.size()) != X.cols()) {
        throw AnalysisError("ols_fit: column_names size mismatch");
    }

    RegressionFit fit;
    fit.flavor = flavor;
    fit.n = n;

    // Column 0 is the intercept; any other constant column duplicates it.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (j > 0 && is_constant_column(X, j)) {
            fit.dropped_columns.push_back(column_names[static_cast<std::size_t>(j)]);
        } else {
            keep.push_back(j);
        }
    }
    const Eigen::Index p = static_cast<Eigen::Index>(keep.size());
    if (n <= p) throw AnalysisError("ols_fit: need more observations than columns");

    fit.design.resize(n, p);
    for (Eigen::Index k = 0; k < p; ++k) {
        fit.design.col(k) = X.col(keep[static_cast<std::size_t>(k)]);
        fit.column_names.push_back(
            column_names[static_cast<std::size_t>(keep[static_cast<std::size_t>(k)])]);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(fit.design);
    if (qr.rank() < p) {
        // columns pivoted past the numerical rank are the dependent ones
        const auto& perm = qr.colsPermutation().indices();
        std::ostringstream msg;
        msg << "ols_fit: rank-deficient design, collinear columns:";
        for (Eigen::Index k = qr.rank(); k < p; ++k) {
            msg << ' ' << fit.column_names[static_cast<std::size_t>(perm(k))];
        }
        throw AnalysisError(msg.str());
    }

    fit.coefficients = qr.solve(y);
    fit.residuals = y - fit.design * fit.coefficients;
    const double ssr = fit.residuals.squaredNorm();
    fit.sigma2 = ssr / static_cast<double>(n - p);

    // (X'X)^-1 = P (R'R)^-1 P' from the pivoted factorization X P = Q R
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p);
    const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(
        Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd base = r_inv * r_inv.transpose();
    const auto perm = qr.colsPermutation();
    fit.xtx_inverse = perm * base * perm.transpose();

    fit.vcov_homoskedastic = fit.sigma2 * fit.xtx_inverse;
    fit.vcov_robust = sandwich(fit, flavor);
    return fit;
}

Eigen::VectorXd robust_se(const RegressionFit& fit, HcFlavor flavor) {
    const Eigen::MatrixXd vcov =
        flavor == fit.flavor ? fit.vcov_robust : sandwich(fit, flavor);
    return vcov.diagonal().array().max(0.0).sqrt();
}

std::pair<double, double> confidence_interval(const RegressionFit& fit,
                                              Eigen::Index index, double level) {
    if (index < 0 || index >= fit.coefficients.size()) {
        throw AnalysisError("confidence_interval: coefficient index out of range");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw AnalysisError("confidence_interval: level must be in (0, 1)");
    }
    const double z = normal_quantile(0.5 + level / 2.0);
    const double se = std::sqrt(std::max(0.0, fit.vcov_robust(index, index)));
    const double c = fit.coefficients(index);
    return {c - z * se, c + z * se};
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw AnalysisError("normal_quantile: p must be in (0, 1)");
    }
    // Acklam's rational approximation, then one Halley refinement step.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
            q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * 3.14159265358979323846) *
                     std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

} // namespace langdiv
