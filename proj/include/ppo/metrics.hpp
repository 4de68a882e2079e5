#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ppo {

// Seasonal period used for 15-minute data: 28 days.
inline constexpr std::size_t kDefaultSeason = 2688;

// Mean absolute scaled error. The forecast error over the horizon is scaled by the in-sample
// seasonal-naive error of `train` at lag `season`.
double mase(std::span<const double> actual, std::span<const double> forecast, std::span<const double> train,
            std::size_t season = kDefaultSeason);

double mae(std::span<const double> actual, std::span<const double> forecast);

struct BiasDecomposition {
	double mean_under = 0.0; // mean of max(actual - forecast, 0)
	double mean_over = 0.0;  // mean of max(forecast - actual, 0)
};

BiasDecomposition bias_decomposition(std::span<const double> actual, std::span<const double> forecast);

// forecast - actual, so underforecasts are negative.
std::vector<double> residuals(std::span<const double> actual, std::span<const double> forecast);

struct Moments {
	double mean = 0.0;
	double std = 0.0;      // n - 1 denominator
	double skewness = 0.0; // m3 / m2^1.5
	std::optional<double> kurtosis; // excess, m4 / m2^2 - 3; needs at least 4 values
};

// Throws DomainError when the residuals have zero variance.
Moments residual_moments(std::span<const double> residuals);

double pearson(std::span<const double> x, std::span<const double> y);

struct ErrorReport {
	std::optional<double> mase; // present when a training series was supplied
	double mae = 0.0;
	double mean_under = 0.0;
	double mean_over = 0.0;
	double residual_mean = 0.0;
	double residual_std = 0.0;
	// Constant residuals have no defined shape; both are reported as 0 in that case.
	double residual_skewness = 0.0;
	double residual_kurtosis = 0.0;
};

ErrorReport error_report(std::span<const double> actual, std::span<const double> forecast,
                         std::span<const double> train = {}, std::size_t season = kDefaultSeason);

} // namespace ppo
