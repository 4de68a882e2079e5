#include "ppo/metrics.hpp"

#include "ppo/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ppo {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, const char *what) {
	if (a.size() != b.size()) {
		throw InputError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) + " vs " +
		                 std::to_string(b.size()) + ")");
	}
	if (a.empty()) {
		throw InputError(std::string(what) + ": empty input");
	}
}

double sum_abs_error(std::span<const double> actual, std::span<const double> forecast) {
	double sum = 0.0;
	for (std::size_t t = 0; t < actual.size(); ++t) {
		sum += std::abs(actual[t] - forecast[t]);
	}
	return sum;
}

} // namespace

double mase(std::span<const double> actual, std::span<const double> forecast, std::span<const double> train,
            std::size_t season) {
	check_pair(actual, forecast, "mase");
	if (season == 0 || train.size() <= season) {
		throw InputError("mase: training series of length " + std::to_string(train.size()) +
		                 " is too short for season " + std::to_string(season));
	}
	double denom = 0.0;
	for (std::size_t t = season; t < train.size(); ++t) {
		denom += std::abs(train[t] - train[t - season]);
	}
	if (denom == 0.0) {
		throw DomainError("mase: seasonal-naive error of the training series is zero");
	}
	const double n = static_cast<double>(train.size());
	const double s = static_cast<double>(season);
	const double h = static_cast<double>(actual.size());
	return (n - s) / h * sum_abs_error(actual, forecast) / denom;
}

double mae(std::span<const double> actual, std::span<const double> forecast) {
	check_pair(actual, forecast, "mae");
	return sum_abs_error(actual, forecast) / static_cast<double>(actual.size());
}

BiasDecomposition bias_decomposition(std::span<const double> actual, std::span<const double> forecast) {
	check_pair(actual, forecast, "bias_decomposition");
	BiasDecomposition out;
	for (std::size_t t = 0; t < actual.size(); ++t) {
		const double e = actual[t] - forecast[t];
		if (e > 0.0) {
			out.mean_under += e;
		} else {
			out.mean_over -= e;
		}
	}
	const double h = static_cast<double>(actual.size());
	out.mean_under /= h;
	out.mean_over /= h;
	return out;
}

std::vector<double> residuals(std::span<const double> actual, std::span<const double> forecast) {
	check_pair(actual, forecast, "residuals");
	std::vector<double> out(actual.size());
	for (std::size_t t = 0; t < actual.size(); ++t) {
		out[t] = forecast[t] - actual[t];
	}
	return out;
}

Moments residual_moments(std::span<const double> r) {
	if (r.size() < 2) {
		throw InputError("residual_moments: need at least two residuals");
	}
	const double n = static_cast<double>(r.size());
	double mean = 0.0;
	for (double v : r) {
		mean += v;
	}
	mean /= n;
	double m2 = 0.0, m3 = 0.0, m4 = 0.0;
	for (double v : r) {
		const double d = v - mean;
		const double d2 = d * d;
		m2 += d2;
		m3 += d2 * d;
		m4 += d2 * d2;
	}
	m2 /= n;
	m3 /= n;
	m4 /= n;
	if (!(m2 > 0.0)) {
		throw DomainError("residual_moments: zero variance, skewness and kurtosis are undefined");
	}
	Moments out;
	out.mean = mean;
	out.std = std::sqrt(m2 * n / (n - 1.0));
	out.skewness = m3 / std::pow(m2, 1.5);
	if (r.size() >= 4) {
		out.kurtosis = m4 / (m2 * m2) - 3.0;
	}
	return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
	check_pair(x, y, "pearson");
	if (x.size() < 2) {
		throw InputError("pearson: need at least two points");
	}
	const double n = static_cast<double>(x.size());
	double mx = 0.0, my = 0.0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		mx += x[i];
		my += y[i];
	}
	mx /= n;
	my /= n;
	double sxy = 0.0, sxx = 0.0, syy = 0.0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		const double dx = x[i] - mx;
		const double dy = y[i] - my;
		sxy += dx * dy;
		sxx += dx * dx;
		syy += dy * dy;
	}
	if (!(sxx > 0.0) || !(syy > 0.0)) {
		throw DomainError("pearson: correlation undefined for a constant series");
	}
	const double r = sxy / std::sqrt(sxx * syy);
	return std::max(-1.0, std::min(1.0, r));
}

ErrorReport error_report(std::span<const double> actual, std::span<const double> forecast,
                         std::span<const double> train, std::size_t season) {
	ErrorReport out;
	if (!train.empty()) {
		out.mase = mase(actual, forecast, train, season);
	}
	out.mae = mae(actual, forecast);
	const auto bias = bias_decomposition(actual, forecast);
	out.mean_under = bias.mean_under;
	out.mean_over = bias.mean_over;
	const auto r = residuals(actual, forecast);
	if (r.size() >= 2) {
		try {
			const auto m = residual_moments(r);
			out.residual_mean = m.mean;
			out.residual_std = m.std;
			out.residual_skewness = m.skewness;
			out.residual_kurtosis = m.kurtosis.value_or(0.0);
		} catch (const DomainError &) {
			out.residual_mean = r.front();
		}
	} else {
		out.residual_mean = r.front();
	}
	return out;
}

} // namespace ppo
