#include "ppo/correction.hpp"

#include "ppo/error.hpp"
#include "ppo/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace ppo {

PerturbationSpec PerturbationSpec::make(double factor, double limit) {
	if (!std::isfinite(factor) || std::abs(factor) > limit) {
		throw InputError("perturbation factor " + std::to_string(factor) + " outside [-" + std::to_string(limit) +
		                 ", " + std::to_string(limit) + "]");
	}
	return PerturbationSpec {factor};
}

std::vector<double> perturb(std::span<const double> actual, const PerturbationSpec &spec) {
	std::vector<double> out(actual.size());
	for (std::size_t t = 0; t < actual.size(); ++t) {
		out[t] = actual[t] * (1.0 + spec.factor);
	}
	return out;
}

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char *what) {
	if (a.size() != b.size() || a.empty()) {
		throw InputError(std::string(what) + ": series must be non-empty and of equal length");
	}
}

// Per-forecast residual moments; V is linear in (gamma, epsilon) given these.
struct ResidualTerms {
	double quadratic = 0.0; // mean(r^2) / 2
	double linear = 0.0;    // mean(r)
	double cubic = 0.0;     // mean(r^3) / 3
};

ResidualTerms residual_terms(std::span<const double> actual, std::span<const double> predicted) {
	ResidualTerms t;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		const double r = actual[i] - predicted[i];
		t.quadratic += r * r;
		t.linear += r;
		t.cubic += r * r * r;
	}
	const double n = static_cast<double>(actual.size());
	t.quadratic /= 2.0 * n;
	t.linear /= n;
	t.cubic /= 3.0 * n;
	return t;
}

} // namespace

double u_cost(std::span<const double> actual, std::span<const double> predicted) {
	check_lengths(actual, predicted, "u_cost");
	double sum = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		sum += std::abs(actual[i] - predicted[i]);
	}
	return sum / (2.0 * static_cast<double>(actual.size()));
}

double v_cost(std::span<const double> actual, std::span<const double> predicted, const CostModelParams &params) {
	check_lengths(actual, predicted, "v_cost");
	const auto t = residual_terms(actual, predicted);
	return t.quadratic + params.gamma * t.linear + params.epsilon * t.cubic;
}

Standardizer Standardizer::of(std::span<const double> reference) {
	if (reference.size() < 2) {
		throw InputError("standardising needs at least two values");
	}
	const auto n = static_cast<double>(reference.size());
	double mean = 0.0;
	for (double v : reference) {
		mean += v;
	}
	mean /= n;
	double ss = 0.0;
	for (double v : reference) {
		ss += (v - mean) * (v - mean);
	}
	const double sd = std::sqrt(ss / (n - 1.0));
	if (!(sd > 0.0)) {
		throw DomainError("cannot standardise a constant actual series");
	}
	return Standardizer {mean, sd};
}

std::vector<double> Standardizer::apply(std::span<const double> values) const {
	std::vector<double> out(values.size());
	for (std::size_t i = 0; i < values.size(); ++i) {
		out[i] = (values[i] - mean) / scale;
	}
	return out;
}

CostModelFit fit_gamma_epsilon(std::span<const ForecastOutcome> outcomes, const FitOptions &options) {
	if (outcomes.size() < 3) {
		throw InputError("fit_gamma_epsilon needs at least three forecasts");
	}
	if (!(options.step > 0.0) || !(options.lower < options.upper)) {
		throw InputError("fit_gamma_epsilon: bad search box");
	}
	std::vector<ResidualTerms> terms;
	std::vector<double> costs;
	for (const auto &o : outcomes) {
		check_lengths(o.actual, o.predicted, "fit_gamma_epsilon");
		const auto z = Standardizer::of(o.actual);
		terms.push_back(residual_terms(z.apply(o.actual), z.apply(o.predicted)));
		costs.push_back(o.observed_cost);
	}
	if (std::all_of(costs.begin(), costs.end(), [&](double c) { return c == costs.front(); })) {
		throw DomainError("fit_gamma_epsilon: observed costs are all equal, correlation is undefined");
	}

	std::vector<double> scores(terms.size());
	auto correlation = [&](double g, double e) -> std::optional<double> {
		for (std::size_t k = 0; k < terms.size(); ++k) {
			scores[k] = terms[k].quadratic + g * terms[k].linear + e * terms[k].cubic;
		}
		const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
		if (*hi - *lo <= 1e-14 * std::max(1.0, std::abs(*hi))) {
			return std::nullopt;
		}
		return pearson(scores, costs);
	};

	const int cells = static_cast<int>(std::floor((options.upper - options.lower) / options.step + 1e-9)) + 1;
	std::optional<CostModelFit> best;
	for (int i = 0; i < cells; ++i) {
		const double g = options.lower + i * options.step;
		for (int j = 0; j < cells; ++j) {
			const double e = options.lower + j * options.step;
			const auto r = correlation(g, e);
			if (r && (!best || *r > best->correlation)) {
				best = CostModelFit {{g, e}, *r};
			}
		}
	}
	if (!best) {
		throw DomainError("fit_gamma_epsilon: V scores are identical for every (gamma, epsilon)");
	}

	// Compass search around the best cell, staying inside the box.
	double h = options.step / 2.0;
	while (h >= options.tolerance) {
		bool moved = false;
		const std::array<std::array<double, 2>, 4> dirs {{{-h, 0.0}, {0.0, -h}, {0.0, h}, {h, 0.0}}};
		CostModelFit candidate = *best;
		for (const auto &d : dirs) {
			const double g = std::clamp(best->params.gamma + d[0], options.lower, options.upper);
			const double e = std::clamp(best->params.epsilon + d[1], options.lower, options.upper);
			const auto r = correlation(g, e);
			if (r && *r > candidate.correlation + 1e-15) {
				candidate = CostModelFit {{g, e}, *r};
				moved = true;
			}
		}
		if (moved) {
			best = candidate;
		} else {
			h /= 2.0;
		}
	}
	return *best;
}

namespace {

struct VLocal {
	double value = 0.0;
	double grad_alpha = 0.0;
	double grad_beta = 0.0;
	double h_aa = 0.0;
	double h_ab = 0.0;
	double h_bb = 0.0;
};

// V and its derivatives for corrected = beta + alpha * x, where x is already centred and scaled.
VLocal evaluate(std::span<const double> y, std::span<const double> x, double alpha, double beta,
                const CostModelParams &p) {
	VLocal out;
	for (std::size_t i = 0; i < y.size(); ++i) {
		const double r = y[i] - beta - alpha * x[i];
		const double lin = r + p.gamma + p.epsilon * r * r; // -dV/dprediction per point
		const double curv = 1.0 + 2.0 * p.epsilon * r;
		out.value += 0.5 * r * r + p.gamma * r + p.epsilon * r * r * r / 3.0;
		out.grad_beta -= lin;
		out.grad_alpha -= x[i] * lin;
		out.h_bb += curv;
		out.h_ab += x[i] * curv;
		out.h_aa += x[i] * x[i] * curv;
	}
	const double n = static_cast<double>(y.size());
	out.value /= n;
	out.grad_alpha /= n;
	out.grad_beta /= n;
	out.h_aa /= n;
	out.h_ab /= n;
	out.h_bb /= n;
	return out;
}

} // namespace

LinearCorrection linear_correction(std::span<const double> actual, std::span<const double> predicted,
                                   const CostModelParams &params) {
	check_lengths(actual, predicted, "linear_correction");
	const auto n = static_cast<double>(predicted.size());
	double mx = 0.0, my = 0.0;
	for (std::size_t i = 0; i < predicted.size(); ++i) {
		mx += predicted[i];
		my += actual[i];
	}
	mx /= n;
	my /= n;
	double sxx = 0.0, sxy = 0.0;
	for (std::size_t i = 0; i < predicted.size(); ++i) {
		sxx += (predicted[i] - mx) * (predicted[i] - mx);
		sxy += (predicted[i] - mx) * (actual[i] - my);
	}
	if (!(sxx > 0.0)) {
		throw DomainError("linear_correction: predicted series is constant");
	}
	// Work in x' = (x - mx) / sx so the Newton system is well scaled: p = b' + a' x'.
	const double sx = std::sqrt(sxx / n);
	std::vector<double> xs(predicted.size());
	for (std::size_t i = 0; i < xs.size(); ++i) {
		xs[i] = (predicted[i] - mx) / sx;
	}
	const double ols_a = sxy / sxx * sx;
	const double ols_b = my;
	double resid_scale = 0.0;
	for (std::size_t i = 0; i < xs.size(); ++i) {
		const double r = actual[i] - ols_b - ols_a * xs[i];
		resid_scale += r * r;
	}
	resid_scale = std::sqrt(resid_scale / n) + 1e-12;

	std::vector<std::array<double, 2>> starts {{ols_a, ols_b}, {sx, mx}};
	for (double k : {0.5, 1.0, 2.0, 4.0}) {
		starts.push_back({ols_a, ols_b - k * resid_scale});
		starts.push_back({ols_a, ols_b + k * resid_scale});
	}

	std::optional<std::array<double, 3>> best; // a', b', V
	for (auto [a, b] : starts) {
		for (int it = 0; it < 200; ++it) {
			const auto v = evaluate(actual, xs, a, b, params);
			const double det = v.h_aa * v.h_bb - v.h_ab * v.h_ab;
			if (std::abs(det) < 1e-300) {
				break;
			}
			const double da = (v.h_bb * v.grad_alpha - v.h_ab * v.grad_beta) / det;
			const double db = (v.h_aa * v.grad_beta - v.h_ab * v.grad_alpha) / det;
			a -= da;
			b -= db;
			if (!std::isfinite(a) || !std::isfinite(b)) {
				break;
			}
			if (std::max(std::abs(da), std::abs(db)) < 1e-14 * (1.0 + std::abs(a) + std::abs(b))) {
				break;
			}
		}
		if (!std::isfinite(a) || !std::isfinite(b)) {
			continue;
		}
		const auto v = evaluate(actual, xs, a, b, params);
		const bool stationary = std::max(std::abs(v.grad_alpha), std::abs(v.grad_beta)) < 1e-8;
		const bool minimum = v.h_bb > 0.0 && v.h_aa * v.h_bb - v.h_ab * v.h_ab > 0.0;
		if (stationary && minimum && (!best || v.value < (*best)[2])) {
			best = std::array<double, 3> {a, b, v.value};
		}
	}
	if (!best) {
		throw DomainError("linear_correction: V has no finite local minimum for these parameters");
	}
	const double identity = v_cost(actual, predicted, params);
	if ((*best)[2] > identity + 1e-12 * std::max(1.0, std::abs(identity))) {
		throw DomainError("linear_correction: V is unbounded below and no local minimum beats the uncorrected forecast");
	}
	LinearCorrection out;
	out.alpha = (*best)[0] / sx;
	out.beta = (*best)[1] - out.alpha * mx;
	return out;
}

std::vector<double> apply_correction(std::span<const double> predicted, const LinearCorrection &correction) {
	std::vector<double> out(predicted.size());
	for (std::size_t i = 0; i < predicted.size(); ++i) {
		out[i] = correction.beta + correction.alpha * predicted[i];
	}
	return out;
}

} // namespace ppo
