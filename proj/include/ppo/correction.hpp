#pragma once

#include <span>
#include <vector>

namespace ppo {

// Proportional forecast error. Factors outside [-limit, limit] are rejected.
struct PerturbationSpec {
	double factor = 0.0;

	static PerturbationSpec make(double factor, double limit = 0.5);
};

// actual * (1 + factor)
std::vector<double> perturb(std::span<const double> actual, const PerturbationSpec &spec);

// Half the mean absolute error.
double u_cost(std::span<const double> actual, std::span<const double> predicted);

// Weights of the first and third order residual terms of the asymmetric cost.
struct CostModelParams {
	double gamma = 0.0;
	double epsilon = 0.0;
};

// With r = actual - predicted:  mean(r^2) / 2 + gamma * mean(r) + epsilon * mean(r^3) / 3.
// Positive gamma and epsilon make underforecasts (r > 0) costlier.
double v_cost(std::span<const double> actual, std::span<const double> predicted, const CostModelParams &params);

// One forecast of a series together with the cost its decisions realised.
struct ForecastOutcome {
	std::vector<double> actual;
	std::vector<double> predicted;
	double observed_cost = 0.0;
};

struct FitOptions {
	double lower = -5.0;
	double upper = 5.0;
	double step = 0.05;
	double tolerance = 1e-7; // final pattern-search step
};

struct CostModelFit {
	CostModelParams params;
	double correlation = 0.0;
};

// Chooses (gamma, epsilon) maximising the Pearson correlation between v_cost and the observed
// costs. Each pair is standardised by its actual series' mean and standard deviation first.
// Grid search, then pattern-search refinement; ties keep the smallest (gamma, epsilon).
CostModelFit fit_gamma_epsilon(std::span<const ForecastOutcome> outcomes, const FitOptions &options = {});

// Maps a series to the units fit_gamma_epsilon scores in.
struct Standardizer {
	double mean = 0.0;
	double scale = 1.0;

	static Standardizer of(std::span<const double> reference);
	std::vector<double> apply(std::span<const double> values) const;
};

// corrected = beta + alpha * predicted
struct LinearCorrection {
	double alpha = 1.0;
	double beta = 0.0;
};

// (alpha, beta) at a local minimum of v_cost(actual, beta + alpha * predicted). The cubic term
// makes V unbounded once epsilon != 0, so only a strict local minimum that beats the uncorrected
// forecast is accepted; DomainError otherwise. With epsilon = 0 this is the global minimum.
LinearCorrection linear_correction(std::span<const double> actual, std::span<const double> predicted,
                                   const CostModelParams &params);

std::vector<double> apply_correction(std::span<const double> predicted, const LinearCorrection &correction);

} // namespace ppo
