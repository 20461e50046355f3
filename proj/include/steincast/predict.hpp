#pragma once

#include <string>
#include <utility>

#include "steincast/dataset.hpp"
#include "steincast/network.hpp"
#include "steincast/series.hpp"

namespace steincast {

// Per-horizon posterior predictive summary. Variances are always reported in
// transformed space; mean and bounds may be mapped to demand units.
struct PredictiveSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd var_model;  // Cov over particles of the network means
  Eigen::VectorXd var_noise;  // mean over particles of the noise variances
  Eigen::VectorXd var_total;  // var_model + var_noise
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

Eigen::VectorXd predictive_mean(const ParticleEnsemble& ensemble,
                                const Eigen::MatrixXd& input, const Eigen::MatrixXd& cal);

struct VarianceDecomposition {
  Eigen::VectorXd model;
  Eigen::VectorXd noise;
  Eigen::VectorXd total;
};

VarianceDecomposition predictive_variance(const ParticleEnsemble& ensemble,
                                          const Eigen::MatrixXd& input,
                                          const Eigen::MatrixXd& cal);

// Per-dimension interval yhat -/+ z * eta, eta^2 = mean(sigma^2 + f^2) - mean(f)^2,
// z the standard Gaussian upper (1-level)/2 quantile.
std::pair<Eigen::VectorXd, Eigen::VectorXd> credible_interval(
    const ParticleEnsemble& ensemble, const Eigen::MatrixXd& input,
    const Eigen::MatrixXd& cal, double level = 0.95);

PredictiveSummary summarize(const ParticleEnsemble& ensemble, const Eigen::MatrixXd& input,
                            const Eigen::MatrixXd& cal, double level = 0.95);

// Maps mean and interval endpoints through the monotone inverse transform;
// variances stay in transformed space.
PredictiveSummary to_original_scale(PredictiveSummary summary, const Transform& transform);

// One row per (window, horizon):
// window_id,horizon,mean,var_model,var_noise,var_total,lo95,hi95,actual
// with original-scale mean/bounds/actual and transformed-space variances.
void write_predictions_csv(const std::string& path, const WindowedDataset& split,
                           const ParticleEnsemble& ensemble, const Transform& transform,
                           double level = 0.95, int workers = 1);

namespace detail {
// sqrt clamped at zero; negative inputs (floating cancellation) warn on stderr.
double clamped_sqrt(double x);
// d x n network outputs / per-particle noise variances.
Eigen::MatrixXd particle_outputs(const Network& net, const Eigen::MatrixXd& theta,
                                 const Eigen::MatrixXd& input, const Eigen::MatrixXd& cal);
Eigen::MatrixXd noise_variances(const Network& net, const Eigen::MatrixXd& theta);
}  // namespace detail

}  // namespace steincast
