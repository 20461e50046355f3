#include "steincast/predict.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "steincast/errors.hpp"
#include "steincast/stats.hpp"

namespace steincast {

namespace detail {

double clamped_sqrt(double x) {
  if (x < 0.0) {
    std::cerr << "warning: clamping negative variance " << x << " to zero\n";
    return 0.0;
  }
  return std::sqrt(x);
}

Eigen::MatrixXd particle_outputs(const Network& net, const Eigen::MatrixXd& theta,
                                 const Eigen::MatrixXd& input, const Eigen::MatrixXd& cal) {
  const int n = static_cast<int>(theta.cols());
  Eigen::MatrixXd outputs(net.horizon(), n);
  auto ws = net.make_workspace();
  for (int i = 0; i < n; ++i) {
    outputs.col(i) = net.forward(theta.col(i), input, cal, *ws);
  }
  return outputs;
}

Eigen::MatrixXd noise_variances(const Network& net, const Eigen::MatrixXd& theta) {
  const ParamLayout& layout = net.layout();
  const int d = layout.noise_dim();
  const int n = static_cast<int>(theta.cols());
  Eigen::MatrixXd sigma2(d, n);
  for (int i = 0; i < n; ++i) {
    sigma2.col(i) = (-theta.col(i).segment(layout.noise_offset(), d)).array().exp();
  }
  return sigma2;
}

}  // namespace detail

Eigen::VectorXd predictive_mean(const ParticleEnsemble& ensemble, const Eigen::MatrixXd& input,
                                const Eigen::MatrixXd& cal) {
  ensemble.validate();
  const Eigen::MatrixXd f = detail::particle_outputs(*ensemble.net, ensemble.theta, input, cal);
  return f.rowwise().mean();
}

VarianceDecomposition predictive_variance(const ParticleEnsemble& ensemble,
                                          const Eigen::MatrixXd& input,
                                          const Eigen::MatrixXd& cal) {
  ensemble.validate();
  const Eigen::MatrixXd f = detail::particle_outputs(*ensemble.net, ensemble.theta, input, cal);
  const Eigen::MatrixXd sigma2 = detail::noise_variances(*ensemble.net, ensemble.theta);
  VarianceDecomposition out;
  const Eigen::VectorXd mean = f.rowwise().mean();
  const Eigen::VectorXd mean_of_sq = f.array().square().matrix().rowwise().mean();
  out.model = (mean_of_sq.array() - mean.array().square()).max(0.0).matrix();
  out.noise = sigma2.rowwise().mean();
  out.total = out.model + out.noise;
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> credible_interval(const ParticleEnsemble& ensemble,
                                                              const Eigen::MatrixXd& input,
                                                              const Eigen::MatrixXd& cal,
                                                              double level) {
  if (!(level > 0.0 && level < 1.0)) throw ContractError("credible level must be in (0, 1)");
  ensemble.validate();
  const Eigen::MatrixXd f = detail::particle_outputs(*ensemble.net, ensemble.theta, input, cal);
  const Eigen::MatrixXd sigma2 = detail::noise_variances(*ensemble.net, ensemble.theta);
  const double z = normal_quantile(0.5 * (1.0 + level));

  const Eigen::VectorXd yhat = f.rowwise().mean();
  // eta_j^2 = mean_i(sigma2_ij + f_ij^2) - mean_i(f_ij)^2
  const Eigen::VectorXd second_moment =
      (sigma2.array() + f.array().square()).matrix().rowwise().mean();
  const Eigen::VectorXd eta_sq = second_moment - yhat.cwiseProduct(yhat);
  Eigen::VectorXd eta(eta_sq.size());
  for (std::int64_t j = 0; j < eta_sq.size(); ++j) eta[j] = detail::clamped_sqrt(eta_sq[j]);
  return {yhat - z * eta, yhat + z * eta};
}

PredictiveSummary summarize(const ParticleEnsemble& ensemble, const Eigen::MatrixXd& input,
                            const Eigen::MatrixXd& cal, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ContractError("credible level must be in (0, 1)");
  ensemble.validate();
  const Eigen::MatrixXd f = detail::particle_outputs(*ensemble.net, ensemble.theta, input, cal);
  const Eigen::MatrixXd sigma2 = detail::noise_variances(*ensemble.net, ensemble.theta);
  const double z = normal_quantile(0.5 * (1.0 + level));

  PredictiveSummary s;
  s.mean = f.rowwise().mean();
  const Eigen::VectorXd mean_of_sq = f.array().square().matrix().rowwise().mean();
  s.var_model = (mean_of_sq.array() - s.mean.array().square()).max(0.0).matrix();
  s.var_noise = sigma2.rowwise().mean();
  s.var_total = s.var_model + s.var_noise;
  const Eigen::VectorXd second_moment =
      (sigma2.array() + f.array().square()).matrix().rowwise().mean();
  const Eigen::VectorXd eta_sq = second_moment - s.mean.cwiseProduct(s.mean);
  Eigen::VectorXd eta(eta_sq.size());
  for (std::int64_t j = 0; j < eta_sq.size(); ++j) eta[j] = detail::clamped_sqrt(eta_sq[j]);
  s.lo = s.mean - z * eta;
  s.hi = s.mean + z * eta;
  return s;
}

PredictiveSummary to_original_scale(PredictiveSummary summary, const Transform& transform) {
  summary.mean = transform.inverse(summary.mean);
  summary.lo = transform.inverse(summary.lo);
  summary.hi = transform.inverse(summary.hi);
  return summary;
}

void write_predictions_csv(const std::string& path, const WindowedDataset& split,
                           const ParticleEnsemble& ensemble, const Transform& transform,
                           double level, int workers) {
  (void)workers;  // prediction is cheap enough serially at desk scale
  ensemble.validate();
  if (split.channels() != ensemble.net->input_channels() ||
      split.l_in != ensemble.net->input_length() || split.d != ensemble.net->horizon()) {
    throw ContractError("dataset geometry does not match the checkpoint network");
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write predictions file '" + path + "'");
  out << "window_id,horizon,mean,var_model,var_noise,var_total,lo95,hi95,actual\n";
  char buf[512];
  for (std::int64_t k = 0; k < split.size(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    PredictiveSummary s =
        summarize(ensemble, split.inputs[idx], split.target_calendar[idx], level);
    const PredictiveSummary orig = to_original_scale(s, transform);
    for (int j = 0; j < split.d; ++j) {
      const double actual = transform.inverse(split.targets(k, j));
      std::snprintf(buf, sizeof(buf),
                    "%lld,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    static_cast<long long>(split.start_index[idx]), j + 1, orig.mean[j],
                    s.var_model[j], s.var_noise[j], s.var_total[j], orig.lo[j], orig.hi[j],
                    actual);
      out << buf;
    }
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace steincast
