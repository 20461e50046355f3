#include "steincast/posterior.hpp"

#include <cmath>

#include "steincast/errors.hpp"

namespace steincast {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
}

void PriorConfig::validate() const {
  if (!(a0 > 0.0 && b0 > 0.0 && a1 > 0.0 && b1 > 0.0)) {
    throw ConfigError("Gamma prior parameters must be strictly positive");
  }
}

Batch Batch::full(const WindowedDataset& dataset) {
  Batch batch;
  batch.data = &dataset;
  batch.indices.resize(static_cast<std::size_t>(dataset.size()));
  for (std::int64_t i = 0; i < dataset.size(); ++i) {
    batch.indices[static_cast<std::size_t>(i)] = i;
  }
  batch.n_total = dataset.size();
  return batch;
}

void Batch::validate() const {
  if (!data) throw ContractError("batch has no dataset");
  if (indices.empty()) throw ContractError("batch is empty");
  if (n_total < size()) throw ContractError("n_total smaller than the batch");
  for (std::int64_t i : indices) {
    if (i < 0 || i >= data->size()) throw ContractError("batch index out of range");
  }
}

LogJoint::LogJoint(std::shared_ptr<const Network> net, PriorConfig priors, bool use_prior)
    : net_(std::move(net)), priors_(priors), use_prior_(use_prior) {
  if (!net_) throw ContractError("LogJoint needs a network");
  priors_.validate();
}

double LogJoint::log_likelihood(ConstVecRef theta, const Batch& batch, Workspace& ws) const {
  batch.validate();
  const ParamLayout& layout = net_->layout();
  const int d = layout.noise_dim();
  const Eigen::VectorXd log_lambda = theta.segment(layout.noise_offset(), d);
  const Eigen::VectorXd lambda = log_lambda.array().exp();

  double total = 0.0;
  for (std::int64_t idx : batch.indices) {
    const auto k = static_cast<std::size_t>(idx);
    const Eigen::VectorXd f =
        net_->forward(theta, batch.data->inputs[k], batch.data->target_calendar[k], ws);
    if (!f.allFinite()) {
      throw NumericError("non-finite network output for window " + std::to_string(idx));
    }
    const Eigen::VectorXd r = batch.data->targets.row(idx).transpose() - f;
    total += 0.5 * (log_lambda.sum() - (lambda.array() * r.array().square()).sum() -
                    d * kLogTwoPi);
  }
  return total;
}

double LogJoint::log_prior(ConstVecRef theta) const {
  const ParamLayout& layout = net_->layout();
  const std::int64_t w_count = layout.weight_count();
  const int d = layout.noise_dim();
  const double log_alpha = theta[layout.alpha_offset()];
  const double alpha = std::exp(log_alpha);
  const auto w = theta.head(w_count);

  // w | alpha ~ N(0, alpha^{-1} I)
  double value = 0.5 * static_cast<double>(w_count) * (log_alpha - kLogTwoPi) -
                 0.5 * alpha * w.squaredNorm();
  // alpha ~ Gamma(a0, b0) in log parameterization: the +log(alpha) Jacobian
  // turns the (a0 - 1) shape term into a0.
  value += priors_.a0 * std::log(priors_.b0) - std::lgamma(priors_.a0) +
           priors_.a0 * log_alpha - priors_.b0 * alpha;
  // each noise precision ~ Gamma(a1, b1), same reparameterization
  const double gamma_const = priors_.a1 * std::log(priors_.b1) - std::lgamma(priors_.a1);
  for (int j = 0; j < d; ++j) {
    const double log_lambda = theta[layout.noise_offset() + j];
    value += gamma_const + priors_.a1 * log_lambda - priors_.b1 * std::exp(log_lambda);
  }
  return value;
}

void LogJoint::grad_log_prior(ConstVecRef theta, VecRef grad) const {
  const ParamLayout& layout = net_->layout();
  const std::int64_t w_count = layout.weight_count();
  const int d = layout.noise_dim();
  const double log_alpha = theta[layout.alpha_offset()];
  const double alpha = std::exp(log_alpha);
  const auto w = theta.head(w_count);

  grad.head(w_count) -= alpha * w;
  for (int j = 0; j < d; ++j) {
    const double lambda = std::exp(theta[layout.noise_offset() + j]);
    grad[layout.noise_offset() + j] += priors_.a1 - priors_.b1 * lambda;
  }
  grad[layout.alpha_offset()] += 0.5 * static_cast<double>(w_count) -
                                 0.5 * alpha * w.squaredNorm() + priors_.a0 -
                                 priors_.b0 * alpha;
}

double LogJoint::grad_log_joint(ConstVecRef theta, const Batch& batch, Workspace& ws,
                                VecRef grad) const {
  batch.validate();
  const ParamLayout& layout = net_->layout();
  if (grad.size() != layout.total()) throw ContractError("grad must span the full layout");
  const int d = layout.noise_dim();
  const double scale =
      static_cast<double>(batch.n_total) / static_cast<double>(batch.size());
  const Eigen::VectorXd log_lambda = theta.segment(layout.noise_offset(), d);
  const Eigen::VectorXd lambda = log_lambda.array().exp();

  grad.setZero();
  double loglik = 0.0;
  Eigen::VectorXd gout(d);
  Eigen::VectorXd noise_grad = Eigen::VectorXd::Zero(d);
  for (std::int64_t idx : batch.indices) {
    const auto k = static_cast<std::size_t>(idx);
    const Eigen::MatrixXd& input = batch.data->inputs[k];
    const Eigen::MatrixXd& cal = batch.data->target_calendar[k];
    const Eigen::VectorXd f = net_->forward(theta, input, cal, ws);
    if (!f.allFinite()) {
      throw NumericError("non-finite network output for window " + std::to_string(idx));
    }
    const Eigen::VectorXd r = batch.data->targets.row(idx).transpose() - f;
    loglik += 0.5 * (log_lambda.sum() - (lambda.array() * r.array().square()).sum() -
                     d * kLogTwoPi);
    gout = (scale * lambda.array() * r.array()).matrix();
    net_->backward(theta, input, cal, gout, ws, grad);
    noise_grad.array() += 0.5 - 0.5 * lambda.array() * r.array().square();
  }
  grad.segment(layout.noise_offset(), d) += scale * noise_grad;

  double value = scale * loglik;
  if (use_prior_) {
    value += log_prior(theta);
    grad_log_prior(theta, grad);
  }
  if (!grad.allFinite()) {
    for (std::int64_t i = 0; i < grad.size(); ++i) {
      if (!std::isfinite(grad[i])) {
        throw NumericError("non-finite gradient in block '" + layout.block_name_at(i) + "'");
      }
    }
  }
  return value;
}

double LogJoint::log_likelihood(const ParticleState& p, const Batch& batch) const {
  auto ws = net_->make_workspace();
  return log_likelihood(p.theta, batch, *ws);
}

double LogJoint::log_prior(const ParticleState& p) const { return log_prior(p.theta); }

Eigen::VectorXd LogJoint::grad_log_joint(const ParticleState& p, const Batch& batch) const {
  auto ws = net_->make_workspace();
  Eigen::VectorXd grad(net_->param_count());
  grad_log_joint(p.theta, batch, *ws, grad);
  return grad;
}

}  // namespace steincast
