#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "steincast/dataset.hpp"
#include "steincast/network.hpp"

namespace steincast {

struct PriorConfig {
  double a0 = 1.0;  // Gamma shape for the weight precision alpha
  double b0 = 1.0;  // Gamma rate for alpha
  double a1 = 1.0;  // Gamma shape for each noise precision
  double b1 = 1.0;  // Gamma rate for each noise precision

  void validate() const;
};

// View of b windows plus the full training-set size driving the minibatch
// likelihood scaling.
struct Batch {
  const WindowedDataset* data = nullptr;
  std::vector<std::int64_t> indices;
  std::int64_t n_total = 0;

  std::int64_t size() const { return static_cast<std::int64_t>(indices.size()); }
  static Batch full(const WindowedDataset& dataset);
  void validate() const;
};

// log p(theta, D) approximated as log prior + (N/b) * batch log likelihood,
// with exact gradients over every block. log alpha and the log noise
// precisions are part of theta; their Gamma priors carry the log
// reparameterization Jacobians. With use_prior = false the prior terms vanish
// and this is scaled maximum likelihood (baseline training).
class LogJoint {
 public:
  LogJoint(std::shared_ptr<const Network> net, PriorConfig priors, bool use_prior = true);

  // Unscaled Gaussian log likelihood of the batch windows.
  double log_likelihood(ConstVecRef theta, const Batch& batch, Workspace& ws) const;
  double log_prior(ConstVecRef theta) const;
  // Accumulates the prior gradient into grad.
  void grad_log_prior(ConstVecRef theta, VecRef grad) const;
  // Writes the full gradient into grad and returns the scaled log joint value.
  double grad_log_joint(ConstVecRef theta, const Batch& batch, Workspace& ws,
                        VecRef grad) const;

  double log_likelihood(const ParticleState& p, const Batch& batch) const;
  double log_prior(const ParticleState& p) const;
  Eigen::VectorXd grad_log_joint(const ParticleState& p, const Batch& batch) const;

  const Network& net() const { return *net_; }
  std::shared_ptr<const Network> net_ptr() const { return net_; }
  const PriorConfig& priors() const { return priors_; }
  bool use_prior() const { return use_prior_; }

 private:
  std::shared_ptr<const Network> net_;
  PriorConfig priors_;
  bool use_prior_ = true;
};

}  // namespace steincast
