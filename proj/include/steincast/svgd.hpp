#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "steincast/posterior.hpp"
#include "steincast/series.hpp"

namespace steincast {

struct SvgdConfig {
  int particles = 10;
  double step_w = 1e-3;      // base step for weight blocks
  double step_noise = 1e-2;  // base step for log noise / log alpha blocks
  int batch_size = 64;
  int epochs = 20;
  double epsilon = 1e-6;  // adaptive-scaling epsilon
  std::uint64_t seed = 0;
  int checkpoint_every = 0;  // epochs between checkpoint callbacks; 0 = final only
  int workers = 1;           // 0 = hardware concurrency

  void validate() const;
};

// Deterministic sub-seeds: particle i's initialization and the batch shuffle
// stream, both derived from the run seed.
std::uint64_t particle_seed(std::uint64_t run_seed, int particle);
std::uint64_t scheduler_seed(std::uint64_t run_seed);

// h = H^2 / ln n with H the median pairwise particle distance (diagonal
// excluded); 1.0 when n < 2 or all particles coincide.
double median_bandwidth(const Eigen::MatrixXd& theta);  // one particle per column

struct KernelResult {
  Eigen::MatrixXd k;          // n x n, symmetric, unit diagonal
  Eigen::MatrixXd repulsion;  // P x n; column i = sum_j grad_{theta_j} k(theta_j, theta_i)
};

// k(theta_i, theta_j) = exp(-||theta_i - theta_j||^2 / h).
KernelResult rbf_kernel(const Eigen::MatrixXd& theta, double h);

// Transport update: phi_i = (1/n) sum_j [K_ji grads_j + repulsion], applied
// with per-coordinate adaptive scaling (accumulated squared update
// directions, inverse square root plus epsilon).
class SvgdStepper {
 public:
  SvgdStepper(Eigen::VectorXd step_scale, double epsilon);

  // Recomputes bandwidth and kernel for the current ensemble.
  void apply(Eigen::MatrixXd& theta, const Eigen::MatrixXd& grads);
  void apply(Eigen::MatrixXd& theta, const Eigen::MatrixXd& grads,
             const KernelResult& kernel);

  const Eigen::MatrixXd& accumulators() const { return acc_; }
  void set_accumulators(Eigen::MatrixXd acc);

 private:
  Eigen::VectorXd step_scale_;
  double epsilon_;
  Eigen::MatrixXd acc_;  // P x n, lazily sized
};

// Per-coordinate base steps: step_w on weight blocks, step_noise on the log
// noise precision and log alpha blocks.
Eigen::VectorXd block_step_scale(const ParamLayout& layout, double step_w,
                                 double step_noise);

// Generic driver for arbitrary score functions (toy targets, diagnostics).
using ScoreFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;
Eigen::MatrixXd run_svgd(Eigen::MatrixXd theta, const ScoreFn& score, int iterations,
                         double step, double epsilon = 1e-6);

// Uniform shuffling into batches, deterministic in seed; the final batch may
// be short.
class BatchScheduler {
 public:
  BatchScheduler(std::int64_t n, int batch_size, std::uint64_t seed);
  std::vector<std::vector<std::int64_t>> next_epoch();

 private:
  std::int64_t n_;
  int batch_size_;
  std::mt19937_64 rng_;
};

struct EpochStats {
  int epoch = 0;
  double train_wmape = 0.0;
  double val_wmape = 0.0;
  double mean_log_joint = 0.0;
};

struct TrainOptions {
  SvgdConfig svgd;
  PriorConfig priors;
  bool use_prior = true;
  std::function<void(const EpochStats&)> on_epoch;
  std::function<void(int epoch, const ParticleEnsemble&, const Eigen::MatrixXd& acc)>
      on_checkpoint;
  std::function<void(std::int64_t iteration, const Eigen::MatrixXd& theta)> on_iteration;
};

struct TrainResult {
  ParticleEnsemble ensemble;
  Eigen::MatrixXd accumulators;
  std::vector<EpochStats> history;
};

// Appendix-style training loop: per batch, per-particle log-joint gradients,
// freshly recomputed bandwidth, one transport step. Deterministic in
// (options, seed) for any worker count.
TrainResult train(std::shared_ptr<const Network> net, const WindowedDataset& train_set,
                  const WindowedDataset& val_set, const Transform& transform,
                  const TrainOptions& options);

}  // namespace steincast
