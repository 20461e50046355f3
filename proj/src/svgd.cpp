#include "steincast/svgd.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "steincast/errors.hpp"
#include "steincast/metrics.hpp"
#include "steincast/predict.hpp"
#include "steincast/stats.hpp"

namespace steincast {

void SvgdConfig::validate() const {
  if (particles < 1) throw ConfigError("particle count must be at least 1");
  if (!(step_w > 0.0) || !(step_noise > 0.0)) throw ConfigError("step sizes must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (workers < 0) throw ConfigError("workers must be nonnegative");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be nonnegative");
}

std::uint64_t particle_seed(std::uint64_t run_seed, int particle) {
  // splitmix64 of (seed, particle)
  std::uint64_t z = run_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(particle) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t scheduler_seed(std::uint64_t run_seed) {
  return particle_seed(run_seed ^ 0x5b4dc96d1a8bull, 0x42);
}

double median_bandwidth(const Eigen::MatrixXd& theta) {
  const int n = static_cast<int>(theta.cols());
  if (n < 2) return 1.0;
  Eigen::MatrixXd gram;
  gram.noalias() = theta.transpose() * theta;
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double sq = std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j));
      dists.push_back(std::sqrt(sq));
    }
  }
  const double h_med = median(std::move(dists));
  if (h_med == 0.0) return 1.0;
  return h_med * h_med / std::log(static_cast<double>(n));
}

KernelResult rbf_kernel(const Eigen::MatrixXd& theta, double h) {
  if (!(h > 0.0)) throw ContractError("kernel bandwidth must be positive");
  const int n = static_cast<int>(theta.cols());
  Eigen::MatrixXd gram;
  gram.noalias() = theta.transpose() * theta;

  KernelResult result;
  result.k.resize(n, n);
  for (int i = 0; i < n; ++i) {
    result.k(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double sq = std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j));
      const double v = std::exp(-sq / h);
      result.k(i, j) = v;
      result.k(j, i) = v;
    }
  }
  Eigen::MatrixXd mixer = -result.k;
  mixer.diagonal() += result.k.rowwise().sum();
  result.repulsion.noalias() = theta * mixer;
  result.repulsion *= 2.0 / h;
  return result;
}

SvgdStepper::SvgdStepper(Eigen::VectorXd step_scale, double epsilon)
    : step_scale_(std::move(step_scale)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0)) throw ContractError("epsilon must be positive");
  if ((step_scale_.array() <= 0.0).any()) throw ContractError("step scale must be positive");
}

void SvgdStepper::apply(Eigen::MatrixXd& theta, const Eigen::MatrixXd& grads) {
  apply(theta, grads, rbf_kernel(theta, median_bandwidth(theta)));
}

void SvgdStepper::apply(Eigen::MatrixXd& theta, const Eigen::MatrixXd& grads,
                        const KernelResult& kernel) {
  const int n = static_cast<int>(theta.cols());
  if (theta.rows() != step_scale_.size()) {
    throw ContractError("step scale does not match the parameter dimension");
  }
  if (grads.rows() != theta.rows() || grads.cols() != theta.cols()) {
    throw ContractError("gradient matrix shape mismatch");
  }
  if (acc_.rows() != theta.rows() || acc_.cols() != n) {
    if (acc_.size() != 0) throw ContractError("accumulator shape mismatch");
    acc_ = Eigen::MatrixXd::Zero(theta.rows(), n);
  }

  Eigen::MatrixXd phi;
  phi.noalias() = grads * kernel.k;
  phi += kernel.repulsion;
  phi /= static_cast<double>(n);

  acc_.array() += phi.array().square();
  for (int i = 0; i < n; ++i) {
    theta.col(i).array() +=
        step_scale_.array() * phi.col(i).array() / (acc_.col(i).array().sqrt() + epsilon_);
  }
}

void SvgdStepper::set_accumulators(Eigen::MatrixXd acc) { acc_ = std::move(acc); }

Eigen::VectorXd block_step_scale(const ParamLayout& layout, double step_w, double step_noise) {
  Eigen::VectorXd scale = Eigen::VectorXd::Constant(layout.total(), step_w);
  scale.tail(layout.noise_dim() + 1).setConstant(step_noise);
  return scale;
}

Eigen::MatrixXd run_svgd(Eigen::MatrixXd theta, const ScoreFn& score, int iterations,
                         double step, double epsilon) {
  SvgdStepper stepper(Eigen::VectorXd::Constant(theta.rows(), step), epsilon);
  for (int it = 0; it < iterations; ++it) {
    const Eigen::MatrixXd grads = score(theta);
    stepper.apply(theta, grads);
    if (!theta.allFinite()) {
      throw NumericError("svgd diverged at iteration " + std::to_string(it));
    }
  }
  return theta;
}

BatchScheduler::BatchScheduler(std::int64_t n, int batch_size, std::uint64_t seed)
    : n_(n), batch_size_(batch_size), rng_(seed) {
  if (n_ < 1) throw ContractError("scheduler needs at least one window");
  if (batch_size_ < 1) throw ContractError("batch size must be positive");
}

std::vector<std::vector<std::int64_t>> BatchScheduler::next_epoch() {
  std::vector<std::int64_t> order(static_cast<std::size_t>(n_));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng_);
  std::vector<std::vector<std::int64_t>> batches;
  for (std::int64_t at = 0; at < n_; at += batch_size_) {
    const std::int64_t end = std::min(n_, at + batch_size_);
    batches.emplace_back(order.begin() + at, order.begin() + end);
  }
  return batches;
}

namespace {

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(particle, slot) for every particle; slot < workers identifies the
// thread-local workspace. Per-particle work is independent, so the schedule
// does not affect results.
void for_each_particle(int n, int workers, const std::function<void(int, int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  const int threads = std::min(workers, n);
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += threads) fn(i, t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Across-horizon average WMAPE of the ensemble predictive mean on up to `cap`
// strided windows, in original units.
double ensemble_wmape(const Network& net, const Eigen::MatrixXd& theta,
                      const WindowedDataset& ds, const Transform& transform,
                      std::int64_t cap) {
  const std::int64_t total = ds.size();
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  const std::int64_t step = std::max<std::int64_t>(1, total / cap);
  std::vector<std::int64_t> rows;
  for (std::int64_t k = 0; k < total; k += step) rows.push_back(k);

  const int d = ds.d;
  const int n = static_cast<int>(theta.cols());
  Eigen::MatrixXd y(static_cast<std::int64_t>(rows.size()), d);
  Eigen::MatrixXd yhat(static_cast<std::int64_t>(rows.size()), d);
  auto ws = net.make_workspace();
  Eigen::VectorXd mean(d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto k = static_cast<std::size_t>(rows[r]);
    mean.setZero();
    for (int i = 0; i < n; ++i) {
      mean += net.forward(theta.col(i), ds.inputs[k], ds.target_calendar[k], *ws);
    }
    mean /= static_cast<double>(n);
    for (int j = 0; j < d; ++j) {
      y(static_cast<std::int64_t>(r), j) = transform.inverse(ds.targets(rows[r], j));
      yhat(static_cast<std::int64_t>(r), j) = transform.inverse(mean[j]);
    }
  }
  double sum = 0.0;
  for (int j = 0; j < d; ++j) sum += wmape(y.col(j), yhat.col(j));
  return sum / d;
}

}  // namespace

TrainResult train(std::shared_ptr<const Network> net, const WindowedDataset& train_set,
                  const WindowedDataset& val_set, const Transform& transform,
                  const TrainOptions& options) {
  if (!net) throw ContractError("train needs a network");
  options.svgd.validate();
  options.priors.validate();
  if (train_set.size() < 1) throw DataError("training split is empty");
  if (train_set.channels() != net->input_channels() || train_set.l_in != net->input_length() ||
      train_set.d != net->horizon()) {
    throw ContractError("dataset geometry does not match the network");
  }

  const SvgdConfig& cfg = options.svgd;
  const int n = cfg.particles;
  const std::int64_t p = net->param_count();
  const int workers = resolve_workers(cfg.workers);

  Eigen::MatrixXd theta(p, n);
  for (int i = 0; i < n; ++i) {
    theta.col(i) = net->init_particle(particle_seed(cfg.seed, i));
  }

  LogJoint joint(net, options.priors, options.use_prior);
  SvgdStepper stepper(block_step_scale(net->layout(), cfg.step_w, cfg.step_noise),
                      cfg.epsilon);
  BatchScheduler scheduler(train_set.size(), cfg.batch_size, scheduler_seed(cfg.seed));

  std::vector<std::unique_ptr<Workspace>> workspaces;
  for (int t = 0; t < std::min(workers, n); ++t) workspaces.push_back(net->make_workspace());

  constexpr std::int64_t kWmapeCap = 512;
  TrainResult result;
  Eigen::MatrixXd grads(p, n);
  Eigen::VectorXd values(n);
  std::int64_t iteration = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double joint_sum = 0.0;
    std::int64_t joint_count = 0;
    for (const auto& indices : scheduler.next_epoch()) {
      Batch batch;
      batch.data = &train_set;
      batch.indices = indices;
      batch.n_total = train_set.size();

      for_each_particle(n, workers, [&](int i, int slot) {
        values[i] = joint.grad_log_joint(theta.col(i), batch, *workspaces[slot],
                                         grads.col(i));
      });
      stepper.apply(theta, grads);
      if (!theta.allFinite()) {
        for (int i = 0; i < n; ++i) {
          for (std::int64_t q = 0; q < p; ++q) {
            if (!std::isfinite(theta(q, i))) {
              throw NumericError("divergence at iteration " + std::to_string(iteration) +
                                 ", particle " + std::to_string(i) + ", block '" +
                                 net->layout().block_name_at(q) + "'");
            }
          }
        }
      }
      joint_sum += values.sum();
      joint_count += n;
      ++iteration;
      if (options.on_iteration) options.on_iteration(iteration, theta);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_log_joint = joint_sum / static_cast<double>(joint_count);
    stats.train_wmape = ensemble_wmape(*net, theta, train_set, transform, kWmapeCap);
    stats.val_wmape = ensemble_wmape(*net, theta, val_set, transform, kWmapeCap);
    result.history.push_back(stats);
    if (options.on_epoch) options.on_epoch(stats);
    if (options.on_checkpoint && cfg.checkpoint_every > 0 &&
        (epoch + 1) % cfg.checkpoint_every == 0 && epoch + 1 < cfg.epochs) {
      ParticleEnsemble snapshot{theta, net};
      options.on_checkpoint(epoch, snapshot, stepper.accumulators());
    }
  }

  result.ensemble = ParticleEnsemble{std::move(theta), net};
  result.accumulators = stepper.accumulators();
  result.ensemble.validate();
  return result;
}

}  // namespace steincast
