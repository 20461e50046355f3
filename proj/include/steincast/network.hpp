#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Dense>

#include "steincast/layout.hpp"

namespace steincast {

using VecRef = Eigen::Ref<Eigen::VectorXd>;
using ConstVecRef = const Eigen::Ref<const Eigen::VectorXd>&;

// Scratch activations, reused across forward/backward calls on one thread.
class Workspace {
 public:
  virtual ~Workspace() = default;
};

// Deterministic network f_w: (channels x l_in input, d x c_cal prediction-hour
// calendar) -> d-vector. Parameters live in one flat vector whose trailing
// blocks are the log noise precisions and log alpha (untouched here).
class Network {
 public:
  virtual ~Network() = default;

  const ParamLayout& layout() const { return layout_; }
  std::int64_t param_count() const { return layout_.total(); }
  int input_channels() const { return c_; }
  int input_length() const { return l_in_; }
  int calendar_dim() const { return c_cal_; }
  int horizon() const { return d_; }

  virtual std::unique_ptr<Workspace> make_workspace() const = 0;

  // Caches activations in ws for a subsequent backward() with the same theta/input.
  virtual Eigen::VectorXd forward(ConstVecRef theta, const Eigen::MatrixXd& input,
                                  const Eigen::MatrixXd& target_calendar,
                                  Workspace& ws) const = 0;

  // Accumulates d<f, output_grad>/d(theta) into grad; weight blocks only, the
  // noise and alpha entries are left untouched.
  virtual void backward(ConstVecRef theta, const Eigen::MatrixXd& input,
                        const Eigen::MatrixXd& target_calendar, ConstVecRef output_grad,
                        Workspace& ws, VecRef grad) const = 0;

  // Scaled-uniform fan-in weights, zero biases, zero noise/alpha blocks.
  // Deterministic in seed.
  Eigen::VectorXd init_particle(std::uint64_t seed) const;

  Eigen::VectorXd forward(ConstVecRef theta, const Eigen::MatrixXd& input,
                          const Eigen::MatrixXd& target_calendar) const;
  // The full gradient vector (zeros in non-weight blocks).
  Eigen::VectorXd gradient(ConstVecRef theta, const Eigen::MatrixXd& input,
                           const Eigen::MatrixXd& target_calendar,
                           ConstVecRef output_grad) const;

 protected:
  void check_theta(ConstVecRef theta) const;
  void check_shapes(const Eigen::MatrixXd& input, const Eigen::MatrixXd& cal) const;

  ParamLayout layout_;
  int c_ = 0;
  int c_cal_ = 0;
  int l_in_ = 0;
  int d_ = 0;
};

struct ParticleState {
  Eigen::VectorXd theta;
  std::shared_ptr<const Network> net;
};

// n particles of identical layout, one per column.
struct ParticleEnsemble {
  Eigen::MatrixXd theta;  // param_count x n
  std::shared_ptr<const Network> net;

  int n() const { return static_cast<int>(theta.cols()); }
  ParticleState particle(int i) const;
  void validate() const;
};

}  // namespace steincast
