#include "steincast/network.hpp"

#include <cmath>
#include <random>
#include <string>

#include "steincast/errors.hpp"

namespace steincast {

namespace {

bool is_weight_block(const ParamBlock& block) {
  return block.name.size() > 7 &&
         block.name.compare(block.name.size() - 7, 7, ".weight") == 0;
}

}  // namespace

Eigen::VectorXd Network::init_particle(std::uint64_t seed) const {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(layout_.total());
  std::mt19937_64 rng(seed);
  for (const auto& block : layout_.blocks()) {
    if (!is_weight_block(block)) continue;  // biases and noise/alpha stay zero
    const std::int64_t fan_in = block.size() / block.shape.front();
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    for (std::int64_t i = 0; i < block.size(); ++i) {
      theta[block.offset + i] = uniform(rng);
    }
  }
  return theta;
}

Eigen::VectorXd Network::forward(ConstVecRef theta, const Eigen::MatrixXd& input,
                                 const Eigen::MatrixXd& target_calendar) const {
  auto ws = make_workspace();
  return forward(theta, input, target_calendar, *ws);
}

Eigen::VectorXd Network::gradient(ConstVecRef theta, const Eigen::MatrixXd& input,
                                  const Eigen::MatrixXd& target_calendar,
                                  ConstVecRef output_grad) const {
  auto ws = make_workspace();
  forward(theta, input, target_calendar, *ws);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout_.total());
  backward(theta, input, target_calendar, output_grad, *ws, grad);
  return grad;
}

void Network::check_theta(ConstVecRef theta) const {
  if (theta.size() != layout_.total()) {
    throw ContractError("theta has " + std::to_string(theta.size()) + " entries, layout needs " +
                        std::to_string(layout_.total()));
  }
}

void Network::check_shapes(const Eigen::MatrixXd& input, const Eigen::MatrixXd& cal) const {
  if (input.rows() != c_ || input.cols() != l_in_) {
    throw ContractError("input must be " + std::to_string(c_) + "x" + std::to_string(l_in_) +
                        ", got " + std::to_string(input.rows()) + "x" +
                        std::to_string(input.cols()));
  }
  if (cal.rows() != d_ || cal.cols() != c_cal_) {
    throw ContractError("target calendar must be " + std::to_string(d_) + "x" +
                        std::to_string(c_cal_) + ", got " + std::to_string(cal.rows()) + "x" +
                        std::to_string(cal.cols()));
  }
}

ParticleState ParticleEnsemble::particle(int i) const {
  if (i < 0 || i >= n()) throw ContractError("particle index out of range");
  return ParticleState{theta.col(i), net};
}

void ParticleEnsemble::validate() const {
  if (!net) throw ContractError("ensemble has no network");
  if (theta.rows() != net->param_count()) {
    throw ContractError("ensemble parameter rows do not match the network layout");
  }
  if (theta.cols() < 1) throw ContractError("ensemble needs at least one particle");
  if (!theta.allFinite()) throw NumericError("ensemble contains non-finite entries");
}

}  // namespace steincast
