#include <cmath>
#include <random>

#include "doctest.h"

#include "steincast/conv_net.hpp"
#include "steincast/errors.hpp"
#include "steincast/mlp_net.hpp"

using namespace steincast;

namespace {

ArchConfig tiny_arch() {
  ArchConfig arch;
  arch.conv = {{3, 5, 2}, {2, 3, 1}};
  arch.encoder_dim = 5;
  arch.recon_dim = 4;
  arch.decoder_hidden = {6};
  arch.d = 2;
  arch.c = 4;
  arch.c_cal = 3;
  arch.l_in = 16;
  return arch;
}

Eigen::MatrixXd random_input(const Network& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd input(net.input_channels(), net.input_length());
  for (std::int64_t i = 0; i < input.size(); ++i) input.data()[i] = gauss(rng);
  return input;
}

Eigen::MatrixXd random_calendar(const Network& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd cal(net.horizon(), net.calendar_dim());
  for (std::int64_t i = 0; i < cal.size(); ++i) cal.data()[i] = gauss(rng);
  return cal;
}

// central finite differences of <f(theta), gout>
Eigen::VectorXd fd_gradient(const Network& net, const Eigen::VectorXd& theta,
                            const Eigen::MatrixXd& input, const Eigen::MatrixXd& cal,
                            const Eigen::VectorXd& gout, double step = 1e-5) {
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd probe = theta;
  for (std::int64_t i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + step;
    const double up = net.forward(probe, input, cal).dot(gout);
    probe[i] = theta[i] - step;
    const double down = net.forward(probe, input, cal).dot(gout);
    probe[i] = theta[i];
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double max_block_rel_error(const ParamLayout& layout, const Eigen::VectorXd& got,
                           const Eigen::VectorXd& expected) {
  double worst = 0.0;
  for (const auto& block : layout.blocks()) {
    const auto a = got.segment(block.offset, block.size());
    const auto b = expected.segment(block.offset, block.size());
    const double err = (a - b).norm() / (b.norm() + 1e-12);
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace

TEST_CASE("default architecture parameter count matches the closed form") {
  const ConvSeqNet net{ArchConfig{}};
  // conv: 16*33*7+16, 32*16*5+32, 32*32*3+32; lengths 144->69->33->16
  const std::int64_t conv = (16 * 33 * 7 + 16) + (32 * 16 * 5 + 32) + (32 * 32 * 3 + 32);
  const std::int64_t encoder = 64 * (32 * 16) + 64;
  const std::int64_t recon = 6 * (32 * 64 + 32);
  const std::int64_t decoder = (64 * (32 + 32) + 64) + (1 * 64 + 1);
  const std::int64_t noise_alpha = 6 + 1;
  CHECK(net.param_count() == conv + encoder + recon + decoder + noise_alpha);
  CHECK(net.param_count() == 58952);
  CHECK(net.layout().weight_count() == net.param_count() - 7);
}

TEST_CASE("init_particle is deterministic and seed-sensitive") {
  const ConvSeqNet net{tiny_arch()};
  const Eigen::VectorXd a = net.init_particle(42);
  const Eigen::VectorXd b = net.init_particle(42);
  const Eigen::VectorXd c = net.init_particle(43);
  CHECK((a.array() == b.array()).all());
  CHECK((a.array() != c.array()).any());
  // biases and noise/alpha blocks start at zero
  const auto& bias = net.layout().block("conv0.bias");
  CHECK(a.segment(bias.offset, bias.size()).norm() == 0.0);
  CHECK(a.tail(net.horizon() + 1).norm() == 0.0);
}

TEST_CASE("zero weights produce zero outputs") {
  const ConvSeqNet net{tiny_arch()};
  const Eigen::VectorXd theta = Eigen::VectorXd::Zero(net.param_count());
  const Eigen::VectorXd f = net.forward(theta, random_input(net, 1), random_calendar(net, 2));
  CHECK(f.norm() == 0.0);
}

TEST_CASE("forward is pure and workspace reuse is safe") {
  const ConvSeqNet net{tiny_arch()};
  const Eigen::VectorXd theta = net.init_particle(7);
  const Eigen::MatrixXd x1 = random_input(net, 1), x2 = random_input(net, 2);
  const Eigen::MatrixXd cal = random_calendar(net, 3);
  auto ws = net.make_workspace();
  const Eigen::VectorXd first = net.forward(theta, x1, cal, *ws);
  net.forward(theta, x2, cal, *ws);
  const Eigen::VectorXd again = net.forward(theta, x1, cal, *ws);
  CHECK((first.array() == again.array()).all());
}

TEST_CASE("perturbing calendar step k changes only output k") {
  const ConvSeqNet net{tiny_arch()};
  const Eigen::VectorXd theta = net.init_particle(9);
  const Eigen::MatrixXd input = random_input(net, 4);
  Eigen::MatrixXd cal = random_calendar(net, 5);
  const Eigen::VectorXd base = net.forward(theta, input, cal);
  for (int k = 0; k < net.horizon(); ++k) {
    Eigen::MatrixXd bumped = cal;
    bumped.row(k).array() += 0.75;
    const Eigen::VectorXd f = net.forward(theta, input, bumped);
    for (int j = 0; j < net.horizon(); ++j) {
      if (j == k) {
        CHECK(f[j] != base[j]);
      } else {
        CHECK(f[j] == base[j]);
      }
    }
  }
}

TEST_CASE("backward with zero output gradient is zero") {
  const ConvSeqNet net{tiny_arch()};
  const Eigen::VectorXd theta = net.init_particle(11);
  const Eigen::VectorXd grad = net.gradient(theta, random_input(net, 1), random_calendar(net, 2),
                                            Eigen::VectorXd::Zero(net.horizon()));
  CHECK(grad.norm() == 0.0);
}

TEST_CASE("conv net gradient matches central finite differences") {
  const ConvSeqNet net{tiny_arch()};
  const Eigen::VectorXd theta = net.init_particle(13);
  const Eigen::MatrixXd input = random_input(net, 6);
  const Eigen::MatrixXd cal = random_calendar(net, 7);
  Eigen::VectorXd gout(net.horizon());
  gout << 0.7, -1.3;

  const Eigen::VectorXd grad = net.gradient(theta, input, cal, gout);
  const Eigen::VectorXd fd = fd_gradient(net, theta, input, cal, gout);
  CHECK(max_block_rel_error(net.layout(), grad, fd) < 1e-5);
  // noise and alpha entries stay untouched
  CHECK(grad.tail(net.horizon() + 1).norm() == 0.0);
}

TEST_CASE("backward is linear in the output gradient") {
  const ConvSeqNet net{tiny_arch()};
  const Eigen::VectorXd theta = net.init_particle(17);
  const Eigen::MatrixXd input = random_input(net, 8);
  const Eigen::MatrixXd cal = random_calendar(net, 9);
  Eigen::VectorXd gout(net.horizon());
  gout << 0.4, 1.1;
  const Eigen::VectorXd g1 = net.gradient(theta, input, cal, gout);
  const Eigen::VectorXd g2 = net.gradient(theta, input, cal, (2.5 * gout).eval());
  CHECK((g2 - 2.5 * g1).norm() <= 1e-12 * g1.norm());
}

TEST_CASE("shape mismatches are contract errors") {
  const ConvSeqNet net{tiny_arch()};
  const Eigen::VectorXd theta = net.init_particle(1);
  const Eigen::MatrixXd bad_input = Eigen::MatrixXd::Zero(2, 5);
  const Eigen::MatrixXd cal = random_calendar(net, 2);
  CHECK_THROWS_AS(net.forward(theta, bad_input, cal), ContractError);
  CHECK_THROWS_AS(net.forward(Eigen::VectorXd::Zero(3), random_input(net, 1), cal),
                  ContractError);
}

TEST_CASE("mlp baseline gradient matches finite differences and ignores the calendar") {
  MlpConfig config;
  config.hidden = {7, 5};
  config.d = 2;
  config.c = 3;
  config.c_cal = 2;
  config.l_in = 9;
  const MlpNet net{config};
  const Eigen::VectorXd theta = net.init_particle(21);
  const Eigen::MatrixXd input = random_input(net, 3);
  const Eigen::MatrixXd cal = random_calendar(net, 4);
  Eigen::VectorXd gout(2);
  gout << -0.6, 0.9;

  const Eigen::VectorXd grad = net.gradient(theta, input, cal, gout);
  const Eigen::VectorXd fd = fd_gradient(net, theta, input, cal, gout);
  CHECK(max_block_rel_error(net.layout(), grad, fd) < 1e-5);

  const Eigen::VectorXd base = net.forward(theta, input, cal);
  const Eigen::VectorXd other = net.forward(theta, input, (cal.array() + 1.0).matrix());
  CHECK((base.array() == other.array()).all());
}
