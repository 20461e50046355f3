#pragma once

#include <vector>

#include "steincast/dataset.hpp"
#include "steincast/network.hpp"

namespace steincast {

struct ConvSpec {
  int out_channels = 0;
  int kernel = 0;
  int stride = 1;
};

struct ArchConfig {
  std::vector<ConvSpec> conv{{16, 7, 2}, {32, 5, 2}, {32, 3, 2}};
  int encoder_dim = 64;  // F
  int recon_dim = 32;    // F'
  std::vector<int> decoder_hidden{64};
  int d = 6;
  int c = 1 + calendar::kDim;
  int c_cal = calendar::kDim;
  int l_in = 144;

  void validate() const;  // ConfigError
  std::vector<int> conv_lengths() const;  // sequence lengths after each conv
  int flat_dim() const;                   // channels x length after the conv stack
};

// The cyclical forecaster: 1-D conv stack over the channel x time input
// (valid padding, ReLU), flatten, linear encoder to F, d parallel linear
// reconstructors F -> F', and a shared per-step MLP decoder applied to
// [reconstructed feature ; prediction-hour calendar vector].
class ConvSeqNet : public Network {
 public:
  explicit ConvSeqNet(const ArchConfig& arch);

  const ArchConfig& arch() const { return arch_; }

  std::unique_ptr<Workspace> make_workspace() const override;
  Eigen::VectorXd forward(ConstVecRef theta, const Eigen::MatrixXd& input,
                          const Eigen::MatrixXd& target_calendar,
                          Workspace& ws) const override;
  void backward(ConstVecRef theta, const Eigen::MatrixXd& input,
                const Eigen::MatrixXd& target_calendar, ConstVecRef output_grad,
                Workspace& ws, VecRef grad) const override;

  using Network::forward;

 private:
  ArchConfig arch_;
  std::vector<int> lengths_;       // conv output lengths
  std::vector<int> decoder_dims_;  // layer widths incl. input and scalar output
};

}  // namespace steincast
