#pragma once

#include <vector>

#include "steincast/dataset.hpp"
#include "steincast/network.hpp"

namespace steincast {

struct MlpConfig {
  std::vector<int> hidden{64, 64};
  int d = 6;
  int c = 1 + calendar::kDim;
  int c_cal = calendar::kDim;
  int l_in = 144;

  void validate() const;
};

// Fixed baseline: a plain MLP on the flattened channels x l_in input with ReLU
// hidden layers and a d-dimensional linear output. The prediction-hour
// calendar matrix is shape-checked but not consumed.
class MlpNet : public Network {
 public:
  explicit MlpNet(const MlpConfig& config);

  const MlpConfig& config() const { return config_; }

  std::unique_ptr<Workspace> make_workspace() const override;
  Eigen::VectorXd forward(ConstVecRef theta, const Eigen::MatrixXd& input,
                          const Eigen::MatrixXd& target_calendar,
                          Workspace& ws) const override;
  void backward(ConstVecRef theta, const Eigen::MatrixXd& input,
                const Eigen::MatrixXd& target_calendar, ConstVecRef output_grad,
                Workspace& ws, VecRef grad) const override;

  using Network::forward;

 private:
  MlpConfig config_;
  std::vector<int> dims_;  // flat input, hidden..., d
};

}  // namespace steincast
