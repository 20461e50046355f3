#include "steincast/mlp_net.hpp"

#include <string>

#include "steincast/errors.hpp"

namespace steincast {

void MlpConfig::validate() const {
  if (d < 1 || c < 2 || c_cal < 1 || l_in < 1) {
    throw ConfigError("mlp dimensions must be positive");
  }
  if (c != c_cal + 1) throw ConfigError("c must equal c_cal + 1");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden sizes must be positive");
  }
}

namespace {

struct MlpWorkspace final : Workspace {
  Eigen::VectorXd flat;
  std::vector<Eigen::VectorXd> pre;   // per hidden layer
  std::vector<Eigen::VectorXd> post;
  Eigen::VectorXd out;
  std::vector<Eigen::VectorXd> d_in;  // gradient wrt each layer input
  Eigen::VectorXd d_pre;
};

}  // namespace

MlpNet::MlpNet(const MlpConfig& config) : config_(config) {
  config_.validate();
  c_ = config_.c;
  c_cal_ = config_.c_cal;
  l_in_ = config_.l_in;
  d_ = config_.d;

  dims_.push_back(config_.c * config_.l_in);
  for (int h : config_.hidden) dims_.push_back(h);
  dims_.push_back(config_.d);
  for (std::size_t j = 0; j + 1 < dims_.size(); ++j) {
    layout_.append("fc" + std::to_string(j) + ".weight", {dims_[j + 1], dims_[j]});
    layout_.append("fc" + std::to_string(j) + ".bias", {dims_[j + 1]});
  }
  layout_.append(ParamLayout::kNoiseBlock, {config_.d});
  layout_.append(ParamLayout::kAlphaBlock, {1});
  layout_.finalize();
}

std::unique_ptr<Workspace> MlpNet::make_workspace() const {
  auto ws = std::make_unique<MlpWorkspace>();
  ws->flat.resize(dims_.front());
  for (std::size_t j = 1; j + 1 < dims_.size(); ++j) {
    ws->pre.emplace_back(dims_[j]);
    ws->post.emplace_back(dims_[j]);
  }
  ws->out.resize(config_.d);
  for (std::size_t j = 0; j + 1 < dims_.size(); ++j) ws->d_in.emplace_back(dims_[j]);
  return ws;
}

Eigen::VectorXd MlpNet::forward(ConstVecRef theta, const Eigen::MatrixXd& input,
                                const Eigen::MatrixXd& target_calendar,
                                Workspace& workspace) const {
  check_theta(theta);
  check_shapes(input, target_calendar);
  auto* ws = dynamic_cast<MlpWorkspace*>(&workspace);
  if (!ws) throw ContractError("workspace does not belong to this network");
  const double* p = theta.data();

  ws->flat = Eigen::Map<const Eigen::VectorXd>(input.data(), input.size());
  const Eigen::VectorXd* act = &ws->flat;
  const std::size_t n_layers = dims_.size() - 1;
  for (std::size_t j = 0; j < n_layers; ++j) {
    const auto& wb = layout_.block("fc" + std::to_string(j) + ".weight");
    const auto& bb = layout_.block("fc" + std::to_string(j) + ".bias");
    Eigen::Map<const Eigen::MatrixXd> w(p + wb.offset, dims_[j + 1], dims_[j]);
    Eigen::Map<const Eigen::VectorXd> b(p + bb.offset, dims_[j + 1]);
    if (j + 1 < n_layers) {
      ws->pre[j].noalias() = w * (*act);
      ws->pre[j] += b;
      ws->post[j] = ws->pre[j].cwiseMax(0.0);
      act = &ws->post[j];
    } else {
      ws->out.noalias() = w * (*act);
      ws->out += b;
    }
  }
  return ws->out;
}

void MlpNet::backward(ConstVecRef theta, const Eigen::MatrixXd& input,
                      const Eigen::MatrixXd& target_calendar, ConstVecRef output_grad,
                      Workspace& workspace, VecRef grad) const {
  check_theta(theta);
  check_shapes(input, target_calendar);
  if (output_grad.size() != config_.d) throw ContractError("output_grad must have length d");
  if (grad.size() != layout_.total()) throw ContractError("grad must span the full layout");
  auto* ws = dynamic_cast<MlpWorkspace*>(&workspace);
  if (!ws) throw ContractError("workspace does not belong to this network");
  const double* p = theta.data();
  double* g = grad.data();

  const std::size_t n_layers = dims_.size() - 1;
  Eigen::VectorXd d_up = output_grad;
  for (std::size_t jj = n_layers; jj-- > 0;) {
    const auto& wb = layout_.block("fc" + std::to_string(jj) + ".weight");
    const auto& bb = layout_.block("fc" + std::to_string(jj) + ".bias");
    Eigen::Map<const Eigen::MatrixXd> w(p + wb.offset, dims_[jj + 1], dims_[jj]);
    Eigen::Map<Eigen::MatrixXd> dw(g + wb.offset, dims_[jj + 1], dims_[jj]);
    Eigen::Map<Eigen::VectorXd> db(g + bb.offset, dims_[jj + 1]);
    const Eigen::VectorXd& layer_in = jj == 0 ? ws->flat : ws->post[jj - 1];
    dw.noalias() += d_up * layer_in.transpose();
    db.noalias() += d_up;
    if (jj > 0) {
      ws->d_in[jj].noalias() = w.transpose() * d_up;
      d_up.resize(dims_[jj]);
      d_up.array() = ws->d_in[jj].array() * (ws->pre[jj - 1].array() > 0.0).cast<double>();
    }
  }
}

}  // namespace steincast
