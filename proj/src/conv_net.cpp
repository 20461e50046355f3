#include "steincast/conv_net.hpp"

#include <string>

#include "steincast/errors.hpp"

namespace steincast {

void ArchConfig::validate() const {
  if (encoder_dim < 1 || recon_dim < 1 || d < 1 || c < 2 || c_cal < 1 || l_in < 1) {
    throw ConfigError("architecture dimensions must be positive (c needs the demand channel)");
  }
  if (c != c_cal + 1) throw ConfigError("c must equal c_cal + 1");
  for (const auto& spec : conv) {
    if (spec.out_channels < 1 || spec.kernel < 1 || spec.stride < 1) {
      throw ConfigError("conv specs must have positive channels/kernel/stride");
    }
  }
  for (int h : decoder_hidden) {
    if (h < 1) throw ConfigError("decoder hidden sizes must be positive");
  }
  conv_lengths();  // throws when a layer shrinks below one step
}

std::vector<int> ArchConfig::conv_lengths() const {
  std::vector<int> lengths;
  int len = l_in;
  for (const auto& spec : conv) {
    if (len < spec.kernel) {
      throw ConfigError("conv kernel " + std::to_string(spec.kernel) +
                        " exceeds sequence length " + std::to_string(len));
    }
    len = (len - spec.kernel) / spec.stride + 1;
    lengths.push_back(len);
  }
  return lengths;
}

int ArchConfig::flat_dim() const {
  const auto lengths = conv_lengths();
  if (conv.empty()) return c * l_in;
  return conv.back().out_channels * lengths.back();
}

namespace {

struct ConvWorkspace final : Workspace {
  // per conv layer
  std::vector<Eigen::MatrixXd> unfold;  // (in*k) x l_out
  std::vector<Eigen::MatrixXd> pre;     // out x l_out
  std::vector<Eigen::MatrixXd> post;    // relu(pre)
  // encoder / reconstructors
  Eigen::VectorXd flat, enc_pre, enc;
  Eigen::MatrixXd recon;  // recon_dim x d
  // decoder, batched over the d steps
  Eigen::MatrixXd z0;                    // (recon_dim + c_cal) x d
  std::vector<Eigen::MatrixXd> dec_pre;  // hidden x d per layer
  std::vector<Eigen::MatrixXd> dec_post;
  Eigen::MatrixXd dec_out;  // 1 x d
  // backward scratch
  std::vector<Eigen::MatrixXd> d_post;  // conv grads, same shapes as post
  std::vector<Eigen::MatrixXd> d_pre;
  Eigen::MatrixXd d_unfold;
  Eigen::VectorXd d_flat, d_enc, d_enc_pre;
  Eigen::MatrixXd d_recon, d_z0;
  std::vector<Eigen::MatrixXd> d_dec;  // gradient wrt dec layer inputs
};

inline void relu_mask_product(const Eigen::MatrixXd& pre, const Eigen::MatrixXd& upstream,
                              Eigen::MatrixXd& out) {
  out.array() = upstream.array() * (pre.array() > 0.0).cast<double>();
}

}  // namespace

ConvSeqNet::ConvSeqNet(const ArchConfig& arch) : arch_(arch) {
  arch_.validate();
  lengths_ = arch_.conv_lengths();
  c_ = arch_.c;
  c_cal_ = arch_.c_cal;
  l_in_ = arch_.l_in;
  d_ = arch_.d;

  int in_ch = arch_.c;
  for (std::size_t i = 0; i < arch_.conv.size(); ++i) {
    const auto& spec = arch_.conv[i];
    layout_.append("conv" + std::to_string(i) + ".weight", {spec.out_channels, in_ch, spec.kernel});
    layout_.append("conv" + std::to_string(i) + ".bias", {spec.out_channels});
    in_ch = spec.out_channels;
  }
  layout_.append("encoder.weight", {arch_.encoder_dim, arch_.flat_dim()});
  layout_.append("encoder.bias", {arch_.encoder_dim});
  for (int k = 0; k < arch_.d; ++k) {
    layout_.append("recon" + std::to_string(k) + ".weight", {arch_.recon_dim, arch_.encoder_dim});
    layout_.append("recon" + std::to_string(k) + ".bias", {arch_.recon_dim});
  }
  decoder_dims_.push_back(arch_.recon_dim + arch_.c_cal);
  for (int h : arch_.decoder_hidden) decoder_dims_.push_back(h);
  decoder_dims_.push_back(1);
  for (std::size_t j = 0; j + 1 < decoder_dims_.size(); ++j) {
    layout_.append("decoder" + std::to_string(j) + ".weight",
                   {decoder_dims_[j + 1], decoder_dims_[j]});
    layout_.append("decoder" + std::to_string(j) + ".bias", {decoder_dims_[j + 1]});
  }
  layout_.append(ParamLayout::kNoiseBlock, {arch_.d});
  layout_.append(ParamLayout::kAlphaBlock, {1});
  layout_.finalize();
}

std::unique_ptr<Workspace> ConvSeqNet::make_workspace() const {
  auto ws = std::make_unique<ConvWorkspace>();
  int in_ch = arch_.c;
  for (std::size_t i = 0; i < arch_.conv.size(); ++i) {
    const auto& spec = arch_.conv[i];
    const int l_out = lengths_[i];
    ws->unfold.emplace_back(in_ch * spec.kernel, l_out);
    ws->pre.emplace_back(spec.out_channels, l_out);
    ws->post.emplace_back(spec.out_channels, l_out);
    ws->d_pre.emplace_back(spec.out_channels, l_out);
    ws->d_post.emplace_back(spec.out_channels, l_out);
    in_ch = spec.out_channels;
  }
  ws->flat.resize(arch_.flat_dim());
  ws->enc_pre.resize(arch_.encoder_dim);
  ws->enc.resize(arch_.encoder_dim);
  ws->recon.resize(arch_.recon_dim, arch_.d);
  ws->z0.resize(decoder_dims_.front(), arch_.d);
  for (std::size_t j = 1; j + 1 < decoder_dims_.size(); ++j) {
    ws->dec_pre.emplace_back(decoder_dims_[j], arch_.d);
    ws->dec_post.emplace_back(decoder_dims_[j], arch_.d);
  }
  ws->dec_out.resize(1, arch_.d);
  ws->d_flat.resize(arch_.flat_dim());
  ws->d_enc.resize(arch_.encoder_dim);
  ws->d_enc_pre.resize(arch_.encoder_dim);
  ws->d_recon.resize(arch_.recon_dim, arch_.d);
  ws->d_z0.resize(decoder_dims_.front(), arch_.d);
  for (std::size_t j = 0; j + 1 < decoder_dims_.size(); ++j) {
    ws->d_dec.emplace_back(decoder_dims_[j], arch_.d);
  }
  return ws;
}

Eigen::VectorXd ConvSeqNet::forward(ConstVecRef theta, const Eigen::MatrixXd& input,
                                    const Eigen::MatrixXd& target_calendar,
                                    Workspace& workspace) const {
  check_theta(theta);
  check_shapes(input, target_calendar);
  auto* ws = dynamic_cast<ConvWorkspace*>(&workspace);
  if (!ws) throw ContractError("workspace does not belong to this network");
  const double* p = theta.data();

  const Eigen::MatrixXd* src = &input;
  for (std::size_t i = 0; i < arch_.conv.size(); ++i) {
    const auto& spec = arch_.conv[i];
    const int in_ch = static_cast<int>(src->rows());
    const int l_out = lengths_[i];
    Eigen::MatrixXd& unfold = ws->unfold[i];
    for (int t = 0; t < l_out; ++t) {
      for (int kk = 0; kk < spec.kernel; ++kk) {
        unfold.col(t).segment(static_cast<std::int64_t>(kk) * in_ch, in_ch) =
            src->col(t * spec.stride + kk);
      }
    }
    const auto& wblock = layout_.blocks()[2 * i];
    Eigen::Map<const Eigen::MatrixXd> weight(p + wblock.offset, spec.out_channels,
                                             in_ch * spec.kernel);
    Eigen::Map<const Eigen::VectorXd> bias(p + layout_.blocks()[2 * i + 1].offset,
                                           spec.out_channels);
    ws->pre[i].noalias() = weight * unfold;
    ws->pre[i].colwise() += bias;
    ws->post[i] = ws->pre[i].cwiseMax(0.0);
    src = &ws->post[i];
  }

  ws->flat = Eigen::Map<const Eigen::VectorXd>(src->data(), src->size());

  {
    const auto& wb = layout_.block("encoder.weight");
    Eigen::Map<const Eigen::MatrixXd> we(p + wb.offset, arch_.encoder_dim, arch_.flat_dim());
    Eigen::Map<const Eigen::VectorXd> be(p + layout_.block("encoder.bias").offset,
                                         arch_.encoder_dim);
    ws->enc_pre.noalias() = we * ws->flat;
    ws->enc_pre += be;
    ws->enc = ws->enc_pre.cwiseMax(0.0);
  }

  for (int k = 0; k < arch_.d; ++k) {
    const auto& wb = layout_.block("recon" + std::to_string(k) + ".weight");
    const auto& bb = layout_.block("recon" + std::to_string(k) + ".bias");
    Eigen::Map<const Eigen::MatrixXd> rw(p + wb.offset, arch_.recon_dim, arch_.encoder_dim);
    Eigen::Map<const Eigen::VectorXd> rb(p + bb.offset, arch_.recon_dim);
    ws->recon.col(k).noalias() = rw * ws->enc;
    ws->recon.col(k) += rb;
  }

  ws->z0.topRows(arch_.recon_dim) = ws->recon;
  ws->z0.bottomRows(arch_.c_cal) = target_calendar.transpose();

  const Eigen::MatrixXd* act = &ws->z0;
  const std::size_t n_layers = decoder_dims_.size() - 1;
  for (std::size_t j = 0; j < n_layers; ++j) {
    const auto& wb = layout_.block("decoder" + std::to_string(j) + ".weight");
    const auto& bb = layout_.block("decoder" + std::to_string(j) + ".bias");
    Eigen::Map<const Eigen::MatrixXd> w(p + wb.offset, decoder_dims_[j + 1], decoder_dims_[j]);
    Eigen::Map<const Eigen::VectorXd> b(p + bb.offset, decoder_dims_[j + 1]);
    if (j + 1 < n_layers) {
      ws->dec_pre[j].noalias() = w * (*act);
      ws->dec_pre[j].colwise() += b;
      ws->dec_post[j] = ws->dec_pre[j].cwiseMax(0.0);
      act = &ws->dec_post[j];
    } else {
      ws->dec_out.noalias() = w * (*act);
      ws->dec_out.colwise() += b;
    }
  }
  return ws->dec_out.transpose();
}

void ConvSeqNet::backward(ConstVecRef theta, const Eigen::MatrixXd& input,
                          const Eigen::MatrixXd& target_calendar, ConstVecRef output_grad,
                          Workspace& workspace, VecRef grad) const {
  check_theta(theta);
  check_shapes(input, target_calendar);
  if (output_grad.size() != arch_.d) throw ContractError("output_grad must have length d");
  if (grad.size() != layout_.total()) throw ContractError("grad must span the full layout");
  auto* ws = dynamic_cast<ConvWorkspace*>(&workspace);
  if (!ws) throw ContractError("workspace does not belong to this network");
  const double* p = theta.data();
  double* g = grad.data();

  // decoder, reversed
  const std::size_t n_layers = decoder_dims_.size() - 1;
  Eigen::MatrixXd d_up = output_grad.transpose();  // 1 x d
  for (std::size_t jj = n_layers; jj-- > 0;) {
    const auto& wb = layout_.block("decoder" + std::to_string(jj) + ".weight");
    const auto& bb = layout_.block("decoder" + std::to_string(jj) + ".bias");
    Eigen::Map<const Eigen::MatrixXd> w(p + wb.offset, decoder_dims_[jj + 1], decoder_dims_[jj]);
    Eigen::Map<Eigen::MatrixXd> dw(g + wb.offset, decoder_dims_[jj + 1], decoder_dims_[jj]);
    Eigen::Map<Eigen::VectorXd> db(g + bb.offset, decoder_dims_[jj + 1]);
    const Eigen::MatrixXd& layer_in = jj == 0 ? ws->z0 : ws->dec_post[jj - 1];
    // d_up is already the pre-activation gradient of layer jj
    dw.noalias() += d_up * layer_in.transpose();
    db.noalias() += d_up.rowwise().sum();
    ws->d_dec[jj].noalias() = w.transpose() * d_up;
    if (jj > 0) {
      d_up.resize(decoder_dims_[jj], arch_.d);
      relu_mask_product(ws->dec_pre[jj - 1], ws->d_dec[jj], d_up);
    }
  }
  ws->d_z0 = ws->d_dec[0];
  ws->d_recon = ws->d_z0.topRows(arch_.recon_dim);

  // reconstructors
  ws->d_enc.setZero();
  for (int k = 0; k < arch_.d; ++k) {
    const auto& wb = layout_.block("recon" + std::to_string(k) + ".weight");
    const auto& bb = layout_.block("recon" + std::to_string(k) + ".bias");
    Eigen::Map<const Eigen::MatrixXd> rw(p + wb.offset, arch_.recon_dim, arch_.encoder_dim);
    Eigen::Map<Eigen::MatrixXd> drw(g + wb.offset, arch_.recon_dim, arch_.encoder_dim);
    Eigen::Map<Eigen::VectorXd> drb(g + bb.offset, arch_.recon_dim);
    drw.noalias() += ws->d_recon.col(k) * ws->enc.transpose();
    drb.noalias() += ws->d_recon.col(k);
    ws->d_enc.noalias() += rw.transpose() * ws->d_recon.col(k);
  }

  // encoder
  {
    ws->d_enc_pre.array() = ws->d_enc.array() * (ws->enc_pre.array() > 0.0).cast<double>();
    const auto& wb = layout_.block("encoder.weight");
    const auto& bb = layout_.block("encoder.bias");
    Eigen::Map<const Eigen::MatrixXd> we(p + wb.offset, arch_.encoder_dim, arch_.flat_dim());
    Eigen::Map<Eigen::MatrixXd> dwe(g + wb.offset, arch_.encoder_dim, arch_.flat_dim());
    Eigen::Map<Eigen::VectorXd> dbe(g + bb.offset, arch_.encoder_dim);
    dwe.noalias() += ws->d_enc_pre * ws->flat.transpose();
    dbe.noalias() += ws->d_enc_pre;
    ws->d_flat.noalias() = we.transpose() * ws->d_enc_pre;
  }

  // conv stack, reversed
  if (!arch_.conv.empty()) {
    const std::size_t last = arch_.conv.size() - 1;
    ws->d_post[last] = Eigen::Map<const Eigen::MatrixXd>(
        ws->d_flat.data(), arch_.conv[last].out_channels, lengths_[last]);
    for (std::size_t ii = arch_.conv.size(); ii-- > 0;) {
      const auto& spec = arch_.conv[ii];
      const int in_ch = ii == 0 ? arch_.c : arch_.conv[ii - 1].out_channels;
      const int l_out = lengths_[ii];
      relu_mask_product(ws->pre[ii], ws->d_post[ii], ws->d_pre[ii]);
      const auto& wblock = layout_.blocks()[2 * ii];
      const auto& bblock = layout_.blocks()[2 * ii + 1];
      Eigen::Map<const Eigen::MatrixXd> weight(p + wblock.offset, spec.out_channels,
                                               in_ch * spec.kernel);
      Eigen::Map<Eigen::MatrixXd> dweight(g + wblock.offset, spec.out_channels,
                                          in_ch * spec.kernel);
      Eigen::Map<Eigen::VectorXd> dbias(g + bblock.offset, spec.out_channels);
      dweight.noalias() += ws->d_pre[ii] * ws->unfold[ii].transpose();
      dbias.noalias() += ws->d_pre[ii].rowwise().sum();
      if (ii > 0) {
        ws->d_unfold.resize(in_ch * spec.kernel, l_out);
        ws->d_unfold.noalias() = weight.transpose() * ws->d_pre[ii];
        ws->d_post[ii - 1].setZero();
        for (int t = 0; t < l_out; ++t) {
          for (int kk = 0; kk < spec.kernel; ++kk) {
            ws->d_post[ii - 1].col(t * spec.stride + kk) +=
                ws->d_unfold.col(t).segment(static_cast<std::int64_t>(kk) * in_ch, in_ch);
          }
        }
      }
    }
  }
}

}  // namespace steincast
