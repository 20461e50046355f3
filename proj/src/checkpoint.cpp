#include "steincast/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "json.hpp"

#include "steincast/conv_net.hpp"
#include "steincast/errors.hpp"
#include "steincast/mlp_net.hpp"

namespace steincast {

namespace {

constexpr int kVersion = 1;

nlohmann::json arch_to_json(const ArchConfig& arch) {
  nlohmann::json j;
  for (const auto& spec : arch.conv) {
    j["conv"].push_back({spec.out_channels, spec.kernel, spec.stride});
  }
  if (arch.conv.empty()) j["conv"] = nlohmann::json::array();
  j["encoder_dim"] = arch.encoder_dim;
  j["recon_dim"] = arch.recon_dim;
  j["decoder_hidden"] = arch.decoder_hidden;
  j["d"] = arch.d;
  j["c"] = arch.c;
  j["c_cal"] = arch.c_cal;
  j["l_in"] = arch.l_in;
  return j;
}

ArchConfig arch_from_json(const nlohmann::json& j) {
  ArchConfig arch;
  arch.conv.clear();
  for (const auto& row : j.at("conv")) {
    arch.conv.push_back({row.at(0).get<int>(), row.at(1).get<int>(), row.at(2).get<int>()});
  }
  arch.encoder_dim = j.at("encoder_dim").get<int>();
  arch.recon_dim = j.at("recon_dim").get<int>();
  arch.decoder_hidden = j.at("decoder_hidden").get<std::vector<int>>();
  arch.d = j.at("d").get<int>();
  arch.c = j.at("c").get<int>();
  arch.c_cal = j.at("c_cal").get<int>();
  arch.l_in = j.at("l_in").get<int>();
  return arch;
}

nlohmann::json mlp_to_json(const MlpConfig& config) {
  nlohmann::json j;
  j["hidden"] = config.hidden;
  j["d"] = config.d;
  j["c"] = config.c;
  j["c_cal"] = config.c_cal;
  j["l_in"] = config.l_in;
  return j;
}

MlpConfig mlp_from_json(const nlohmann::json& j) {
  MlpConfig config;
  config.hidden = j.at("hidden").get<std::vector<int>>();
  config.d = j.at("d").get<int>();
  config.c = j.at("c").get<int>();
  config.c_cal = j.at("c_cal").get<int>();
  config.l_in = j.at("l_in").get<int>();
  return config;
}

void write_matrix_le(std::ofstream& out, const Eigen::MatrixXd& m) {
  // x86 doubles are already little-endian IEEE 754; columns are contiguous.
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

void read_matrix_le(std::ifstream& in, Eigen::MatrixXd& m) {
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
}

}  // namespace

void save_checkpoint(const std::string& base, const Checkpoint& checkpoint) {
  checkpoint.ensemble.validate();
  const Network& net = *checkpoint.ensemble.net;

  nlohmann::json j;
  j["version"] = kVersion;
  j["tag"] = checkpoint.tag;
  j["model"] = checkpoint.model_kind;
  if (checkpoint.model_kind == "conv") {
    const auto* conv = dynamic_cast<const ConvSeqNet*>(&net);
    if (!conv) throw ContractError("checkpoint kind 'conv' but the network is not ConvSeqNet");
    j["arch"] = arch_to_json(conv->arch());
  } else if (checkpoint.model_kind == "mlp") {
    const auto* mlp = dynamic_cast<const MlpNet*>(&net);
    if (!mlp) throw ContractError("checkpoint kind 'mlp' but the network is not MlpNet");
    j["arch"] = mlp_to_json(mlp->config());
  } else {
    throw ContractError("unknown checkpoint model kind '" + checkpoint.model_kind + "'");
  }
  j["particles"] = checkpoint.ensemble.n();
  j["param_count"] = net.param_count();
  for (const auto& block : net.layout().blocks()) {
    j["blocks"].push_back({{"name", block.name}, {"offset", block.offset}, {"shape", block.shape}});
  }
  j["transform"] = {{"kind", checkpoint.transform.kind == Transform::Kind::Identity
                                 ? "identity"
                                 : "log1p-zscore"},
                    {"mean", checkpoint.transform.mean},
                    {"std", checkpoint.transform.std}};
  j["data"] = {{"l_in", net.input_length()}, {"d", net.horizon()}, {"stride", checkpoint.stride}};
  const bool has_acc = checkpoint.accumulators.size() > 0;
  if (has_acc && (checkpoint.accumulators.rows() != net.param_count() ||
                  checkpoint.accumulators.cols() != checkpoint.ensemble.n())) {
    throw ContractError("accumulator shape does not match the ensemble");
  }
  j["has_accumulators"] = has_acc;

  std::ofstream sidecar(base + ".json");
  if (!sidecar) throw DataError("cannot write checkpoint sidecar '" + base + ".json'");
  sidecar << j.dump(2) << '\n';
  if (!sidecar) throw DataError("write failed for '" + base + ".json'");

  std::ofstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw DataError("cannot write checkpoint '" + base + ".bin'");
  write_matrix_le(bin, checkpoint.ensemble.theta);
  if (has_acc) write_matrix_le(bin, checkpoint.accumulators);
  if (!bin) throw DataError("write failed for '" + base + ".bin'");
}

Checkpoint load_checkpoint(const std::string& base) {
  std::ifstream sidecar(base + ".json");
  if (!sidecar) throw DataError("cannot open checkpoint sidecar '" + base + ".json'");
  nlohmann::json j;
  try {
    sidecar >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(base + ".json: invalid JSON: " + e.what());
  }

  Checkpoint checkpoint;
  std::shared_ptr<const Network> net;
  try {
    if (j.at("version").get<int>() != kVersion) {
      throw ContractError("unsupported checkpoint version");
    }
    checkpoint.tag = j.at("tag").get<std::string>();
    checkpoint.model_kind = j.at("model").get<std::string>();
    if (checkpoint.model_kind == "conv") {
      net = std::make_shared<ConvSeqNet>(arch_from_json(j.at("arch")));
    } else if (checkpoint.model_kind == "mlp") {
      net = std::make_shared<MlpNet>(mlp_from_json(j.at("arch")));
    } else {
      throw ContractError("unknown checkpoint model kind '" + checkpoint.model_kind + "'");
    }
    const auto kind = j.at("transform").at("kind").get<std::string>();
    checkpoint.transform.kind =
        kind == "identity" ? Transform::Kind::Identity : Transform::Kind::Log1pZscore;
    checkpoint.transform.mean = j.at("transform").at("mean").get<double>();
    checkpoint.transform.std = j.at("transform").at("std").get<double>();
    checkpoint.stride = j.at("data").at("stride").get<int>();

    // The stored layout must match the network rebuilt from the arch config.
    const auto& blocks = j.at("blocks");
    const auto& layout = net->layout();
    if (blocks.size() != layout.blocks().size()) {
      throw ContractError("checkpoint layout has " + std::to_string(blocks.size()) +
                          " blocks, network has " + std::to_string(layout.blocks().size()));
    }
    for (std::size_t i = 0; i < layout.blocks().size(); ++i) {
      const auto& stored = blocks[i];
      const auto& built = layout.blocks()[i];
      if (stored.at("name").get<std::string>() != built.name ||
          stored.at("offset").get<std::int64_t>() != built.offset ||
          stored.at("shape").get<std::vector<int>>() != built.shape) {
        throw ContractError("checkpoint block '" + stored.at("name").get<std::string>() +
                            "' does not match the architecture");
      }
    }
    if (j.at("param_count").get<std::int64_t>() != net->param_count()) {
      throw ContractError("checkpoint parameter count does not match the architecture");
    }

    const int n = j.at("particles").get<int>();
    if (n < 1) throw ContractError("checkpoint has no particles");
    const bool has_acc = j.at("has_accumulators").get<bool>();

    std::ifstream bin(base + ".bin", std::ios::binary);
    if (!bin) throw DataError("cannot open checkpoint '" + base + ".bin'");
    bin.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::int64_t>(bin.tellg());
    bin.seekg(0, std::ios::beg);
    const std::int64_t expected = static_cast<std::int64_t>(sizeof(double)) *
                                  net->param_count() * n * (has_acc ? 2 : 1);
    if (bytes != expected) {
      throw ContractError("checkpoint binary is " + std::to_string(bytes) + " bytes, expected " +
                          std::to_string(expected));
    }
    checkpoint.ensemble.net = net;
    checkpoint.ensemble.theta.resize(net->param_count(), n);
    read_matrix_le(bin, checkpoint.ensemble.theta);
    if (has_acc) {
      checkpoint.accumulators.resize(net->param_count(), n);
      read_matrix_le(bin, checkpoint.accumulators);
    }
    if (!bin) throw DataError("read failed for '" + base + ".bin'");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(base + ".json: checkpoint schema mismatch: " + e.what());
  }
  checkpoint.ensemble.validate();
  return checkpoint;
}

}  // namespace steincast
