#include "steincast/layout.hpp"

#include "steincast/errors.hpp"

namespace steincast {

std::int64_t ParamBlock::size() const {
  std::int64_t n = 1;
  for (int s : shape) n *= s;
  return n;
}

std::int64_t ParamLayout::append(std::string name, std::vector<int> shape) {
  for (int s : shape) {
    if (s < 1) throw ContractError("block '" + name + "' has nonpositive dimension");
  }
  for (const auto& b : blocks_) {
    if (b.name == name) throw ContractError("duplicate block '" + name + "'");
  }
  ParamBlock block;
  block.name = std::move(name);
  block.offset = total_;
  block.shape = std::move(shape);
  total_ += block.size();
  blocks_.push_back(std::move(block));
  return blocks_.back().offset;
}

void ParamLayout::finalize() {
  const ParamBlock& noise = block(kNoiseBlock);
  const ParamBlock& alpha = block(kAlphaBlock);
  if (alpha.size() != 1) throw ContractError("log_alpha block must be scalar");
  if (noise.offset + noise.size() != alpha.offset || alpha.offset + 1 != total_) {
    throw ContractError("noise/alpha blocks must terminate the layout");
  }
  noise_offset_ = noise.offset;
  noise_dim_ = static_cast<int>(noise.size());
  alpha_offset_ = alpha.offset;
}

const ParamBlock& ParamLayout::block(std::string_view name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return b;
  }
  throw ContractError("no parameter block named '" + std::string(name) + "'");
}

const std::string& ParamLayout::block_name_at(std::int64_t index) const {
  for (const auto& b : blocks_) {
    if (index >= b.offset && index < b.offset + b.size()) return b.name;
  }
  throw ContractError("parameter index " + std::to_string(index) + " out of range");
}

bool ParamLayout::operator==(const ParamLayout& other) const {
  if (total_ != other.total_ || blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& a = blocks_[i];
    const auto& b = other.blocks_[i];
    if (a.name != b.name || a.offset != b.offset || a.shape != b.shape) return false;
  }
  return true;
}

}  // namespace steincast
