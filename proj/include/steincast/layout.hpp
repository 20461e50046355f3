#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace steincast {

struct ParamBlock {
  std::string name;
  std::int64_t offset = 0;
  std::vector<int> shape;

  std::int64_t size() const;
};

// Ordered, disjoint parameter blocks tiling [0, total). Weight blocks come
// first, then "log_noise_precision" (length d) and "log_alpha" (length 1).
class ParamLayout {
 public:
  std::int64_t append(std::string name, std::vector<int> shape);
  void finalize();  // resolves noise/alpha offsets; ContractError if missing

  std::int64_t total() const { return total_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  const ParamBlock& block(std::string_view name) const;
  const std::string& block_name_at(std::int64_t index) const;

  std::int64_t weight_count() const { return noise_offset_; }
  std::int64_t noise_offset() const { return noise_offset_; }
  int noise_dim() const { return noise_dim_; }
  std::int64_t alpha_offset() const { return alpha_offset_; }

  bool operator==(const ParamLayout& other) const;

  static constexpr const char* kNoiseBlock = "log_noise_precision";
  static constexpr const char* kAlphaBlock = "log_alpha";

 private:
  std::vector<ParamBlock> blocks_;
  std::int64_t total_ = 0;
  std::int64_t noise_offset_ = -1;
  int noise_dim_ = 0;
  std::int64_t alpha_offset_ = -1;
};

}  // namespace steincast
