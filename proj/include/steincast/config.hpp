#pragma once

#include <cstdint>
#include <string>

#include "steincast/conv_net.hpp"
#include "steincast/mlp_net.hpp"
#include "steincast/posterior.hpp"
#include "steincast/svgd.hpp"
#include "steincast/synth.hpp"

namespace steincast {

struct DataConfig {
  std::string kind = "synth";  // synth | csv
  std::string csv_path;        // defaults to <out_dir>/series.csv
  SynthConfig synth;
  int l_in = 144;
  int horizon = 6;
  int stride = 1;
};

struct EvalConfig {
  double level = 0.95;
  std::string out_dir = "out";
};

struct RunConfig {
  DataConfig data;
  ArchConfig arch;
  MlpConfig mlp;
  PriorConfig priors;
  SvgdConfig svgd;
  EvalConfig eval;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string model = "bnn";  // bnn | detnn | mlp

  std::string series_path() const;
  void validate() const;
};

// Sectioned key = value text ([data], [arch], [priors], [svgd], [eval], plus
// top-level seed/workers/model). Unknown keys raise ConfigError with the line.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace steincast
