#include "steincast/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "steincast/errors.hpp"

namespace steincast {

std::string RunConfig::series_path() const {
  return data.csv_path.empty() ? eval.out_dir + "/series.csv" : data.csv_path;
}

void RunConfig::validate() const {
  if (data.kind != "synth" && data.kind != "csv") {
    throw ConfigError("data kind must be 'synth' or 'csv'");
  }
  if (data.kind == "synth") data.synth.validate();
  if (data.l_in < 1 || data.horizon < 1 || data.stride < 1) {
    throw ConfigError("l_in, horizon, stride must be positive");
  }
  ArchConfig a = arch;
  a.d = data.horizon;
  a.l_in = data.l_in;
  a.validate();
  MlpConfig m = mlp;
  m.d = data.horizon;
  m.l_in = data.l_in;
  m.validate();
  priors.validate();
  svgd.validate();
  if (!(eval.level > 0.0 && eval.level < 1.0)) {
    throw ConfigError("credible level must be in (0, 1)");
  }
  if (model != "bnn" && model != "detnn" && model != "mlp") {
    throw ConfigError("model must be bnn, detnn, or mlp");
  }
  if (workers < 0) throw ConfigError("workers must be nonnegative");
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad(std::size_t line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

double to_double(const std::string& v, std::size_t line) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') bad(line, "expected a number, got '" + v + "'");
  return x;
}

std::int64_t to_int(const std::string& v, std::size_t line) {
  std::int64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    bad(line, "expected an integer, got '" + v + "'");
  }
  return x;
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(trim(part));
  return parts;
}

std::vector<ConvSpec> parse_conv(const std::string& v, std::size_t line) {
  std::vector<ConvSpec> specs;
  if (trim(v) == "none") return specs;
  for (const auto& part : split(v, ',')) {
    const auto dims = split(part, 'x');
    if (dims.size() != 3) bad(line, "conv spec must be OUTxKERNELxSTRIDE, got '" + part + "'");
    specs.push_back({static_cast<int>(to_int(dims[0], line)),
                     static_cast<int>(to_int(dims[1], line)),
                     static_cast<int>(to_int(dims[2], line))});
  }
  return specs;
}

std::vector<int> parse_int_list(const std::string& v, std::size_t line) {
  std::vector<int> values;
  if (trim(v) == "none") return values;
  for (const auto& part : split(v, ',')) {
    values.push_back(static_cast<int>(to_int(part, line)));
  }
  return values;
}

std::vector<HolidaySpec> parse_holidays(const std::string& v, double default_multiplier,
                                        std::size_t line) {
  std::vector<HolidaySpec> holidays;
  if (trim(v).empty() || trim(v) == "none") return holidays;
  for (const auto& part : split(v, ',')) {
    HolidaySpec spec;
    spec.multiplier = default_multiplier;
    std::string date = part;
    const auto colon = part.find(':');
    if (colon != std::string::npos) {
      date = trim(part.substr(0, colon));
      spec.multiplier = to_double(trim(part.substr(colon + 1)), line);
    }
    try {
      spec.day = parse_date(date);
    } catch (const DataError& e) {
      bad(line, e.what());
    }
    holidays.push_back(spec);
  }
  return holidays;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig config;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  double holiday_multiplier = 0.5;
  std::string holidays_value;
  std::size_t holidays_line = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = trim(line.substr(0, comment));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') bad(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "data" && section != "arch" && section != "priors" &&
          section != "svgd" && section != "eval") {
        bad(line_no, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) bad(line_no, "empty key");

    if (section.empty()) {
      if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(to_int(value, line_no));
      } else if (key == "workers") {
        config.workers = static_cast<int>(to_int(value, line_no));
      } else if (key == "model") {
        config.model = value;
      } else {
        bad(line_no, "unknown top-level key '" + key + "'");
      }
    } else if (section == "data") {
      if (key == "kind") config.data.kind = value;
      else if (key == "csv") config.data.csv_path = value;
      else if (key == "num_hours") config.data.synth.num_hours = to_int(value, line_no);
      else if (key == "start") {
        try {
          config.data.synth.start = parse_date(value);
        } catch (const DataError& e) {
          bad(line_no, e.what());
        }
      }
      else if (key == "base_level") config.data.synth.base_level = to_double(value, line_no);
      else if (key == "daily_amplitude") config.data.synth.daily_amplitude = to_double(value, line_no);
      else if (key == "weekly_amplitude") config.data.synth.weekly_amplitude = to_double(value, line_no);
      else if (key == "noise_sigma") config.data.synth.noise_sigma = to_double(value, line_no);
      else if (key == "ar_coeff") config.data.synth.ar_coeff = to_double(value, line_no);
      else if (key == "holiday_multiplier") holiday_multiplier = to_double(value, line_no);
      else if (key == "holidays") { holidays_value = value; holidays_line = line_no; }
      else if (key == "l_in") config.data.l_in = static_cast<int>(to_int(value, line_no));
      else if (key == "horizon") config.data.horizon = static_cast<int>(to_int(value, line_no));
      else if (key == "stride") config.data.stride = static_cast<int>(to_int(value, line_no));
      else bad(line_no, "unknown [data] key '" + key + "'");
    } else if (section == "arch") {
      if (key == "conv") config.arch.conv = parse_conv(value, line_no);
      else if (key == "encoder_dim") config.arch.encoder_dim = static_cast<int>(to_int(value, line_no));
      else if (key == "recon_dim") config.arch.recon_dim = static_cast<int>(to_int(value, line_no));
      else if (key == "decoder_hidden") config.arch.decoder_hidden = parse_int_list(value, line_no);
      else if (key == "mlp_hidden") config.mlp.hidden = parse_int_list(value, line_no);
      else bad(line_no, "unknown [arch] key '" + key + "'");
    } else if (section == "priors") {
      if (key == "a0") config.priors.a0 = to_double(value, line_no);
      else if (key == "b0") config.priors.b0 = to_double(value, line_no);
      else if (key == "a1") config.priors.a1 = to_double(value, line_no);
      else if (key == "b1") config.priors.b1 = to_double(value, line_no);
      else bad(line_no, "unknown [priors] key '" + key + "'");
    } else if (section == "svgd") {
      if (key == "particles") config.svgd.particles = static_cast<int>(to_int(value, line_no));
      else if (key == "step_w") config.svgd.step_w = to_double(value, line_no);
      else if (key == "step_noise") config.svgd.step_noise = to_double(value, line_no);
      else if (key == "batch_size") config.svgd.batch_size = static_cast<int>(to_int(value, line_no));
      else if (key == "epochs") config.svgd.epochs = static_cast<int>(to_int(value, line_no));
      else if (key == "epsilon") config.svgd.epsilon = to_double(value, line_no);
      else if (key == "checkpoint_every") config.svgd.checkpoint_every = static_cast<int>(to_int(value, line_no));
      else bad(line_no, "unknown [svgd] key '" + key + "'");
    } else if (section == "eval") {
      if (key == "level") config.eval.level = to_double(value, line_no);
      else if (key == "out_dir") config.eval.out_dir = value;
      else bad(line_no, "unknown [eval] key '" + key + "'");
    }
  }

  if (!holidays_value.empty()) {
    config.data.synth.holidays =
        parse_holidays(holidays_value, holiday_multiplier, holidays_line);
  }

  // Geometry flows from the data section into both architectures.
  config.arch.d = config.data.horizon;
  config.arch.l_in = config.data.l_in;
  config.mlp.d = config.data.horizon;
  config.mlp.l_in = config.data.l_in;
  config.svgd.seed = config.seed;
  config.svgd.workers = config.workers;
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

}  // namespace steincast
