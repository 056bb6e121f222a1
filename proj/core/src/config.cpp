#include "seqdet/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "seqdet/errors.hpp"
#include "seqdet/report.hpp"

namespace seqdet {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& value, int line) {
  errno = 0;
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE) {
    fail(line, "expected a number, got '" + value + "'");
  }
  return parsed;
}

std::int64_t parse_int(const std::string& value, int line) {
  errno = 0;
  char* end = nullptr;
  const long long parsed = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE) {
    fail(line, "expected an integer, got '" + value + "'");
  }
  return parsed;
}

std::uint64_t parse_u64(const std::string& value, int line) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE ||
      value.find('-') != std::string::npos) {
    fail(line, "expected an unsigned integer, got '" + value + "'");
  }
  return parsed;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string current;
  std::stringstream stream(value);
  while (std::getline(stream, current, ',')) {
    const std::string item = trim(current);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<double> parse_double_list(const std::string& value, int line) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) {
    out.push_back(parse_double(item, line));
  }
  if (out.empty()) fail(line, "expected a nonempty list");
  return out;
}

Procedure parse_procedure(const std::string& name, int line) {
  if (name == "shiryaev") return Procedure::shiryaev;
  if (name == "shiryaev-roberts") return Procedure::shiryaev_roberts;
  fail(line, "unknown procedure '" + name + "'");
}

template <typename T>
std::string join_list(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  bool procedures_set = false;

  std::istringstream stream(text);
  std::string raw;
  std::string section;
  std::set<std::string> seen;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    const auto comment = raw.find('#');
    if (comment != std::string::npos) raw.erase(comment);
    const std::string content = trim(raw);
    if (content.empty()) continue;

    if (content.front() == '[') {
      if (content.back() != ']') fail(line, "unterminated section header");
      section = trim(content.substr(1, content.size() - 2));
      static const std::set<std::string> known = {
          "model", "prior", "procedures", "budget",
          "mc",    "study", "verify",     "output"};
      if (!known.count(section)) fail(line, "unknown section [" + section + "]");
      continue;
    }

    const auto eq = content.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (value.empty()) fail(line, "empty value for '" + key + "'");
    if (section.empty()) fail(line, "'" + key + "' appears outside a section");
    if (!seen.insert(section + "." + key).second) {
      fail(line, "duplicate key '" + key + "' in [" + section + "]");
    }

    if (section == "model") {
      if (key == "variant") {
        config.model.variant = value;
        bool known_variant = false;
        for (const auto& name : model_variant_names()) {
          known_variant = known_variant || name == value;
        }
        if (!known_variant) fail(line, "unknown model variant '" + value + "'");
      } else if (key == "theta") {
        config.model.theta = parse_double(value, line);
      } else if (key == "sigma") {
        config.model.sigma = parse_double(value, line);
      } else if (key == "beta") {
        config.model.betas = parse_double_list(value, line);
      } else if (key == "signal") {
        config.model.signal = parse_double(value, line);
      } else if (key == "signal_csv") {
        config.model.signal_csv = value;
      } else if (key == "sigma_pre") {
        config.model.sigma_pre = parse_double(value, line);
      } else if (key == "sigma_post") {
        config.model.sigma_post = parse_double(value, line);
      } else if (key == "nuisance_mean") {
        config.model.nuisance_mean = parse_double(value, line);
      } else if (key == "beta_pre") {
        config.model.beta_pre = parse_double(value, line);
      } else if (key == "beta_post") {
        config.model.beta_post = parse_double(value, line);
      } else if (key == "z") {
        config.model.z = parse_double(value, line);
      } else {
        fail(line, "unknown key '" + key + "' in [model]");
      }
    } else if (section == "prior") {
      if (key == "kind") {
        if (value != "geometric" && value != "polynomial-tail") {
          fail(line, "unknown prior kind '" + value + "'");
        }
        config.prior.kind = value;
      } else if (key == "rho") {
        config.prior.rho = parse_double(value, line);
      } else if (key == "q") {
        config.prior.q = parse_double(value, line);
      } else if (key == "s") {
        config.prior.s = parse_double(value, line);
      } else if (key == "K") {
        config.prior.truncation = parse_int(value, line);
      } else if (key == "schedule") {
        if (value != "none" && value != "log-power") {
          fail(line, "unknown schedule '" + value + "'");
        }
        config.prior.schedule = value;
      } else if (key == "schedule_c") {
        config.prior.schedule_c = parse_double(value, line);
      } else if (key == "schedule_p") {
        config.prior.schedule_p = parse_double(value, line);
      } else {
        fail(line, "unknown key '" + key + "' in [prior]");
      }
    } else if (section == "procedures") {
      if (key == "list") {
        config.procedures.clear();
        for (const auto& item : split_list(value)) {
          config.procedures.push_back(parse_procedure(item, line));
        }
        if (config.procedures.empty()) fail(line, "empty procedure list");
        procedures_set = true;
      } else {
        fail(line, "unknown key '" + key + "' in [procedures]");
      }
    } else if (section == "budget") {
      if (key == "alpha") {
        config.budget.alphas = parse_double_list(value, line);
        for (double a : config.budget.alphas) {
          if (!(a > 0.0) || !(a < 1.0)) {
            fail(line, "alpha values must lie strictly inside (0, 1)");
          }
        }
      } else if (key == "thresholds") {
        config.budget.thresholds = parse_double_list(value, line);
        for (double t : config.budget.thresholds) {
          if (!(t > 0.0)) fail(line, "thresholds must be positive");
        }
      } else {
        fail(line, "unknown key '" + key + "' in [budget]");
      }
    } else if (section == "mc") {
      if (key == "trials") {
        config.mc.trials = parse_u64(value, line);
      } else if (key == "seed") {
        config.mc.seed = parse_u64(value, line);
      } else if (key == "horizon") {
        config.mc.horizon = parse_u64(value, line);
      } else if (key == "workers") {
        config.mc.workers = static_cast<int>(parse_int(value, line));
        if (config.mc.workers < 1) fail(line, "workers must be >= 1");
      } else if (key == "max_censored") {
        config.mc.max_censored = parse_double(value, line);
      } else {
        fail(line, "unknown key '" + key + "' in [mc]");
      }
    } else if (section == "study") {
      if (key == "moments") {
        config.study.moments = parse_double_list(value, line);
      } else if (key == "r") {
        config.study.r = parse_double(value, line);
      } else {
        fail(line, "unknown key '" + key + "' in [study]");
      }
    } else if (section == "verify") {
      if (key == "r") {
        config.verify.condition_r = parse_double(value, line);
      } else if (key == "epsilon") {
        config.verify.epsilon = parse_double(value, line);
      } else if (key == "deviation_ns") {
        config.verify.deviation_ns.clear();
        for (const auto& item : split_list(value)) {
          config.verify.deviation_ns.push_back(parse_u64(item, line));
        }
      } else if (key == "upsilon_nmax") {
        config.verify.upsilon_nmax = parse_u64(value, line);
      } else if (key == "k_grid") {
        config.verify.k_grid.clear();
        for (const auto& item : split_list(value)) {
          config.verify.k_grid.push_back(parse_int(item, line));
        }
      } else if (key == "trials") {
        config.verify.trials = parse_u64(value, line);
      } else {
        fail(line, "unknown key '" + key + "' in [verify]");
      }
    } else if (section == "output") {
      if (key == "dir") {
        config.output.dir = value;
      } else {
        fail(line, "unknown key '" + key + "' in [output]");
      }
    }
  }

  if (config.model.variant.empty()) {
    throw ConfigError("config is missing the required [model] variant");
  }
  if (config.prior.kind.empty()) {
    throw ConfigError("config is missing the required [prior] kind");
  }
  (void)procedures_set;
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  out += "[model]\n";
  out += "variant = " + c.model.variant + "\n";
  out += "theta = " + format_double(c.model.theta) + "\n";
  out += "sigma = " + format_double(c.model.sigma) + "\n";
  out += "beta = " + join_list(c.model.betas) + "\n";
  out += "signal = " + format_double(c.model.signal) + "\n";
  if (!c.model.signal_csv.empty()) {
    out += "signal_csv = " + c.model.signal_csv + "\n";
  }
  out += "sigma_pre = " + format_double(c.model.sigma_pre) + "\n";
  out += "sigma_post = " + format_double(c.model.sigma_post) + "\n";
  out += "nuisance_mean = " + format_double(c.model.nuisance_mean) + "\n";
  out += "beta_pre = " + format_double(c.model.beta_pre) + "\n";
  out += "beta_post = " + format_double(c.model.beta_post) + "\n";
  out += "z = " + format_double(c.model.z) + "\n";

  out += "\n[prior]\n";
  out += "kind = " + c.prior.kind + "\n";
  out += "rho = " + format_double(c.prior.rho) + "\n";
  out += "q = " + format_double(c.prior.q) + "\n";
  out += "s = " + format_double(c.prior.s) + "\n";
  out += "K = " + std::to_string(c.prior.truncation) + "\n";
  out += "schedule = " + c.prior.schedule + "\n";
  out += "schedule_c = " + format_double(c.prior.schedule_c) + "\n";
  out += "schedule_p = " + format_double(c.prior.schedule_p) + "\n";

  out += "\n[procedures]\n";
  out += "list = ";
  for (std::size_t i = 0; i < c.procedures.size(); ++i) {
    if (i) out += ", ";
    out += procedure_name(c.procedures[i]);
  }
  out += "\n";

  out += "\n[budget]\n";
  if (!c.budget.alphas.empty()) {
    out += "alpha = " + join_list(c.budget.alphas) + "\n";
  }
  if (!c.budget.thresholds.empty()) {
    out += "thresholds = " + join_list(c.budget.thresholds) + "\n";
  }

  out += "\n[mc]\n";
  out += "trials = " + std::to_string(c.mc.trials) + "\n";
  out += "seed = " + std::to_string(c.mc.seed) + "\n";
  out += "horizon = " + std::to_string(c.mc.horizon) + "\n";
  out += "workers = " + std::to_string(c.mc.workers) + "\n";
  out += "max_censored = " + format_double(c.mc.max_censored) + "\n";

  out += "\n[study]\n";
  out += "moments = " + join_list(c.study.moments) + "\n";
  out += "r = " + format_double(c.study.r) + "\n";

  out += "\n[verify]\n";
  out += "r = " + format_double(c.verify.condition_r) + "\n";
  out += "epsilon = " + format_double(c.verify.epsilon) + "\n";
  out += "deviation_ns = " + join_list(c.verify.deviation_ns) + "\n";
  out += "upsilon_nmax = " + std::to_string(c.verify.upsilon_nmax) + "\n";
  out += "k_grid = " + join_list(c.verify.k_grid) + "\n";
  out += "trials = " + std::to_string(c.verify.trials) + "\n";

  out += "\n[output]\n";
  out += "dir = " + c.output.dir + "\n";
  return out;
}

std::vector<double> load_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open signal table '" + path + "'");
  std::vector<double> values;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto comment = raw.find('#');
    if (comment != std::string::npos) raw.erase(comment);
    const std::string content = trim(raw);
    if (content.empty()) continue;
    values.push_back(parse_double(content, line));
  }
  if (values.empty()) {
    throw ConfigError("signal table '" + path + "' holds no values");
  }
  return values;
}

std::unique_ptr<ScenarioModel> make_model(const ModelConfig& config) {
  try {
    if (config.variant == "iid-gaussian-mean") {
      return std::make_unique<IidGaussianMeanModel>(config.theta, config.sigma);
    }
    if (config.variant == "ar-signal") {
      if (!config.signal_csv.empty()) {
        return std::make_unique<ArSignalModel>(config.betas, config.sigma,
                                               load_signal_csv(config.signal_csv));
      }
      return std::make_unique<ArSignalModel>(config.betas, config.sigma,
                                             config.signal);
    }
    if (config.variant == "variance-invariant") {
      return std::make_unique<VarianceChangeModel>(
          config.sigma_pre, config.sigma_post, config.nuisance_mean);
    }
    if (config.variant == "ar1-correlation") {
      return std::make_unique<Ar1CorrelationModel>(config.beta_pre,
                                                   config.beta_post);
    }
    if (config.variant == "constant-llr") {
      return std::make_unique<ConstantLlrModel>(config.z);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model config invalid: ") + e.what());
  }
  throw ConfigError("unknown model variant '" + config.variant + "'");
}

Prior make_prior(const PriorConfig& config) {
  try {
    if (config.kind == "geometric") {
      return Prior::geometric(config.rho, config.q);
    }
    if (config.kind == "polynomial-tail") {
      return Prior::polynomial_tail(config.s, config.truncation, config.q);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("prior config invalid: ") + e.what());
  }
  throw ConfigError("unknown prior kind '" + config.kind + "'");
}

std::optional<RhoSchedule> make_schedule(const PriorConfig& config) {
  if (config.schedule == "none") return std::nullopt;
  RhoSchedule schedule;
  schedule.c = config.schedule_c;
  schedule.p = config.schedule_p;
  if (!(schedule.c > 0.0) || !(schedule.p > 0.0) || schedule.p > 1.0) {
    throw ConfigError("rho schedule requires c > 0 and p in (0, 1]");
  }
  return schedule;
}

}  // namespace seqdet
