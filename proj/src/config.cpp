#include "dfp/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <stdexcept>

namespace dfp {
namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: invalid value '" + value + "' for key '" + key + "'");
}

int parse_positive_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size() || v < 1) bad_value(key, value);
  return static_cast<int>(v);
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not of the form key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "train_window") {
      cfg.train_window = parse_positive_int(key, value);
    } else if (key == "horizon") {
      cfg.horizon = parse_positive_int(key, value);
    } else if (key == "decomposition") {
      if (value == "fm")
        cfg.decomposition = AnovaMethod::FM;
      else if (value == "fmp")
        cfg.decomposition = AnovaMethod::FMP;
      else
        bad_value(key, value);
    } else if (key == "k_rule") {
      if (value == "evr")
        cfg.k_rule = KRule::evr();
      else if (value.rfind("fixed:", 0) == 0)
        cfg.k_rule = KRule::fixed(parse_positive_int(key, value.substr(6)));
      else
        bad_value(key, value);
    } else if (key == "kernel") {
      if (value == "bartlett")
        cfg.kernel = LagKernel::Bartlett;
      else if (value == "flat_top")
        cfg.kernel = LagKernel::FlatTop;
      else
        bad_value(key, value);
    } else if (key == "bandwidth") {
      if (value == "plugin") {
        cfg.bandwidth.reset();
      } else if (value.rfind("fixed:", 0) == 0) {
        char* end = nullptr;
        const std::string num = value.substr(6);
        const double b = std::strtod(num.c_str(), &end);
        if (num.empty() || end != num.c_str() + num.size() || !(b > 0)) bad_value(key, value);
        cfg.bandwidth = b;
      } else {
        bad_value(key, value);
      }
    } else if (key == "clr") {
      if (value == "on")
        cfg.clr_on = true;
      else if (value == "off")
        cfg.clr_on = false;
      else
        bad_value(key, value);
    } else if (key == "methods") {
      cfg.methods.clear();
      std::string rest = value;
      while (!rest.empty()) {
        const size_t comma = rest.find(',');
        const std::string item = trim(rest.substr(0, comma));
        if (!item.empty()) cfg.methods.push_back(item);
        if (comma == std::string::npos) break;
        rest = rest.substr(comma + 1);
      }
      if (cfg.methods.empty()) bad_value(key, value);
    } else if (key == "seed") {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
      if (value.empty() || end != value.c_str() + value.size()) bad_value(key, value);
      cfg.seed = static_cast<std::uint64_t>(v);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  validate_config(cfg);
  return cfg;
}

RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  return parse_run_config(in);
}

void validate_config(const RunConfig& config) {
  if (config.train_window < 10)
    throw std::invalid_argument("config: train_window must be at least 10");
  if (config.horizon < 1) throw std::invalid_argument("config: horizon must be at least 1");
  if (config.methods.empty()) throw std::invalid_argument("config: methods must not be empty");
  const std::set<std::string> known{"fm", "fmp", "gsy", "naive"};
  std::set<std::string> seen;
  for (const auto& m : config.methods) {
    if (!known.count(m)) throw std::invalid_argument("config: unknown method '" + m + "'");
    if (!seen.insert(m).second)
      throw std::invalid_argument("config: duplicate method '" + m + "'");
  }
}

}  // namespace dfp
