#include "aquascale/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

namespace aquascale {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t' || c == '[' || c == ']') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("'" + s + "' is not a number");
  }
  if (pos != s.size()) throw std::invalid_argument("'" + s + "' is not a number");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("'" + s + "' is not a non-negative integer");
  return std::stoull(s);
}

}  // namespace

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& t : split_list(s)) out.push_back(static_cast<std::size_t>(to_u64(t)));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& t : split_list(s)) out.push_back(to_u64(t));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split_list(s)) out.push_back(to_double(t));
  return out;
}

void Config::validate() const {
  model.phys.validate();
  if (!(model.eps0 > 0.0)) throw std::invalid_argument("eps0 must be positive");
  if (!(model.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  model.mh.validate();
  const auto& c = model.constants;
  if (!(c.ring > 0.0 && c.layer > 0.0 && c.extended_closed > 0.0 && c.dense_closed > 0.0))
    throw std::invalid_argument("bound constants must be positive");
  if (!(c.interference_a_min > 1.0)) throw std::invalid_argument("interference_a_min must exceed 1");
  sweep.validate();
  if (!(harness.slope_tol > 0.0 && harness.ratio_threshold > 1.0 && harness.cutset_order_band > 1.0))
    throw std::invalid_argument("harness tolerances must be positive (thresholds above 1)");
  if (harness.occupancy_min_pass > harness.occupancy_seeds)
    throw std::invalid_argument("occupancy_min_pass cannot exceed occupancy_seeds");
}

void apply_config(std::istream& in, Config& cfg) {
  using Setter = std::function<void(const std::string&)>;
  auto& ph = cfg.model.phys;
  auto num = [](double& dst) -> Setter { return [&dst](const std::string& v) { dst = to_double(v); }; };
  auto size = [](std::size_t& dst) -> Setter {
    return [&dst](const std::string& v) { dst = static_cast<std::size_t>(to_u64(v)); };
  };
  const std::map<std::string, Setter> setters{
      {"channel.alpha", num(ph.alpha)},
      {"channel.c0", num(ph.c0)},
      {"channel.a0", num(ph.absorb.a0)},
      {"channel.a1", num(ph.absorb.a1)},
      {"channel.a2", num(ph.absorb.a2)},
      {"channel.a3", num(ph.absorb.a3)},
      {"channel.b1", num(ph.absorb.b1)},
      {"channel.b2", num(ph.absorb.b2)},
      {"channel.a4", num(ph.noise.a4)},
      {"channel.a5", num(ph.noise.a5)},
      {"channel.c1", num(ph.c1)},
      {"channel.tx_power", num(ph.tx_power)},
      {"channel.tx_power_db", [&ph](const std::string& v) { ph.tx_power = std::pow(10.0, to_double(v) / 10.0); }},
      {"channel.unit_length_km", num(ph.unit_length_km)},
      {"channel.f_ref_khz", num(ph.f_ref_khz)},
      {"channel.eps0", num(cfg.model.eps0)},
      {"channel.log1p_eps0", [&cfg](const std::string& v) { cfg.model.eps0 = std::expm1(to_double(v)); }},
      {"sweep.density", [&cfg](const std::string& v) { cfg.sweep.density = density_from_string(v); }},
      {"sweep.n_list", [&cfg](const std::string& v) { cfg.sweep.n_list = parse_size_list(v); }},
      {"sweep.beta_list", [&cfg](const std::string& v) { cfg.sweep.beta_list = parse_double_list(v); }},
      {"sweep.alpha_list", [&cfg](const std::string& v) { cfg.sweep.alpha_list = parse_double_list(v); }},
      {"sweep.f_mode", [&cfg](const std::string& v) { cfg.sweep.f_mode = frequency_mode_from_string(v); }},
      {"sweep.f_khz", num(cfg.sweep.f_khz)},
      {"sweep.seeds", [&cfg](const std::string& v) { cfg.sweep.seeds = parse_seed_list(v); }},
      {"sweep.kinds",
       [&cfg](const std::string& v) {
         cfg.sweep.kinds.clear();
         for (const auto& k : split_list(v)) cfg.sweep.kinds.push_back(bound_kind_from_string(k));
       }},
      {"sweep.eps", num(cfg.model.eps)},
      {"mh.mode", [&cfg](const std::string& v) { cfg.model.mh.mode = mh_mode_from_string(v); }},
      {"mh.tdma_reuse", size(cfg.model.mh.tdma_reuse)},
      {"mh.delta", num(cfg.model.mh.delta)},
      {"constants.ring", num(cfg.model.constants.ring)},
      {"constants.layer", num(cfg.model.constants.layer)},
      {"constants.interference_a_min", num(cfg.model.constants.interference_a_min)},
      {"constants.extended_closed", num(cfg.model.constants.extended_closed)},
      {"constants.dense_closed", num(cfg.model.constants.dense_closed)},
      {"harness.n_sweep", [&cfg](const std::string& v) { cfg.harness.n_sweep = parse_size_list(v); }},
      {"harness.n_sweep_large", [&cfg](const std::string& v) { cfg.harness.n_sweep_large = parse_size_list(v); }},
      {"harness.mh_seeds", [&cfg](const std::string& v) { cfg.harness.mh_seeds = parse_seed_list(v); }},
      {"harness.slope_tol", num(cfg.harness.slope_tol)},
      {"harness.ratio_threshold", num(cfg.harness.ratio_threshold)},
      {"harness.cutset_order_band", num(cfg.harness.cutset_order_band)},
      {"harness.log_tolerance", num(cfg.harness.log_tolerance)},
      {"harness.propriety_samples", size(cfg.harness.propriety_samples)},
      {"harness.covariance_n_small", size(cfg.harness.covariance_n_small)},
      {"harness.covariance_random_q", size(cfg.harness.covariance_random_q)},
      {"harness.covariance_draws", size(cfg.harness.covariance_draws)},
      {"harness.occupancy_n", size(cfg.harness.occupancy_n)},
      {"harness.occupancy_seeds", size(cfg.harness.occupancy_seeds)},
      {"harness.occupancy_min_pass", size(cfg.harness.occupancy_min_pass)},
      {"run.seed", [&cfg](const std::string& v) { cfg.seed = to_u64(v); }},
      {"run.threads", size(cfg.threads)},
  };

  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section enter/leave markers
    std::string section;
    for (const auto& p : item.parents) section += (section.empty() ? "" : ".") + p;
    const std::string key = (section.empty() ? std::string("run") : section) + "." + item.name;
    auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument("unknown config key '" + key + "'");
    std::string value;
    for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
    try {
      it->second(value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
}

void apply_config_file(const std::string& path, Config& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  apply_config(in, cfg);
}

}  // namespace aquascale
