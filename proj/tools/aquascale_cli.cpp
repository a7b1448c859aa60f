#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include <tbb/global_control.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "aquascale/checks.hpp"
#include "aquascale/config.hpp"
#include "aquascale/cutset.hpp"
#include "aquascale/harness.hpp"
#include "aquascale/routing.hpp"

using namespace aquascale;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitVerifyFailed = 3;

struct Globals {
  std::uint64_t seed = 1;
  std::string config_path;
  bool json = false;
  std::size_t threads = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
};

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

// Writes to the file when a path is given, otherwise to stdout.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
}

Config load(const Globals& g) {
  Config cfg;
  if (!g.config_path.empty()) apply_config_file(g.config_path, cfg);
  if (g.seed_opt->count() > 0) {
    cfg.seed = g.seed;
    cfg.sweep.seeds = {g.seed};
  }
  if (g.threads_opt->count() > 0) {
    cfg.threads = g.threads;
  } else if (const char* env = std::getenv("AQUASCALE_THREADS"); env && *env) {
    cfg.threads = parse_size_list(env).front();
  }
  return cfg;
}

std::unique_ptr<tbb::global_control> limit_threads(std::size_t threads) {
  if (threads == 0) return nullptr;
  return std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, threads);
}

ojson bound_json(const ThroughputBound& b) {
  ojson j;
  j["n"] = b.n;
  j["beta"] = b.beta;
  j["f_khz"] = b.f_khz;
  j["alpha"] = b.alpha;
  j["kind"] = to_string(b.kind);
  j["value"] = b.value;
  j["log_value"] = b.log_value;
  j["regime"] = to_string(b.regime);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity-scaling bounds and multi-hop simulation for underwater acoustic networks", "aquascale"};
  app.require_subcommand(1);
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--config", g.config_path, "INI file with [channel], [sweep], [mh], [constants], [harness], [run]");
  app.add_flag("--json", g.json, "JSON output on stdout");
  g.threads_opt = app.add_option("--threads", g.threads, "worker thread cap (also AQUASCALE_THREADS)");

  // channel-table
  auto* ct = app.add_subcommand("channel-table", "absorption and noise over a frequency range (CSV)");
  double fmin = 1.0, fmax = 100.0, fstep = 1.0;
  std::string ct_out;
  ct->add_option("--fmin", fmin, "lowest frequency, kHz");
  ct->add_option("--fmax", fmax, "highest frequency, kHz");
  ct->add_option("--step", fstep, "frequency step, kHz");
  ct->add_option("--out", ct_out, "CSV path (default stdout)");

  // cutset
  auto* cs = app.add_subcommand("cutset", "cut-set upper bounds on one regular layout");
  std::size_t cs_n = 64;
  std::string cs_density = "extended", cs_out;
  double cs_beta = 0.0, cs_f = 0.0, cs_alpha = 0.0;
  cs->add_option("--n", cs_n, "node count (perfect square with an even root)");
  cs->add_option("--density", cs_density, "extended or dense");
  cs->add_option("--beta", cs_beta, "regime exponent (dense)");
  auto* cs_f_opt = cs->add_option("--f", cs_f, "fixed carrier, kHz (default: f_ref, or the regime carrier when dense)");
  auto* cs_alpha_opt = cs->add_option("--alpha", cs_alpha, "spreading factor override");
  cs->add_option("--out", cs_out, "CSV path (default stdout)");

  // mh
  auto* mh = app.add_subcommand("mh", "multi-hop throughput simulation");
  std::size_t mh_n = 64;
  std::string mh_mode, mh_out;
  double mh_beta = 0.0, mh_f = 0.0, mh_a = 0.0;
  mh->add_option("--n", mh_n, "node count");
  auto* mh_mode_opt = mh->add_option("--mode", mh_mode, "extended, dense or random");
  mh->add_option("--beta", mh_beta, "regime exponent (dense)");
  auto* mh_f_opt = mh->add_option("--f", mh_f, "fixed carrier, kHz");
  auto* mh_a_opt = mh->add_option("--absorption", mh_a, "fixed absorption factor a(f) > 1 per unit distance");
  mh->add_option("--out", mh_out, "JSON report path");

  // sweep
  auto* sw = app.add_subcommand("sweep", "bound and throughput sweep (CSV)");
  std::string sw_density, sw_n, sw_beta, sw_alpha, sw_seeds, sw_fmode, sw_kinds, sw_out, sw_plot;
  double sw_f = 0.0;
  auto* sw_density_opt = sw->add_option("--density", sw_density, "extended, dense or random");
  auto* sw_n_opt = sw->add_option("--n", sw_n, "comma-separated node counts");
  auto* sw_beta_opt = sw->add_option("--beta", sw_beta, "comma-separated regime exponents");
  auto* sw_alpha_opt = sw->add_option("--alpha", sw_alpha, "comma-separated spreading factors");
  auto* sw_seeds_opt = sw->add_option("--seeds", sw_seeds, "comma-separated seeds");
  auto* sw_fmode_opt = sw->add_option("--f-mode", sw_fmode, "fixed or regime");
  auto* sw_f_opt = sw->add_option("--f", sw_f, "carrier for fixed mode, kHz");
  auto* sw_kinds_opt = sw->add_option("--kinds", sw_kinds, "comma-separated bound kinds");
  sw->add_option("--out", sw_out, "CSV path (default stdout)");
  sw->add_option("--gnuplot", sw_plot, "gnuplot data path");

  // verify
  auto* vf = app.add_subcommand("verify", "run every verification check");
  std::string vf_out;
  vf->add_option("--out", vf_out, "JSON report path");

  for (auto* sub : {ct, cs, mh, sw, vf}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    Config cfg = load(g);
    cfg.validate();
    const auto limiter = limit_threads(cfg.threads);
    const auto& phys = cfg.model.phys;

    if (*ct) {
      if (!(fmin > 0.0) || !(fmax >= fmin) || !(fstep > 0.0))
        throw std::invalid_argument("frequency range needs 0 < fmin <= fmax and step > 0");
      std::ostringstream out;
      ojson rows = ojson::array();
      out << "f_khz,absorption_db_per_km,a_linear,noise_psd\n";
      const auto count = static_cast<std::size_t>(std::floor((fmax - fmin) / fstep * (1.0 + 1e-12))) + 1;
      for (std::size_t i = 0; i < count; ++i) {
        const double f = fmin + static_cast<double>(i) * fstep;
        const double db = absorption_db_per_km(f, phys), a = absorption_coeff(f, phys), nf = noise_psd(f, phys);
        out << num(f) << ',' << num(db) << ',' << num(a) << ',' << num(nf) << '\n';
        rows.push_back({{"f_khz", f}, {"absorption_db_per_km", db}, {"a_linear", a}, {"noise_psd", nf}});
      }
      if (g.json) {
        std::cout << rows.dump(2) << '\n';
        if (!ct_out.empty()) emit(ct_out, out.str());
      } else {
        emit(ct_out, out.str());
      }
      return kExitOk;
    }

    if (*cs) {
      PhysicalParams p = phys;
      if (cs_alpha_opt->count() > 0) p.alpha = cs_alpha;
      p.validate();
      const Density d = density_from_string(cs_density);
      if (d == Density::Random) throw std::invalid_argument("cutset works on regular layouts (extended or dense)");
      const NodeGrid grid = build_grid(cs_n, d);
      std::vector<ThroughputBound> bounds;
      ojson j;
      if (d == Density::Extended) {
        const ChannelState ch = empirical_state(cs_f_opt->count() > 0 ? cs_f : p.f_ref_khz, p);
        const CutsetPair pair = cutset_upper_extended(grid, cut(grid), ch, p, cfg.model.constants.extended_closed);
        bounds = {pair.exact, pair.closed};
      } else {
        const ChannelState ch =
            cs_f_opt->count() > 0 ? empirical_state(cs_f, p) : regime_state(cs_n, cs_beta, cfg.model.eps0, p);
        const CutPartition split = dense_split(grid, cs_beta, cfg.model.eps);
        const DenseCutset dc =
            cutset_upper_dense(grid, split, ch, cs_beta, cfg.model.eps, p, cfg.model.constants.dense_closed);
        bounds = {dc.hybrid, dc.closed};
        j["near_width"] = *split.near_width;
        j["near_term"] = dc.near_term;
        j["log_far_term"] = dc.log_far_term;
      }
      std::ostringstream csv;
      write_bounds_csv(csv, bounds);
      if (g.json) {
        j["bounds"] = ojson::array();
        for (const auto& b : bounds) j["bounds"].push_back(bound_json(b));
        std::cout << j.dump(2) << '\n';
        if (!cs_out.empty()) emit(cs_out, csv.str());
      } else {
        emit(cs_out, csv.str());
        if (!cs_out.empty())
          std::cout << "cutset: n=" << cs_n << ' ' << cs_density << ' ' << to_string(bounds[0].kind) << '='
                    << num(bounds[0].value) << ' ' << to_string(bounds[1].kind) << '=' << num(bounds[1].value) << '\n';
      }
      return kExitOk;
    }

    if (*mh) {
      MhConfig mcfg = cfg.model.mh;
      if (mh_mode_opt->count() > 0) mcfg.mode = mh_mode_from_string(mh_mode);
      mcfg.validate();
      const double f = mh_f_opt->count() > 0 ? mh_f : phys.f_ref_khz;
      ChannelState ch;
      if (mh_a_opt->count() > 0) {
        if (!(mh_a > 1.0)) throw std::invalid_argument("--absorption must exceed 1");
        ch = fixed_state(mh_a, noise_psd(f, phys), f);
      } else if (mcfg.mode == MhMode::DenseScaledPower && mh_f_opt->count() == 0) {
        ch = regime_state(mh_n, mh_beta, cfg.model.eps0, phys);
      } else {
        ch = empirical_state(f, phys);
      }
      const SdMatching match = random_matching(mh_n, cfg.seed);
      MhReport rep;
      if (mcfg.mode == MhMode::RandomLogCells)
        rep = mh_throughput_random(build_random(mh_n, cfg.seed), match, ch, mcfg, phys);
      else
        rep = mh_throughput(build_grid(mh_n, mcfg.mode == MhMode::ExtendedFullPower ? Density::Extended : Density::Dense),
                            match, ch, mcfg, phys, mh_beta);
      const std::string report = mh_report_json(rep);
      if (!mh_out.empty()) emit(mh_out, report + "\n");
      if (g.json)
        std::cout << report << '\n';
      else
        std::cout << "mh: n=" << rep.n << " mode=" << to_string(rep.mode) << " T=" << num(rep.simulated.value)
                  << " closed_form=" << num(rep.closed_form.value) << " ratio=" << num(std::exp(rep.log_ratio))
                  << " min_hop_rate=" << num(rep.min_hop_rate) << " max_cell_load=" << rep.max_cell_load
                  << " failures=" << rep.failures.size() << '\n';
      return kExitOk;
    }

    if (*sw) {
      SweepSpec spec = cfg.sweep;
      if (sw_density_opt->count() > 0) spec.density = density_from_string(sw_density);
      if (sw_n_opt->count() > 0) spec.n_list = parse_size_list(sw_n);
      if (sw_beta_opt->count() > 0) spec.beta_list = parse_double_list(sw_beta);
      if (sw_alpha_opt->count() > 0) spec.alpha_list = parse_double_list(sw_alpha);
      if (sw_seeds_opt->count() > 0) spec.seeds = parse_seed_list(sw_seeds);
      if (sw_fmode_opt->count() > 0) spec.f_mode = frequency_mode_from_string(sw_fmode);
      if (sw_f_opt->count() > 0) spec.f_khz = sw_f;
      if (sw_kinds_opt->count() > 0) {
        spec.kinds.clear();
        std::stringstream ss(sw_kinds);
        for (std::string k; std::getline(ss, k, ',');)
          if (!k.empty()) spec.kinds.push_back(bound_kind_from_string(k));
      }
      spec.validate();
      const SweepTable table = run_sweep(spec, cfg.model);
      std::ostringstream csv;
      write_sweep_csv(csv, table);
      if (!sw_plot.empty()) {
        std::ostringstream plot;
        write_gnuplot(plot, table);
        emit(sw_plot, plot.str());
      }
      std::size_t failed = 0;
      for (const auto& r : table.rows) failed += r.ok ? 0 : 1;
      if (g.json) {
        ojson rows = ojson::array();
        for (const auto& r : table.rows)
          rows.push_back({{"n", r.n},
                          {"beta", r.beta},
                          {"f_khz", r.f_khz},
                          {"alpha", r.alpha},
                          {"kind", to_string(r.kind)},
                          {"value", r.value},
                          {"regime", to_string(r.regime)},
                          {"seed", r.seed},
                          {"log_value", r.log_value},
                          {"ok", r.ok},
                          {"error", r.error}});
        std::cout << rows.dump(2) << '\n';
        if (!sw_out.empty()) emit(sw_out, csv.str());
      } else {
        emit(sw_out, csv.str());
        if (!sw_out.empty()) std::cout << "sweep: " << table.rows.size() << " rows, " << failed << " failed\n";
      }
      return kExitOk;
    }

    if (*vf) {
      const VerifyReport rep = verify_all(cfg);
      const std::string report = to_json(rep).dump(2) + "\n";
      if (!vf_out.empty()) emit(vf_out, report);
      if (g.json) {
        std::cout << report;
      } else {
        std::size_t passed = 0;
        for (const auto& c : rep.checks) {
          passed += c.pass ? 1 : 0;
          std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << std::setw(2) << c.id << ' ' << c.name << " ("
                    << std::fixed << std::setprecision(2) << c.seconds << " s): " << std::defaultfloat << c.summary
                    << '\n';
        }
        std::cout << "verify: " << passed << '/' << rep.checks.size() << " checks passed in " << std::fixed
                  << std::setprecision(1) << rep.seconds << " s\n";
      }
      return rep.all_pass ? kExitOk : kExitVerifyFailed;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
