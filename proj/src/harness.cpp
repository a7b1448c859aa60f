#include "aquascale/harness.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "aquascale/numeric.hpp"

namespace aquascale {

std::string to_string(FrequencyMode m) { return m == FrequencyMode::Fixed ? "fixed" : "regime"; }

FrequencyMode frequency_mode_from_string(const std::string& s) {
  if (s == "fixed") return FrequencyMode::Fixed;
  if (s == "regime") return FrequencyMode::Regime;
  throw std::invalid_argument("unknown frequency mode '" + s + "' (expected fixed or regime)");
}

namespace {

std::vector<BoundKind> supported_kinds(Density d) {
  switch (d) {
    case Density::Extended: return {BoundKind::ExactSnrSum, BoundKind::ClosedFormUpper, BoundKind::MhLower};
    case Density::Dense: return {BoundKind::HybridDenseUpper, BoundKind::ClosedFormUpper, BoundKind::MhLower};
    case Density::Random: return {BoundKind::MhRandomLower};
  }
  return {};
}

bool has(const std::vector<BoundKind>& v, BoundKind k) { return std::find(v.begin(), v.end(), k) != v.end(); }

}  // namespace

std::vector<BoundKind> SweepSpec::effective_kinds() const { return kinds.empty() ? supported_kinds(density) : kinds; }

void SweepSpec::validate() const {
  if (n_list.empty() || beta_list.empty() || alpha_list.empty() || seeds.empty())
    throw std::invalid_argument("sweep lists must be non-empty");
  for (auto n : n_list) {
    if (density == Density::Random) {
      if (n < 4) throw std::invalid_argument("random layouts need n >= 4");
    } else {
      regular_side(n);
    }
  }
  for (double b : beta_list)
    if (!(b >= 0.0)) throw std::invalid_argument("beta values must be non-negative");
  for (double a : alpha_list)
    if (!(a >= 1.0 && a <= 2.0)) throw std::invalid_argument("alpha values must lie in [1, 2]");
  if (f_mode == FrequencyMode::Fixed && !(f_khz > 0.0)) throw std::invalid_argument("f_khz must be positive");
  const auto ok = supported_kinds(density);
  for (auto k : kinds)
    if (!has(ok, k))
      throw std::invalid_argument("bound kind " + to_string(k) + " is not available for " + to_string(density) +
                                  " layouts");
}

ChannelState channel_for(const SweepSpec& spec, std::size_t n, double beta, const ModelParams& model) {
  if (spec.f_mode == FrequencyMode::Fixed) return empirical_state(spec.f_khz, model.phys);
  return regime_state(n, beta, model.eps0, model.phys);
}

namespace {

std::vector<SweepRow> sweep_point(const SweepSpec& spec, const ModelParams& base, std::size_t n, double beta,
                                  double alpha, std::uint64_t seed) {
  const auto kinds = spec.effective_kinds();
  std::vector<SweepRow> rows(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    rows[i].n = n;
    rows[i].beta = beta;
    rows[i].alpha = alpha;
    rows[i].kind = kinds[i];
    rows[i].regime = classify_regime(beta);
    rows[i].seed = seed;
  }
  try {
    ModelParams m = base;
    m.phys.alpha = alpha;
    m.phys.validate();
    const ChannelState ch = channel_for(spec, n, beta, m);
    std::map<BoundKind, double> logs;
    if (spec.density == Density::Extended) {
      const NodeGrid g = build_grid(n, Density::Extended);
      if (has(kinds, BoundKind::ExactSnrSum) || has(kinds, BoundKind::ClosedFormUpper)) {
        const CutsetPair cs = cutset_upper_extended(g, cut(g), ch, m.phys, m.constants.extended_closed);
        logs[BoundKind::ExactSnrSum] = cs.exact.log_value;
        logs[BoundKind::ClosedFormUpper] = cs.closed.log_value;
      }
      if (has(kinds, BoundKind::MhLower)) {
        MhConfig cfg = m.mh;
        cfg.mode = MhMode::ExtendedFullPower;
        logs[BoundKind::MhLower] = mh_throughput(g, random_matching(n, seed), ch, cfg, m.phys, beta).simulated.log_value;
      }
    } else if (spec.density == Density::Dense) {
      const NodeGrid g = build_grid(n, Density::Dense);
      if (has(kinds, BoundKind::HybridDenseUpper) || has(kinds, BoundKind::ClosedFormUpper)) {
        const DenseCutset cs =
            cutset_upper_dense(g, dense_split(g, beta, m.eps), ch, beta, m.eps, m.phys, m.constants.dense_closed);
        logs[BoundKind::HybridDenseUpper] = cs.hybrid.log_value;
        logs[BoundKind::ClosedFormUpper] = cs.closed.log_value;
      }
      if (has(kinds, BoundKind::MhLower)) {
        MhConfig cfg = m.mh;
        cfg.mode = MhMode::DenseScaledPower;
        logs[BoundKind::MhLower] = mh_throughput(g, random_matching(n, seed), ch, cfg, m.phys, beta).simulated.log_value;
      }
    } else {
      const NodeGrid g = build_random(n, seed);
      logs[BoundKind::MhRandomLower] =
          mh_throughput_random(g, random_matching(n, seed), ch, m.mh, m.phys).simulated.log_value;
    }
    for (auto& r : rows) {
      r.f_khz = ch.f_khz;
      r.log_value = logs.at(r.kind);
      r.value = std::exp(r.log_value);
    }
  } catch (const std::exception& e) {
    for (auto& r : rows) {
      r.ok = false;
      r.error = e.what();
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.log_value = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return rows;
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

SweepTable run_sweep(const SweepSpec& spec, const ModelParams& model) {
  spec.validate();
  model.mh.validate();
  struct Point {
    std::size_t n;
    double beta, alpha;
    std::uint64_t seed;
  };
  std::vector<Point> pts;
  for (auto n : spec.n_list)
    for (double b : spec.beta_list)
      for (double a : spec.alpha_list)
        for (auto s : spec.seeds) pts.push_back({n, b, a, s});
  std::vector<std::vector<SweepRow>> parts(pts.size());
  parallel_for_each_index(pts.size(), [&](std::size_t i) {
    parts[i] = sweep_point(spec, model, pts[i].n, pts[i].beta, pts[i].alpha, pts[i].seed);
  });
  SweepTable t;
  for (auto& part : parts)
    for (auto& r : part) t.rows.push_back(std::move(r));
  return t;
}

void write_bounds_csv(std::ostream& out, const std::vector<ThroughputBound>& bounds) {
  out << "n,beta,f_khz,alpha,kind,value,regime\n";
  for (const auto& b : bounds)
    out << b.n << ',' << num(b.beta) << ',' << num(b.f_khz) << ',' << num(b.alpha) << ',' << to_string(b.kind) << ','
        << num(b.value) << ',' << to_string(b.regime) << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "n,beta,f_khz,alpha,kind,value,regime,seed,log_value,status\n";
  for (const auto& r : table.rows) {
    std::string status = r.ok ? "ok" : "error: " + r.error;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << r.n << ',' << num(r.beta) << ',' << num(r.f_khz) << ',' << num(r.alpha) << ',' << to_string(r.kind) << ','
        << num(r.value) << ',' << to_string(r.regime) << ',' << r.seed << ',' << num(r.log_value) << ',' << status
        << '\n';
  }
}

void write_gnuplot(std::ostream& out, const SweepTable& table) {
  std::vector<std::tuple<BoundKind, double, double>> blocks;
  for (const auto& r : table.rows) {
    const auto key = std::make_tuple(r.kind, r.beta, r.alpha);
    if (std::find(blocks.begin(), blocks.end(), key) == blocks.end()) blocks.push_back(key);
  }
  bool first = true;
  for (const auto& [kind, beta, alpha] : blocks) {
    if (!first) out << "\n\n";
    first = false;
    out << "# kind=" << to_string(kind) << " beta=" << num(beta) << " alpha=" << num(alpha) << "\n# n seed value log_value\n";
    for (const auto& r : table.rows)
      if (r.kind == kind && r.beta == beta && r.alpha == alpha && r.ok)
        out << r.n << ' ' << r.seed << ' ' << num(r.value) << ' ' << num(r.log_value) << '\n';
  }
}

FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit needs equally many x and y values");
  if (x.size() < 3) throw std::invalid_argument("fit needs at least three points");
  const double m = static_cast<double>(x.size());
  KahanSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / m, my = sy.value() / m;
  KahanSum sxx, sxy, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
    syy.add((y[i] - my) * (y[i] - my));
  }
  const double scale = std::max(1.0, std::abs(mx));
  if (!(sxx.value() > 1e-24 * scale * scale * m)) throw std::invalid_argument("fit x range is degenerate");
  FitResult f;
  f.points = x.size();
  f.slope = sxy.value() / sxx.value();
  f.intercept = my - f.slope * mx;
  KahanSum sres;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double res = y[i] - (f.slope * x[i] + f.intercept);
    sres.add(res * res);
    f.residual_max = std::max(f.residual_max, std::abs(res));
  }
  f.r_squared = syy.value() > 0.0 ? std::clamp(1.0 - sres.value() / syy.value(), 0.0, 1.0) : 1.0;
  return f;
}

std::map<std::size_t, double> seed_mean_log(const SweepTable& table, BoundKind kind, double beta, double alpha) {
  std::map<std::size_t, std::pair<KahanSum, std::size_t>> acc;
  for (const auto& r : table.rows)
    if (r.ok && r.kind == kind && std::abs(r.beta - beta) < 1e-12 && std::abs(r.alpha - alpha) < 1e-12 &&
        std::isfinite(r.log_value)) {
      acc[r.n].first.add(r.log_value);
      ++acc[r.n].second;
    }
  std::map<std::size_t, double> out;
  for (auto& [n, a] : acc) out[n] = a.first.value() / static_cast<double>(a.second);
  return out;
}

FitResult fit_exponent(const SweepTable& table, BoundKind kind, double beta, double alpha, FitAxis axis) {
  std::vector<double> x, y;
  for (const auto& [n, v] : seed_mean_log(table, kind, beta, alpha)) {
    const double nn = static_cast<double>(n);
    x.push_back(axis == FitAxis::LogN ? std::log(nn) : std::pow(nn, beta - 0.5));
    y.push_back(v);
  }
  return fit_line(x, y);
}

RatioCheck order_ratio_check(const SweepTable& table, BoundKind numerator, BoundKind denominator, double threshold) {
  using Key = std::tuple<std::size_t, double, double, std::uint64_t>;
  std::map<Key, double> num_rows, den_rows;
  for (const auto& r : table.rows) {
    if (!r.ok) continue;
    const Key k{r.n, r.beta, r.alpha, r.seed};
    if (r.kind == numerator) num_rows[k] = r.log_value;
    if (r.kind == denominator) den_rows[k] = r.log_value;
  }
  if (num_rows.size() != den_rows.size()) throw std::invalid_argument("ratio check rows do not pair up");
  RatioCheck rc;
  rc.log_min_ratio = std::numeric_limits<double>::infinity();
  rc.log_max_ratio = -std::numeric_limits<double>::infinity();
  for (const auto& [k, v] : num_rows) {
    auto it = den_rows.find(k);
    if (it == den_rows.end()) throw std::invalid_argument("ratio check: numerator row without a denominator");
    const double lr = v == it->second ? 0.0 : v - it->second;
    rc.log_min_ratio = std::min(rc.log_min_ratio, lr);
    rc.log_max_ratio = std::max(rc.log_max_ratio, lr);
    ++rc.pairs;
  }
  if (rc.pairs == 0) throw std::invalid_argument("ratio check found no rows");
  rc.min_ratio = std::exp(rc.log_min_ratio);
  rc.max_ratio = std::exp(rc.log_max_ratio);
  rc.bounded = rc.log_max_ratio - rc.log_min_ratio <= std::log(threshold) + 1e-12;
  return rc;
}

}  // namespace aquascale
