#include "aquascale/routing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

#include "aquascale/numeric.hpp"

namespace aquascale {

std::string to_string(MhMode m) {
  switch (m) {
    case MhMode::ExtendedFullPower: return "extended";
    case MhMode::DenseScaledPower: return "dense";
    case MhMode::RandomLogCells: return "random";
  }
  return "?";
}

MhMode mh_mode_from_string(const std::string& s) {
  if (s == "extended") return MhMode::ExtendedFullPower;
  if (s == "dense") return MhMode::DenseScaledPower;
  if (s == "random") return MhMode::RandomLogCells;
  throw std::invalid_argument("unknown MH mode '" + s + "' (expected extended, dense or random)");
}

std::size_t MhConfig::reuse_period() const {
  const auto q = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(tdma_reuse))));
  return q;
}

void MhConfig::validate() const {
  const std::size_t q = reuse_period();
  if (tdma_reuse < 1 || q * q != tdma_reuse) throw std::invalid_argument("tdma_reuse must be a perfect square >= 1");
  if (!(delta >= std::numbers::sqrt2 - 1e-12)) throw std::invalid_argument("delta must be at least sqrt(2)");
}

double log_tx_power(MhMode mode, std::size_t n, const ChannelState& ch, const PhysicalParams& p) {
  const double lp = std::log(p.tx_power);
  if (mode != MhMode::DenseScaledPower) return lp;
  const double nn = static_cast<double>(n);
  const double arm = ch.log_a / std::sqrt(nn) + std::log(ch.noise) - p.alpha / 2.0 * std::log(nn);
  return lp + std::min(0.0, arm);
}

double tx_power(MhMode mode, std::size_t n, const ChannelState& ch, const PhysicalParams& p) {
  return std::exp(log_tx_power(mode, n, ch, p));
}

double random_cell_side(std::size_t n) { return std::sqrt(2.0 * std::log2(static_cast<double>(n))); }

std::size_t CellTiling::cell_of(const Point& pt) const {
  const auto clampi = [&](double v) {
    const double c = std::floor(v / side);
    if (c < 0.0) return std::size_t{0};
    return std::min(per_side - 1, static_cast<std::size_t>(c));
  };
  return clampi(pt.y - origin_y) * per_side + clampi(pt.x - origin_x);
}

CellTiling make_tiling(const NodeGrid& grid) {
  CellTiling t;
  if (grid.regular()) {
    const std::size_t side = regular_side(grid.n);
    const double s = grid.spacing();
    t.per_side = side;
    t.side = s;
    t.origin_x = (0.5 - static_cast<double>(side / 2)) * s;
    t.origin_y = 0.5 * s;
    return t;
  }
  const double w = grid.extent();
  t.per_side = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(w / random_cell_side(grid.n))));
  t.side = w / static_cast<double>(t.per_side);
  return t;
}

std::vector<std::pair<long, long>> lattice_cell_path(long x0, long y0, long x1, long y1) {
  const long nx = std::labs(x1 - x0), ny = std::labs(y1 - y0);
  const long sx = x1 > x0 ? 1 : -1, sy = y1 > y0 ? 1 : -1;
  std::vector<std::pair<long, long>> cells{{x0, y0}};
  cells.reserve(static_cast<std::size_t>(nx + ny + 1));
  long x = x0, y = y0, ix = 0, iy = 0;
  while (ix < nx || iy < ny) {
    // compare the parameters (1+2ix)/(2nx) and (1+2iy)/(2ny) of the next crossings
    if (iy >= ny || (ix < nx && (1 + 2 * ix) * ny <= (1 + 2 * iy) * nx)) {
      x += sx;
      ++ix;
    } else {
      y += sy;
      ++iy;
    }
    cells.emplace_back(x, y);
  }
  return cells;
}

std::vector<std::size_t> segment_cells(const Point& a, const Point& b, const CellTiling& t) {
  const std::size_t c0 = t.cell_of(a), c1 = t.cell_of(b);
  auto [cx, cy] = t.coords(c0);
  const auto [ex, ey] = t.coords(c1);
  std::vector<std::size_t> cells{c0};
  const double dx = b.x - a.x, dy = b.y - a.y;
  const long sx = ex > cx ? 1 : -1, sy = ey > cy ? 1 : -1;
  const double inf = std::numeric_limits<double>::infinity();
  const double ax = a.x - t.origin_x, ay = a.y - t.origin_y;
  double tmx = dx != 0.0 ? ((static_cast<double>(cx) + (sx > 0 ? 1.0 : 0.0)) * t.side - ax) / dx : inf;
  double tmy = dy != 0.0 ? ((static_cast<double>(cy) + (sy > 0 ? 1.0 : 0.0)) * t.side - ay) / dy : inf;
  const double tdx = dx != 0.0 ? t.side / std::abs(dx) : inf;
  const double tdy = dy != 0.0 ? t.side / std::abs(dy) : inf;
  // step counts are fixed by the end cell, so rounding can only reorder steps
  std::size_t rx = ex > cx ? ex - cx : cx - ex;
  std::size_t ry = ey > cy ? ey - cy : cy - ey;
  while (rx + ry > 0) {
    if (ry == 0 || (rx > 0 && tmx <= tmy)) {
      cx = static_cast<std::size_t>(static_cast<long>(cx) + sx);
      tmx += tdx;
      --rx;
    } else {
      cy = static_cast<std::size_t>(static_cast<long>(cy) + sy);
      tmy += tdy;
      --ry;
    }
    cells.push_back(cy * t.per_side + cx);
  }
  return cells;
}

std::vector<std::vector<std::size_t>> cell_occupants(const NodeGrid& grid, const CellTiling& tiling) {
  std::vector<std::vector<std::size_t>> occ(tiling.per_side * tiling.per_side);
  for (std::size_t id = 0; id < grid.n; ++id) occ[tiling.cell_of(grid.positions[id])].push_back(id);
  return occ;
}

Route build_route(std::size_t src, std::size_t dst, const NodeGrid& grid, const CellTiling& tiling,
                  const std::vector<std::vector<std::size_t>>& occupants) {
  if (src == dst) throw std::invalid_argument("a route needs distinct endpoints");
  if (src >= grid.n || dst >= grid.n) throw std::out_of_range("route endpoint out of range");
  Route r;
  r.src = src;
  r.dst = dst;
  std::vector<std::size_t> cells;
  if (grid.regular()) {
    for (auto [x, y] : lattice_cell_path(static_cast<long>(grid.col(src)), static_cast<long>(grid.row(src)),
                                         static_cast<long>(grid.col(dst)), static_cast<long>(grid.row(dst))))
      cells.push_back(static_cast<std::size_t>(y) * tiling.per_side + static_cast<std::size_t>(x));
    r.nodes = cells;  // one node per cell, same index
  } else {
    cells = segment_cells(grid.positions[src], grid.positions[dst], tiling);
    r.nodes.push_back(src);
    for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
      if (occupants[cells[i]].empty())
        throw std::runtime_error("route " + std::to_string(src) + "->" + std::to_string(dst) + " crosses empty cell " +
                                 std::to_string(cells[i]));
      r.nodes.push_back(occupants[cells[i]].front());
    }
    r.nodes.push_back(dst);
  }
  r.cells.assign(cells.begin(), cells.end() - 1);
  if (cells.size() == 1) r.cells = cells;
  for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i)
    r.hop_distances.push_back(distance(grid.positions[r.nodes[i]], grid.positions[r.nodes[i + 1]]));
  return r;
}

std::vector<std::size_t> coslot_interferers(const NodeGrid& grid, const CellTiling& tiling,
                                            const std::vector<std::vector<std::size_t>>& occupants,
                                            std::size_t tx_cell, std::size_t receiver, std::size_t q) {
  std::vector<std::size_t> out;
  const auto [tx, ty] = tiling.coords(tx_cell);
  const Point& rp = grid.positions[receiver];
  for (std::size_t cy = ty % q; cy < tiling.per_side; cy += q)
    for (std::size_t cx = tx % q; cx < tiling.per_side; cx += q) {
      const std::size_t c = cy * tiling.per_side + cx;
      if (c == tx_cell) continue;
      std::size_t best = grid.n;
      double best_d = std::numeric_limits<double>::infinity();
      for (auto id : occupants[c]) {
        if (id == receiver) continue;
        const double d = distance(grid.positions[id], rp);
        if (d < best_d) {
          best_d = d;
          best = id;
        }
      }
      if (best < grid.n) out.push_back(best);
    }
  return out;
}

double log_interference_exact(const NodeGrid& grid, const std::vector<std::size_t>& active, std::size_t receiver,
                              const ChannelState& ch, double log_ptx, const PhysicalParams& p) {
  LogSumExp acc;
  const Point& rp = grid.positions[receiver];
  for (auto i : active) {
    if (i == receiver) throw std::invalid_argument("the receiver cannot be in the active set");
    acc.add(log_ptx - log_attenuation(distance(grid.positions[i], rp), ch.log_a, p));
  }
  return acc.value();
}

double interference_exact(const NodeGrid& grid, const std::vector<std::size_t>& active, std::size_t receiver,
                          const ChannelState& ch, double log_ptx, const PhysicalParams& p) {
  return std::exp(log_interference_exact(grid, active, receiver, ch, log_ptx, p));
}

namespace {

template <class F>
void for_each_adjacent_pair(std::size_t side, F&& f) {
  for (std::size_t ty = 0; ty < side; ++ty)
    for (std::size_t tx = 0; tx < side; ++tx) {
      if (tx > 0) f(tx, ty, tx - 1, ty);
      if (tx + 1 < side) f(tx, ty, tx + 1, ty);
      if (ty > 0) f(tx, ty, tx, ty - 1);
      if (ty + 1 < side) f(tx, ty, tx, ty + 1);
    }
}

std::size_t udiff(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

}  // namespace

double fit_layer_constant(std::size_t n, std::size_t tdma_reuse) {
  const std::size_t side = regular_side(n);
  MhConfig cfg;
  cfg.tdma_reuse = tdma_reuse;
  cfg.validate();
  const std::size_t q = cfg.reuse_period();
  double best = 0.0;
  for_each_adjacent_pair(side, [&](std::size_t tx, std::size_t ty, std::size_t rx, std::size_t ry) {
    std::vector<std::size_t> count(side, 0);
    for (std::size_t cy = ty % q; cy < side; cy += q)
      for (std::size_t cx = tx % q; cx < side; cx += q) {
        if ((cx == tx && cy == ty) || (cx == rx && cy == ry)) continue;
        ++count[std::max(udiff(cx, rx), udiff(cy, ry))];
      }
    for (std::size_t k = 1; k < side; ++k)
      best = std::max(best, static_cast<double>(count[k]) / (8.0 * static_cast<double>(k)));
  });
  return best;
}

double extended_interference_log_constant(const PhysicalParams& p, const BoundConstants& c) {
  const double am = c.interference_a_min;
  return std::log(8.0 * c.layer * p.tx_power / p.c0 * am / (am - 1.0));
}

double log_interference_upper_extended(const ChannelState& ch, const PhysicalParams& p, const BoundConstants& c) {
  if (ch.log_a < std::log(c.interference_a_min))
    throw std::domain_error("the extended interference constant covers a(f) >= " + std::to_string(c.interference_a_min));
  return extended_interference_log_constant(p, c) - ch.log_a;
}

double interference_upper_extended(const ChannelState& ch, const PhysicalParams& p, const BoundConstants& c) {
  return std::exp(log_interference_upper_extended(ch, p, c));
}

double log_interference_upper_dense(std::size_t n, double beta, double eps0, const PhysicalParams& p,
                                    const BoundConstants& c) {
  if (beta < 0.0) throw std::invalid_argument("beta must be non-negative");
  const double nn = static_cast<double>(n);
  const double ln_n = std::log(nn);
  const double big_l = std::log1p(eps0);
  const double log_k0 = std::log(8.0 * c.layer * p.tx_power / p.c0);
  const double l_ref = log_absorption_coeff(p.f_ref_khz, p);
  const double a_off = l_ref - p.c1 * p.f_ref_khz * p.f_ref_khz;  // ln a = a_off + big_l n^beta
  const double f_unit = beta == 0.0 ? p.f_ref_khz : std::sqrt(big_l / p.c1);
  const double log_n0 = std::log(noise_psd(f_unit, p));
  const double a5 = p.noise.a5;

  if (beta < 0.5) {
    const double decay = -beta * a5 / 2.0 * ln_n;
    if (p.alpha < 2.0) {
      const double l_min = beta == 0.0 ? l_ref : std::min(big_l, big_l + a_off * std::pow(4.0, -beta));
      const double cs = 1.0 + std::tgamma(2.0 - p.alpha) * std::pow(l_min / 2.0, p.alpha - 2.0);
      const double grow = std::max((0.5 - beta) * (2.0 - p.alpha) * ln_n, std::log(ln_n));
      return log_k0 + log_n0 + std::log(cs) + grow + decay;
    }
    return log_k0 + log_n0 + std::log(1.0 / std::log(4.0) + 0.5) + std::log(ln_n) + decay;
  }
  const double lambda_lo = big_l * std::pow(4.0, beta - 0.5) + std::min(0.0, a_off / 2.0);
  if (!(lambda_lo > 0.0)) throw std::domain_error("interference bound needs a positive per-spacing absorption");
  const double geo = -std::log1p(-std::exp(-lambda_lo));
  if (beta == 0.5) return log_k0 + log_n0 + geo - a5 / 4.0 * ln_n;
  const double lambda = (a_off + big_l * std::pow(nn, beta)) / std::sqrt(nn);
  return log_k0 + geo + p.alpha / 2.0 * ln_n - lambda;
}

double max_log_interference_grid(const NodeGrid& grid, const ChannelState& ch, double log_ptx, std::size_t tdma_reuse,
                                 const PhysicalParams& p) {
  if (!grid.regular()) throw std::invalid_argument("max_log_interference_grid needs a regular grid");
  MhConfig cfg;
  cfg.tdma_reuse = tdma_reuse;
  cfg.validate();
  const std::size_t q = cfg.reuse_period();
  const std::size_t side = grid.side();
  std::vector<double> best(grid.n, -std::numeric_limits<double>::infinity());
  parallel_for_each_index(grid.n, [&](std::size_t t) {
    const std::size_t tx = grid.col(t), ty = grid.row(t);
    const long offs[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    for (auto& o : offs) {
      const long rx = static_cast<long>(tx) + o[0], ry = static_cast<long>(ty) + o[1];
      if (rx < 0 || ry < 0 || rx >= static_cast<long>(side) || ry >= static_cast<long>(side)) continue;
      const std::size_t r = grid.id(static_cast<std::size_t>(rx), static_cast<std::size_t>(ry));
      LogSumExp acc;
      for (std::size_t cy = ty % q; cy < side; cy += q)
        for (std::size_t cx = tx % q; cx < side; cx += q) {
          const std::size_t c = grid.id(cx, cy);
          if (c == t || c == r) continue;
          acc.add(log_ptx - log_attenuation(distance(grid.positions[c], grid.positions[r]), ch.log_a, p));
        }
      best[t] = std::max(best[t], acc.value());
    }
  });
  return *std::max_element(best.begin(), best.end());
}

double log_per_hop_rate(double log_pr, double log_pi, double noise) {
  const double log_sinr = log_pr - log_add(std::log(noise), log_pi);
  // ln log2(1+x); for tiny x, ln(1+x) = x (1 - x/2 + ...)
  if (log_sinr < -30.0) return log_sinr - std::log(std::numbers::ln2);
  return std::log(log2_1p_exp(log_sinr));
}

double per_hop_rate(double log_pr, double log_pi, double noise) {
  const double log_sinr = log_pr - log_add(std::log(noise), log_pi);
  return log2_1p_exp(log_sinr);
}

double log_mh_closed_form(MhMode mode, std::size_t n, double beta, const ChannelState& ch, const PhysicalParams& p,
                          double delta) {
  const double nn = static_cast<double>(n);
  const double ln_n = std::log(nn);
  switch (mode) {
    case MhMode::ExtendedFullPower: return 0.5 * ln_n - ch.log_a - std::log(ch.noise);
    case MhMode::DenseScaledPower:
      if (beta < 0.5) return 0.5 * ln_n - std::max((0.5 - beta) * (2.0 - p.alpha) * ln_n, std::log(ln_n));
      if (beta == 0.5) return 0.5 * ln_n;
      return (1.0 + p.alpha + beta * p.noise.a5) / 2.0 * ln_n - ch.log_a / std::sqrt(nn);
    case MhMode::RandomLogCells: {
      const double l2 = std::log2(nn);
      return 0.5 * ln_n - (p.alpha + 1.0) / 2.0 * std::log(l2) - delta * std::sqrt(l2) * ch.log_a -
             std::log(ch.noise);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

struct Hop {
  std::size_t tx;
  std::size_t rx;
  std::size_t cell;
  bool operator<(const Hop& o) const { return std::tie(tx, rx, cell) < std::tie(o.tx, o.rx, o.cell); }
  bool operator==(const Hop& o) const { return tx == o.tx && rx == o.rx && cell == o.cell; }
};

MhReport simulate(const NodeGrid& grid, const SdMatching& matching, const ChannelState& ch, const MhConfig& cfg,
                  const PhysicalParams& p, double beta, BoundKind kind) {
  cfg.validate();
  if (matching.perm.size() != grid.n || !is_bijection(matching))
    throw std::invalid_argument("matching must be a permutation of the grid's nodes");
  const CellTiling tiling = make_tiling(grid);
  const auto occupants = cell_occupants(grid, tiling);
  const std::size_t q = cfg.reuse_period();

  MhReport rep;
  rep.n = grid.n;
  rep.mode = cfg.mode;
  rep.f_khz = ch.f_khz;
  rep.beta = beta;
  rep.cell_load.assign(tiling.per_side * tiling.per_side, 0);

  std::vector<Hop> hops;
  for (std::size_t s = 0; s < grid.n; ++s) {
    const std::size_t d = matching.perm[s];
    if (d == s) continue;
    Route r;
    try {
      r = build_route(s, d, grid, tiling, occupants);
    } catch (const std::runtime_error&) {
      const auto cells = segment_cells(grid.positions[s], grid.positions[d], tiling);
      std::size_t empty = cells.front();
      for (std::size_t i = 1; i + 1 < cells.size(); ++i)
        if (occupants[cells[i]].empty()) {
          empty = cells[i];
          break;
        }
      rep.failures.push_back({s, d, empty});
      continue;
    }
    for (std::size_t h = 0; h < r.hops(); ++h) {
      ++rep.cell_load[r.cells[h]];
      hops.push_back({r.nodes[h], r.nodes[h + 1], r.cells[h]});
    }
    ++rep.active_pairs;
    rep.routes.push_back(std::move(r));
  }
  std::sort(hops.begin(), hops.end());
  hops.erase(std::unique(hops.begin(), hops.end()), hops.end());

  const double log_ptx = log_tx_power(cfg.mode, grid.n, ch, p);
  std::vector<double> log_rates(hops.size());
  parallel_for_each_index(hops.size(), [&](std::size_t i) {
    const Hop& h = hops[i];
    const auto active = coslot_interferers(grid, tiling, occupants, h.cell, h.rx, q);
    const double log_pi = log_interference_exact(grid, active, h.rx, ch, log_ptx, p);
    const double log_pr = log_ptx - log_attenuation(distance(grid.positions[h.tx], grid.positions[h.rx]), ch.log_a, p);
    log_rates[i] = log_per_hop_rate(log_pr, log_pi, ch.noise);
  });
  double log_min = std::numeric_limits<double>::infinity();
  for (double v : log_rates) log_min = std::min(log_min, v);
  rep.max_cell_load = rep.cell_load.empty() ? 0 : *std::max_element(rep.cell_load.begin(), rep.cell_load.end());

  double log_t = -std::numeric_limits<double>::infinity();
  if (!hops.empty()) {
    rep.log_min_hop_rate = log_min;
    rep.min_hop_rate = std::exp(log_min);
    log_t = std::log(static_cast<double>(rep.active_pairs)) + log_min -
            std::log(static_cast<double>(rep.max_cell_load * cfg.tdma_reuse));
  }
  rep.simulated = make_bound(log_t, kind, beta, grid.n, ch.f_khz, p.alpha);
  rep.closed_form = make_bound(log_mh_closed_form(cfg.mode, grid.n, beta, ch, p, cfg.delta), kind, beta, grid.n,
                               ch.f_khz, p.alpha);
  rep.log_ratio = rep.simulated.log_value - rep.closed_form.log_value;
  return rep;
}

}  // namespace

MhReport mh_throughput(const NodeGrid& grid, const SdMatching& matching, const ChannelState& ch, const MhConfig& cfg,
                       const PhysicalParams& p, double beta) {
  if (cfg.mode == MhMode::RandomLogCells) return mh_throughput_random(grid, matching, ch, cfg, p);
  const Density want = cfg.mode == MhMode::ExtendedFullPower ? Density::Extended : Density::Dense;
  if (grid.density != want)
    throw std::invalid_argument("MH mode " + to_string(cfg.mode) + " needs a " + to_string(want) + " grid");
  return simulate(grid, matching, ch, cfg, p, beta, BoundKind::MhLower);
}

MhReport mh_throughput_random(const NodeGrid& grid, const SdMatching& matching, const ChannelState& ch,
                              const MhConfig& cfg, const PhysicalParams& p) {
  if (grid.density != Density::Random) throw std::invalid_argument("random-mode MH needs a random layout");
  MhConfig c = cfg;
  c.mode = MhMode::RandomLogCells;
  return simulate(grid, matching, ch, c, p, 0.0, BoundKind::MhRandomLower);
}

std::string mh_report_json(const MhReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["mode"] = to_string(r.mode);
  j["f_khz"] = r.f_khz;
  j["beta"] = r.beta;
  j["simulated_T"] = r.simulated.value;
  j["closed_form_T"] = r.closed_form.value;
  j["ratio"] = std::exp(r.log_ratio);
  j["min_hop_rate"] = r.min_hop_rate;
  j["max_cell_load"] = r.max_cell_load;
  j["failures"] = r.failures.size();
  j["log_simulated_T"] = r.simulated.log_value;
  j["log_closed_form_T"] = r.closed_form.log_value;
  return j.dump();
}

}  // namespace aquascale
