#include "aquascale/topology.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "aquascale/rng.hpp"

namespace aquascale {

std::string to_string(Density d) {
  switch (d) {
    case Density::Extended: return "extended";
    case Density::Dense: return "dense";
    case Density::Random: return "random";
  }
  return "?";
}

Density density_from_string(const std::string& s) {
  if (s == "extended") return Density::Extended;
  if (s == "dense") return Density::Dense;
  if (s == "random") return Density::Random;
  throw std::invalid_argument("unknown density '" + s + "' (expected extended, dense or random)");
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::size_t NodeGrid::side() const { return static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n)))); }

double NodeGrid::spacing() const {
  return density == Density::Dense ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
}

double NodeGrid::extent() const {
  return density == Density::Dense ? 1.0 : std::sqrt(static_cast<double>(n));
}

std::size_t regular_side(std::size_t n) {
  const auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (n < 4 || s * s != n || s % 2 != 0)
    throw std::invalid_argument("n = " + std::to_string(n) +
                                " is invalid: regular grids need n >= 4 to be a perfect square with an even root "
                                "(e.g. 4, 16, 64, 256)");
  return s;
}

NodeGrid build_grid(std::size_t n, Density density) {
  if (density == Density::Random) throw std::invalid_argument("build_grid builds regular layouts; use build_random");
  const std::size_t side = regular_side(n);
  const std::size_t half = side / 2;
  NodeGrid g;
  g.n = n;
  g.density = density;
  g.positions.resize(n);
  const double s = g.spacing();
  for (std::size_t row = 0; row < side; ++row)
    for (std::size_t col = 0; col < side; ++col) {
      const double x = static_cast<double>(col) - static_cast<double>(half) + 1.0;
      const double y = static_cast<double>(row) + 1.0;
      g.positions[row * side + col] = {x * s, y * s};
    }
  return g;
}

NodeGrid build_random(std::size_t n, std::uint64_t seed) {
  if (n < 4) throw std::invalid_argument("random layouts need n >= 4");
  NodeGrid g;
  g.n = n;
  g.density = Density::Random;
  g.seed = seed;
  g.positions.resize(n);
  Philox rng(seed, 0);
  const double w = std::sqrt(static_cast<double>(n));
  for (auto& p : g.positions) {
    p.x = rng.uniform(0.0, w);
    p.y = rng.uniform(0.0, w);
  }
  return g;
}

SdMatching random_matching(std::size_t n, std::uint64_t seed) {
  SdMatching m;
  m.perm.resize(n);
  std::iota(m.perm.begin(), m.perm.end(), std::size_t{0});
  Philox rng(seed, 1);
  shuffle(m.perm, rng);
  return m;
}

bool is_bijection(const SdMatching& m) {
  std::vector<bool> seen(m.perm.size(), false);
  for (auto d : m.perm) {
    if (d >= m.perm.size() || seen[d]) return false;
    seen[d] = true;
  }
  return true;
}

CutPartition cut(const NodeGrid& grid) {
  CutPartition c;
  if (grid.regular()) {
    const std::size_t half = grid.side() / 2;
    for (std::size_t id = 0; id < grid.n; ++id) (grid.col(id) < half ? c.left : c.right).push_back(id);
  } else {
    const double mid = grid.extent() / 2.0;
    for (std::size_t id = 0; id < grid.n; ++id) (grid.positions[id].x < mid ? c.left : c.right).push_back(id);
  }
  return c;
}

std::size_t split_width(std::size_t n, double beta, double eps) {
  if (beta < 0.0) throw std::invalid_argument("beta must be non-negative");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const std::size_t half = regular_side(n) / 2;
  if (beta == 0.0) return half;
  if (beta > 0.5) return 0;
  const double w = std::ceil(std::pow(static_cast<double>(n), 0.5 - beta + eps));
  return std::min(half, static_cast<std::size_t>(std::max(0.0, w)));
}

CutPartition dense_split(const NodeGrid& grid, double beta, double eps) {
  if (grid.density != Density::Dense) throw std::invalid_argument("dense_split needs a dense regular grid");
  CutPartition c = cut(grid);
  const std::size_t xl = split_width(grid.n, beta, eps);
  c.near_width = xl;
  for (auto id : c.right) (grid.cut_offset(id) <= xl ? c.near_dst : c.far_dst).push_back(id);
  return c;
}

double max_empty_zone_width() { return 1.0 / (std::sqrt(7.0) * std::exp(0.25)); }

VertexLayout displace_to_vertices(const NodeGrid& g, double cbar) {
  if (g.density != Density::Random) throw std::invalid_argument("displace_to_vertices needs a random layout");
  if (!(cbar > 0.0) || !(cbar < max_empty_zone_width()))
    throw std::invalid_argument("cbar must lie in (0, 1/(sqrt(7) e^(1/4)))");
  VertexLayout out;
  out.cut_x = g.extent() / 2.0;
  out.moved.resize(g.n);
  const double w = g.extent();
  const auto last = static_cast<long>(std::ceil(w)) - 1;
  auto square = [&](const Point& p) {
    return std::pair<long, long>{std::clamp(static_cast<long>(std::floor(p.x)), 0L, last),
                                 std::clamp(static_cast<long>(std::floor(p.y)), 0L, last)};
  };
  std::map<std::pair<long, long>, std::size_t> occupancy;
  for (const auto& p : g.positions) ++occupancy[square(p)];

  std::map<std::tuple<bool, long, long>, std::size_t> site_index;
  for (std::size_t id = 0; id < g.n; ++id) {
    const Point& p = g.positions[id];
    const auto [i, j] = square(p);
    const bool left = p.x < out.cut_x;
    if (!left && p.x < out.cut_x + cbar) {
      ++out.removed;
      continue;
    }
    // Ties between the two vertices on the cut-facing edge go to the lower one.
    const double vx = left ? std::min(static_cast<double>(i + 1), out.cut_x)
                           : std::max(static_cast<double>(i), out.cut_x + cbar);
    const Point v{vx, static_cast<double>(j)};
    out.moved[id] = v;
    const auto key = std::make_tuple(left, i, j);
    auto it = site_index.find(key);
    if (it == site_index.end()) {
      site_index.emplace(key, out.sites.size());
      out.sites.push_back({v, 1, occupancy[{i, j}], left});
    } else {
      ++out.sites[it->second].multiplicity;
    }
  }
  return out;
}

std::size_t max_unit_square_occupancy(const NodeGrid& g) {
  const double w = g.extent();
  const auto per_side = static_cast<std::size_t>(std::ceil(w));
  std::vector<std::size_t> count(per_side * per_side, 0);
  for (const auto& p : g.positions) {
    const auto i = std::min(per_side - 1, static_cast<std::size_t>(std::max(0.0, std::floor(p.x))));
    const auto j = std::min(per_side - 1, static_cast<std::size_t>(std::max(0.0, std::floor(p.y))));
    ++count[j * per_side + i];
  }
  return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

void write_grid_csv(std::ostream& out, const NodeGrid& g) {
  out << "node_id,x,y\n";
  out << std::setprecision(17);
  for (std::size_t id = 0; id < g.n; ++id) out << id << ',' << g.positions[id].x << ',' << g.positions[id].y << '\n';
}

NodeGrid read_grid_csv(std::istream& in, Density density) {
  std::string line;
  if (!std::getline(in, line) || line != "node_id,x,y") throw std::invalid_argument("grid CSV must start with node_id,x,y");
  NodeGrid g;
  g.density = density;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::size_t id;
    char c1, c2;
    Point p;
    if (!(ss >> id >> c1 >> p.x >> c2 >> p.y) || c1 != ',' || c2 != ',')
      throw std::invalid_argument("malformed grid CSV row: " + line);
    if (id != g.positions.size()) throw std::invalid_argument("grid CSV node ids must be 0..n-1 in order");
    g.positions.push_back(p);
  }
  g.n = g.positions.size();
  if (density != Density::Random) regular_side(g.n);
  return g;
}

}  // namespace aquascale
