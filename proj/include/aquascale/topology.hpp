#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aquascale {

enum class Density { Extended, Dense, Random };

std::string to_string(Density d);
Density density_from_string(const std::string& s);

struct Point {
  double x;
  double y;
};

double distance(const Point& a, const Point& b);

// Regular grids index nodes as id = row * side + col, col growing left to
// right. Columns [0, side/2) hold the sources.
struct NodeGrid {
  std::size_t n = 0;
  Density density = Density::Extended;
  std::vector<Point> positions;
  std::uint64_t seed = 0;

  bool regular() const { return density != Density::Random; }
  std::size_t side() const;   // sqrt(n), exact for regular grids
  double spacing() const;     // 1 (extended) or 1/sqrt(n) (dense)
  double extent() const;      // region width in network units
  std::size_t col(std::size_t id) const { return id % side(); }
  std::size_t row(std::size_t id) const { return id / side(); }
  std::size_t id(std::size_t col, std::size_t row) const { return row * side() + col; }
  // Horizontal lattice index of a right-half node, 1..side/2.
  std::size_t cut_offset(std::size_t id) const { return col(id) - side() / 2 + 1; }
};

// Returns sqrt(n) or throws std::invalid_argument if n is not a perfect
// square with an even root.
std::size_t regular_side(std::size_t n);

NodeGrid build_grid(std::size_t n, Density density);
NodeGrid build_random(std::size_t n, std::uint64_t seed);

struct SdMatching {
  std::vector<std::size_t> perm;  // dest[i] = perm[i]
};

SdMatching random_matching(std::size_t n, std::uint64_t seed);
bool is_bijection(const SdMatching& m);

struct CutPartition {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  std::optional<std::size_t> near_width;
  std::vector<std::size_t> near_dst;
  std::vector<std::size_t> far_dst;
};

CutPartition cut(const NodeGrid& grid);
// Number of destination columns kept in the bandwidth-limited group.
std::size_t split_width(std::size_t n, double beta, double eps);
CutPartition dense_split(const NodeGrid& grid, double beta, double eps);

// Random layout collapsed onto unit-square vertices. Each occupied square
// contributes one site; left-half squares move right (toward the cut), right
// half squares move left but no closer than cbar to the cut.
struct VertexSite {
  Point vertex;
  std::size_t multiplicity;
  std::size_t occupancy;  // nodes in the square before removal
  bool left;
};

struct VertexLayout {
  std::vector<VertexSite> sites;
  std::vector<std::optional<Point>> moved;  // per node; empty if removed
  std::size_t removed = 0;
  double cut_x = 0.0;
};

double max_empty_zone_width();
VertexLayout displace_to_vertices(const NodeGrid& random_grid, double cbar);

// Largest node count in any of the unit squares tiling the region.
std::size_t max_unit_square_occupancy(const NodeGrid& grid);

void write_grid_csv(std::ostream& out, const NodeGrid& grid);
NodeGrid read_grid_csv(std::istream& in, Density density);

}  // namespace aquascale
