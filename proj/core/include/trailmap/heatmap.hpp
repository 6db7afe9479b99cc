#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "trailmap/event_model.hpp"

namespace trailmap {

inline constexpr int kDefaultGridSize = 64;
inline constexpr double kDefaultSigma = 1.5;

// Row-major intensity grid over the unit canvas. Cell (i, j) covers
// x in [i/W, (i+1)/W) and y in [j/H, (j+1)/H).
class HeatGrid {
 public:
  HeatGrid(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return cells_.size(); }
  double sigma() const { return sigma_; }
  void set_sigma(double sigma) { sigma_ = sigma; }

  double& at(int i, int j) { return cells_[index(i, j)]; }
  double at(int i, int j) const { return cells_[index(i, j)]; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(i);
  }

  std::span<double> cells() { return cells_; }
  std::span<const double> cells() const { return cells_; }

  double total_mass() const;
  double max_value() const;

  // Cell containing a unit-square point; x = 1 or y = 1 map to the last cell.
  int column_of(double x) const;
  int row_of(double y) const;
  std::size_t cell_of(double x, double y) const { return index(column_of(x), row_of(y)); }

  // Cell center in normalized coordinates.
  double center_x(int i) const { return (i + 0.5) / width_; }
  double center_y(int j) const { return (j + 0.5) / height_; }

  friend bool operator==(const HeatGrid&, const HeatGrid&) = default;

 private:
  int width_;
  int height_;
  double sigma_ = 0.0;
  std::vector<double> cells_;
};

// Adds 1 per positional event. Throws kInvalidArgument for non-positive sizes.
HeatGrid accumulate_grid(std::span<const RawEvent> events, int width, int height);

// Dwell weighting: each positional sample is weighted by the milliseconds
// until the next event of its session (the final event weighs 0).
HeatGrid accumulate_grid_dwell(std::span<const Session> sessions, int width, int height);

// Truncated Gaussian (radius ceil(3 sigma)) whose weights are renormalized
// per source cell over the in-grid footprint, so mass is conserved exactly up
// to rounding. sigma = 0 returns the input unchanged.
HeatGrid smooth_grid(const HeatGrid& grid, double sigma);

// Divides by the maximum cell; an all-zero grid is returned as is.
HeatGrid normalize_grid(const HeatGrid& grid);

// Binary P5 graymap of normalize_grid(grid), value round(255 * cell).
void write_grid_pgm(std::ostream& out, const HeatGrid& grid);

}  // namespace trailmap
