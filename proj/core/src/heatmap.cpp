#include "trailmap/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "trailmap/error.hpp"

namespace trailmap {
namespace {

void check_size(int width, int height) {
  if (width < 1 || height < 1) {
    throw invalid_argument("grid size must be positive, got " + std::to_string(width) + "x" +
                           std::to_string(height));
  }
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  for (int d = -radius; d <= radius; ++d) {
    k[static_cast<std::size_t>(d + radius)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
  }
  return k;
}

// Scatters each source sample along one axis with its kernel footprint
// normalized to 1 over the in-range targets.
void scatter_axis(std::span<const double> in, std::span<double> out, int length, int stride,
                  int count, int outer_stride, std::span<const double> kernel, int radius) {
  std::vector<double> inv_norm(static_cast<std::size_t>(length));
  for (int s = 0; s < length; ++s) {
    const int lo = std::max(0, s - radius);
    const int hi = std::min(length - 1, s + radius);
    double z = 0.0;
    for (int p = lo; p <= hi; ++p) z += kernel[static_cast<std::size_t>(p - s + radius)];
    inv_norm[static_cast<std::size_t>(s)] = 1.0 / z;
  }
  for (int line = 0; line < count; ++line) {
    const std::size_t base = static_cast<std::size_t>(line) * static_cast<std::size_t>(outer_stride);
    for (int s = 0; s < length; ++s) {
      const double v = in[base + static_cast<std::size_t>(s) * static_cast<std::size_t>(stride)];
      if (v == 0.0) continue;
      const double w = v * inv_norm[static_cast<std::size_t>(s)];
      const int lo = std::max(0, s - radius);
      const int hi = std::min(length - 1, s + radius);
      for (int p = lo; p <= hi; ++p) {
        out[base + static_cast<std::size_t>(p) * static_cast<std::size_t>(stride)] +=
            w * kernel[static_cast<std::size_t>(p - s + radius)];
      }
    }
  }
}

}  // namespace

HeatGrid::HeatGrid(int width, int height) : width_(width), height_(height) {
  check_size(width, height);
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0);
}

double HeatGrid::total_mass() const { return std::accumulate(cells_.begin(), cells_.end(), 0.0); }

double HeatGrid::max_value() const {
  return cells_.empty() ? 0.0 : *std::max_element(cells_.begin(), cells_.end());
}

int HeatGrid::column_of(double x) const {
  return std::clamp(static_cast<int>(std::floor(x * width_)), 0, width_ - 1);
}

int HeatGrid::row_of(double y) const {
  return std::clamp(static_cast<int>(std::floor(y * height_)), 0, height_ - 1);
}

HeatGrid accumulate_grid(std::span<const RawEvent> events, int width, int height) {
  HeatGrid grid(width, height);
  for (const auto& e : events) {
    if (!e.positional()) continue;
    grid.cells()[grid.cell_of(*e.x, *e.y)] += 1.0;
  }
  return grid;
}

HeatGrid accumulate_grid_dwell(std::span<const Session> sessions, int width, int height) {
  HeatGrid grid(width, height);
  for (const auto& s : sessions) {
    for (std::size_t k = 0; k + 1 < s.events.size(); ++k) {
      const auto& e = s.events[k];
      if (!e.positional()) continue;
      const auto dwell = static_cast<double>(s.events[k + 1].t_ms - e.t_ms);
      grid.cells()[grid.cell_of(*e.x, *e.y)] += dwell;
    }
  }
  return grid;
}

HeatGrid smooth_grid(const HeatGrid& grid, double sigma) {
  if (!(sigma >= 0.0)) throw invalid_argument("sigma must be >= 0");
  if (sigma == 0.0) return grid;

  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const auto kernel = gaussian_kernel(sigma, radius);
  const int w = grid.width();
  const int h = grid.height();

  std::vector<double> rows(grid.size(), 0.0);
  scatter_axis(grid.cells(), rows, w, 1, h, w, kernel, radius);

  HeatGrid out(w, h);
  scatter_axis(rows, out.cells(), h, w, w, 1, kernel, radius);
  out.set_sigma(sigma);
  return out;
}

HeatGrid normalize_grid(const HeatGrid& grid) {
  const double peak = grid.max_value();
  if (peak <= 0.0) return grid;
  HeatGrid out = grid;
  for (double& c : out.cells()) c /= peak;
  return out;
}

void write_grid_pgm(std::ostream& out, const HeatGrid& grid) {
  const HeatGrid norm = normalize_grid(grid);
  out << "P5\n" << norm.width() << ' ' << norm.height() << "\n255\n";
  std::string bytes(norm.size(), '\0');
  for (std::size_t k = 0; k < norm.size(); ++k) {
    const double v = std::clamp(norm.cells()[k], 0.0, 1.0);
    bytes[k] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v)));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace trailmap
