#include "ssimwm/complexity_model.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "ssimwm/error.hpp"

namespace ssimwm {

namespace {

int floorDiv4(int v) { return v >= 0 ? v / 4 : -((-v + 3) / 4); }

void requireDiv4(int width, int height) {
  if (width <= 0 || height <= 0 || width % 4 != 0 || height % 4 != 0) {
    throw Error(ErrorCategory::InvalidArgument,
                "dimensions " + std::to_string(width) + "x" + std::to_string(height) +
                    " must be positive multiples of 4");
  }
}

// Blocks touched along one axis by the span [start, start + n) clipped to [0, limit).
int blocksAlong(int start, int n, int limit) {
  const int lo = std::max(0, start);
  const int hi = std::min(limit, start + n) - 1;
  if (hi < lo) return 0;
  return hi / 4 - lo / 4 + 1;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string compact(double v) {
  char buf[64];
  if (std::abs(v) >= 1e7) {
    std::snprintf(buf, sizeof buf, "%.4g", v);
  } else if (v == std::floor(v)) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f", v);
  }
  return buf;
}

}  // namespace

std::int64_t aNonOverlapped(int width, int height) {
  requireDiv4(width, height);
  return static_cast<std::int64_t>(width / 4) * (height / 4);
}

std::int64_t aOverlapped(int width, int height, int n) {
  if (n < 4 || n > std::min(width, height)) {
    throw Error(ErrorCategory::InvalidArgument,
                "window edge " + std::to_string(n) + " outside [4, min(R, S)]");
  }
  return static_cast<std::int64_t>(width - n + 1) * (height - n + 1);
}

std::int64_t aGaussianPadded(int width, int height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCategory::InvalidArgument, "negative dimension");
  }
  return static_cast<std::int64_t>(width) * height;
}

std::int64_t aSemi(int width, int height) {
  requireDiv4(width, height);
  return static_cast<std::int64_t>(width / 4 - 1) * (height / 4 - 1);
}

double bOverlappedFormula(int n) {
  if (n < 4 || (n & (n - 1)) != 0) {
    throw Error(ErrorCategory::InvalidArgument,
                "closed-form operation count needs a power-of-two edge >= 4, got " +
                    std::to_string(n));
  }
  const double h = n / 2.0;
  return (std::exp2(h * h) + 6.0 * std::exp2(h * (h + 1.0)) + 9.0 * std::exp2((h + 1.0) * (h + 1.0))) /
         16.0;
}

int blocksCovered(int top, int left, int n) {
  const int rows = floorDiv4(top + n - 1) - floorDiv4(top) + 1;
  const int cols = floorDiv4(left + n - 1) - floorDiv4(left) + 1;
  return rows * cols;
}

double measuredB(int width, int height, const WindowMode& mode, int candidates_per_block) {
  if (candidates_per_block < 1) {
    throw Error(ErrorCategory::InvalidArgument, "candidates per block must be >= 1");
  }
  if (mode.kind == WindowKind::NonOverlapped4) {
    requireDiv4(width, height);
    return candidates_per_block;
  }
  const auto layout = windowLayout(mode, width, height);
  if (layout.positions.empty()) return 0.0;
  // Precompute per-axis counts; the product gives blocks per window.
  double total = 0.0;
  for (const auto& at : layout.positions) {
    const int blocks = blocksAlong(at.top, layout.edge, height) * blocksAlong(at.left, layout.edge, width);
    total += std::pow(static_cast<double>(candidates_per_block), blocks);
  }
  return total / static_cast<double>(layout.positions.size());
}

ComplexityReport complexityReport(int width, int height) {
  requireDiv4(width, height);
  ComplexityReport report{width, height, {}};

  ComplexityRow non;
  non.mode = WindowMode::nonOverlapped();
  non.optimizations = aNonOverlapped(width, height);
  non.ops_measured = measuredB(width, height, non.mode);
  non.ops_closed_form = 2.0;
  non.ops_reference = 2.0;
  report.rows.push_back(non);

  ComplexityRow over;
  over.mode = WindowMode::overlapped(4);
  over.optimizations = std::min(width, height) >= 4 ? aOverlapped(width, height, 4) : 0;
  over.ops_measured = measuredB(width, height, over.mode);
  over.ops_closed_form = bOverlappedFormula(4);
  over.ops_reference = 8.40;
  report.rows.push_back(over);

  ComplexityRow gauss;
  gauss.mode = WindowMode::gaussian();
  gauss.optimizations = aGaussianPadded(width, height);
  gauss.ops_measured = measuredB(width, height, gauss.mode);
  gauss.ops_reference = 4871.0;  // no closed form: 11 is not a power of two
  report.rows.push_back(gauss);

  ComplexityRow semi;
  semi.mode = WindowMode::semiOverlapped();
  semi.optimizations = aSemi(width, height);
  semi.ops_measured = semi.optimizations > 0 ? measuredB(width, height, semi.mode) : 0.0;
  semi.ops_closed_form = 16.0;
  semi.ops_reference = 16.0;
  report.rows.push_back(semi);

  const double base_measured = static_cast<double>(non.optimizations) * non.ops_measured;
  const double base_closed = static_cast<double>(non.optimizations) * *non.ops_closed_form;
  const double base_reference = static_cast<double>(non.optimizations) * *non.ops_reference;
  for (auto& row : report.rows) {
    const auto a = static_cast<double>(row.optimizations);
    row.total_measured = a * row.ops_measured;
    row.normalized_measured = row.total_measured / base_measured;
    if (row.ops_closed_form) {
      row.total_closed_form = a * *row.ops_closed_form;
      row.normalized_closed_form = *row.total_closed_form / base_closed;
    }
    if (row.ops_reference) {
      row.total_reference = a * *row.ops_reference;
      row.normalized_reference = *row.total_reference / base_reference;
    }
  }
  return report;
}

std::string formatTable(const ComplexityReport& report) {
  const auto opt = [](const std::optional<double>& v) { return v ? compact(*v) : std::string("-"); };
  const auto optFixed = [](const std::optional<double>& v) {
    return v ? fixed(*v, 2) : std::string("-");
  };
  std::string out = "complexity for " + std::to_string(report.width) + "x" +
                    std::to_string(report.height) + "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %12s %12s %12s %12s %14s %12s %12s %12s\n", "mode",
                "A", "B_measured", "B_closed", "B_ref", "C_measured", "norm_meas", "norm_closed",
                "norm_ref");
  out += line;
  for (const auto& row : report.rows) {
    std::snprintf(line, sizeof line, "%-8s %12lld %12s %12s %12s %14s %12s %12s %12s\n",
                  toString(row.mode).c_str(), static_cast<long long>(row.optimizations),
                  fixed(row.ops_measured, 3).c_str(), opt(row.ops_closed_form).c_str(),
                  opt(row.ops_reference).c_str(), compact(row.total_measured).c_str(),
                  fixed(row.normalized_measured, 2).c_str(),
                  optFixed(row.normalized_closed_form).c_str(),
                  optFixed(row.normalized_reference).c_str());
    out += line;
  }
  return out;
}

}  // namespace ssimwm
