#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssimwm/ssim_metric.hpp"

namespace ssimwm {

// Operation counts for the optimization regimes. An "operation" is one
// candidate-combination SSIM evaluation; "optimizations" are window (or
// block) optimizations per image.

std::int64_t aNonOverlapped(int width, int height);

/// (R − N + 1)(S − N + 1) windows; requires 4 ≤ N ≤ min(R, S).
std::int64_t aOverlapped(int width, int height, int n);

/// One zero-padded window per pixel.
std::int64_t aGaussianPadded(int width, int height);

/// (R/4 − 1)(S/4 − 1) windows; requires both dimensions divisible by 4.
std::int64_t aSemi(int width, int height);

/// Closed-form operations per optimization for an N×N overlapped window,
/// N a power of two (N ≥ 4).
double bOverlappedFormula(int n);

/// Distinct 4×4 grid blocks an N×N window at (top, left) intersects, on an
/// unbounded grid.
int blocksCovered(int top, int left, int n);

/// Mean of candidates^blocks over every window the mode places on a
/// width×height image (blocks clipped to the image for padded windows).
double measuredB(int width, int height, const WindowMode& mode, int candidates_per_block = 2);

struct ComplexityRow {
  WindowMode mode;
  std::int64_t optimizations = 0;            // A
  double ops_measured = 0.0;                 // B from window enumeration
  std::optional<double> ops_closed_form;     // B from the power-of-two formula
  std::optional<double> ops_reference;       // published CIF figure, for comparison only
  double total_measured = 0.0;               // A·B (measured)
  std::optional<double> total_closed_form;   // A·B (closed form)
  std::optional<double> total_reference;     // A·B (reference)
  double normalized_measured = 0.0;          // relative to non-overlapped
  std::optional<double> normalized_closed_form;
  std::optional<double> normalized_reference;
};

struct ComplexityReport {
  int width = 0;
  int height = 0;
  std::vector<ComplexityRow> rows;  // non, over4, gauss, semi
};

ComplexityReport complexityReport(int width, int height);

/// Aligned text table, one row per mode.
std::string formatTable(const ComplexityReport& report);

}  // namespace ssimwm
