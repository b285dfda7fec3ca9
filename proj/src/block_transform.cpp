#include "ssimwm/block_transform.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "ssimwm/error.hpp"

namespace ssimwm {

namespace {

constexpr int kCachedEdges = 16;

std::vector<double> computeBasis(int n) {
  std::vector<double> basis(static_cast<std::size_t>(n) * n);
  const double dc = std::sqrt(1.0 / n);
  const double ac = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      const double angle = std::numbers::pi * (2 * i + 1) * k / (2.0 * n);
      basis[static_cast<std::size_t>(k) * n + i] = (k == 0 ? dc : ac) * std::cos(angle);
    }
  }
  return basis;
}

}  // namespace

template <class Tag>
SquareBlock<Tag>::SquareBlock(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (n < 1 || values_.size() != static_cast<std::size_t>(n) * n) {
    throw Error(ErrorCategory::InvalidArgument,
                "block of edge " + std::to_string(n) + " needs " +
                    std::to_string(n * n) + " values, got " +
                    std::to_string(values_.size()));
  }
}

template class SquareBlock<PixelDomain>;
template class SquareBlock<CoeffDomain>;

ImagePlane::ImagePlane(int w, int h, double fill)
    : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {
  if (w < 0 || h < 0) {
    throw Error(ErrorCategory::InvalidArgument, "negative image dimension");
  }
}

std::span<const double> dctBasis(int n) {
  if (n < 1) throw Error(ErrorCategory::InvalidArgument, "DCT edge must be >= 1");
  static const auto cache = [] {
    std::array<std::vector<double>, kCachedEdges + 1> table;
    for (int m = 1; m <= kCachedEdges; ++m) table[m] = computeBasis(m);
    return table;
  }();
  if (n <= kCachedEdges) return cache[n];
  thread_local std::vector<double> scratch;
  scratch = computeBasis(n);
  return scratch;
}

CoeffBlock dct2(const PixelBlock& block) {
  const int n = block.size();
  const auto basis = dctBasis(n);
  // Separable: rows first (along columns index), then columns.
  std::vector<double> tmp(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int q = 0; q < n; ++q) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += basis[q * n + j] * block(i, j);
      tmp[i * n + q] = acc;
    }
  }
  CoeffBlock out(n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += basis[p * n + i] * tmp[i * n + q];
      out(p, q) = acc;
    }
  }
  return out;
}

PixelBlock idct2(const CoeffBlock& coeffs) {
  const int n = coeffs.size();
  const auto basis = dctBasis(n);
  std::vector<double> tmp(static_cast<std::size_t>(n) * n, 0.0);
  for (int p = 0; p < n; ++p) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int q = 0; q < n; ++q) acc += basis[q * n + j] * coeffs(p, q);
      tmp[p * n + j] = acc;
    }
  }
  PixelBlock out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int p = 0; p < n; ++p) acc += basis[p * n + i] * tmp[p * n + j];
      out(i, j) = acc;
    }
  }
  return out;
}

PixelBlock basisImage(int n, int p, int q) {
  if (p < 0 || q < 0 || p >= n || q >= n) {
    throw Error(ErrorCategory::InvalidArgument, "coefficient index outside block");
  }
  const auto basis = dctBasis(n);
  PixelBlock out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = basis[p * n + i] * basis[q * n + j];
  }
  return out;
}

void requireDivisible(const ImagePlane& image, int n) {
  if (n < 1) throw Error(ErrorCategory::InvalidArgument, "block edge must be >= 1");
  if (image.width % n != 0) {
    throw Error(ErrorCategory::InvalidArgument,
                "image width " + std::to_string(image.width) +
                    " is not divisible by " + std::to_string(n));
  }
  if (image.height % n != 0) {
    throw Error(ErrorCategory::InvalidArgument,
                "image height " + std::to_string(image.height) +
                    " is not divisible by " + std::to_string(n));
  }
}

Grid<PixelBlock> partitionBlocks(const ImagePlane& image, int n) {
  requireDivisible(image, n);
  Grid<PixelBlock> grid{image.height / n, image.width / n, {}};
  grid.cells.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
  for (int br = 0; br < grid.rows; ++br) {
    for (int bc = 0; bc < grid.cols; ++bc) {
      grid.cells.push_back(windowAt(image, br * n, bc * n, n));
    }
  }
  return grid;
}

PixelBlock windowAt(const ImagePlane& image, int top, int left, int n,
                    Padding padding) {
  if (n < 1) throw Error(ErrorCategory::InvalidArgument, "window edge must be >= 1");
  const bool inside = top >= 0 && left >= 0 && top + n <= image.height &&
                      left + n <= image.width;
  if (!inside && padding == Padding::None) {
    throw Error(ErrorCategory::OutOfBounds,
                "window " + std::to_string(n) + "x" + std::to_string(n) + " at (" +
                    std::to_string(top) + ", " + std::to_string(left) +
                    ") leaves the " + std::to_string(image.height) + "x" +
                    std::to_string(image.width) + " image");
  }
  PixelBlock out(n);
  for (int i = 0; i < n; ++i) {
    const int row = top + i;
    if (row < 0 || row >= image.height) continue;
    for (int j = 0; j < n; ++j) {
      const int col = left + j;
      if (col < 0 || col >= image.width) continue;
      out(i, j) = image.at(row, col);
    }
  }
  return out;
}

void storeBlock(ImagePlane& image, const PixelBlock& block, int top, int left) {
  const int n = block.size();
  if (top < 0 || left < 0 || top + n > image.height || left + n > image.width) {
    throw Error(ErrorCategory::OutOfBounds, "block store outside image");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) image.at(top + i, left + j) = block(i, j);
  }
}

}  // namespace ssimwm
