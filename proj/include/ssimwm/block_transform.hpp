#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ssimwm {

/// Square n×n grid of reals stored row-major. The tag keeps pixel-domain and
/// DCT-domain blocks from being mixed up at call sites.
template <class Tag>
class SquareBlock {
 public:
  SquareBlock() = default;
  explicit SquareBlock(int n, double fill = 0.0)
      : n_(n), values_(static_cast<std::size_t>(n) * n, fill) {}
  SquareBlock(int n, std::vector<double> values);

  int size() const noexcept { return n_; }

  double& operator()(int row, int col) { return values_[index(row, col)]; }
  double operator()(int row, int col) const { return values_[index(row, col)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const SquareBlock&, const SquareBlock&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * n_ + col;
  }

  int n_ = 0;
  std::vector<double> values_;
};

struct PixelDomain {};
struct CoeffDomain {};

using PixelBlock = SquareBlock<PixelDomain>;
/// Coefficient (p, q): p is the vertical frequency, q the horizontal one;
/// (0, 0) is DC.
using CoeffBlock = SquareBlock<CoeffDomain>;

/// Row-major grid of cells, indexed (row, col).
template <class T>
struct Grid {
  int rows = 0;
  int cols = 0;
  std::vector<T> cells;

  T& at(int row, int col) { return cells[static_cast<std::size_t>(row) * cols + col]; }
  const T& at(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * cols + col];
  }
  std::size_t count() const noexcept { return cells.size(); }
};

/// Luminance plane. `width` is the number of columns, `height` the number of
/// rows; samples are real valued and only quantized when saved.
struct ImagePlane {
  int width = 0;
  int height = 0;
  std::vector<double> samples;
  double dynamic_range = 255.0;

  ImagePlane() = default;
  ImagePlane(int width, int height, double fill = 0.0);

  double& at(int row, int col) {
    return samples[static_cast<std::size_t>(row) * width + col];
  }
  double at(int row, int col) const {
    return samples[static_cast<std::size_t>(row) * width + col];
  }

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;
};

enum class Padding { None, Zero };

/// Orthonormal DCT-II basis for edge n: entry [k * n + i] is the weight of
/// sample i in frequency k.
std::span<const double> dctBasis(int n);

CoeffBlock dct2(const PixelBlock& block);
PixelBlock idct2(const CoeffBlock& coeffs);

/// Pixel pattern produced by a unit coefficient at (p, q).
PixelBlock basisImage(int n, int p, int q);

/// Tiles the image with n×n blocks in row-major block order.
Grid<PixelBlock> partitionBlocks(const ImagePlane& image, int n);

/// Copies the n×n region whose top-left pixel is (top, left).
PixelBlock windowAt(const ImagePlane& image, int top, int left, int n,
                    Padding padding = Padding::None);

/// Writes `block` back with its top-left pixel at (top, left).
void storeBlock(ImagePlane& image, const PixelBlock& block, int top, int left);

void requireDivisible(const ImagePlane& image, int n);

}  // namespace ssimwm
