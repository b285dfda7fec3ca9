#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssimwm/block_transform.hpp"

namespace ssimwm {

/// SSIM stabilizing constants. C1 = (K1·L)², C2 = (K2·L)²; the DCT-domain
/// form over an N×N block uses C1' = N²·C1 and C2' = (N²−1)·C2.
struct SsimConstants {
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
  double c1Block(int n) const { return static_cast<double>(n) * n * c1(); }
  double c2Block(int n) const { return (static_cast<double>(n) * n - 1.0) * c2(); }

  /// Throws unless 0 < K1, K2 < 1 and L > 0.
  void validate() const;
};

struct CoeffIndex {
  int p = 0;
  int q = 0;
  friend bool operator==(const CoeffIndex&, const CoeffIndex&) = default;
};

/// The two AC coefficients carrying a bit: ε goes to `first`, σ to `second`.
struct CoeffPair {
  CoeffIndex first{0, 1};
  CoeffIndex second{1, 0};
  friend bool operator==(const CoeffPair&, const CoeffPair&) = default;
};

/// Throws if either index is DC, they coincide, or they fall outside an n×n block.
void validatePair(const CoeffPair& pair, int n);

enum class WindowKind {
  NonOverlapped4,
  OverlappedSquare,
  GaussianOverlapped11,
  SemiOverlapped8Stride4,
};

struct WindowMode {
  WindowKind kind = WindowKind::NonOverlapped4;
  int edge = 4;  // window edge in pixels

  static WindowMode nonOverlapped() { return {WindowKind::NonOverlapped4, 4}; }
  static WindowMode overlapped(int n) { return {WindowKind::OverlappedSquare, n}; }
  static WindowMode gaussian() { return {WindowKind::GaussianOverlapped11, 11}; }
  static WindowMode semiOverlapped() { return {WindowKind::SemiOverlapped8Stride4, 8}; }

  friend bool operator==(const WindowMode&, const WindowMode&) = default;
};

/// Short CLI names: non, over<N>, gauss, semi.
std::string toString(const WindowMode& mode);
WindowMode parseWindowMode(std::string_view text);

/// The four modes compared throughout: non, over4, gauss, semi.
std::vector<WindowMode> standardModes();

struct WindowPlacement {
  int top = 0;
  int left = 0;
  friend bool operator==(const WindowPlacement&, const WindowPlacement&) = default;
};

/// Where the local windows of a mode sit on a width×height image.
struct WindowLayout {
  int edge = 4;
  Padding padding = Padding::None;
  bool weighted = false;  // Gaussian mask instead of uniform statistics
  std::vector<WindowPlacement> positions;
};

WindowLayout windowLayout(const WindowMode& mode, int width, int height);

/// 11×11 circular Gaussian (deviation 1.5 samples), normalized to sum 1.
std::span<const double> gaussianMask11();

/// SSIM from window moments.
double ssimFromMoments(double mean_x, double mean_y, double var_x, double var_y,
                       double cov_xy, double c1, double c2);

/// Spatial SSIM of two equally sized blocks. Without weights, means divide
/// by N² and central moments by N²−1 (the normalization under which the
/// DCT form agrees exactly). With weights (summing to 1), weighted moments.
double ssimSpatial(const PixelBlock& x, const PixelBlock& y, const SsimConstants& constants,
                   std::span<const double> weights = {});

/// SSIM evaluated directly on orthonormal DCT coefficients.
double ssimDct(const CoeffBlock& x, const CoeffBlock& y, const SsimConstants& constants);

/// Constant C_X such that, for Y = X + W with W(0,0) = 0,
///   SSIM = (2ΣX·W + C_X) / (ΣW·W + 2ΣX·W + C_X).
/// Equals 2·ΣX² − 2·X00² + C2'.
double cX(const CoeffBlock& x, const SsimConstants& constants);

/// Block SSIM after adding eps to pair.first and sigma to pair.second.
double ssimModelDelta(const CoeffBlock& x, double eps, double sigma, const CoeffPair& pair,
                      const SsimConstants& constants);

struct LocalSsim {
  WindowPlacement at;
  double ssim = 0.0;
};

struct SsimReport {
  WindowMode mode;
  std::vector<LocalSsim> local;
  double mean_ssim = 0.0;
};

/// Mean of local SSIM indices over every window of `mode`.
SsimReport globalSsim(const ImagePlane& original, const ImagePlane& processed,
                      const WindowMode& mode, const SsimConstants& constants);

}  // namespace ssimwm
