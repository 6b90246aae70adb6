#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lasm {

inline constexpr int kMaxDim = 8;

/// Integer lattice point. Storage is inline (no heap) for up to kMaxDim coordinates.
using Point = Eigen::Matrix<int, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A site of Z^d x {colors}. Colors are 0-based in memory and 1-based in files.
struct Site {
  Point x;
  int color = 0;

  friend bool operator==(const Site& a, const Site& b) {
    return a.color == b.color && a.x.size() == b.x.size() && (a.x.array() == b.x.array()).all();
  }
  friend bool operator<(const Site& a, const Site& b) {
    for (Eigen::Index k = 0; k < a.x.size() && k < b.x.size(); ++k)
      if (a.x[k] != b.x[k]) return a.x[k] < b.x[k];
    if (a.x.size() != b.x.size()) return a.x.size() < b.x.size();
    return a.color < b.color;
  }
};

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      h ^= static_cast<std::uint32_t>(p[k]);
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

struct PointEq {
  bool operator()(const Point& a, const Point& b) const noexcept {
    return a.size() == b.size() && (a.array() == b.array()).all();
  }
};

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept {
    return PointHash{}(s.x) * 31u + static_cast<std::size_t>(s.color) * 0x9e3779b97f4a7c15ULL;
  }
};

template <typename T>
using SiteMap = std::unordered_map<Site, T, SiteHash>;
using SiteSet = std::unordered_set<Site, SiteHash>;
using SiteField = SiteMap<double>;
using PointSet = std::unordered_set<Point, PointHash, PointEq>;

inline VectorXd to_real(const Point& p) { return p.cast<double>(); }

inline int norm1(const Point& p) { return p.size() == 0 ? 0 : p.cwiseAbs().sum(); }
inline int norm_inf(const Point& p) { return p.size() == 0 ? 0 : p.cwiseAbs().maxCoeff(); }

/// Raised for malformed model documents (exit code 2 in the CLI).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised for documents that parse but violate model constraints (exit code 2).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a numerical guard trips: non-convergence, tables too small, overflow (exit code 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lasm
