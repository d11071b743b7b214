#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace msfem {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Raised for invalid user-supplied parameters (radius ratio, ranges, sizes).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when otherwise valid objects are combined inconsistently
/// (non-nested grids, singular periodic cell problem, ...).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NoPerforations {};

/// Discs of radius radius_ratio*eps centred at ((k+1/2)+shift)*eps.
struct PeriodicDiscs {
  double eps = 0.0;
  double radius_ratio = 0.0;
  Vec2 shift;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

struct RandomRects {
  int count = 0;
  std::array<double, 2> w_range{};
  std::array<double, 2> h_range{};
  std::uint64_t seed = 0;
  std::vector<Rect> rects;
};

/// One-dimensional holes (a_j, b_j); only the x coordinate is used.
struct Segments1D {
  std::vector<std::pair<double, double>> segments;
  double eps = 0.0;
};

/// The perforation set B_eps inside the unit square. Immutable once built.
class PerforationSet {
 public:
  using Kind = std::variant<NoPerforations, PeriodicDiscs, RandomRects, Segments1D>;

  PerforationSet() = default;
  explicit PerforationSet(Kind kind) : kind_(std::move(kind)) {}

  static PerforationSet none() { return PerforationSet{}; }

  const Kind& kind() const { return kind_; }
  bool empty() const;

  /// Closed-set membership: points on the perforation boundary are perforated.
  bool contains(Point2 p) const;

  /// Characteristic spacing for periodic/1D sets, 0 otherwise.
  double period() const;

  /// Short human readable description used in reports.
  std::string tag() const;

 private:
  Kind kind_ = NoPerforations{};
};

PerforationSet periodic_discs(double eps, double radius_ratio, Vec2 shift = {});
PerforationSet random_rects(int count, std::array<double, 2> w_range,
                            std::array<double, 2> h_range, std::uint64_t seed);
PerforationSet segments_1d(std::vector<std::pair<double, double>> segments, double length,
                           double eps);

inline bool is_perforated(Point2 p, const PerforationSet& set) { return set.contains(p); }

/// SplitMix64-seeded xoshiro256** generator. Bit-exact across platforms,
/// unlike the standard library distributions.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);
  std::uint64_t next();
  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace msfem
