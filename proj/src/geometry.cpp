#include "msfem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace msfem {

namespace {

// Centres closer than this to the boundary of the unit square are dropped.
constexpr double kCentreTolerance = 1e-12;

bool centre_inside(double c) { return c > kCentreTolerance && c < 1.0 - kCentreTolerance; }

bool in_disc(const PeriodicDiscs& d, Point2 p) {
  const double r = d.radius_ratio * d.eps;
  // The disc of cell k lies strictly inside that cell, so only one candidate.
  const double kx = std::floor(p.x / d.eps - d.shift.x);
  const double ky = std::floor(p.y / d.eps - d.shift.y);
  const double cx = (kx + 0.5 + d.shift.x) * d.eps;
  const double cy = (ky + 0.5 + d.shift.y) * d.eps;
  if (!centre_inside(cx) || !centre_inside(cy)) return false;
  const double dx = p.x - cx;
  const double dy = p.y - cy;
  return dx * dx + dy * dy <= r * r;
}

bool in_rects(const RandomRects& rr, Point2 p) {
  for (const Rect& r : rr.rects) {
    if (p.x >= r.x0 && p.x <= r.x1 && p.y >= r.y0 && p.y <= r.y1) return true;
  }
  return false;
}

bool in_segments(const Segments1D& s, Point2 p) {
  for (const auto& [a, b] : s.segments) {
    if (p.x >= a && p.x <= b) return true;
  }
  return false;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  std::uint64_t st = seed;
  for (auto& w : s_) w = splitmix64(st);
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

bool PerforationSet::empty() const {
  return std::visit(
      [](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, NoPerforations>) return true;
        if constexpr (std::is_same_v<T, PeriodicDiscs>) return false;
        if constexpr (std::is_same_v<T, RandomRects>) return k.rects.empty();
        if constexpr (std::is_same_v<T, Segments1D>) return k.segments.empty();
      },
      kind_);
}

bool PerforationSet::contains(Point2 p) const {
  return std::visit(
      [p](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, NoPerforations>) return false;
        if constexpr (std::is_same_v<T, PeriodicDiscs>) return in_disc(k, p);
        if constexpr (std::is_same_v<T, RandomRects>) return in_rects(k, p);
        if constexpr (std::is_same_v<T, Segments1D>) return in_segments(k, p);
      },
      kind_);
}

double PerforationSet::period() const {
  if (const auto* d = std::get_if<PeriodicDiscs>(&kind_)) return d->eps;
  if (const auto* s = std::get_if<Segments1D>(&kind_)) return s->eps;
  return 0.0;
}

std::string PerforationSet::tag() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, NoPerforations>) {
          os << "none";
        } else if constexpr (std::is_same_v<T, PeriodicDiscs>) {
          os << "periodic(eps=" << k.eps << ";ratio=" << k.radius_ratio << ";shift=" << k.shift.x
             << ";" << k.shift.y << ")";
        } else if constexpr (std::is_same_v<T, RandomRects>) {
          os << "rects(count=" << k.count << ";w=" << k.w_range[0] << ";" << k.w_range[1]
             << ";h=" << k.h_range[0] << ";" << k.h_range[1] << ";seed=" << k.seed << ")";
        } else {
          os << "segments(n=" << k.segments.size() << ";eps=" << k.eps << ")";
        }
      },
      kind_);
  return os.str();
}

PerforationSet periodic_discs(double eps, double radius_ratio, Vec2 shift) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("periodic_discs: eps must be > 0");
  if (!(radius_ratio > 0.0 && radius_ratio < 0.5)) {
    throw ParameterError("periodic_discs: radius_ratio must lie in (0, 0.5)");
  }
  if (!std::isfinite(shift.x) || !std::isfinite(shift.y)) {
    throw ParameterError("periodic_discs: shift must be finite");
  }
  return PerforationSet{PeriodicDiscs{eps, radius_ratio, shift}};
}

PerforationSet random_rects(int count, std::array<double, 2> w_range,
                            std::array<double, 2> h_range, std::uint64_t seed) {
  if (count < 0) throw ParameterError("random_rects: count must be >= 0");
  for (const auto& r : {w_range, h_range}) {
    if (!(r[0] > 0.0 && r[1] >= r[0])) {
      throw ParameterError("random_rects: ranges must be positive and ordered");
    }
  }
  RandomRects rr{count, w_range, h_range, seed, {}};
  rr.rects.reserve(static_cast<std::size_t>(count));
  Xoshiro256 rng(seed);
  for (int i = 0; i < count; ++i) {
    // Draw order is part of the reproducibility contract: cx, cy, w, h.
    const double cx = rng.uniform();
    const double cy = rng.uniform();
    const double w = rng.uniform(w_range[0], w_range[1]);
    const double h = rng.uniform(h_range[0], h_range[1]);
    Rect r{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
    r.x0 = std::max(r.x0, 0.0);
    r.y0 = std::max(r.y0, 0.0);
    r.x1 = std::min(r.x1, 1.0);
    r.y1 = std::min(r.y1, 1.0);
    rr.rects.push_back(r);
  }
  return PerforationSet{std::move(rr)};
}

PerforationSet segments_1d(std::vector<std::pair<double, double>> segments, double length,
                           double eps) {
  // eps == 0 means no gap bound is declared.
  if (!(eps >= 0.0)) throw ParameterError("segments_1d: eps must be >= 0");
  const auto too_long = [eps](double gap) { return eps > 0.0 && gap > eps * (1.0 + 1e-12); };
  double prev = 0.0;
  for (const auto& [a, b] : segments) {
    if (!(a > prev && b > a)) throw ParameterError("segments_1d: segments must be increasing");
    if (too_long(a - prev)) throw ParameterError("segments_1d: gap longer than eps");
    prev = b;
  }
  if (!segments.empty() && !(prev < length)) {
    throw ParameterError("segments_1d: last segment must end before the domain end");
  }
  if (too_long(length - prev)) throw ParameterError("segments_1d: gap longer than eps");
  return PerforationSet{Segments1D{std::move(segments), eps}};
}

}  // namespace msfem
