#pragma once

// Shared basics: small vectors, errors, deterministic parallel reduction,
// counter-based RNG, Gauss-Legendre nodes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mobius {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// Errors. The library throws; callers that want status codes catch at the rim.

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};
struct DegenerateCurveError : Error { using Error::Error; };
struct GeometryError : Error { using Error::Error; };
struct OffsetError : Error {
  double max_feasible;
  OffsetError(const std::string& m, double mf) : Error(m), max_feasible(mf) {}
};
struct ExtrapolationError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ResolutionError : Error { using Error::Error; };
struct RejectionBudgetError : Error { using Error::Error; };
struct NearDiagonalError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Vectors.

struct Vec2 {
  double x = 0, y = 0;
  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double c) const { return {x * c, y * c}; }
  Vec2 operator/(double c) const { return {x / c, y / c}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
};
inline Vec2 operator*(double c, Vec2 v) { return v * c; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
// 90-degree counterclockwise rotation.
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

struct Vec3 {
  double x = 0, y = 0, z = 0;
  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
  Vec3(Vec2 v) : x(v.x), y(v.y), z(0) {}
  Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double c) const { return {x * c, y * c, z * c}; }
  Vec3 operator/(double c) const { return {x / c, y / c, z / c}; }
  Vec3& operator+=(Vec3 o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec2 xy() const { return {x, y}; }
};
inline Vec3 operator*(double c, Vec3 v) { return v * c; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(Vec3 a) { return dot(a, a); }
inline double norm(Vec3 a) { return std::sqrt(norm2(a)); }
inline double det3(Vec3 a, Vec3 b, Vec3 c) { return dot(a, cross(b, c)); }

struct Mat3 {
  // Row-major.
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};
  Vec3 apply(Vec3 v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }
  static Mat3 rotation(Vec3 axis, double angle) {
    Vec3 u = axis / norm(axis);
    double c = std::cos(angle), s = std::sin(angle), t = 1 - c;
    Mat3 r;
    r.m = {c + u.x * u.x * t,      u.x * u.y * t - u.z * s, u.x * u.z * t + u.y * s,
           u.y * u.x * t + u.z * s, c + u.y * u.y * t,      u.y * u.z * t - u.x * s,
           u.z * u.x * t - u.y * s, u.z * u.y * t + u.x * s, c + u.z * u.z * t};
    return r;
  }
};

// ---------------------------------------------------------------------------
// Thread pool-free deterministic parallel reduction. Work is split into a
// fixed number of chunks independent of the thread count, and chunk partials
// are combined in chunk order, so results do not depend on scheduling.

inline int& thread_override() {
  static int v = 0;  // 0 = use env / hardware
  return v;
}

inline int num_threads() {
  if (thread_override() > 0) return thread_override();
  if (const char* e = std::getenv("MOBIUS_THREADS")) {
    int n = std::atoi(e);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

template <class F>
void parallel_for(std::int64_t n, F&& body) {
  int nt = std::min<std::int64_t>(num_threads(), std::max<std::int64_t>(n, 1));
  if (nt <= 1 || n < 64) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(nt);
  std::int64_t chunk = (n + nt - 1) / nt;
  for (int w = 0; w < nt; ++w) {
    std::int64_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, w, &body, &errors] {
      try {
        for (std::int64_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Deterministic sum of f(i) over [0,n): 64 fixed chunks, partials added in order.
template <class F>
double parallel_sum(std::int64_t n, F&& f) {
  const int kChunks = 64;
  std::vector<double> partial(kChunks, 0.0);
  std::int64_t chunk = (n + kChunks - 1) / kChunks;
  if (chunk == 0) return 0.0;
  parallel_for(kChunks, [&](std::int64_t c) {
    std::int64_t lo = c * chunk, hi = std::min(n, lo + chunk);
    double s = 0, comp = 0;  // Kahan
    for (std::int64_t i = lo; i < hi; ++i) {
      double y = f(i) - comp;
      double t = s + y;
      comp = (t - s) - y;
      s = t;
    }
    partial[c] = s;
  });
  double total = 0;
  for (double p : partial) total += p;
  return total;
}

// ---------------------------------------------------------------------------
// Counter-based RNG: every draw is a pure function of (seed, index, counter),
// so parallel runs are bit-reproducible regardless of scheduling.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct SampleStream {
  std::uint64_t seed, index;
  std::uint64_t ctr = 0;
  SampleStream(std::uint64_t seed_, std::uint64_t index_) : seed(seed_), index(index_) {}
  std::uint64_t next_u64() {
    return mix64(seed ^ mix64(index ^ mix64(0x5851f42d4c957f2dULL + ctr++)));
  }
  double u01() {  // in (0,1)
    return (next_u64() >> 11) * (1.0 / 9007199254740992.0) + 1e-300;
  }
  double uniform(double a, double b) { return a + (b - a) * u01(); }
  double normal() {
    double u1 = u01(), u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }
  Vec3 sphere_dir() {
    double z = uniform(-1, 1), phi = uniform(0, kTwoPi);
    double r = std::sqrt(std::max(0.0, 1 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
  }
  Vec3 ball_point() {  // uniform in the unit ball
    double r = std::cbrt(u01());
    return r * sphere_dir();
  }
};

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes on [-1,1], computed once by Newton iteration.

struct GaussRule {
  std::vector<double> x, w;
};

inline const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1, p1 = 0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1 - x * x) * pp * pp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

// Integrate f over [a,b] with an n-point Gauss rule.
template <class F>
double gauss_integrate(double a, double b, int n, F&& f) {
  const GaussRule& g = gauss_legendre(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0;
  for (int i = 0; i < n; ++i) s += g.w[i] * f(mid + half * g.x[i]);
  return s * half;
}

// Geometrically graded panels from `a` toward `b` with initial panel width
// `first`, growth `ratio`; integrand may be steep near `a`.
template <class F>
double graded_panels(double a, double b, double first, double ratio, int pts, F&& f) {
  double s = 0, lo = a, w = first;
  while (lo < b) {
    double hi = std::min(b, lo + w);
    s += gauss_integrate(lo, hi, pts, f);
    lo = hi;
    w *= ratio;
  }
  return s;
}

inline double sq(double x) { return x * x; }

}  // namespace mobius
