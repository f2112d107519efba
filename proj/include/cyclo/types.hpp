#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace cyclo {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using IVec = Eigen::VectorXi;

inline constexpr double kPi = 3.14159265358979323846;

// Error taxonomy: config errors exit with code 2 at the CLI, check failures
// with code 1. Everything else is an internal bug.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct unsupported_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct evaluation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct internal_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact integer binomial, small arguments only.
inline double binom(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  double r = 1.0;
  for (long j = 1; j <= k; ++j) r = r * double(n - k + j) / double(j);
  return r;
}

inline cplx ipow(cplx z, long n) {
  if (n == 0) return cplx(1.0, 0.0);
  if (n < 0) return 1.0 / ipow(z, -n);
  cplx r(1.0, 0.0);
  while (n--) r *= z;
  return r;
}

// FNV-1a, stable across platforms; used for config hashing in reports.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  static const char* d = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = d[h & 0xf];
    h >>= 4;
  }
  return s;
}

// Fork-join map over [0, n). Results must be written to pre-sized slots so
// the output order is deterministic regardless of scheduling.
unsigned thread_budget();
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cyclo
