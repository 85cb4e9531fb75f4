#pragma once

#include <Eigen/Core>

#include <any>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace costa {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ConstVectorRef = Eigen::Ref<const Vector>;

/// Opaque sample token ξ. Produced by a problem's own sampler; the library
/// never inspects its contents.
using Sample = std::any;

/// Every run owns its RNG streams; nothing in the library shares one.
using RngStream = std::mt19937_64;

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an operation needs a smoothness/noise constant that the
/// problem marked as unknown.
struct MetadataRequired : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A scalar-valued function of x together with its gradient oracle.
struct SmoothFunction {
  std::function<Scalar(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;

  explicit operator bool() const { return static_cast<bool>(value); }
};

enum class CheckStatus { kPass, kFail, kSkipped };

struct ValidationCheck {
  std::string name;
  CheckStatus status = CheckStatus::kSkipped;
  Scalar observed = 0.0;
  Scalar threshold = 0.0;
  std::string note;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (c.status == CheckStatus::kFail) return false;
    return true;
  }
  bool all_skipped() const {
    for (const auto& c : checks)
      if (c.status != CheckStatus::kSkipped) return false;
    return true;
  }
  const ValidationCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline void require_dimension(const Vector& v, Eigen::Index n, const char* what) {
  if (v.size() != n)
    throw InvalidInput(std::string(what) + ": expected dimension " + std::to_string(n) +
                       ", got " + std::to_string(v.size()));
}

/// Derives an independent substream from a base seed via a splitmix64-style
/// mix of (seed, tag). Streams with different tags never collide for the run
/// lengths used here.
inline RngStream substream(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (tag + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return RngStream(x);
}

}  // namespace costa
