#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shockshift/grid.hpp"
#include "shockshift/profile.hpp"

namespace shockshift {

enum class LemmaId { Poincare22, Pointwise23 };
std::string to_string(LemmaId id);
LemmaId lemma_from_string(const std::string& s);

struct RatioCheck {
  double ratio = 0.0;
  bool violation = false;  // right side zero while the left side is not
};

/// int f^2 phi1(x1+m) / [ (int f phi2(x1+m))^2 + int |grad f|^2 ].
RatioCheck check_poincare(const ScalarField& f, const std::function<double(double)>& phi1,
                          const std::function<double(double)>& phi2, double m);

/// Pointwise weighted bound: after removing the |U'(x1+m)|-weighted mean,
///   |U'(x1+m)| Yt(x)^2  vs  (|x1+m| + |U'(x1+m)|) int_R |U'(y1+m)| |d1 Yt(y1,x')|^2 dy1
///                          + |U'(x1+m)| int |U'(y1+m)| |grad' Yt|^2 dy,
/// returns the sup over nodes of left/right.
RatioCheck check_pointwise(const ScalarField& Ytilde, const ShockProfile& profile, double m);

struct SamplerConfig {
  int n_samples = 200;
  std::uint64_t seed = 20240901;
  int max_wavenumber = 4;
  double m = 0.0;
};

struct InequalityReport {
  LemmaId lemma = LemmaId::Poincare22;
  int n_samples = 0;
  double worst_ratio = 0.0;
  int worst_sample_id = -1;
  int violations = 0;
  bool pass = false;  // worst ratio finite and no violation flags
  /// int over |x1| > L of (1 + |x1|) |U'| — what the truncated line misses.
  double truncation_moment = 0.0;
  std::vector<double> ratios;
  std::vector<std::string> sample_kind;
};

/// Deterministic sample family member `id` (trigonometric tensor modes up to
/// max_wavenumber, or a Gaussian bump), a pure function of (seed, id).
ScalarField inequality_sample(const Grid& grid, std::uint64_t seed, int id, int max_wavenumber,
                              std::string* kind = nullptr);

InequalityReport estimate_constant(LemmaId lemma, const SamplerConfig& cfg, const ShockProfile& profile,
                                   const Grid& grid);

/// Counter-based generator: a uniform double in [0, 1) from (seed, stream, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

}  // namespace shockshift
