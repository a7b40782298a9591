#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "densigraph/estimators.hpp"
#include "densigraph/model.hpp"

namespace densigraph {

/// Limits (m, v, w) of the three moment estimators.
struct LimitTriple {
  double m = 0.0;
  double v = 0.0;
  double w = 0.0;
};

enum class Branch { plus, minus };
enum class BranchChoice { plus, minus, either };

const char* to_string(Branch b);

/// Numerical guards applied while inverting.
struct InversionTolerances {
  double degenerate_kappa = 1e-4;  // |kappa - 4 r+ r-| below this uses the double root
  double symmetric_r = 1e-3;       // |r+ - r-| below this uses the r+ = 1/2 formula
};

enum class Guard : std::uint8_t {
  degenerate_kappa = 1U << 0,
  symmetric_r = 1U << 1,
  clamped_discriminant = 1U << 2,
  abs_phi1 = 1U << 3,
  arbitrary_branch = 1U << 4,
};

/// Small bitset over Guard; rendered as "a|b" with an empty string for none.
class GuardSet {
 public:
  void set(Guard g) { bits_ |= static_cast<std::uint8_t>(g); }
  bool test(Guard g) const { return (bits_ & static_cast<std::uint8_t>(g)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::string str() const;
  friend bool operator==(const GuardSet&, const GuardSet&) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct ClipFlags {
  bool mu = false;
  bool lambda = false;
  bool p = false;
  bool any() const { return mu || lambda || p; }
  std::string str() const;
};

struct InversionResult {
  double mu = 0.0;
  double lambda = 0.0;
  double p = 0.0;
  Branch branch = Branch::minus;
  GuardSet guards;
  ClipFlags clipped;
  /// Set when the input lies outside the invertible region; the coordinates
  /// are then NaN.
  std::optional<std::string> failure;

  bool ok() const { return !failure.has_value(); }
};

/// Thrown by the pointwise maps when phi1 vanishes or m leaves (0, 1).
class NonInvertible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// D(lambda, p) = 1 - (1 - lambda) p (r+ - r-).
double denominator(double lambda, double p, double r_plus);

/// Psi(mu, lambda, p): the almost-sure limits of (m_hat, v_hat, w_hat).
LimitTriple forward_map(const ModelParams& params);

/// kappa(m, w) = (r+ - r-)^2 w / (m (1 - m)).
double kappa(double m, double w, double r_plus);

/// Root d^(a) of [4 r+ r- - kappa] u^2 - 8 r+ r- u + 1 = 0, with the
/// degenerate-kappa and clamped-discriminant guards.
double root_d(Branch a, double m, double w, double r_plus, GuardSet& guards,
              const InversionTolerances& tol = {});
double root_d(Branch a, double m, double w, double r_plus);

/// Candidate for ((1 - lambda) p)^2; negative values are reflected.
double phi1(Branch a, double m, double w, double r_plus, GuardSet& guards,
            const InversionTolerances& tol = {});
double phi1(Branch a, double m, double w, double r_plus);

/// Candidate for 1/p given phi1 > 0.
double phi2(double m, double v, double phi1_value, double r_plus);
double phi2(Branch a, double m, double v, double w, double r_plus);

/// Phi^(a)(m, v, w) without clipping.
InversionResult inverse_map(Branch a, const LimitTriple& mvw, double r_plus,
                            const InversionTolerances& tol = {});

/// Minus whenever it is provably right (or both roots coincide); `either`
/// when no criterion decides.
BranchChoice select_branch(const LimitTriple& mvw, double r_plus,
                           const InversionTolerances& tol = {});

/// Full pipeline: branch selection, inverse map and clipping into
/// 0 <= mu <= lambda <= 1, 0 <= p <= 1. Never throws on bad moments.
InversionResult invert(const LimitTriple& mvw, double r_plus, const InversionTolerances& tol = {});
InversionResult invert(const MomentEstimates& moments, double r_plus,
                       const InversionTolerances& tol = {});

}  // namespace densigraph
