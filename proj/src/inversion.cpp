#include "densigraph/inversion.hpp"

#include <cmath>
#include <limits>

namespace densigraph {

const char* to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

std::string GuardSet::str() const {
  static constexpr std::pair<Guard, const char*> kNames[] = {
      {Guard::degenerate_kappa, "degenerate_kappa"},
      {Guard::symmetric_r, "symmetric_r"},
      {Guard::clamped_discriminant, "clamped_discriminant"},
      {Guard::abs_phi1, "abs_phi1"},
      {Guard::arbitrary_branch, "arbitrary_branch"},
  };
  std::string out;
  for (const auto& [g, name] : kNames) {
    if (!test(g)) continue;
    if (!out.empty()) out += '|';
    out += name;
  }
  return out;
}

std::string ClipFlags::str() const {
  std::string out;
  auto add = [&](bool flag, const char* name) {
    if (!flag) return;
    if (!out.empty()) out += '|';
    out += name;
  };
  add(lambda, "lambda");
  add(p, "p");
  add(mu, "mu");
  return out;
}

double denominator(double lambda, double p, double r_plus) {
  return 1.0 - (1.0 - lambda) * p * (r_plus - (1.0 - r_plus));
}

LimitTriple forward_map(const ModelParams& params) {
  params.require_admissible();
  const double r_plus = params.r_plus;
  const double r_minus = params.r_minus();
  const double a = 1.0 - params.lambda;
  const double p = params.p;
  const double d = denominator(params.lambda, p, r_plus);

  LimitTriple out;
  out.m = (params.mu + a * p * r_minus) / d;
  out.v = a * a * p * (1.0 - p) * ((out.m - r_minus) * (out.m - r_minus) + r_plus * r_minus);
  out.w = out.m * (1.0 - out.m) * (1.0 + 4.0 * a * a * p * p * r_plus * r_minus) / (d * d);
  return out;
}

double kappa(double m, double w, double r_plus) {
  if (!(m > 0.0 && m < 1.0)) throw NonInvertible("kappa needs m in (0, 1)");
  const double diff = 2.0 * r_plus - 1.0;
  return diff * diff * w / (m * (1.0 - m));
}

double root_d(Branch a, double m, double w, double r_plus, GuardSet& guards,
              const InversionTolerances& tol) {
  const double four_rr = 4.0 * r_plus * (1.0 - r_plus);
  const double k = kappa(m, w, r_plus);
  if (std::abs(k - four_rr) < tol.degenerate_kappa) {
    guards.set(Guard::degenerate_kappa);
    return 1.0 / (2.0 * four_rr);
  }
  double disc = four_rr * four_rr - four_rr + k;
  if (disc < 0.0) {
    guards.set(Guard::clamped_discriminant);
    return four_rr / (four_rr - k);
  }
  const double s = std::sqrt(disc);
  if (a == Branch::plus) return (four_rr + s) / (four_rr - k);
  // Rationalized (4rr - s) / (4rr - kappa); avoids cancellation near the double root.
  return 1.0 / (four_rr + s);
}

double root_d(Branch a, double m, double w, double r_plus) {
  GuardSet ignored;
  return root_d(a, m, w, r_plus, ignored);
}

double phi1(Branch a, double m, double w, double r_plus, GuardSet& guards,
            const InversionTolerances& tol) {
  const double diff = 2.0 * r_plus - 1.0;
  double value;
  if (std::abs(diff) < tol.symmetric_r) {
    guards.set(Guard::symmetric_r);
    if (!(m > 0.0 && m < 1.0)) throw NonInvertible("phi1 needs m in (0, 1)");
    value = w / (m * (1.0 - m)) - 1.0;
  } else {
    const double one_minus_d = 1.0 - root_d(a, m, w, r_plus, guards, tol);
    value = one_minus_d * one_minus_d / (diff * diff);
  }
  if (value < 0.0) {
    guards.set(Guard::abs_phi1);
    value = -value;
  }
  return value;
}

double phi1(Branch a, double m, double w, double r_plus) {
  GuardSet ignored;
  return phi1(a, m, w, r_plus, ignored);
}

double phi2(double m, double v, double phi1_value, double r_plus) {
  if (!(phi1_value > 0.0) || !std::isfinite(phi1_value))
    throw NonInvertible("phi1 vanishes: moments lie on the boundary of the invertible set");
  const double r_minus = 1.0 - r_plus;
  return 1.0 + v / (((m - r_minus) * (m - r_minus) + r_plus * r_minus) * phi1_value);
}

double phi2(Branch a, double m, double v, double w, double r_plus) {
  return phi2(m, v, phi1(a, m, w, r_plus), r_plus);
}

InversionResult inverse_map(Branch a, const LimitTriple& mvw, double r_plus,
                            const InversionTolerances& tol) {
  InversionResult out;
  out.branch = a;
  const double f1 = phi1(a, mvw.m, mvw.w, r_plus, out.guards, tol);
  const double f2 = phi2(mvw.m, mvw.v, f1, r_plus);
  const double root = std::sqrt(f1);
  const double r_minus = 1.0 - r_plus;
  out.mu = mvw.m * (1.0 - (r_plus - r_minus) * root) - r_minus * root;
  out.lambda = 1.0 - f2 * root;
  out.p = 1.0 / f2;
  return out;
}

BranchChoice select_branch(const LimitTriple& mvw, double r_plus, const InversionTolerances& tol) {
  const double four_rr = 4.0 * r_plus * (1.0 - r_plus);
  const double k = kappa(mvw.m, mvw.w, r_plus);
  // Both roots coincide: nothing to choose.
  if (std::abs(k - four_rr) < tol.degenerate_kappa) return BranchChoice::minus;
  if (four_rr * four_rr - four_rr + k < 0.0) return BranchChoice::minus;
  // phi1 ignores d when r+ is numerically 1/2.
  if (std::abs(2.0 * r_plus - 1.0) < tol.symmetric_r) return BranchChoice::minus;

  if (r_plus >= 0.5 || k >= four_rr) return BranchChoice::minus;
  if (root_d(Branch::plus, mvw.m, mvw.w, r_plus) > 2.0 * (1.0 - r_plus))
    return BranchChoice::minus;
  return BranchChoice::either;
}

InversionResult invert(const LimitTriple& mvw, double r_plus, const InversionTolerances& tol) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  auto fail = [&](std::string why) {
    InversionResult out;
    out.mu = out.lambda = out.p = nan;
    out.failure = std::move(why);
    return out;
  };
  if (!(r_plus > 0.0 && r_plus < 1.0)) return fail("r_plus outside (0, 1)");
  if (!std::isfinite(mvw.m) || !std::isfinite(mvw.v) || !std::isfinite(mvw.w))
    return fail("non-finite moments");
  if (!(mvw.m > 0.0 && mvw.m < 1.0)) return fail("m outside (0, 1)");

  const BranchChoice choice = select_branch(mvw, r_plus, tol);
  InversionResult out;
  try {
    out = inverse_map(choice == BranchChoice::plus ? Branch::plus : Branch::minus, mvw, r_plus,
                      tol);
  } catch (const NonInvertible& e) {
    return fail(e.what());
  }
  if (choice == BranchChoice::either) out.guards.set(Guard::arbitrary_branch);
  if (std::isnan(out.mu) || std::isnan(out.lambda) || std::isnan(out.p))
    return fail("inverse map produced NaN");

  if (out.lambda < 0.0) {
    out.lambda = 0.0;
    out.clipped.lambda = true;
  } else if (out.lambda > 1.0) {
    out.lambda = 1.0;
    out.clipped.lambda = true;
  }
  if (out.p < 0.0) {
    out.p = 0.0;
    out.clipped.p = true;
  } else if (out.p > 1.0) {
    out.p = 1.0;
    out.clipped.p = true;
  }
  if (out.mu < 0.0) {
    out.mu = 0.0;
    out.clipped.mu = true;
  } else if (out.mu > out.lambda) {
    out.mu = out.lambda;
    out.clipped.mu = true;
  }
  return out;
}

InversionResult invert(const MomentEstimates& moments, double r_plus,
                       const InversionTolerances& tol) {
  return invert(LimitTriple{moments.m_hat, moments.v_hat, moments.w_hat}, r_plus, tol);
}

}  // namespace densigraph
