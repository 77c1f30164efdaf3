#pragma once

#include "ll/common.hpp"

namespace ll {

struct SuiteResult {
  std::string name;
  double worst = 0.0;  // worst violation magnitude observed
  double tol = 0.0;
  int cases = 0;
  bool pass() const { return worst <= tol; }
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool all_pass() const {
    for (const auto& s : suites) {
      if (!s.pass()) return false;
    }
    return true;
  }
};

/// Tolerances of the verification suites. Defaults are the pinned
/// acceptance values; tol_scale exists for probing over-tight settings.
struct VerifyTolerances {
  double oracle_equivalence = 1e-9;
  double lemma_identity = 1e-9;
  double inequality_slack = 1e-10;
  double projector_exact = 1e-12;
  double counting_consistency = 1e-8;
  double hoelder_factor = 1.05;

  static VerifyTolerances scaled(double s) {
    VerifyTolerances t;
    t.oracle_equivalence *= s;
    t.lemma_identity *= s;
    t.inequality_slack *= s;
    t.projector_exact *= s;
    t.counting_consistency *= s;
    t.hoelder_factor = 1.0 + (t.hoelder_factor - 1.0) * s;
    return t;
  }
};

/// Runs the full lemma / oracle property suites: first-quantized vs Fock
/// equivalence, the projector-calculus identities, the trace-norm
/// sandwich and k-from-1 reduction ensembles, counting self-consistency,
/// and the partial Hoelder continuity bound.
VerifyReport run_verification(std::uint64_t seed, const VerifyTolerances& tol = {});

std::string format_verify_report(const VerifyReport& report);

}  // namespace ll
