// Saddle-point asymptotics of c_n and the ratio law c_{n+1}/c_n.

#pragma once

#include "cfp/exact_seq.hpp"
#include "cfp/params.hpp"

#include <optional>
#include <vector>

namespace cfp {

struct AsymptoticEstimate {
  struct Parts {
    double n_sigma = 0.0;          // n sigma_n
    double S_n_at_tilt = 0.0;      // sum_{j<=n} a_j e^{-j sigma_n}
    double half_log_2piB2 = 0.0;   // (1/2) log(2 pi B_n^2)
  };
  struct FamilyConstants {
    double A_p = 0.0;
    double predicted_log_cn = 0.0;
  };

  int n = 0;
  double log_cn_est = 0.0;  // n_sigma + S_n_at_tilt - half_log_2piB2
  Parts parts;
  std::optional<FamilyConstants> family_constants;  // pure power laws only
};

/// log c_n ~ n sigma_n + S_n(e^{-sigma_n}) - (1/2) log(2 pi B_n^2).
AsymptoticEstimate cn_asymptotic(const ParameterFunction& f, int n);

/// Closed-form leading behaviour for a_j = j^{p-1}.
struct PowerLawPrediction {
  double sigma_pred = 0.0;    // (n / Gamma(p+1))^{-1/(p+1)}
  double B2_pred = 0.0;       // (n / Gamma(p+1))^{(p+2)/(p+1)} Gamma(p+2)
  double n_sigma_pred = 0.0;  // Gamma(p+1)^{1/(p+1)} n^{p/(p+1)}
  double S_pred = 0.0;        // p^{-1} Gamma(p+1)^{1/(p+1)} n^{p/(p+1)}
  double A_p = 0.0;           // (1 + 1/p) Gamma(p+1)^{1/(p+1)}
  double log_cn_pred = 0.0;
};

PowerLawPrediction powerlaw_prediction(double p, int n);

/// (1 + 1/p) Gamma(p+1)^{1/(p+1)}.
double powerlaw_A(double p);

struct ConjectureRow {
  int n = 0;
  double lhs = 0.0;       // c_{n+1} / c_n
  double rhs = 0.0;       // e^{sigma_n} + a_{n+1} / c_n
  double gap = 0.0;       // |lhs - rhs| / lhs
  double a_over_c = 0.0;  // a_n / c_n
};

/// Rows for n = 1 .. N-1 using a sequence computed internally.
std::vector<ConjectureRow> conjecture_check(const ParameterFunction& f, int N);
/// Rows for the given n (each < seq.N()) against an existing sequence.
std::vector<ConjectureRow> conjecture_check(const CnSequence& seq, const std::vector<int>& n_grid);

}  // namespace cfp
