#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "roesser2d/bivariate_poly.hpp"
#include "roesser2d/model.hpp"

namespace roesser2d {

// Scan tolerances. The scan is a necessary-condition sweep over the torus,
// not a decision procedure, and every report says so.
inline constexpr double kStabilityTolerance = 1e-6;   // tau_stab
inline constexpr double kDeterminantTolerance = 1e-9; // tau_det
inline constexpr int kDefaultSpectrumSamples = 257;   // odd avoids aliasing

enum class SpectrumVerdict { StableIndication, UnstableWitness, Indeterminate };

struct SpectrumWitness {
  std::complex<double> z1;
  std::complex<double> z2;
  double abs_det = 0.0;
  int sample_index = 0;
};

struct AdmissibilityReport {
  bool regular = false;
  bool causal = false;
  SpectrumVerdict spectrum = SpectrumVerdict::Indeterminate;
  std::optional<SpectrumWitness> witness;
  int samples_used = 0;
  bool roots_at_infinity = false;
  std::vector<std::string> notes;
};

// det(E I(z1,z2) - A) not identically zero (above the coefficient
// threshold).
bool is_regular(const Roesser2D& model);

// Total degree of the characteristic polynomial equals rank(E). Degree is
// read as total degree in (z1, z2); throws NotRegular on irregular models.
bool is_causal(const Roesser2D& model);

// Root sweep: for samples on the unit circle in one variable, companion
// roots of the resulting univariate polynomial in the other, both
// directions. Throws NotRegular.
SpectrumVerdict spectrum_scan(const Roesser2D& model,
                              int n_samples = kDefaultSpectrumSamples);

// Full report combining the three checks; never throws on irregular input
// (the scan is skipped with a note instead).
AdmissibilityReport analyze(const Roesser2D& model,
                            int n_samples = kDefaultSpectrumSamples);

// Scan result with the witness kept; used by analyze and spectrum_scan.
struct ScanResult {
  SpectrumVerdict verdict = SpectrumVerdict::Indeterminate;
  std::optional<SpectrumWitness> witness;
  bool roots_at_infinity = false;
  int samples_used = 0;
};

ScanResult spectrum_scan_detailed(const BivariatePoly& poly, int n_samples);

}  // namespace roesser2d
