#include "roesser2d/admissibility.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "roesser2d/charpoly.hpp"

namespace roesser2d {

bool is_regular(const Roesser2D& model) {
  return !char_poly(model).is_zero();
}

bool is_causal(const Roesser2D& model) {
  const BivariatePoly poly = char_poly(model);
  if (poly.is_zero()) {
    throw NotRegular("characteristic polynomial is identically zero");
  }
  return poly.total_degree() == numerical_rank(model.E);
}

namespace {

// Finite roots of a complex univariate polynomial given by ascending
// coefficients; leading coefficients at or below tau are treated as roots
// at infinity and dropped.
struct LineRoots {
  Eigen::VectorXcd roots;
  bool dropped_leading = false;
  bool identically_zero = false;
};

LineRoots line_roots(const Eigen::VectorXcd& coeffs, double tau) {
  LineRoots out;
  Eigen::Index degree = coeffs.size() - 1;
  while (degree >= 1 && std::abs(coeffs(degree)) <= tau) {
    --degree;
    out.dropped_leading = true;
  }
  if (degree == 0) {
    out.identically_zero = std::abs(coeffs(0)) <= tau;
    out.roots.resize(0);
    return out;
  }
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
  for (Eigen::Index k = 1; k < degree; ++k) companion(k, k - 1) = 1.0;
  for (Eigen::Index k = 0; k < degree; ++k) {
    companion(k, degree - 1) = -coeffs(k) / coeffs(degree);
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(companion, false);
  out.roots = eig.eigenvalues();
  return out;
}

}  // namespace

ScanResult spectrum_scan_detailed(const BivariatePoly& poly, int n_samples) {
  if (n_samples < 1) {
    throw InvalidParams("the scan needs at least one circle sample");
  }
  if (poly.is_zero()) {
    throw NotRegular("characteristic polynomial is identically zero");
  }
  ScanResult result;
  result.samples_used = n_samples;
  const double tau = poly.coefficient_threshold();
  bool near_circle = false;

  std::optional<SpectrumWitness> witness;
  auto consider_witness = [&](const SpectrumWitness& w) {
    if (!witness || w.sample_index < witness->sample_index) witness = w;
  };

  // sweep 0 fixes z2 on the circle and scans roots in z1; sweep 1 swaps
  // the roles. Sample indices are global so the reported witness is the
  // lexicographically smallest one.
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int k = 0; k < n_samples; ++k) {
      const double theta =
          2.0 * std::numbers::pi * static_cast<double>(k) / n_samples;
      const std::complex<double> on_circle(std::cos(theta), std::sin(theta));
      const Eigen::VectorXcd coeffs = sweep == 0
                                          ? poly.coefficients_in_z1(on_circle)
                                          : poly.coefficients_in_z2(on_circle);
      const LineRoots roots = line_roots(coeffs, tau);
      if (roots.dropped_leading) result.roots_at_infinity = true;
      const int sample_index = sweep * n_samples + k;
      if (roots.identically_zero) {
        // The determinant vanishes along this whole line, including at the
        // circle point itself.
        SpectrumWitness w;
        w.z1 = sweep == 0 ? std::complex<double>(1.0, 0.0) : on_circle;
        w.z2 = sweep == 0 ? on_circle : std::complex<double>(1.0, 0.0);
        w.abs_det = std::abs(poly.eval(w.z1, w.z2));
        w.sample_index = sample_index;
        consider_witness(w);
        continue;
      }
      double worst = -1.0;
      std::complex<double> worst_root;
      for (Eigen::Index r = 0; r < roots.roots.size(); ++r) {
        const double mag = std::abs(roots.roots(r));
        if (mag > worst) {
          worst = mag;
          worst_root = roots.roots(r);
        }
      }
      if (worst < 0.0) continue;  // constant line, no finite roots
      if (worst > 1.0 + kStabilityTolerance) {
        SpectrumWitness w;
        w.z1 = sweep == 0 ? worst_root : on_circle;
        w.z2 = sweep == 0 ? on_circle : worst_root;
        w.abs_det = std::abs(poly.eval(w.z1, w.z2));
        w.sample_index = sample_index;
        consider_witness(w);
      } else if (worst >= 1.0 - kStabilityTolerance) {
        near_circle = true;
      }
    }
  }

  if (witness) {
    result.verdict = SpectrumVerdict::UnstableWitness;
    result.witness = witness;
  } else if (near_circle) {
    result.verdict = SpectrumVerdict::Indeterminate;
  } else {
    result.verdict = SpectrumVerdict::StableIndication;
  }
  return result;
}

SpectrumVerdict spectrum_scan(const Roesser2D& model, int n_samples) {
  return spectrum_scan_detailed(char_poly(model), n_samples).verdict;
}

AdmissibilityReport analyze(const Roesser2D& model, int n_samples) {
  AdmissibilityReport report;
  const BivariatePoly poly = char_poly(model);
  report.regular = !poly.is_zero();
  report.notes.push_back(
      "spectrum verdicts come from a finite root scan, not a proof");
  report.notes.push_back(
      "causality compares total degree in (z1, z2) against rank(E)");
  if (!report.regular) {
    report.causal = false;
    report.spectrum = SpectrumVerdict::Indeterminate;
    report.notes.push_back("model is not regular; root scan skipped");
    return report;
  }
  report.causal = poly.total_degree() == numerical_rank(model.E);
  const ScanResult scan = spectrum_scan_detailed(poly, n_samples);
  report.spectrum = scan.verdict;
  report.witness = scan.witness;
  report.samples_used = scan.samples_used;
  report.roots_at_infinity = scan.roots_at_infinity;
  if (scan.roots_at_infinity) {
    report.notes.push_back(
        "leading coefficients vanished on some lines; the corresponding "
        "roots at infinity are a causality matter, not a stability one");
  }
  return report;
}

}  // namespace roesser2d
