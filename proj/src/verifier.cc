#include "lyapsip/verifier.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lyapsip/kernels.h"

namespace lyapsip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kChunk = 2048;

double Dot(const std::vector<double>& c, const Dictionary& dict, const Vector& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < dict.size(); ++i) s += c[i] * dict[i].Value(y);
  return s;
}

// Unit-cube coordinates of the origin under sample_in.
std::vector<double> OriginU(const Neighborhood& nbhd) {
  std::vector<double> u(nbhd.dim(), 0.5);
  if (nbhd.kind() == Neighborhood::Kind::kBox) {
    for (int k = 0; k < nbhd.dim(); ++k) {
      u[k] = (0.0 - nbhd.lo()[k]) / (nbhd.hi()[k] - nbhd.lo()[k]);
    }
  }
  return u;
}

struct Residuals {
  double c1, c2, c3;
};

// Residuals at one point, evaluated straight from the definitions. Used by
// the DE refinement; the grid pass uses the batched form below.
Residuals PointResiduals(const LyapunovTriplet& triplet, const VectorField& field,
                         const Certificate& cert, const Vector& y) {
  const double r = y.norm();
  const double v = EvalV(triplet, cert, y);
  const double vdot = EvalVdot(triplet, field, cert, y);
  const double w = EvalW(triplet, cert, y);
  Residuals out;
  out.c1 = v - triplet.alpha.Value(r);
  out.c2 = triplet.mode == Mode::kChetaev ? vdot - w : -w - vdot;
  out.c3 = cert.mu.empty() ? 0.0 : w - triplet.beta.Value(r);
  return out;
}

}  // namespace

void Certificate::CheckAgainst(const LyapunovTriplet& triplet) const {
  if (static_cast<int>(lambda.size()) != triplet.q()) {
    throw std::invalid_argument("certificate has " + std::to_string(lambda.size()) +
                                " V coefficients, dictionary has " +
                                std::to_string(triplet.q()));
  }
  if (!mu.empty() && static_cast<int>(mu.size()) != triplet.m()) {
    throw std::invalid_argument("certificate has " + std::to_string(mu.size()) +
                                " W coefficients, dictionary has " +
                                std::to_string(triplet.m()));
  }
  if (mode != triplet.mode) {
    throw std::invalid_argument("certificate mode " + ModeName(mode) +
                                " differs from triplet mode " + ModeName(triplet.mode));
  }
  for (double c : lambda) {
    if (!std::isfinite(c)) throw std::invalid_argument("certificate: non-finite lambda");
  }
  for (double c : mu) {
    if (!std::isfinite(c)) throw std::invalid_argument("certificate: non-finite mu");
  }
}

double EvalV(const LyapunovTriplet& triplet, const Certificate& cert,
             const Vector& y) {
  return Dot(cert.lambda, triplet.v_dict, y);
}

double EvalVdot(const LyapunovTriplet& triplet, const VectorField& field,
                const Certificate& cert, const Vector& y) {
  const Vector f = field.Eval(y);
  double s = 0.0;
  for (int i = 0; i < triplet.q(); ++i) {
    s += cert.lambda[i] * triplet.v_dict[i].DirectionalDerivative(y, f);
  }
  return s;
}

double EvalW(const LyapunovTriplet& triplet, const Certificate& cert,
             const Vector& y) {
  if (!cert.mu.empty()) return Dot(cert.mu, triplet.w_dict, y);
  return triplet.beta.Value(y.norm());
}

std::string VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kVerified:
      return "verified";
    case Verdict::kViolated:
      return "violated";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

std::vector<std::vector<double>> HaltonPoints(int dim, int count) {
  static const int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  if (dim < 1 || dim > 20) throw std::invalid_argument("Halton: dim must be in [1, 20]");
  std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
  for (int i = 0; i < count; ++i) {
    for (int k = 0; k < dim; ++k) {
      const int base = kPrimes[k];
      double f = 1.0, r = 0.0;
      for (long n = i + 1; n > 0; n /= base) {
        f /= base;
        r += f * static_cast<double>(n % base);
      }
      pts[i][k] = r;
    }
  }
  return pts;
}

VerificationReport Verify(const LyapunovTriplet& triplet, const VectorField& field,
                          const Certificate& cert, const VerifyConfig& cfg) {
  triplet.Validate();
  cert.CheckAgainst(triplet);
  if (field.dim() != triplet.dim()) {
    throw std::invalid_argument("verify: field and triplet dimensions differ");
  }
  const int n = triplet.dim();
  const int q = triplet.q();
  const int m = cert.mu.empty() ? 0 : triplet.m();
  const bool has_c3 = !cert.mu.empty();
  const bool chetaev = triplet.mode == Mode::kChetaev;

  VerificationReport report;
  report.tol = cfg.tol;
  report.margin_from_beta = triplet.mode == Mode::kAsymptotic && cert.mu.empty();
  const int grid_points = cfg.grid_points > 0 ? cfg.grid_points
                                              : (n <= 3 ? 10000 : 100000);

  // Grid: the origin followed by Halton points.
  std::vector<std::vector<double>> grid_u = HaltonPoints(n, grid_points);
  grid_u.insert(grid_u.begin(), OriginU(triplet.nbhd));
  const int total = static_cast<int>(grid_u.size());
  report.grid_points = total;

  std::vector<double> c1(total), c2(total), c3(has_c3 ? total : 0);
  std::vector<double> phi(static_cast<std::size_t>(kChunk) * q);
  std::vector<double> dphi(static_cast<std::size_t>(kChunk) * q);
  std::vector<double> psi(static_cast<std::size_t>(kChunk) * std::max(m, 1));
  std::vector<double> v(kChunk), vdot(kChunk), w(kChunk);
  std::vector<double> alpha(kChunk), beta(kChunk);
  for (int start = 0; start < total; start += kChunk) {
    const int count = std::min(kChunk, total - start);
    for (int p = 0; p < count; ++p) {
      const Vector y = triplet.nbhd.SampleIn(grid_u[start + p]);
      const Vector f = field.Eval(y);
      const double r = y.norm();
      alpha[p] = triplet.alpha.Value(r);
      beta[p] = triplet.beta.Value(r);
      for (int i = 0; i < q; ++i) {
        phi[static_cast<std::size_t>(p) * q + i] = triplet.v_dict[i].Value(y);
        dphi[static_cast<std::size_t>(p) * q + i] =
            triplet.v_dict[i].DirectionalDerivative(y, f);
      }
      for (int j = 0; j < m; ++j) {
        psi[static_cast<std::size_t>(p) * m + j] = triplet.w_dict[j].Value(y);
      }
    }
    const std::size_t rows_q = static_cast<std::size_t>(count) * q;
    kernels::Gemv({phi.data(), rows_q}, cert.lambda, {v.data(), static_cast<std::size_t>(count)});
    kernels::Gemv({dphi.data(), rows_q}, cert.lambda,
                  {vdot.data(), static_cast<std::size_t>(count)});
    if (m > 0) {
      kernels::Gemv({psi.data(), static_cast<std::size_t>(count) * m}, cert.mu,
                    {w.data(), static_cast<std::size_t>(count)});
    } else {
      std::copy(beta.begin(), beta.begin() + count, w.begin());
    }
    for (int p = 0; p < count; ++p) {
      c1[start + p] = v[p] - alpha[p];
      c2[start + p] = chetaev ? vdot[p] - w[p] : -w[p] - vdot[p];
      if (has_c3) c3[start + p] = w[p] - beta[p];
    }
  }

  bool finite = true;
  auto refine = [&](const std::vector<double>& values, int which) {
    ResidualMin out;
    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    // NaN sorts last so it never seeds DE; it still marks the run inconclusive.
    for (double x : values) finite = finite && std::isfinite(x);
    const int seeds = std::min(cfg.de_seed_points, total);
    std::partial_sort(order.begin(), order.begin() + std::max(seeds, 1), order.end(),
                      [&](int a, int b) {
                        const double va = std::isnan(values[a]) ? kInf : values[a];
                        const double vb = std::isnan(values[b]) ? kInf : values[b];
                        return va < vb || (va == vb && a < b);
                      });
    out.grid_value = values[order[0]];
    out.grid_argmin = triplet.nbhd.SampleIn(grid_u[order[0]]);

    DeConfig de = cfg.de;
    de.seed = DeriveSeed(cfg.de.seed, which);
    de.initial_members.clear();
    for (int s = 0; s < seeds; ++s) de.initial_members.push_back(grid_u[order[s]]);
    const std::vector<double> lo(n, 0.0), hi(n, 1.0);
    auto residual = [&](std::span<const double> u) {
      const Residuals r = PointResiduals(triplet, field, cert, triplet.nbhd.SampleIn(u));
      return which == 0 ? r.c1 : which == 1 ? r.c2 : r.c3;
    };
    const DeResult res = DeMinimize(residual, lo, hi, de);
    report.de_population = de.population > 0 ? de.population : 15 * n;
    report.de_generations = std::max(report.de_generations, res.generations);
    if (res.value < out.grid_value) {
      out.value = res.value;
      out.argmin = triplet.nbhd.SampleIn(res.x);
    } else {
      out.value = out.grid_value;
      out.argmin = out.grid_argmin;
    }
    finite = finite && std::isfinite(out.value);
    return out;
  };
  report.c1 = refine(c1, 0);
  report.c2 = refine(c2, 1);
  if (has_c3) report.c3 = refine(c3, 2);

  double worst = std::min(report.c1.value, report.c2.value);
  if (report.c3) worst = std::min(worst, report.c3->value);
  report.violation = std::max(0.0, -worst);
  std::ostringstream note;
  if (!finite) {
    report.verdict = Verdict::kInconclusive;
    note << "non-finite residual encountered inside N";
  } else if (worst >= -cfg.tol) {
    report.verdict = Verdict::kVerified;
  } else {
    report.verdict = Verdict::kViolated;
    note << "worst residual " << worst << " below -" << cfg.tol;
  }
  if (report.margin_from_beta) {
    if (!note.str().empty()) note << "; ";
    note << "no margin coefficients: W taken as beta(|y|)";
  }
  if (chetaev) {
    if (!note.str().empty()) note << "; ";
    note << "chetaev mode uses the reconstructed sign convention";
  }
  report.note = note.str();
  return report;
}

std::vector<SphereRow> SphereCurves(const LyapunovTriplet& triplet,
                                    const VectorField& field,
                                    const Certificate& cert,
                                    std::vector<double> radii, const DeConfig& de) {
  cert.CheckAgainst(triplet);
  if (radii.empty()) throw std::invalid_argument("sphere curves: no radii given");
  const double rmax = triplet.nbhd.MaxNorm();
  for (double r : radii) {
    if (!(r > 0.0) || r > rmax * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "sphere curves: radius " << r << " outside (0, " << rmax << "]";
      throw std::invalid_argument(msg.str());
    }
  }
  std::sort(radii.begin(), radii.end());
  const int n = triplet.dim();

  auto point = [n](double r, std::span<const double> angles) {
    Vector y(n);
    double s = r;
    for (int k = 0; k < n - 1; ++k) {
      y[k] = s * std::cos(angles[k]);
      s *= std::sin(angles[k]);
    }
    y[n - 1] = s;
    return y;
  };

  std::vector<SphereRow> rows;
  for (std::size_t idx = 0; idx < radii.size(); ++idx) {
    const double r = radii[idx];
    SphereRow row;
    row.r = r;
    row.alpha = triplet.alpha.Value(r);
    row.neg_beta = -triplet.beta.Value(r);
    auto vmin = [&](const Vector& y) {
      return triplet.nbhd.Contains(y, 1e-12) ? EvalV(triplet, cert, y) : kInf;
    };
    auto vdot_neg = [&](const Vector& y) {
      return triplet.nbhd.Contains(y, 1e-12) ? -EvalVdot(triplet, field, cert, y)
                                             : kInf;
    };
    if (n == 1) {
      Vector a(1), b(1);
      a[0] = r;
      b[0] = -r;
      row.min_v = std::min(vmin(a), vmin(b));
      row.max_vdot = -std::min(vdot_neg(a), vdot_neg(b));
    } else {
      std::vector<double> lo(n - 1, 0.0), hi(n - 1, M_PI);
      hi[n - 2] = 2.0 * M_PI;
      DeConfig cfg = de;
      cfg.seed = DeriveSeed(de.seed, 2 * idx);
      const DeResult a = DeMinimize(
          [&](std::span<const double> ang) { return vmin(point(r, ang)); }, lo, hi, cfg);
      cfg.seed = DeriveSeed(de.seed, 2 * idx + 1);
      const DeResult b = DeMinimize(
          [&](std::span<const double> ang) { return vdot_neg(point(r, ang)); }, lo, hi,
          cfg);
      row.min_v = std::isfinite(a.value) ? a.value : std::nan("");
      row.max_vdot = std::isfinite(b.value) ? -b.value : std::nan("");
    }
    rows.push_back(row);
  }
  return rows;
}

Polynomial ToOriginalCoordinates(const Dictionary& dict,
                                 const std::vector<double>& lambda,
                                 const Vector& eq) {
  return FromDictionary(dict, lambda).Shifted(-eq);
}

double CheckEquilibriumValue(const Polynomial& original, const Vector& eq) {
  return original.Eval(eq);
}

double CheckEquilibriumValue(const Polynomial& original, const Vector& eq,
                             const VectorField& original_field) {
  ShiftToEquilibrium(original_field, eq);  // throws if eq is not an equilibrium
  return CheckEquilibriumValue(original, eq);
}

Recentered RecenterPolynomial(const Polynomial& original, const Vector& eq,
                              const Dictionary& dict) {
  const DictionaryProjection proj = ProjectOntoDictionary(original.Shifted(eq), dict);
  Recentered out;
  out.lambda = proj.coeffs;
  out.equilibrium_value = proj.constant;
  out.max_outside = proj.max_outside;
  return out;
}

}  // namespace lyapsip
