#pragma once

// Acceptance criteria shared by `moebius verify` and the acceptance test binary.
// One machine-readable line per criterion:  id=<n> name=<..> measured=<..> bound=<..> pass=<0|1>

#include <boost/math/quadrature/gauss.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "moebius/moebius.hpp"

namespace moebius::verify {

enum class Suite { Fast, Full };

struct Options {
  Suite suite = Suite::Fast;
  std::uint64_t seed = 12345;
  bool break_gradient = false;  // fault injection: H is scaled by 1.5 where the suite consumes it
};

struct Result {
  int id = 0;
  std::string name;
  double measured = 0.0;
  std::string bound;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string format_line(const Result& r) {
  std::ostringstream os;
  os << "id=" << r.id << " name=" << r.name << " measured=" << fmt(r.measured) << " bound=" << r.bound
     << " pass=" << (r.pass ? 1 : 0) << " seconds=" << fmt(r.seconds);
  if (!r.detail.empty()) os << " detail=\"" << r.detail << '"';
  return os.str();
}

namespace detail {

inline Points suite_gradient(const ArcLengthCurve& c, const Options& opt) {
  Points h = mobius_gradient(c, false).values;
  if (opt.break_gradient)
    for (auto& v : h) v *= 1.5;
  return h;
}

/// Least-squares slope of log(err) against log(1/N).
inline double fitted_order(const std::vector<double>& ns, const std::vector<double>& errs) {
  double mx = 0.0, my = 0.0;
  const double m = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    mx += std::log(ns[i]) / m;
    my += std::log(std::abs(errs[i])) / m;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double dx = std::log(ns[i]) - mx;
    sxy += dx * (std::log(std::abs(errs[i])) - my);
    sxx += dx * dx;
  }
  return -sxy / sxx;
}

/// Random trigonometric polynomial of degree kmax with its exact derivatives.
struct Bandlimited {
  std::vector<double> a, b;  // cos / sin coefficients, index = wavenumber
  double l = 1.0;

  std::vector<double> sample(std::size_t n, int order = 0) const {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = l * static_cast<double>(i) / static_cast<double>(n);
      double v = 0.0;
      for (std::size_t k = 1; k < a.size(); ++k) {
        const double xi = 2.0 * kPi * static_cast<double>(k) / l;
        // d^order/dx^order of a cos + b sin
        double c = a[k], s = b[k];
        for (int o = 0; o < order; ++o) {
          const double nc = xi * s, ns = -xi * c;
          c = nc;
          s = ns;
        }
        v += c * std::cos(xi * x) + s * std::sin(xi * x);
      }
      f[i] = v;
    }
    return f;
  }
};

inline Bandlimited random_bandlimited(std::mt19937_64& rng, double l, int kmax) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Bandlimited out;
  out.l = l;
  out.a.assign(kmax + 1, 0.0);
  out.b.assign(kmax + 1, 0.0);
  for (int k = 1; k <= kmax; ++k) {
    out.a[k] = uni(rng);
    out.b[k] = uni(rng);
  }
  return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * h;
}

/// 2 int_x int_{|w|<=l/2} int_0^1 (1-s)(f'(x+sw)-f'(x))(g'(x+sw)-g'(x))/w^2 by Gauss-Legendre
/// in (s, w) and the trapezoid rule in x. Used as an independent value of <Qt f'', g>.
inline double qt_bilinear_quadrature(const std::vector<double>& f, const std::vector<double>& g, double l) {
  const std::size_t n = f.size();
  const double h = l / static_cast<double>(n);
  const fourier::TrigInterpolant fi(f, l), gi(g, l);
  using GL = boost::math::quadrature::gauss<double, 20>;
  const int panels = 16;
  return 2.0 * h * parallel_sum(n, [&](std::size_t i) {
    const double x = static_cast<double>(i) * h;
    const double fx = fi(x, 1), gx = gi(x, 1);
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = -0.5 * l + l * p / panels;
      const double b = a + l / panels;
      acc += GL::integrate(
          [&](double w) {
            return GL::integrate(
                       [&](double s) {
                         return (1.0 - s) * (fi(x + s * w, 1) - fx) * (gi(x + s * w, 1) - gx);
                       },
                       0.0, 1.0) /
                   (w * w);
          },
          a, b);
    }
    return acc;
  });
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline Result c1_circle_energy(const Options&) {
  Result r{1, "circle-energy"};
  std::vector<double> ns{64, 128, 256, 512}, errs;
  for (double n : ns) errs.push_back(mobius_energy(zoo::circle(static_cast<std::size_t>(n))).total - 4.0);
  const double order = detail::fitted_order(ns, errs);
  r.measured = std::abs(errs.back());
  r.bound = "|E512-4|<1e-3,order>=2";
  r.pass = r.measured < 1e-3 && order >= 2.0;
  r.detail = "order=" + fmt(order) + " errs=" + fmt(errs[0]) + "," + fmt(errs[1]) + "," + fmt(errs[2]) + "," +
             fmt(errs[3]);
  return r;
}

inline Result c2_circle_critical(const Options&) {
  Result r{2, "circle-criticality"};
  std::vector<double> sup;
  for (std::size_t n : {128, 256, 512}) sup.push_back(mobius_gradient(zoo::circle(n), false).sup_norm());
  const bool monotone = sup[1] < sup[0] && sup[2] < sup[1];
  r.measured = sup[2];
  r.bound = "decreasing,<1e-2";
  r.pass = monotone && sup[2] < 1e-2;
  r.detail = "sup=" + fmt(sup[0]) + "," + fmt(sup[1]) + "," + fmt(sup[2]) + " monotone=" + (monotone ? "1" : "0");
  return r;
}

inline Result c3_first_variation(const Options& opt) {
  Result r{3, "first-variation"};
  const ArcLengthCurve c = zoo::ellipse(256);
  const std::size_t n = c.size();
  const Points h = detail::suite_gradient(c, opt);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    double a[5], b[5];
    for (int k = 0; k < 5; ++k) {
      a[k] = uni(rng);
      b[k] = uni(rng);
    }
    Points v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
      double f = 0.0;
      for (int k = 0; k < 5; ++k) f += (a[k] * std::cos((k + 1) * s) + b[k] * std::sin((k + 1) * s)) / (k + 1);
      const Vec3& t = c.tangent[i];
      v[i] = f * Vec3(-t.y(), t.x(), 0.0);
    }
    const double eps = 1e-5 * c.length;
    auto energy_at = [&](double e) {
      Points p = c.nodes;
      for (std::size_t i = 0; i < n; ++i) p[i] += e * v[i];
      return mobius_energy(reparameterize_spectral(2, p, n)).total;
    };
    const double fd = (energy_at(eps) - energy_at(-eps)) / (2.0 * eps);
    const double ip = l2_inner(c, h, v);
    worst = std::max(worst, std::abs(fd - ip) / std::abs(ip));
  }
  r.measured = worst;
  r.bound = "rel<1e-3";
  r.pass = worst < 1e-3;
  return r;
}

inline Result c4_spectral_symbol(const Options&) {
  Result r{4, "spectral-symbol"};
  const std::size_t n = 256;
  const double l = 2.0 * kPi;
  const SpectralSymbol& sym = spectral_symbol(n, l);
  double lo = 1e300, hi = -1e300, worst = 0.0;
  for (std::size_t k = 5; k <= n / 8; ++k) {
    const double ratio = sym(k) / ((kPi / 3.0) * (2.0 * kPi * static_cast<double>(k) / l));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  r.measured = worst;
  r.bound = "ratio in [0.9,1.1]";
  r.pass = lo >= 0.9 && hi <= 1.1;
  r.detail = "ratio_range=[" + fmt(lo) + "," + fmt(hi) + "]";
  return r;
}

inline Result c5_self_adjoint(const Options& opt) {
  Result r{5, "qt-self-adjoint-positive"};
  const std::size_t n = opt.suite == Suite::Full ? 128 : 64;
  const double l = 2.0 * kPi;
  const double h = l / static_cast<double>(n);
  std::mt19937_64 rng(opt.seed + 5);
  double asym = 0.0, min_pos = 1e300, form_gap = 0.0, qt_sign = -1e300;
  auto q_of = [&](const detail::Bandlimited& f) { return q_tilde(l, f.sample(n, 2), QMode::Direct); };
  for (int trial = 0; trial < 10; ++trial) {
    const auto fb = detail::random_bandlimited(rng, l, 8);
    const auto gb = detail::random_bandlimited(rng, l, 8);
    const auto f = fb.sample(n), g = gb.sample(n);
    const auto qf = q_of(fb), qg = q_of(gb);
    const double nf = std::sqrt(detail::dot(f, f, h)), ng = std::sqrt(detail::dot(g, g, h));
    asym = std::max(asym, std::abs(detail::dot(qf, g, h) - detail::dot(f, qg, h)) / (nf * ng));
    min_pos = std::min(min_pos, detail::dot(qf, f, h));
    qt_sign = std::max(qt_sign, detail::dot(q_tilde(l, f, QMode::Direct), f, h));
    if (trial < 2) {
      const double form = detail::qt_bilinear_quadrature(f, g, l);
      form_gap = std::max(form_gap, std::abs(form - detail::dot(qf, g, h)) / std::abs(form));
    }
  }
  r.measured = asym;
  r.bound = "asym<=1e-10,<Qf,f>>=-1e-12";
  r.pass = asym <= 1e-10 && min_pos >= -1e-12;
  r.detail = "min<Qf,f>=" + fmt(min_pos) + " max<Qt f,f>=" + fmt(qt_sign) + " bilinear_form_rel_gap=" + fmt(form_gap);
  return r;
}

/// Shared by criteria 6 and 7.
struct EllipseRun {
  Trajectory traj;
  double seconds = 0.0;
};

inline const EllipseRun& ellipse_imex_run() {
  static const EllipseRun run = [] {
    EllipseRun out;
    const auto t0 = std::chrono::steady_clock::now();
    FlowConfig cfg;
    cfg.scheme = Scheme::Imex;
    cfg.n = 256;
    cfg.t_end = 20.0;
    cfg.stop_stationary_tol = 1e-8;
    cfg.snapshot_every = 5;
    cfg.alarm = false;
    out.traj = run_flow(zoo::ellipse(256), cfg);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }();
  return run;
}

inline Result c6_distortion_bound(const Options& opt) {
  Result r{6, "distortion-bound"};
  double worst = 0.0;  // max of dist / bound
  std::size_t checked = 0;
  const std::size_t n = opt.suite == Suite::Full ? 512 : 256;
  for (const auto& name : zoo::names()) {
    zoo::Params p;
    p.seed = opt.seed;
    const ArcLengthCurve c = zoo::make(name, n, p);
    worst = std::max(worst, distortion(c) / distortion_bound(mobius_energy(c).total));
    ++checked;
  }
  const auto& run = ellipse_imex_run();
  for (const auto& s : run.traj.snapshots) {
    worst = std::max(worst, distortion(s.curve) / distortion_bound(mobius_energy(s.curve).total));
    ++checked;
  }
  r.measured = worst;
  r.bound = "dist/(18exp(E/4))<=1";
  r.pass = worst <= 1.0;
  r.detail = "curves=" + std::to_string(checked);
  return r;
}

inline Result c7_planar_convergence(const Options&) {
  Result r{7, "planar-convergence"};
  const auto& run = ellipse_imex_run();
  const auto& recs = run.traj.records;
  bool monotone = true;
  for (std::size_t i = 1; i < recs.size(); ++i)
    if (recs[i].energy > recs[i - 1].energy + 1e-8 * std::abs(recs[i - 1].energy)) monotone = false;
  const ArcLengthCurve& last = run.traj.snapshots.back().curve;
  const double cv = curvature_stats(last).cv;
  const double de = std::abs(recs.back().energy - 4.0);
  r.measured = cv;
  r.bound = "cv<0.02,|E-4|<1e-2,monotone";
  r.pass = cv < 0.02 && de < 1e-2 && monotone;
  r.seconds = run.seconds;
  r.detail = "|E-4|=" + fmt(de) + " t=" + fmt(recs.back().t) + " steps=" + std::to_string(recs.size() - 1) +
             " monotone=" + (monotone ? "1" : "0") + " stop=" + to_string(run.traj.stop);
  return r;
}

inline Result c8_dissipation(const Options& opt) {
  Result r{8, "dissipation-identity"};
  FlowState s = make_state(zoo::ellipse(256));
  const double dt = explicit_dt_cap(s.curve, FlowConfig{}.c_dt);
  const double e0 = s.energy;
  double predicted = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Points h = detail::suite_gradient(s.curve, opt);
    predicted += dt * l2_inner(s.curve, h, h);
    s = step_explicit(s, dt);
  }
  const double actual = e0 - s.energy;
  r.measured = std::abs(actual - predicted) / predicted;
  r.bound = "rel<0.2";
  r.pass = r.measured < 0.2;
  r.detail = "dE=" + fmt(actual) + " sum_dt_H2=" + fmt(predicted);
  return r;
}

inline Result c9_tangent_point(const Options& opt) {
  Result r{9, "tangent-point-curvature"};
  std::mt19937_64 rng(opt.seed + 9);
  const ArcLengthCurve circ = zoo::circle(256);
  std::uniform_int_distribution<std::size_t> pick(0, circ.size() - 1);
  double circ_err = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    if (j == i) j = (i + 1) % circ.size();
    circ_err = std::max(circ_err, (tangent_point_curvature(circ, i, j) - circ.curvature[i]).norm());
  }
  // Circle-fit oracle: centre on the normal line through g(x) equidistant from g(x) and g(y).
  const ArcLengthCurve el = zoo::ellipse(256);
  double fit_err = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    if (j == i) j = (i + 1) % el.size();
    const Vec3 x = el.nodes[i], y = el.nodes[j], t = el.tangent[i];
    const Vec3 nrm(-t.y(), t.x(), 0.0);
    const double denom = 2.0 * (y - x).dot(nrm);
    Vec3 oracle = Vec3::Zero();
    if (std::abs(denom) > 1e-14) {
      const double tc = (y - x).squaredNorm() / denom;  // centre = x + tc * nrm
      oracle = nrm / tc;
    }
    fit_err = std::max(fit_err, (tangent_point_curvature(el, i, j) - oracle).norm());
  }
  r.measured = std::max(circ_err, fit_err);
  r.bound = "circle<1e-10,fit<1e-8";
  r.pass = circ_err < 1e-10 && fit_err < 1e-8;
  r.detail = "circle=" + fmt(circ_err) + " ellipse_fit=" + fmt(fit_err);
  return r;
}

inline Result c10_el_residual(const Options&) {
  Result r{10, "el-residual"};
  std::vector<double> sup;
  for (std::size_t n : {128, 256, 512}) sup.push_back(el_residual(zoo::circle(n)).sup);
  const double ell = el_residual(zoo::ellipse(256)).sup;
  const bool decreasing = sup[1] < sup[0] && sup[2] < sup[1];
  r.measured = sup[1];
  r.bound = "circle<1e-2 decreasing,ellipse>0.1";
  r.pass = sup[1] < 1e-2 && decreasing && ell > 0.1;
  r.detail = "circle=" + fmt(sup[0]) + "," + fmt(sup[1]) + "," + fmt(sup[2]) + " ellipse=" + fmt(ell) +
             " decreasing=" + (decreasing ? "1" : "0");
  return r;
}

/// Brute-force E^int over index windows, interpolated in r like the library's definition.
inline double scan_intrinsic(const ArcLengthCurve& c, std::size_t center, double r) {
  const std::size_t n = c.size();
  const double h = c.spacing();
  auto window = [&](std::size_t m) {
    std::vector<std::size_t> idx;
    if (2 * m + 1 >= n) {
      for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    } else {
      for (long o = -static_cast<long>(m); o <= static_cast<long>(m); ++o)
        idx.push_back(static_cast<std::size_t>((static_cast<long>(center) + o + static_cast<long>(n)) % static_cast<long>(n)));
    }
    double s = 0.0;
    for (std::size_t a : idx)
      for (std::size_t b : idx) s += pair_density(c, a, b);
    return s * h * h;
  };
  const double ratio = std::min(r, 0.5 * c.length) / h;
  const std::size_t m = std::min(n / 2, static_cast<std::size_t>(std::floor(ratio + 1e-12)));
  const double frac = std::clamp(ratio - static_cast<double>(m), 0.0, 1.0);
  if (m + 1 > n / 2) return window(m);
  return window(m) + frac * (window(m + 1) - window(m));
}

inline Result c11_blowup_pipeline(const Options&) {
  Result r{11, "blowup-pipeline"};
  const double eps0 = kDefaultEps0, rad = 0.1;
  const auto family = hairpin_family(256, 8);
  // Exhaustive oracle: first frame whose best node reaches eps0, lowest index on ties.
  std::size_t o_frame = family.size(), o_node = 0;
  for (std::size_t f = 0; f < family.size() && o_frame == family.size(); ++f) {
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < family[f].curve.size(); ++i) {
      const double v = scan_intrinsic(family[f].curve, i, rad);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    if (best >= eps0) {
      o_frame = f;
      o_node = arg;
    }
  }
  bool match = false, norm_ok = false, energy_ok = false;
  double idem = 1e300, g0 = 1e300, eint = 0.0;
  try {
    const ConcentrationEvent ev = pick_concentration(family, eps0, rad);
    match = ev.step == family[o_frame].step && ev.node == o_node;
    const BlowupProfile prof = extract_profile(family, ev);
    g0 = prof.curve.nodes[0].norm();
    eint = prof.e_int_b1;
    norm_ok = g0 < 2.0;
    energy_ok = eint >= eps0 - 1e-3;
    const BlowupProfile again = extract_profile(prof.curve, 0, 1.0);
    idem = 0.0;
    for (std::size_t i = 0; i < prof.curve.size(); ++i)
      idem = std::max(idem, (again.curve.nodes[i] - prof.curve.nodes[i]).norm());
  } catch (const Error& e) {
    r.detail = e.what();
  }
  r.measured = idem;
  r.bound = "oracle-match,|g0|<2,Eint>=eps0-1e-3,idem<=1e-10";
  r.pass = match && norm_ok && energy_ok && idem <= 1e-10;
  if (r.detail.empty())
    r.detail = "match=" + std::string(match ? "1" : "0") + " frame=" + std::to_string(o_frame) + " node=" +
               std::to_string(o_node) + " |g0|=" + fmt(g0) + " Eint_B1=" + fmt(eint);
  return r;
}

inline Result c12_osculating(const Options&) {
  Result r{12, "osculating-trichotomy"};
  const ArcLengthCurve el = zoo::ellipse(256);
  std::size_t imax = 0, imin = 0;
  for (std::size_t i = 0; i < el.size(); ++i) {
    if (el.curvature[i].norm() > el.curvature[imax].norm()) imax = i;
    if (el.curvature[i].norm() < el.curvature[imin].norm()) imin = i;
  }
  const ClearanceResult at_max = osculating_clearance(el, imax);
  const ClearanceResult at_min = osculating_clearance(el, imin);
  const ArcLengthCurve circ = zoo::circle(256);
  double circ_margin = 0.0;
  for (std::size_t i = 0; i < circ.size(); i += 16)
    circ_margin = std::max(circ_margin, std::abs(osculating_clearance(circ, i).margin));
  r.measured = circ_margin;
  r.bound = "max->disjoint,min->contains,|circle margin|<1e-8";
  r.pass = at_max.verdict == Clearance::Disjoint && at_min.verdict == Clearance::ContainsCurve && circ_margin < 1e-8;
  r.detail = std::string("max_vertex=") + to_string(at_max.verdict) + " min_vertex=" + to_string(at_min.verdict);
  return r;
}

inline std::string flow_csv_with_threads(int threads, const Options& opt) {
  const int saved = num_threads();
  set_num_threads(threads);
  FlowConfig cfg;
  cfg.n = opt.suite == Suite::Full ? 128 : 64;
  cfg.t_end = 0.5;
  cfg.max_steps = opt.suite == Suite::Full ? 60 : 30;
  cfg.seed = opt.seed;
  zoo::Params p;
  p.seed = opt.seed;
  const Trajectory traj = run_flow(zoo::make("random-fourier", cfg.n, p), cfg);
  set_num_threads(saved);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  return os.str();
}

inline Result c13_determinism(const Options& opt) {
  Result r{13, "determinism"};
  const std::string one = flow_csv_with_threads(1, opt);
  const std::string four = flow_csv_with_threads(4, opt);
  r.measured = one == four ? 0.0 : 1.0;
  r.bound = "bit-identical";
  r.pass = one == four && !one.empty();
  r.detail = "bytes=" + std::to_string(one.size());
  return r;
}

inline std::vector<std::function<Result(const Options&)>> criteria() {
  return {c1_circle_energy,   c2_circle_critical,    c3_first_variation, c4_spectral_symbol, c5_self_adjoint,
          c6_distortion_bound, c7_planar_convergence, c8_dissipation,     c9_tangent_point,   c10_el_residual,
          c11_blowup_pipeline, c12_osculating,        c13_determinism};
}

/// Runs every criterion, printing one line each; returns the number of failures.
inline int run_suite(const Options& opt, std::ostream& os, std::vector<Result>* out = nullptr) {
  int failures = 0;
  int id = 0;
  for (const auto& crit : criteria()) {
    ++id;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = crit(opt);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion-" + std::to_string(id);
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.seconds = std::max(r.seconds, secs);
    if (!r.pass) ++failures;
    os << format_line(r) << std::endl;
    if (out) out->push_back(r);
  }
  return failures;
}

}  // namespace moebius::verify
