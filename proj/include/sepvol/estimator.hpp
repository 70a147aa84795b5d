#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sepvol/measure.hpp"
#include "sepvol/ppt.hpp"
#include "sepvol/rng.hpp"

namespace sepvol {

struct Estimate {
  double value = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
  std::uint64_t accepted = 0;
  std::uint64_t seed = 0;
  int shards = 1;
};

struct McConfig {
  std::uint64_t samples = 4'000'000;
  std::uint64_t seed = 20080101;
  int shards = 1;
  int workers = 0;  // 0: one per hardware thread, never more than shards
};

namespace detail {

inline constexpr std::uint64_t kBlock = 4096;

// Running sums of a paired per-draw estimator (x, y).
struct Moments {
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  std::uint64_t n = 0, acc = 0;

  void add(double x, double y, bool accepted) {
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
    ++n;
    if (accepted) ++acc;
  }
  void merge(const Moments& o) {
    sx += o.sx;
    sy += o.sy;
    sxx += o.sxx;
    syy += o.syy;
    sxy += o.sxy;
    n += o.n;
    acc += o.acc;
  }
};

inline void require_samples(const McConfig& cfg, std::uint64_t least) {
  if (cfg.samples < least)
    throw Error(Errc::DomainError, "at least " + std::to_string(least) + " samples are required");
}

inline int resolve_workers(const McConfig& cfg) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int w = cfg.workers > 0 ? cfg.workers : hw;
  return std::max(1, std::min(w, std::max(1, cfg.shards)));
}

// Evaluates draws 0..samples-1 in fixed-size blocks. Shards own contiguous
// block ranges; block sums are merged in block order afterwards, so the
// result does not depend on the shard or worker count.
template <class Draw>
Moments run_draws(const McConfig& cfg, std::uint32_t stream, const Draw& draw) {
  const std::uint64_t nblocks = (cfg.samples + kBlock - 1) / kBlock;
  std::vector<Moments> partial(nblocks);
  const int shards = std::max(1, cfg.shards);
  auto do_block = [&](std::uint64_t b) {
    Moments m;
    const std::uint64_t lo = b * kBlock, hi = std::min(cfg.samples, lo + kBlock);
    for (std::uint64_t i = lo; i < hi; ++i) {
      DrawRng rng(cfg.seed, stream, i);
      double x = 0, y = 0;
      const bool a = draw(rng, x, y);
      m.add(x, y, a);
    }
    partial[b] = m;
  };
  auto do_shard = [&](int s) {
    const std::uint64_t b0 = nblocks * s / shards, b1 = nblocks * (s + 1) / shards;
    for (std::uint64_t b = b0; b < b1; ++b) do_block(b);
  };
  const int workers = resolve_workers(cfg);
  if (workers <= 1) {
    for (int s = 0; s < shards; ++s) do_shard(s);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int s = w; s < shards; s += workers) do_shard(s);
      });
    for (auto& t : pool) t.join();
  }
  Moments total;
  for (const auto& m : partial) total.merge(m);
  return total;
}

inline Estimate mean_estimate(const Moments& m, const McConfig& cfg, bool use_y) {
  const double n = static_cast<double>(m.n);
  const double s = use_y ? m.sy : m.sx, ss = use_y ? m.syy : m.sxx;
  const double mean = s / n;
  const double var = n > 1 ? std::max(0.0, (ss - n * mean * mean) / (n - 1)) : 0.0;
  return {mean, std::sqrt(var / n), m.n, m.acc, cfg.seed, std::max(1, cfg.shards)};
}

inline Estimate ratio_estimate(const Moments& m, const McConfig& cfg, std::uint64_t accepted) {
  const double n = static_cast<double>(m.n);
  const double mx = m.sx / n, my = m.sy / n;
  if (!(mx > 0)) throw Error(Errc::DegenerateScenario, "total volume estimate is zero");
  const double p = my / mx;
  const double cxx = (m.sxx - n * mx * mx) / (n - 1);
  const double cyy = (m.syy - n * my * my) / (n - 1);
  const double cxy = (m.sxy - n * mx * my) / (n - 1);
  const double var = std::max(0.0, (cyy - 2 * p * cxy + p * p * cxx) / (mx * mx));
  return {p, std::sqrt(var / n), m.n, accepted, cfg.seed, std::max(1, cfg.shards)};
}

inline constexpr std::uint32_t kStreamC = 1;
inline constexpr std::uint32_t kStreamS = 2;
inline constexpr std::uint32_t kStreamV = 3;

}  // namespace detail

/// z-volume of the positivity region, 2^F times the acceptance fraction.
inline Estimate estimate_c(const ScenarioSpec& spec, const McConfig& cfg) {
  detail::require_samples(cfg, 1000);
  const PositivityKernel pos(spec);
  const int f = spec.total_components;
  const double box = box_volume(spec);
  auto m = detail::run_draws(cfg, detail::kStreamC, [&](DrawRng& rng, double& x, double& y) {
    double z[160];
    sample_z(rng, f, z);
    const bool a = pos(z);
    x = a ? box : 0.0;
    y = x;
    return a;
  });
  return detail::mean_estimate(m, cfg, false);
}

/// z-volume at fixed ratio variables of the points accepted by `pred`
/// (called as pred(z, d) only on positive points).
template <class Pred>
Estimate estimate_S_with(const ScenarioSpec& spec, const RatioCoords& nu, const McConfig& cfg, const Pred& pred) {
  detail::require_samples(cfg, 1000);
  const std::vector<double> d = canonical_diag(nu);
  const PositivityKernel pos(spec);
  const int f = spec.total_components;
  const double box = box_volume(spec);
  auto m = detail::run_draws(cfg, detail::kStreamS, [&](DrawRng& rng, double& x, double& y) {
    double z[160];
    sample_z(rng, f, z);
    const bool a = pos(z) && pred(static_cast<const double*>(z), d.data());
    x = a ? box : 0.0;
    y = x;
    return a;
  });
  return detail::mean_estimate(m, cfg, false);
}

inline Estimate estimate_S(const ScenarioSpec& spec, const RatioCoords& nu, const McConfig& cfg) {
  if (!(nu.split == spec.split)) throw Error(Errc::ArityMismatch, "ratio split does not match scenario");
  const PptKernel ppt(spec);
  return estimate_S_with(spec, nu, cfg, [&](const double* z, const double* d) { return ppt(z, d); });
}

/// The nine ratio values 1/5, 2/5, 3/5, 4/5, 1, 2, 3, 4, 5.
inline const std::vector<double>& nine_point_grid() {
  static const std::vector<double> g = {0.2, 0.4, 0.6, 0.8, 1.0, 2.0, 3.0, 4.0, 5.0};
  return g;
}

struct SweepTable {
  std::vector<RatioCoords> grid;
  std::vector<Estimate> estimates;
  std::vector<std::optional<double>> closed;
};

/// S at each grid point with per-point derived seeds. `closed`, when given,
/// supplies reference values.
template <class Closed>
SweepTable sweep_S(const ScenarioSpec& spec, const std::vector<RatioCoords>& grid, const McConfig& cfg,
                   const Closed& closed) {
  if (grid.empty()) throw Error(Errc::DomainError, "empty sweep grid");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!std::lexicographical_compare(grid[k - 1].values.begin(), grid[k - 1].values.end(), grid[k].values.begin(),
                                      grid[k].values.end()))
      throw Error(Errc::DomainError, "sweep grid must be strictly increasing");
  SweepTable t;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    McConfig c = cfg;
    c.seed = derive_seed(cfg.seed, k);
    t.grid.push_back(grid[k]);
    t.estimates.push_back(estimate_S(spec, grid[k], c));
    t.closed.push_back(closed(grid[k]));
  }
  return t;
}

inline SweepTable sweep_S(const ScenarioSpec& spec, const std::vector<RatioCoords>& grid, const McConfig& cfg) {
  return sweep_S(spec, grid, cfg, [](const RatioCoords&) { return std::optional<double>{}; });
}

// ---------------------------------------------------------------------------
// Full real 4x4 c by the alternative coordinate systems

inline constexpr std::uint32_t kStreamSpheroidal = 4;
inline constexpr std::uint32_t kStreamCad = 5;

/// c of the full real 4x4 case as the mean spheroidal jacobian. gamma2 is
/// drawn log-uniformly on [gamma1, 1/gamma1]. `violations` counts images
/// outside the positivity region.
inline Estimate estimate_c_spheroidal(const McConfig& cfg, std::uint64_t* violations = nullptr) {
  detail::require_samples(cfg, 1000);
  constexpr double two_pi = 2 * std::numbers::pi;
  const PositivityKernel pos(make_scenario(kQubitQubit, {{1, 2, Field::Real}, {1, 3, Field::Real},
                                                         {1, 4, Field::Real}, {2, 3, Field::Real},
                                                         {2, 4, Field::Real}, {3, 4, Field::Real}}));
  auto m = detail::run_draws(cfg, kStreamSpheroidal, [&](DrawRng& rng, double& x, double& y) {
    SpheroidalPoint p;
    const double g1 = rng.uniform_open();
    const double span = -2 * std::log(g1);
    p.gamma1 = g1;
    p.gamma2 = std::min(1 / g1, g1 * std::exp(span * rng.uniform()));
    p.Z34 = g1 * rng.uniform(-1, 1);
    p.z12 = rng.uniform(-1, 1);
    p.theta1 = two_pi * rng.uniform();
    p.theta2 = two_pi * rng.uniform();
    const auto img = spheroidal_to_z(p);
    // inverse sampling density: 1 * gamma2 * span * 2 gamma1 * 2 * (2 pi)^2
    x = img.jacobian * p.gamma2 * span * 2 * g1 * 2 * two_pi * two_pi;
    y = x;
    return pos(img.z.data());
  });
  if (violations) *violations = m.n - m.acc;
  return detail::mean_estimate(m, cfg, false);
}

/// c of the full real 4x4 case from the nested limits: uniform draws inside
/// each interval, weighted by the interval widths.
inline Estimate estimate_c_cad(const McConfig& cfg) {
  detail::require_samples(cfg, 1000);
  auto m = detail::run_draws(cfg, kStreamCad, [&](DrawRng& rng, double& x, double& y) {
    const double z12 = rng.uniform(-1, 1), z13 = rng.uniform(-1, 1), z14 = rng.uniform(-1, 1);
    const Interval a = cad_z23(z12, z13), b = cad_z24(z12, z14);
    const double z23 = a.lo + a.width() * rng.uniform(), z24 = b.lo + b.width() * rng.uniform();
    const Interval c = cad_z34(z12, z13, z14, z23, z24);
    x = 8 * a.width() * b.width() * std::max(0.0, c.width());
    y = x;
    return true;
  });
  return detail::mean_estimate(m, cfg, false);
}

struct VolumeEstimates {
  Estimate v_tot, v_sep, p;
};

/// Joint draw of (d, z) weighted by the Bloore volume element.
template <class Pred>
VolumeEstimates estimate_volumes_with(const ScenarioSpec& spec, const McConfig& cfg, const Pred& pred) {
  detail::require_samples(cfg, 10000);
  const PositivityKernel pos(spec);
  const int n = spec.n(), f = spec.total_components;
  const std::vector<double> w = weight_exponents(spec);
  const double k = box_volume(spec) * simplex_mass(n);
  auto m = detail::run_draws(cfg, detail::kStreamV, [&](DrawRng& rng, double& x, double& y) {
    double d[detail::kMaxOrder];
    double z[160];
    for (;;) {
      sample_simplex(rng, n, d);
      if (*std::min_element(d, d + n) >= 1e-15) break;
    }
    sample_z(rng, f, z);
    x = y = 0;
    if (!pos(z)) return false;
    double wt = k;
    for (int i = 0; i < n; ++i)
      if (w[i] != 0) wt *= std::pow(d[i], w[i]);
    x = wt;
    if (pred(static_cast<const double*>(z), static_cast<const double*>(d))) y = wt;
    return true;
  });
  VolumeEstimates v;
  v.v_tot = detail::mean_estimate(m, cfg, false);
  v.v_sep = detail::mean_estimate(m, cfg, true);
  v.p = detail::ratio_estimate(m, cfg, m.acc);
  return v;
}

inline VolumeEstimates estimate_volumes(const ScenarioSpec& spec, const McConfig& cfg) {
  const PptKernel ppt(spec);
  return estimate_volumes_with(spec, cfg, [&](const double* z, const double* d) { return ppt(z, d); });
}

/// Doubles the sample count from cfg.samples until the probability's
/// standard error reaches `target`, capped at `cap` draws.
inline VolumeEstimates estimate_volumes_until(const ScenarioSpec& spec, McConfig cfg, double target,
                                              std::uint64_t cap = 100'000'000) {
  for (;;) {
    VolumeEstimates v = estimate_volumes(spec, cfg);
    if (v.p.std_error <= target || cfg.samples >= cap) return v;
    cfg.samples = std::min(cap, 2 * cfg.samples);
  }
}

}  // namespace sepvol
