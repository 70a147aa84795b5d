#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sepvol/sepvol.hpp"

using namespace sepvol;
using std::numbers::pi;

namespace {

// Pinned tolerances.
constexpr double kZ = 3.0;
constexpr double kProbFloor = 0.01;
constexpr double kChi2Grid25 = 49.1618;  // chi-square(25) upper tail at the two-sided 3 sigma level
constexpr double kNumeratorAbs = 1e-6;
constexpr double kQuadRel = 1e-6;
constexpr double kBoundAbs = 1e-4;
constexpr std::uint64_t kSamples = 4'000'000;
constexpr std::uint64_t kSamplesFull = 10'000'000;
constexpr std::uint64_t kSamplesGrid = 1'000'000;
constexpr std::uint64_t kSeed = 20080101;
constexpr int kPropertyCases = 10'000;

McConfig mc(std::uint64_t samples, std::uint64_t salt) {
  McConfig c;
  c.samples = samples;
  c.seed = derive_seed(kSeed, salt);
  c.shards = 8;
  return c;
}

struct McCheck {
  std::string label;
  Estimate est;
  double expected;
  std::string expected_text;
  double floor = 0;
  bool one_sided_lower = false;  // only est >= expected - tol is required
};

class Criterion {
 public:
  explicit Criterion(int id) : id_(id) {}

  void mc(std::string label, const Estimate& e, const std::string& expected_text, double floor = 0) {
    mc_.push_back({std::move(label), e, ExactValue::parse(expected_text).value, expected_text, floor, false});
  }
  void mc_value(std::string label, const Estimate& e, double expected, std::string expected_text, double floor = 0,
                bool lower_only = false) {
    mc_.push_back({std::move(label), e, expected, std::move(expected_text), floor, lower_only});
  }
  void exact(const std::string& label, bool ok, const std::string& detail) {
    lines_.push_back(std::string(ok ? "  [ok]   " : "  [FAIL] ") + label + ": " + detail);
    ++total_;
    if (!ok) ++failed_;
  }

  bool finish(const std::string& title) {
    const double z = kZ;
    for (const auto& c : mc_) {
      const double tol = std::max(z * c.est.std_error, c.floor);
      const double diff = c.est.value - c.expected;
      const bool ok = c.one_sided_lower ? diff >= -tol : std::abs(diff) <= tol;
      char buf[512];
      std::snprintf(buf, sizeof buf, "%.6g ± %.2g vs %s = %.6g (tol %.2g)", c.est.value, c.est.std_error,
                    c.expected_text.c_str(), c.expected, tol);
      exact(c.label, ok, buf);
    }
    for (const auto& l : lines_) std::cout << l << "\n";
    std::printf("criterion %d: %s  %s (%d/%d checks)\n", id_, failed_ ? "FAIL" : "PASS", title.c_str(),
                total_ - failed_, total_);
    std::fflush(stdout);
    return failed_ == 0;
  }

 private:
  int id_;
  std::vector<McCheck> mc_;
  std::vector<std::string> lines_;
  int total_ = 0, failed_ = 0;
};

const CatalogEntry& entry(const std::string& alias) {
  const auto* e = catalog().find_alias(alias);
  if (!e) throw Error(Errc::ParseError, "acceptance: missing catalog entry " + alias);
  return *e;
}

// Printed value of a field: the erratum's printed text when there is one.
std::string printed(const CatalogEntry& e, const char* field) {
  if (const auto* x = e.erratum(field)) return x->printed;
  const auto& v = detail::value_slot(e, field);
  if (!v) throw Error(Errc::ParseError, "acceptance: " + e.alias + " has no " + field);
  return v->text;
}

std::uint64_t salt(const std::string& s, int extra = 0) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h + static_cast<std::uint64_t>(extra);
}

void check_probabilities(Criterion& cr, const std::vector<std::string>& aliases, bool volumes = false) {
  for (const auto& a : aliases) {
    const auto& e = entry(a);
    const auto v = estimate_volumes(e.spec, mc(kSamples, salt(a)));
    cr.mc(a + " P", v.p, printed(e, "P"), kProbFloor);
    if (volumes) {
      cr.mc(a + " V_tot", v.v_tot, printed(e, "V_tot"));
      cr.mc(a + " V_sep", v.v_sep, printed(e, "V_sep"));
    }
  }
}

void check_constants(Criterion& cr, const std::vector<std::string>& aliases, const std::string& value) {
  for (const auto& a : aliases)
    cr.mc(a + " c", estimate_c(entry(a).spec, mc(kSamples, salt(a, 1))), value);
}

void check_value_at_one(Criterion& cr, const std::vector<std::string>& aliases, const std::string& value) {
  for (const auto& a : aliases) {
    const auto& e = entry(a);
    const RatioCoords one{e.spec.split, std::vector<double>(e.spec.split.ratio_count(), 1.0)};
    cr.mc(a + " S(1)", estimate_S(e.spec, one, mc(kSamples, salt(a, 2))), value);
  }
}

// ---------------------------------------------------------------------------

bool criterion1() {
  Criterion cr(1);
  check_probabilities(cr, {"qq-real-23", "qq-complex-23", "qq-quaternion-23"}, true);
  return cr.finish("qubit-qubit m=5 probabilities and volumes");
}

bool criterion2() {
  Criterion cr(2);
  check_probabilities(cr, {"qq-real-12-23", "qq-real-13-23", "qq-real-23-24", "qq-real-23-34", "qq-real-12-14",
                           "qq-real-13-14", "qq-real-14-24", "qq-real-14-34", "qq-real-14-23"});
  const auto& iso = entry("qq-real-14-23");
  cr.mc("qq-real-14-23 V_sep", estimate_volumes(iso.spec, mc(kSamples, salt("iso"))).v_sep, printed(iso, "V_sep"));
  return cr.finish("qubit-qubit m=4 real");
}

bool criterion3() {
  Criterion cr(3);
  check_probabilities(cr, {"qq-mixed-c12-r14", "qq-mixed-c13-r14", "qq-mixed-c14-r23", "qq-mixed-c14-r24",
                           "qq-mixed-c14-r34"});
  check_probabilities(cr, {"qq-complex-12-14", "qq-complex-13-14", "qq-complex-14-24", "qq-complex-14-34",
                           "qq-complex-12-23", "qq-complex-13-23", "qq-complex-23-24", "qq-complex-23-34",
                           "qq-complex-14-23"});
  return cr.finish("qubit-qubit m=4 mixed and complex");
}

bool criterion4() {
  Criterion cr(4);
  check_probabilities(cr, {"qq-real-12-23-34", "qq-real-13-23-24", "qq-real-12-14-34", "qq-real-13-14-24"});
  check_probabilities(cr, {"qq-mixed-c12-r23-r34"});
  check_value_at_one(cr, {"qq-real-12-13-14", "qq-real-12-23-24", "qq-real-13-23-34", "qq-real-14-24-34"},
                     "(12 + 16*pi + 3*pi^2)/24");
  check_value_at_one(cr, {"qq-mixed-c12-r13-r14", "qq-mixed-c12-r13-r23", "qq-mixed-c12-r14-r24",
                          "qq-mixed-c12-r23-r24", "qq-mixed-c13-r14-r34", "qq-mixed-c13-r23-r34",
                          "qq-mixed-c14-r24-r34", "qq-mixed-c23-r24-r34"},
                     "56/27 + pi^2/4");
  check_constants(cr, {"qq-complex-14-23-24", "qq-complex-12-14-34", "qq-complex-13-14-24", "qq-complex-14-23-34"},
                  "pi^3/4");
  // listed under pi^3/6 as well as pi^3/4
  check_constants(cr, {"qq-complex-12-13-14", "qq-complex-13-23-34", "qq-complex-14-23-24"}, "pi^3/6");
  return cr.finish("qubit-qubit m=3");
}

bool criterion5() {
  Criterion cr(5);
  std::vector<std::string> m2, m1;
  for (const auto& e : catalog().entries()) {
    if (e.spec.split.kind != SplitKind::QubitQubit || e.spec.widest() != Field::Real) continue;
    if (e.spec.pairs.size() == 4) m2.push_back(e.alias);
    if (e.spec.pairs.size() == 5) m1.push_back(e.alias);
  }
  cr.exact("fifteen m=2 scenarios cataloged", m2.size() == 15, std::to_string(m2.size()));
  cr.exact("six m=1 scenarios cataloged", m1.size() == 6, std::to_string(m1.size()));
  check_constants(cr, m2, "2*pi^2/3");
  check_constants(cr, m1, "8*pi^2/9");
  check_constants(cr, {"qq-mixed-q12-r14"}, printed(entry("qq-mixed-q12-r14"), "c"));
  check_constants(cr, {"qq-mixed-r12-q14"}, printed(entry("qq-mixed-r12-q14"), "c"));
  return cr.finish("c constants");
}

bool criterion6() {
  Criterion cr(6);
  check_probabilities(cr, {"qt-real-15", "qt-complex-15", "qt-real-12-15", "qt-real-13-16", "qt-real-14-16",
                           "qt-real-14-26", "qt-real-15-24", "qt-mixed-c12-r24", "qt-mixed-c14-r24",
                           "qt-complex-12-24"});
  for (const char* a : {"qt-real-15", "qt-complex-15", "qt-real-12-15", "qt-mixed-c12-r24", "qt-complex-12-24"}) {
    const auto& e = entry(a);
    cr.mc(std::string(a) + " V_tot", estimate_volumes(e.spec, mc(kSamples, salt(a, 3))).v_tot, printed(e, "V_tot"));
  }
  const double axis[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  for (const auto* e : catalog().suite("qubit-qutrit")) {
    if (!e->S || e->status == Status::Approximate) continue;
    bool bivariate = false;
    for (double a : axis)
      for (double b : axis)
        if (std::abs(eval_S(*e, RatioCoords{kQubitQutrit, {a, b}}) - eval_S(*e, RatioCoords{kQubitQutrit, {a, 1.0}})) >
            1e-12)
          bivariate = true;
    if (!bivariate) continue;
    int k = 0;
    double chi2 = 0, worst = 0;
    for (double a : axis)
      for (double b : axis) {
        const RatioCoords nu{kQubitQutrit, {a, b}};
        const auto est = estimate_S(e->spec, nu, mc(kSamplesGrid, salt(e->alias, 100 + k++)));
        const double diff = est.value - eval_S(*e, nu);
        const double z = est.std_error > 0 ? diff / est.std_error : (diff == 0 ? 0.0 : HUGE_VAL);
        chi2 += z * z;
        worst = std::max(worst, std::abs(z));
      }
    char detail[128];
    std::snprintf(detail, sizeof detail, "sum z^2 = %.2f over 25 points (limit %.2f), max |z| = %.2f", chi2,
                  kChi2Grid25, worst);
    cr.exact(e->alias + " S on 5x5 grid", chi2 <= kChi2Grid25, detail);
  }
  return cr.finish("qubit-qutrit");
}

bool criterion7() {
  Criterion cr(7);
  check_probabilities(cr, {"tt-complex-15", "tt-complex-16", "tt-complex-68", "tt-complex-14-35", "tt-complex-29-69"});
  check_probabilities(cr, {"3qb-complex-16", "3qb-complex-35-68", "3qb-complex-25-47"});
  check_probabilities(cr, {"3qt-complex-14", "3qt-complex-14-78", "3qt-complex-18-57"});
  return cr.finish("qutrit-qutrit and three-qubit PPT probabilities");
}

bool criterion8() {
  Criterion cr(8);
  const auto& r = entry("qq-real-12-13-14-23-24-34");
  const auto& c = entry("qq-complex-12-13-14-23-24-34");
  for (const auto* e : {&r, &c}) {
    const double h = hs_normalization(e->spec);
    Estimate v = estimate_volumes(e->spec, mc(kSamples, salt(e->alias, 4))).v_tot;
    v.value *= h;
    v.std_error *= h;
    const std::string target = e == &r ? "pi^4/60480" : "pi^6/851350500";
    cr.mc(e->alias + " V_tot x " + std::to_string(static_cast<int>(h)), v, target);
    const double closed = e->c->value * dirichlet_mass(weight_exponents(e->spec)) * h;
    const double want = ExactValue::parse(target).value;
    cr.exact(e->alias + " c x mass x norm", std::abs(closed / want - 1) < kQuadRel,
             std::to_string(closed) + " vs " + target);
  }
  const double jr = integrate_half_line([](double v) { return jacobian_real(v); }).value;
  cr.exact("integral of real jacobian", std::abs(jr / (pi * pi / 1146880) - 1) < kQuadRel,
           std::to_string(jr) + " vs pi^2/1146880");
  const double jc = integrate_half_line([&](double v) { return scenario_jacobian(c.spec, v); }).value;
  cr.exact("integral of complex jacobian", std::abs(jc * 1009008000 - 1) < kQuadRel,
           std::to_string(jc) + " vs 1/1009008000");
  return cr.finish("normalization");
}

bool criterion9() {
  Criterion cr(9);
  const auto v = estimate_volumes(full_real_qq(), mc(kSamplesFull, 9));
  cr.mc("full real P (N = 1e7)", v.p, "0.4538838", kProbFloor);
  cr.exact("full real P within 0.454 ± 0.01", std::abs(v.p.value - 0.454) <= 0.01, std::to_string(v.p.value));
  return cr.finish("full 9-dimensional real probability");
}

bool criterion10() {
  Criterion cr(10);
  auto near = [&](const std::string& label, double got, double printed_value, double tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.8g vs printed %.8g (tol %.1g)", got, printed_value, tol);
    cr.exact(label, std::abs(got - printed_value) <= tol, buf);
  };
  near("upper bound, single minor", bound_probability(BoundKind::UpperSingleMinor), 0.88427, kBoundAbs);
  near("pieced value", bound_probability(BoundKind::LowerPieced), 0.76854, kBoundAbs);
  near("separable-volume bound with 3x3 minor", bound_numerator_3x3(), 0.00124359, kNumeratorAbs);
  near("probability bound with 3x3 minor", bound_probability(BoundKind::UpperWith3x3), 0.77213, kBoundAbs);
  const auto& g = nine_point_grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    char label[64];
    std::snprintf(label, sizeof label, "relaxed S(%g)", g[k]);
    cr.mc_value(label, estimate_approx_S(Relaxation::Minor14, g[k], mc(kSamples, 1000 + k)),
                approx_S(Relaxation::Minor14, g[k]), "closed");
  }
  return cr.finish("bounds");
}

bool criterion11() {
  Criterion cr(11);
  std::mt19937_64 g(kSeed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::exponential_distribution<double> ex(1.0);
  const CompositeSplit splits[] = {kQubitQubit, kQubitQutrit, kQutritQutrit, kThreeQubitBipartite,
                                   kThreeQubitTripartite};
  auto random_scenario = [&](CompositeSplit split) {
    const int n = split.dim();
    std::vector<Pair> pairs;
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (u(g) < -0.3) {
          const double r = u(g);
          pairs.push_back({i, j, r < 0 ? Field::Real : (r < 0.7 ? Field::Complex : Field::Quaternion)});
        }
    if (pairs.empty()) pairs.push_back({1, n, Field::Complex});
    return make_scenario(split, pairs);
  };
  auto random_z = [&](const ScenarioSpec& s) {
    const double scale = 0.15 + 0.85 * std::abs(u(g));
    std::vector<double> z(s.total_components);
    for (double& x : z) x = scale * u(g);
    return z;
  };
  auto random_diag = [&](int n) {
    std::vector<double> d(n);
    double t = 0;
    for (double& x : d) t += (x = 0.02 + ex(g));
    for (double& x : d) x /= t;
    return d;
  };
  auto pt_margin = [](const ScenarioSpec& s, const std::vector<double>& z, const std::vector<double>& d) {
    HermitianMatrix pt = partial_transpose(build_matrix(s, BloorePoint{d, z}), s.split);
    for (int r = 0; r < s.n(); ++r)
      for (int c = 0; c < s.n(); ++c) pt(r, c) = pt(r, c) * (1.0 / std::sqrt(d[r] * d[c]));
    return std::abs(min_eigenvalue(pt));
  };

  int cases = 0, bad = 0;
  for (int k = 0; cases < kPropertyCases; ++k) {
    const auto s = random_scenario(splits[k % 5]);
    const auto z = random_z(s);
    const auto d = random_diag(s.n());
    HermitianMatrix m = build_matrix(s, BloorePoint{d, z});
    for (int r = 0; r < s.n(); ++r)
      for (int c = 0; c < s.n(); ++c) m(r, c) = m(r, c) * (1.0 / std::sqrt(d[r] * d[c]));
    if (std::abs(min_eigenvalue(m)) < 1e-7) continue;
    ++cases;
    if (positivity_by_eigen(s, BloorePoint{d, z}) != positivity_z(s, z)) ++bad;
  }
  cr.exact("diagonal cancellation in positivity", bad == 0,
           std::to_string(cases) + " cases, " + std::to_string(bad) + " violations");

  int nu_cases = 0, nu_bad = 0, or_cases = 0, or_bad = 0;
  for (int k = 0; nu_cases < kPropertyCases || or_cases < kPropertyCases; ++k) {
    const auto s = random_scenario(splits[k % 5]);
    const auto z = random_z(s);
    if (!positivity_z(s, z)) continue;
    const auto d1 = random_diag(s.n());
    if (pt_margin(s, z, d1) < 1e-7) continue;
    const auto nu = ratio_coords(d1, s.split);
    const auto d2 = canonical_diag(nu);
    const PptKernel kernel(s);
    const bool oracle = ppt_by_eigen(s, z, d1);
    ++nu_cases;
    if (kernel(z.data(), d1.data()) != kernel(z.data(), d2.data()) || ppt_by_eigen(s, z, d2) != oracle) ++nu_bad;
    ++or_cases;
    if (kernel(z.data(), d1.data()) != oracle || kernel.general(z.data(), d1.data()) != oracle) ++or_bad;
  }
  cr.exact("ratio variables decide PPT", nu_bad == 0,
           std::to_string(nu_cases) + " cases, " + std::to_string(nu_bad) + " violations");
  cr.exact("minor kernels agree with eigenvalue oracle", or_bad == 0,
           std::to_string(or_cases) + " cases, " + std::to_string(or_bad) + " violations");

  int du_cases = 0, du_bad = 0;
  std::lognormal_distribution<double> ln(0, 1.2);
  for (int k = 0; du_cases < kPropertyCases; ++k) {
    const Field f = k % 3 == 0 ? Field::Real : (k % 3 == 1 ? Field::Complex : Field::Quaternion);
    const bool two = k % 2;
    const auto a = two ? make_scenario(kQubitQubit, {{1, 2, f}, {1, 4, f}}) : make_scenario(kQubitQubit, {{1, 4, f}});
    const auto b = two ? make_scenario(kQubitQubit, {{1, 2, f}, {2, 3, f}}) : make_scenario(kQubitQubit, {{2, 3, f}});
    const auto z = random_z(a);
    if (!positivity_z(a, z) || !positivity_z(b, z)) continue;
    const double nu = ln(g);
    const auto da = canonical_diag({kQubitQubit, {nu}}), db = canonical_diag({kQubitQubit, {1 / nu}});
    if (pt_margin(a, z, da) < 1e-7) continue;
    ++du_cases;
    if (PptKernel(a)(z.data(), da.data()) != PptKernel(b)(z.data(), db.data())) ++du_bad;
  }
  cr.exact("duality nu <-> 1/nu", du_bad == 0,
           std::to_string(du_cases) + " cases, " + std::to_string(du_bad) + " violations");

  std::uint64_t outside = 1;
  const auto sph = estimate_c_spheroidal(mc(kSamples, 11), &outside);
  cr.exact("spheroidal images inside the positivity region", outside == 0,
           std::to_string(sph.samples) + " cases, " + std::to_string(outside) + " violations");
  const auto box = estimate_c(full_real_qq(), mc(kSamples, 12));
  Estimate diff = sph;
  diff.value = sph.value - box.value;
  diff.std_error = std::hypot(sph.std_error, box.std_error);
  cr.mc_value("spheroidal minus box c", diff, 0.0, "0");
  cr.mc("spheroidal c", sph, "32*pi^2/27");
  cr.mc("box c", box, "32*pi^2/27");

  int det_bad = 0, det_cases = 0;
  const auto& all = catalog().entries();
  for (std::size_t k = 0; k < 10; ++k) {
    const auto& s = all[(k * all.size()) / 10].spec;
    McConfig base = mc(2 * kPropertyCases, 500 + k);
    base.shards = 1;
    base.workers = 1;
    const auto ref = estimate_volumes(s, base);
    for (int shards : {2, 3, 7, 16}) {
      McConfig c = base;
      c.shards = shards;
      c.workers = 4;
      const auto v = estimate_volumes(s, c);
      det_cases += static_cast<int>(base.samples);
      if (v.v_tot.value != ref.v_tot.value || v.v_sep.value != ref.v_sep.value || v.p.std_error != ref.p.std_error)
        ++det_bad;
    }
  }
  cr.exact("seed determinism across shard counts", det_bad == 0,
           std::to_string(det_cases) + " draws, " + std::to_string(det_bad) + " mismatching runs");
  return cr.finish("property suites");
}

bool criterion12() {
  Criterion cr(12);
  const auto& e = entry("qq-real-12-14-23");
  const auto& g = nine_point_grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const RatioCoords nu{kQubitQubit, {g[k]}};
    const auto est = estimate_S(e.spec, nu, mc(kSamples, 1200 + k));
    char label[64];
    std::snprintf(label, sizeof label, "S(%g) dominates fit", g[k]);
    cr.mc_value(label, est, eval_S(e, nu), "fit", 0, true);
    if (g[k] == 1.0) cr.mc_value("S(1) equals fit", est, eval_S(e, nu), "pi^2/2");
  }
  return cr.finish("domination of the close-fitting function");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int which = 0;
  app.add_option("--criterion", which, "run one criterion (1-12); default all")->check(CLI::Range(1, 12));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  const std::function<bool()> all[] = {criterion1, criterion2, criterion3,  criterion4,  criterion5,  criterion6,
                                       criterion7, criterion8, criterion9, criterion10, criterion11, criterion12};
  bool ok = true;
  try {
    for (int k = 1; k <= 12; ++k)
      if (which == 0 || which == k) ok = all[k - 1]() && ok;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return ok ? 0 : 1;
}
