#include "wolff/experiments.hpp"

#include "wolff/energy.hpp"
#include "wolff/kernels.hpp"
#include "wolff/lattice.hpp"
#include "wolff/operators.hpp"
#include "wolff/oscillation.hpp"
#include "wolff/reflectionless.hpp"
#include "wolff/selection.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace wolff {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kTaskNames[] = {"wolff", "czo-norm", "select", "theta", "reflect",
                                      "equivalence"};

void check_keys(const json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) {
      if (it.key() == a) { ok = true; break; }
    }
    if (!ok) fail_parameter("config: unknown key '" + it.key() + "'");
  }
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_atomic(const fs::path& path, const std::string& header,
                      const std::vector<std::vector<std::string>>& rows) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) fail_io("cannot open for writing: " + tmp.string());
    os << header << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        os << csv_field(row[i]);
      }
      os << "\n";
    }
    if (!os) fail_io("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail_io("cannot rename " + tmp.string() + " to " + path.string());
}

struct TaskSet {
  bool wolff = false, czo = false, select = false, theta = false, reflect = false,
       equivalence = false;
};

TaskSet task_set(const std::vector<std::string>& names) {
  TaskSet t;
  for (const auto& n : names) {
    if (n == "wolff") t.wolff = true;
    else if (n == "czo-norm") t.czo = true;
    else if (n == "select") t.select = true;
    else if (n == "theta") t.theta = true;
    else if (n == "reflect") t.reflect = true;
    else if (n == "equivalence") t.equivalence = true;
  }
  return t;
}

struct SweepPoint {
  std::string id;         // unique per point
  std::string family_id;  // the measure id this point belongs to
  double param = 0.0;
  MeasureSpec spec;
};

std::vector<SweepPoint> expand_points(const std::vector<MeasureSweep>& measures) {
  std::vector<SweepPoint> points;
  for (const MeasureSweep& m : measures) {
    if (m.sweep_values.empty()) {
      points.push_back({m.base.id, m.base.id, 0.0, m.base});
      continue;
    }
    for (int v : m.sweep_values) {
      SweepPoint pt;
      pt.family_id = m.base.id;
      pt.spec = m.base;
      if (m.sweep_key == "generations") {
        pt.spec.generations = v;
        pt.param = static_cast<double>(v);
        pt.id = m.base.id + "/n=" + std::to_string(v);
      } else {  // resolution
        if (m.base.family == "plane-lattice")
          pt.spec.plane_resolution = v;
        else
          pt.spec.resolution = v;
        pt.param = std::log2(static_cast<double>(v));
        pt.id = m.base.id + "/r=" + std::to_string(v);
      }
      pt.spec.id = pt.id;
      points.push_back(std::move(pt));
    }
  }
  return points;
}

struct PointOutput {
  std::vector<std::vector<std::string>> wolff, czo, select, theta, reflect;
  std::vector<std::vector<std::string>> summary;  // point, task, status, message
  std::vector<TaskError> errors;
  std::optional<EquivalencePoint> eq;
};

int auto_m_min(const Measure& mu) {
  auto gap = mu.min_gap();
  if (!gap) return 0;
  return std::clamp(static_cast<int>(std::floor(std::log2(*gap))), -40, 2);
}

PointOutput compute_point(const ExperimentConfig& cfg, const SweepPoint& pt, const TaskSet& ts) {
  PointOutput out;
  bool failed = false;
  auto guard = [&](const char* task, auto&& fn) {
    if (failed) {
      out.summary.push_back({pt.id, task, "skipped", ""});
      return;
    }
    try {
      fn();
      out.summary.push_back({pt.id, task, "ok", ""});
    } catch (const std::exception& e) {
      failed = true;
      out.errors.push_back({pt.id, task, e.what()});
      out.summary.push_back({pt.id, task, "error", e.what()});
    }
  };

  Measure mu;
  try {
    mu = generate(pt.spec);
    out.summary.push_back({pt.id, "measure", "ok", ""});
  } catch (const std::exception& e) {
    out.errors.push_back({pt.id, "measure", e.what()});
    out.summary.push_back({pt.id, "measure", "error", e.what()});
    return out;
  }

  std::optional<LatticeView> view;
  auto get_view = [&]() -> const LatticeView& {
    if (!view) {
      const int lo = cfg.m_min.value_or(auto_m_min(mu));
      const int hi = cfg.m_max.value_or(2);
      view = enumerate_cubes(mu, std::min(lo, hi), hi);
    }
    return *view;
  };

  double dyadic_per_mass = std::numeric_limits<double>::quiet_NaN();
  double riesz_sq = std::numeric_limits<double>::quiet_NaN();

  if (ts.wolff) {
    guard("wolff", [&] {
      const Box region = root_cube(mu.dim()).box();
      const double r0 = mu.default_r_min();
      const double r1 = mu.default_r_max();
      const WolffReport rep = wolff_report(mu, get_view(), region, cfg.s, r0, r1);
      dyadic_per_mass = rep.wolff_dyadic / mu.total_mass();
      out.wolff.push_back({pt.id, g17(pt.param), std::to_string(mu.size()),
                           g17(mu.total_mass()), g17(r0), g17(r1), g17(rep.wolff_integral),
                           g17(rep.wolff_dyadic), g17(rep.growth_constant)});
    });
  }

  if (ts.czo) {
    guard("czo-norm", [&] {
      for (const std::string& kspec : cfg.kernels) {
        const Kernel k = parse_kernel(kspec, mu.dim(), cfg.s, cfg.seed);
        const SupNormEstimate est = operator_norm_sup(k, mu);
        out.czo.push_back({pt.id, g17(pt.param), kspec, std::to_string(mu.size()),
                           g17(est.best.norm), g17(est.best.residual), g17(est.best.epsilon)});
        if (kspec == "riesz") riesz_sq = est.best.norm * est.best.norm;
      }
    });
  }

  std::optional<SelectionResult> up;
  std::optional<DownwardResult> down;
  auto ensure_selection = [&] {
    if (up) return;
    SelectionOptions sopts;
    sopts.s = cfg.s;
    sopts.eps = cfg.eps;
    up = select_upward(mu, get_view(), sopts);
    down = select_downward(mu, get_view(), *up, sopts);
  };

  if (ts.select) {
    guard("select", [&] {
      ensure_selection();
      const LatticeView& v = get_view();
      size_t n_up = 0, n_down = 0;
      double max_doubling = 0.0;
      for (size_t i = 0; i < v.cubes.size(); ++i) {
        if (!up->selected[i]) continue;
        ++n_up;
        if (down->selected[i]) ++n_down;
        max_doubling = std::max(max_doubling, doubling_check(mu, v.cubes[i], 3.0, cfg.s, cfg.eps));
      }
      const double retention_up =
          up->energy_total > 0.0 ? up->energy_selected / up->energy_total : 0.0;
      const double retention_down =
          down->energy_total > 0.0 ? down->energy_selected / down->energy_total : 0.0;
      out.select.push_back({pt.id, g17(pt.param), g17(cfg.eps), std::to_string(v.cubes.size()),
                            std::to_string(n_up), std::to_string(n_down), g17(up->energy_total),
                            g17(up->energy_selected), g17(down->energy_selected),
                            g17(retention_up), g17(retention_down), g17(max_doubling),
                            up->complete ? "1" : "0", down->exact ? "1" : "0"});
    });
  }

  if (ts.theta) {
    guard("theta", [&] {
      ensure_selection();
      const LatticeView& v = get_view();
      std::vector<Cube> cubes;
      for (size_t i = 0; i < v.cubes.size(); ++i) {
        if (down->selected[i]) cubes.push_back(v.cubes[i]);
        if (static_cast<int>(cubes.size()) >= cfg.theta_cube_cap) break;
      }
      const TestFunctionFamily family = TestFunctionFamily::standard(2);
      const GoalAReport rep = goal_A_test(mu, cubes, family, cfg.A, 0.0, cfg.s);
      for (const GoalARow& row : rep.rows) {
        out.theta.push_back({pt.id, g17(pt.param), format_cube(row.cube),
                             std::to_string(row.best_phi), g17(row.theta), g17(row.ratio),
                             g17(row.lp_residual), std::to_string(row.n_nodes)});
      }
    });
  }

  if (ts.reflect) {
    guard("reflect", [&] {
      const Box support = mu.support_box();
      double max_side = 0.0;
      for (int a = 0; a < mu.dim(); ++a) max_side = std::max(max_side, support.side(a));
      double radius = cfg.phi_radius;
      if (!(radius > 0.0)) {
        // A window shrunk by a quarter of the support can lose every atom on
        // gappy supports, so fall back to a few interatomic gaps when those
        // are smaller.
        radius = 0.25 * max_side;
        if (auto gap = mu.min_gap()) radius = std::min(radius, 4.0 * *gap);
      }
      if (!(radius > 0.0)) fail_domain("reflect: degenerate support");
      const SmoothBump bump(radius, 0.5);
      const Box window = support.dilated(1.0 + 1e-12).shrunk(radius);
      if (window.empty()) fail_domain("reflect: window empty after shrinking by the bump radius");
      const DefectReport dr = reflectionless_defect(mu, bump, window);
      std::string structure;
      std::string violations;
      if (pt.spec.family == "plane-lattice" && pt.spec.plane_dim >= 1) {
        const StructureHypothesis hyp = plane_lattice_hypothesis(pt.spec);
        const StructureReport sr = verify_structure(mu, hyp, 1e-6);
        structure = sr.pass ? "pass" : "fail";
        violations = std::to_string(sr.violation_count);
      }
      out.reflect.push_back({pt.id, g17(pt.param), g17(radius), g17(dr.defect),
                             g17(dr.reference), std::to_string(dr.count), structure, violations});
    });
  }

  if (ts.equivalence) {
    guard("equivalence", [&] {
      if (std::isnan(dyadic_per_mass))
        dyadic_per_mass = wolff_dyadic(mu, get_view(), cfg.s) / mu.total_mass();
      if (std::isnan(riesz_sq)) {
        const SupNormEstimate est = operator_norm_sup(Kernel::riesz(mu.dim(), cfg.s), mu);
        riesz_sq = est.best.norm * est.best.norm;
      }
      out.eq = EquivalencePoint{pt.family_id, pt.param, dyadic_per_mass, riesz_sq};
    });
  }

  return out;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t n = xs.size();
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::string classify(double slope, double ref_slope) {
  if (!(ref_slope > 0.0)) return "inconclusive";
  if (slope > 0.5 * ref_slope) return "growing";
  if (std::abs(slope) < 0.1 * ref_slope) return "bounded";
  return "inconclusive";
}

}  // namespace

EquivalenceReport build_equivalence(
    const std::vector<EquivalencePoint>& points,
    const std::vector<std::pair<std::string, std::string>>& family_expectations,
    const std::string& divergent_id) {
  EquivalenceReport report;
  report.reference_id = divergent_id;
  for (const auto& [id, expect] : family_expectations) {
    EquivalenceFamily f;
    f.id = id;
    f.expect = expect;
    for (const EquivalencePoint& p : points) {
      if (p.family != id) continue;
      f.params.push_back(p.param);
      f.wolff_per_mass.push_back(p.wolff_per_mass);
      f.czo_norm_sq.push_back(p.czo_norm_sq);
    }
    f.wolff_slope = fit_slope(f.params, f.wolff_per_mass);
    f.czo_slope = fit_slope(f.params, f.czo_norm_sq);
    report.families.push_back(std::move(f));
  }

  const EquivalenceFamily* ref = nullptr;
  for (const EquivalenceFamily& f : report.families) {
    if (f.id == divergent_id) ref = &f;
  }
  if (!ref) fail_parameter("equivalence: divergent reference '" + divergent_id +
                           "' is not among the families");
  report.reference_wolff_slope = ref->wolff_slope;
  report.reference_czo_slope = ref->czo_slope;
  const bool ref_ok = ref->wolff_slope > 0.0 && ref->czo_slope > 0.0 && ref->params.size() >= 2;

  bool all_ok = ref_ok;
  for (EquivalenceFamily& f : report.families) {
    if (!ref_ok || f.params.size() < 2) {
      f.wolff_verdict = f.czo_verdict = "inconclusive";
    } else {
      f.wolff_verdict = classify(f.wolff_slope, report.reference_wolff_slope);
      f.czo_verdict = classify(f.czo_slope, report.reference_czo_slope);
    }
    const bool both_grow = f.wolff_verdict == "growing" && f.czo_verdict == "growing";
    const bool both_bounded = f.wolff_verdict == "bounded" && f.czo_verdict == "bounded";
    f.consistent = both_grow || both_bounded;
    f.verdict = both_grow ? "violates both" : both_bounded ? "satisfies both" : "mixed";
    f.expected_met = f.expect.empty() || (f.expect == "violates" && both_grow) ||
                     (f.expect == "satisfies" && both_bounded);
    all_ok = all_ok && f.consistent && f.expected_met;
  }
  report.pass = all_ok;
  return report;
}

EquivalenceReport equivalence_experiment(const std::vector<MeasureSweep>& families, double s,
                                         const std::string& divergent_id, uint64_t seed) {
  if (std::floor(s) == s) fail_parameter("equivalence: s must be non-integer");
  ExperimentConfig cfg;
  cfg.s = s;
  cfg.seed = seed;
  cfg.tasks = {"equivalence"};
  cfg.measures = families;
  cfg.divergent_reference = divergent_id;

  TaskSet ts;
  ts.equivalence = true;
  std::vector<EquivalencePoint> cells;
  for (const SweepPoint& pt : expand_points(families)) {
    PointOutput out = compute_point(cfg, pt, ts);
    if (!out.errors.empty())
      throw Error(Error::Kind::numeric, "equivalence: point '" + out.errors.front().point +
                                            "' failed: " + out.errors.front().message);
    cells.push_back(*out.eq);
  }
  std::vector<std::pair<std::string, std::string>> expectations;
  for (const MeasureSweep& m : families) expectations.push_back({m.base.id, m.expect});
  return build_equivalence(cells, expectations, divergent_id);
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail_parameter(std::string("config: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) fail_parameter("config: top level must be an object");
  check_keys(j, {"version", "s", "eps", "A", "seed", "tasks", "kernels", "m_min", "m_max",
                 "phi_radius", "theta_cube_cap", "measures", "divergent_reference"});

  ExperimentConfig cfg;
  try {
    cfg.version = j.at("version").get<int>();
    if (cfg.version != 1) fail_parameter("config: unsupported version");
    cfg.s = j.at("s").get<double>();
    if (!(cfg.s > 0.0)) fail_parameter("config: s must be positive");
    cfg.eps = j.value("eps", cfg.eps);
    if (!(cfg.eps > 0.0)) fail_parameter("config: eps must be positive");
    cfg.A = j.value("A", cfg.A);
    if (!(cfg.A > 1.0)) fail_parameter("config: A must exceed 1");
    cfg.seed = j.value("seed", cfg.seed);
    cfg.tasks = j.at("tasks").get<std::vector<std::string>>();
    for (const auto& t : cfg.tasks) {
      bool known = false;
      for (const char* name : kTaskNames) known = known || t == name;
      if (!known) fail_parameter("config: unknown task '" + t + "'");
      if (std::count(cfg.tasks.begin(), cfg.tasks.end(), t) > 1)
        fail_parameter("config: duplicate task '" + t + "'");
    }
    if (j.contains("kernels")) {
      cfg.kernels = j.at("kernels").get<std::vector<std::string>>();
      if (cfg.kernels.empty()) fail_parameter("config: kernels must be nonempty");
      for (const auto& k : cfg.kernels) parse_kernel(k, 1, cfg.s, 1);  // syntax check
    }
    if (j.contains("m_min")) cfg.m_min = j.at("m_min").get<int>();
    if (j.contains("m_max")) cfg.m_max = j.at("m_max").get<int>();
    if (cfg.m_min && std::abs(*cfg.m_min) > 40) fail_parameter("config: m_min out of range");
    if (cfg.m_max && std::abs(*cfg.m_max) > 40) fail_parameter("config: m_max out of range");
    if (cfg.m_min && cfg.m_max && *cfg.m_min > *cfg.m_max)
      fail_parameter("config: m_min exceeds m_max");
    cfg.phi_radius = j.value("phi_radius", cfg.phi_radius);
    cfg.theta_cube_cap = j.value("theta_cube_cap", cfg.theta_cube_cap);
    if (cfg.theta_cube_cap < 1) fail_parameter("config: theta_cube_cap must be >= 1");
    cfg.divergent_reference = j.value("divergent_reference", std::string());

    if (!j.at("measures").is_array()) fail_parameter("config: measures must be an array");
    for (const json& entry : j.at("measures")) {
      if (!entry.is_object()) fail_parameter("config: measure entries must be objects");
      MeasureSweep sweep;
      json spec_json = entry;
      if (spec_json.contains("sweep")) {
        const json& sj = spec_json.at("sweep");
        check_keys(sj, {"generations", "resolution"});
        if (sj.size() != 1) fail_parameter("config: sweep needs exactly one key");
        sweep.sweep_key = sj.begin().key();
        sweep.sweep_values = sj.begin().value().get<std::vector<int>>();
        if (sweep.sweep_values.empty()) fail_parameter("config: empty sweep values");
        for (size_t i = 0; i < sweep.sweep_values.size(); ++i) {
          if (sweep.sweep_values[i] < 1)
            fail_parameter("config: sweep values must be positive");
          if (i > 0 && sweep.sweep_values[i] <= sweep.sweep_values[i - 1])
            fail_parameter("config: sweep values must be strictly increasing");
        }
        spec_json.erase("sweep");
        // The swept field may be omitted from the base spec; seed it with the
        // first sweep value (every point overrides it anyway).
        const std::string family = spec_json.value("family", std::string());
        const char* field = sweep.sweep_key == "generations"   ? "generations"
                            : family == "plane-lattice"        ? "plane_resolution"
                                                               : "resolution";
        if (!spec_json.contains(field)) spec_json[field] = sweep.sweep_values.front();
      }
      if (spec_json.contains("expect")) {
        sweep.expect = spec_json.at("expect").get<std::string>();
        if (sweep.expect != "violates" && sweep.expect != "satisfies")
          fail_parameter("config: expect must be 'violates' or 'satisfies'");
        spec_json.erase("expect");
      }
      sweep.base = MeasureSpec::from_json_text(spec_json.dump());
      if (sweep.base.id.empty()) fail_parameter("config: every measure needs an id");
      if (!sweep.sweep_key.empty()) {
        const bool gen = sweep.sweep_key == "generations";
        if (gen && sweep.base.family != "cantor")
          fail_parameter("config: generations sweep requires the cantor family");
        if (!gen && sweep.base.family != "lebesgue-cube" && sweep.base.family != "plane-lattice")
          fail_parameter("config: resolution sweep requires a gridded family");
      }
      for (const MeasureSweep& other : cfg.measures) {
        if (other.base.id == sweep.base.id)
          fail_parameter("config: duplicate measure id '" + sweep.base.id + "'");
      }
      cfg.measures.push_back(std::move(sweep));
    }
  } catch (const json::exception& e) {
    fail_parameter(std::string("config: ") + e.what());
  }

  const TaskSet ts = task_set(cfg.tasks);
  if (ts.equivalence) {
    if (std::floor(cfg.s) == cfg.s) fail_parameter("config: equivalence requires non-integer s");
    if (cfg.divergent_reference.empty())
      fail_parameter("config: equivalence requires divergent_reference");
    bool found = false;
    for (const MeasureSweep& m : cfg.measures) {
      if (m.base.id == cfg.divergent_reference) found = true;
      if (m.sweep_values.size() < 4)
        fail_parameter("config: equivalence needs >= 4 sweep points per measure");
    }
    if (!found) fail_parameter("config: divergent_reference does not name a measure");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail_io("cannot open: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return ExperimentConfig::from_json_text(buf.str());
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

RunReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
  if (jobs < 1) fail_parameter("run: jobs must be >= 1");
  fs::create_directories(out_dir);

  const std::vector<SweepPoint> points = expand_points(cfg.measures);
  const TaskSet ts = task_set(cfg.tasks);

  std::vector<PointOutput> outs(points.size());
  const int workers = static_cast<int>(
      std::min<size_t>(static_cast<size_t>(std::min(jobs, 256)), std::max<size_t>(points.size(), 1)));
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= points.size()) break;
      outs[i] = compute_point(cfg, points[i], ts);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  RunReport report;
  const fs::path dir(out_dir);
  auto emit = [&](const char* file, const std::string& header, auto field) {
    std::vector<std::vector<std::string>> rows;
    for (const PointOutput& o : outs) {
      const auto& part = field(o);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    const fs::path path = dir / file;
    write_csv_atomic(path, header, rows);
    report.csv_files.push_back(path.string());
  };

  if (ts.wolff)
    emit("wolff.csv",
         "measure,param,n,mass,r_min,r_max,wolff_integral,wolff_dyadic,growth_constant",
         [](const PointOutput& o) -> const auto& { return o.wolff; });
  if (ts.czo)
    emit("czo_norm.csv", "measure,param,kernel,n,norm,residual,epsilon",
         [](const PointOutput& o) -> const auto& { return o.czo; });
  if (ts.select)
    emit("select.csv",
         "measure,param,eps,cubes,selected_up,selected_down,energy_total,energy_up,energy_down,"
         "retention_up,retention_down,max_doubling,complete,exact",
         [](const PointOutput& o) -> const auto& { return o.select; });
  if (ts.theta)
    emit("theta.csv", "measure,param,cube,phi_index,theta,ratio,lp_residual,n_nodes",
         [](const PointOutput& o) -> const auto& { return o.theta; });
  if (ts.reflect)
    emit("reflect.csv",
         "measure,param,phi_radius,defect,reference,window_atoms,structure,violations",
         [](const PointOutput& o) -> const auto& { return o.reflect; });

  for (const PointOutput& o : outs)
    report.errors.insert(report.errors.end(), o.errors.begin(), o.errors.end());

  if (ts.equivalence) {
    std::vector<EquivalencePoint> cells;
    for (const PointOutput& o : outs) {
      if (o.eq) cells.push_back(*o.eq);
    }
    std::vector<std::pair<std::string, std::string>> expectations;
    for (const MeasureSweep& m : cfg.measures) expectations.push_back({m.base.id, m.expect});
    report.equivalence = build_equivalence(cells, expectations, cfg.divergent_reference);

    std::vector<std::vector<std::string>> point_rows;
    for (const EquivalencePoint& p : cells)
      point_rows.push_back({p.family, g17(p.param), g17(p.wolff_per_mass), g17(p.czo_norm_sq)});
    write_csv_atomic(dir / "equivalence_points.csv", "family,param,wolff_per_mass,czo_norm_sq",
                     point_rows);
    report.csv_files.push_back((dir / "equivalence_points.csv").string());

    std::vector<std::vector<std::string>> fam_rows;
    for (const EquivalenceFamily& f : report.equivalence->families) {
      fam_rows.push_back({f.id, "wolff_per_mass", g17(f.wolff_slope),
                          g17(report.equivalence->reference_wolff_slope), f.wolff_verdict,
                          f.expect, f.consistent ? "1" : "0"});
      fam_rows.push_back({f.id, "czo_norm_sq", g17(f.czo_slope),
                          g17(report.equivalence->reference_czo_slope), f.czo_verdict, f.expect,
                          f.consistent ? "1" : "0"});
    }
    write_csv_atomic(dir / "equivalence.csv",
                     "family,quantity,slope,reference_slope,verdict,expect,consistent", fam_rows);
    report.csv_files.push_back((dir / "equivalence.csv").string());
  }

  {
    std::vector<std::vector<std::string>> rows;
    for (const PointOutput& o : outs)
      rows.insert(rows.end(), o.summary.begin(), o.summary.end());
    write_csv_atomic(dir / "summary.csv", "point,task,status,message", rows);
    report.csv_files.push_back((dir / "summary.csv").string());
  }

  report.pass = report.errors.empty() &&
                (!report.equivalence.has_value() || report.equivalence->pass);
  return report;
}

}  // namespace wolff
