#pragma once

#include "wolff/measure.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wolff {

// One measure family of a sweep: a base spec plus the values of the swept
// field ("generations" for cantor, "resolution" for the gridded families).
struct MeasureSweep {
  MeasureSpec base;
  std::string sweep_key;          // "", "generations", or "resolution"
  std::vector<int> sweep_values;  // strictly increasing; empty = single point
  std::string expect;             // "", "violates", or "satisfies"
};

// Declarative experiment: which measures, which tasks, shared parameters.
// Parsed from a versioned JSON document; unknown keys are rejected.
struct ExperimentConfig {
  int version = 1;
  double s = 0.5;
  double eps = 0.1;
  double A = 2.0;
  uint64_t seed = 1;
  std::vector<std::string> tasks;  // wolff | czo-norm | select | theta | reflect | equivalence
  std::vector<std::string> kernels{"riesz"};
  std::optional<int> m_min, m_max;  // lattice level range; defaults derived per measure
  double phi_radius = 0.0;          // reflect task bump radius; <= 0 picks one from the support
  int theta_cube_cap = 16;          // max cubes fed to the oscillation task
  std::vector<MeasureSweep> measures;
  std::string divergent_reference;  // measure id anchoring the growth slopes

  static ExperimentConfig from_json_text(const std::string& text);
};

ExperimentConfig load_config(const std::string& path);

// One sweep point's contribution to the boundedness-vs-growth comparison.
struct EquivalencePoint {
  std::string family;
  double param = 0.0;  // generation, or log2(resolution)
  double wolff_per_mass = 0.0;
  double czo_norm_sq = 0.0;
};

struct EquivalenceFamily {
  std::string id;
  std::string expect;
  std::vector<double> params;
  std::vector<double> wolff_per_mass;
  std::vector<double> czo_norm_sq;
  double wolff_slope = 0.0;
  double czo_slope = 0.0;
  std::string wolff_verdict;  // growing | bounded | inconclusive
  std::string czo_verdict;
  std::string verdict;  // "violates both" | "satisfies both" | "mixed"
  bool consistent = false;    // both growing or both bounded
  bool expected_met = true;   // matches `expect` when one was given
};

struct EquivalenceReport {
  std::vector<EquivalenceFamily> families;
  std::string reference_id;
  double reference_wolff_slope = 0.0;
  double reference_czo_slope = 0.0;
  bool pass = false;  // reference grows, every family consistent + as expected
};

// Slope fitting and verdicts over already-computed sweep cells.  A quantity
// counts as growing when its slope exceeds half the divergent reference's
// slope, bounded when below a tenth of it, inconclusive between.
EquivalenceReport build_equivalence(const std::vector<EquivalencePoint>& points,
                                    const std::vector<std::pair<std::string, std::string>>&
                                        family_expectations,  // (id, expect) in report order
                                    const std::string& divergent_id);

// Generates every sweep point of the families, computes Wolff-per-mass and
// the squared sup-over-epsilon norm of the truncated Riesz operator, and fits
// the verdicts against the named divergent family.
EquivalenceReport equivalence_experiment(const std::vector<MeasureSweep>& families, double s,
                                         const std::string& divergent_id, uint64_t seed);

struct TaskError {
  std::string point;
  std::string task;
  std::string message;
};

struct RunReport {
  std::vector<std::string> csv_files;
  std::vector<TaskError> errors;
  std::optional<EquivalenceReport> equivalence;
  bool pass = false;  // no task errors and the equivalence verdicts (if any) hold
};

// Executes the config's tasks over every sweep point with `jobs` workers and
// writes one CSV per task (plus a run summary) into out_dir.  Workers only
// affect scheduling: outputs are merged in sweep-point order, so reruns with
// the same config and seed are byte-identical.
RunReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int jobs);

}  // namespace wolff
