#pragma once

#include "tunnel/tunneling.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tunnel {

struct SweepConfig {
    // [model]
    std::string model_name = "ModelA";
    double epsilon = 0.2;
    std::string a_expr, b_expr;  // custom models only
    double x_left = -1.0;
    // [sweep]
    std::vector<double> h_list = {0.09, 0.08, 0.07, 0.06, 0.05, 0.04};
    // [grid]
    double length = 8.0;
    int n_points = 0;  // 0 = auto rule
    double xi_min = 3.0;
    int n_floor = 512;
    // [effective]
    double eff_length = 8.0;
    int eff_points = 1024;
    // [seal]
    double eta = 0.4;
    std::optional<double> seal_height;  // default 2 V(0)
    // [diagnostics]
    double agmon_eps = 0.2;
    double well_radius = 0.5;
    int onewell_states = 3;
    // [output]
    std::string output_dir = "out";
    int workers = 0;  // 0 = TUNNEL_WORKERS or the OpenMP default
};

/// Reads an INI file ([model], [sweep], [grid], [effective], [seal],
/// [diagnostics], [output]) and validates it. Throws ConfigError.
SweepConfig load_config(const std::string& path);
void validate_config(const SweepConfig& cfg);

Model make_model(const SweepConfig& cfg);

/// Grid size for h under the auto rule or the fixed n_points.
int grid_points(const SweepConfig& cfg, double h);

struct SweepRow {
    double h = 0.0;
    int n_points = 0;
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
    double gap12 = 0.0, gap23 = 0.0;
    double mu = 0.0;
    std::vector<double> onewell;  // lowest one-well eigenvalues
    double re_wh = 0.0, im_wh = 0.0, two_abs_wh = 0.0;
    double overlap_abs = 0.0;
    double gram_gap = 0.0;
    double gram_g11 = 0.0;
    double thm_pred = 0.0, formula_pred = 0.0;
    double ratio_thm = 0.0, ratio_formula = 0.0;
    double parity1 = 0.0, parity2 = 0.0;
    double wkb_residual = 0.0, wkb_overlap = 0.0, wkb_norm_raw = 0.0;
    std::vector<double> fourier_tail;  // per one-well state
    std::vector<double> spatial_tail;
    double agmon_norm = 0.0;
    bool agmon_overflow = false;
    bool precision_flag = false;
    std::string error;  // non-empty when the point failed

    bool flagged() const { return precision_flag || !error.empty(); }
};

struct Fit {
    double slope = 0.0;
    double intercept = 0.0;
    int n_points = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;          // h descending
    std::optional<Fit> action_fit;       // log gap12 against 1/sqrt h
    std::optional<Fit> compensated_fit;  // log(gap12 / h^{5/4}) against 1/sqrt h
    std::vector<std::string> flags;
    ModelConstants constants;
};

/// Shared, h-independent pieces of the pipeline.
struct SweepContext {
    SweepConfig cfg;
    Model model;
    ModelConstants constants;
    SealingFunction seal;
    std::optional<AgmonPhase> phase;
    std::optional<LeadingAmplitude> amplitude;
    CutoffPair cutoffs;
};

SweepContext make_context(const SweepConfig& cfg);

/// Full pipeline at one h: spectra, WKB, localization, tunneling.
SweepRow evaluate_point(const SweepContext& ctx, double h);

using PointEvaluator = std::function<SweepRow(double h)>;

/// Runs every h (in parallel), isolates failures as flagged rows, writes
/// sweep.csv in h-descending order as rows complete, and fits the action.
/// A custom evaluator replaces evaluate_point (tests inject failures this way).
SweepReport run_sweep(const SweepConfig& cfg, PointEvaluator evaluator = {});

struct ConvergenceVerdict {
    std::vector<double> h;
    std::vector<double> ratios;
    std::vector<double> deviations;  // |ratio - 1|
    bool monotone = false;           // deviations non-increasing as h decreases
};

/// measured / thm_pred on unflagged rows. Needs two unflagged rows
/// (AnalyticsError otherwise).
ConvergenceVerdict convergence_ratios(const std::vector<SweepRow>& rows);

std::optional<Fit> action_fit(const std::vector<SweepRow>& rows, double h_power = 0.0);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Sweep-level trend checks with pinned tolerances: one-well ladder, gap
/// clause, splitting ratio, action fit, interaction term, WKB quality and
/// localization. Used by `sweep --check` and the acceptance binary.
std::vector<CheckResult> sweep_checks(const SweepReport& rep);

void write_sweep_csv_header(std::ostream& os, int states);
void write_sweep_csv_row(std::ostream& os, const SweepRow& r, int states);
void write_splitting_csv_header(std::ostream& os);
void write_splitting_csv_row(std::ostream& os, const SweepRow& r);

/// Worker count from TUNNEL_WORKERS, 0 if unset or invalid.
int workers_from_env();

}  // namespace tunnel
