#include "tunnel/harness.hpp"

#include "tunnel/errors.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tunnel {

namespace pt = boost::property_tree;

namespace {

template <class T>
T get_or(const pt::ptree& tree, const std::string& key, T fallback) {
    try {
        return tree.get<T>(key, fallback);
    } catch (const pt::ptree_bad_data& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(", "), boost::token_compress_on);
    std::vector<double> out;
    for (auto& p : parts) {
        boost::trim(p);
        if (p.empty()) continue;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
        if (ec != std::errc() || ptr != p.data() + p.size())
            throw ConfigError("config key '" + key + "': '" + p + "' is not a number");
        out.push_back(v);
    }
    return out;
}

std::string fmt_num(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

SweepConfig load_config(const std::string& path) {
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("cannot read config: " + std::string(e.what()));
    }
    SweepConfig c;
    c.model_name = get_or<std::string>(tree, "model.name", c.model_name);
    c.epsilon = get_or(tree, "model.epsilon", c.epsilon);
    c.a_expr = get_or<std::string>(tree, "model.a", "");
    c.b_expr = get_or<std::string>(tree, "model.b", "");
    c.x_left = get_or(tree, "model.x_left", c.x_left);

    if (auto hl = tree.get_optional<std::string>("sweep.h_list")) c.h_list = parse_list(*hl, "sweep.h_list");

    c.length = get_or(tree, "grid.length", c.length);
    const std::string n = get_or<std::string>(tree, "grid.n", "auto");
    if (n == "auto") {
        c.n_points = 0;
    } else {
        const auto v = parse_list(n, "grid.n");
        if (v.size() != 1 || v[0] != std::floor(v[0])) throw ConfigError("grid.n must be an integer or auto");
        c.n_points = static_cast<int>(v[0]);
    }
    c.xi_min = get_or(tree, "grid.xi_min", c.xi_min);
    c.n_floor = get_or(tree, "grid.n_floor", c.n_floor);

    c.eff_length = get_or(tree, "effective.length", c.eff_length);
    c.eff_points = get_or(tree, "effective.n", c.eff_points);

    c.eta = get_or(tree, "seal.eta", c.eta);
    const std::string height = get_or<std::string>(tree, "seal.height", "auto");
    if (height != "auto") c.seal_height = parse_list(height, "seal.height").at(0);

    c.agmon_eps = get_or(tree, "diagnostics.agmon_eps", c.agmon_eps);
    c.well_radius = get_or(tree, "diagnostics.well_radius", c.well_radius);
    c.onewell_states = get_or(tree, "diagnostics.onewell_states", c.onewell_states);

    c.output_dir = get_or<std::string>(tree, "output.directory", c.output_dir);
    c.workers = get_or(tree, "output.workers", c.workers);
    validate_config(c);
    return c;
}

void validate_config(const SweepConfig& c) {
    if (c.h_list.empty()) throw ConfigError("h_list is empty");
    for (std::size_t i = 0; i < c.h_list.size(); ++i) {
        if (!(c.h_list[i] > 0.0 && c.h_list[i] <= 1.0)) throw ConfigError("every h must lie in (0, 1]");
        if (i > 0 && !(c.h_list[i] < c.h_list[i - 1])) throw ConfigError("h_list must be strictly decreasing");
    }
    if (!(c.length > 0.0) || !(c.eff_length > 0.0)) throw ConfigError("grid lengths must be positive");
    if (c.n_points != 0 && (c.n_points < 2 || !std::has_single_bit(static_cast<unsigned>(c.n_points))))
        throw ConfigError("grid.n must be a power of two");
    if (c.eff_points < 2 || !std::has_single_bit(static_cast<unsigned>(c.eff_points)))
        throw ConfigError("effective.n must be a power of two");
    if (c.xi_min < 0.0) throw ConfigError("grid.xi_min must be nonnegative");
    if (!(c.agmon_eps > 0.0 && c.agmon_eps < 1.0)) throw ConfigError("diagnostics.agmon_eps must lie in (0, 1)");
    if (c.onewell_states < 1) throw ConfigError("diagnostics.onewell_states must be positive");
    if (c.model_name != "ModelA" && c.model_name != "ModelB" && c.model_name != "custom")
        throw IdentifierError("unknown model '" + c.model_name + "'");
    if (c.model_name == "custom" && (c.a_expr.empty() || c.b_expr.empty()))
        throw ConfigError("custom model needs model.a and model.b");
    // the grid at the smallest h must resolve the cutoff
    make_grid(c.length, grid_points(c, c.h_list.back()), c.h_list.back(), c.xi_min);
}

Model make_model(const SweepConfig& cfg) {
    if (cfg.model_name == "custom") return expression_model(cfg.a_expr, cfg.b_expr, cfg.x_left);
    return builtin_model(cfg.model_name, cfg.epsilon);
}

int grid_points(const SweepConfig& cfg, double h) {
    return cfg.n_points > 0 ? cfg.n_points : auto_n(cfg.length, h, cfg.xi_min, cfg.n_floor);
}

SweepContext make_context(const SweepConfig& cfg) {
    SweepContext ctx;
    ctx.cfg = cfg;
    ctx.model = make_model(cfg);
    const auto rep = validate_model(ctx.model);
    if (!rep.all_passed()) {
        std::string failed;
        for (const auto& c : rep.checks)
            if (!c.passed) failed += " " + c.name + " (" + c.detail + ")";
        throw ConfigError("model " + ctx.model.name + " fails validation:" + failed);
    }
    ctx.constants = derived_constants(ctx.model);
    ctx.seal = sealing_function(ctx.model, cfg.eta, cfg.seal_height);
    ctx.phase.emplace(ctx.model, ctx.constants, ctx.seal, Side::left);
    ctx.amplitude.emplace(ctx.model, *ctx.phase);
    ctx.cutoffs = make_cutoffs(ctx.phase->A_window(), ctx.model.x_right, cfg.eta);
    return ctx;
}

SweepRow evaluate_point(const SweepContext& ctx, double h) {
    const auto& cfg = ctx.cfg;
    const auto& c = ctx.constants;
    SweepRow r;
    r.h = h;
    r.n_points = grid_points(cfg, h);
    const Grid g = make_grid(cfg.length, r.n_points, h, cfg.xi_min);

    const OperatorMatrix L = assemble_L(ctx.model, g);
    const SplitMeasurement split = measured_splitting(L);
    r.lambda1 = split.lambda1;
    r.lambda2 = split.lambda2;
    r.lambda3 = split.lambda3;
    r.gap12 = split.gap12;
    r.gap23 = split.gap23;
    r.precision_flag = split.precision_flag;
    r.parity1 = parity_of(split.pairs[0].vector, g);
    r.parity2 = parity_of(split.pairs[1].vector, g);

    const OperatorMatrix Ml = assemble_onewell(ctx.model, g, Side::left, ctx.seal);
    const auto one = lowest_eigenpairs(Ml, std::max(cfg.onewell_states, 1));
    r.mu = one[0].value;
    for (const auto& p : one) r.onewell.push_back(p.value);

    const InteractionReport inter = interaction_term(L, split, one[0], ctx.cutoffs);
    r.re_wh = inter.w_h.real();
    r.im_wh = inter.w_h.imag();
    r.two_abs_wh = 2.0 * std::abs(inter.w_h);
    r.overlap_abs = std::abs(inter.overlap);
    r.gram_gap = inter.gram_eigen_gap;
    r.gram_g11 = inter.gram.G(0, 0).real();

    r.thm_pred = predicted_splitting_theorem(ctx.model, c.a2, cfg.eff_length, cfg.eff_points, h);
    r.formula_pred = h * classical_splitting_formula(c, std::sqrt(h));
    r.ratio_thm = r.gap12 / r.thm_pred;
    r.ratio_formula = r.gap12 / r.formula_pred;

    const WkbQuasimode q = wkb_quasimode(c, g, *ctx.phase, *ctx.amplitude);
    r.wkb_residual = quasimode_residual(Ml, q);
    r.wkb_overlap = std::abs(inner(q.vector, one[0].vector, g.dx));
    r.wkb_norm_raw = q.norm_raw;

    const double xi_cut = std::pow(h, 1.0 / 6.0) * (1.0 - 1e-6);
    for (const auto& p : one) {
        r.fourier_tail.push_back(fourier_tail(p.vector, g, xi_cut));
        r.spatial_tail.push_back(spatial_tail(p.vector, g, {ctx.model.x_left}, cfg.well_radius));
    }
    const AgmonPhase& phase = *ctx.phase;
    const auto weight = minimal_image([&](double x) { return phase.truncated(x); }, g.length);
    const AgmonNorm an = agmon_weighted_norm(one[0].vector, g, weight, cfg.agmon_eps);
    r.agmon_norm = an.value;
    r.agmon_overflow = an.overflow;
    return r;
}

int workers_from_env() {
    const char* v = std::getenv("TUNNEL_WORKERS");
    if (!v) return 0;
    int n = 0;
    const auto [ptr, ec] = std::from_chars(v, v + std::char_traits<char>::length(v), n);
    if (ec != std::errc() || n < 1) return 0;
    return n;
}

std::optional<Fit> action_fit(const std::vector<SweepRow>& rows, double h_power) {
    std::vector<double> x, y;
    for (const auto& r : rows) {
        if (r.flagged() || !(r.gap12 > 0.0)) continue;
        x.push_back(1.0 / std::sqrt(r.h));
        y.push_back(std::log(r.gap12 / std::pow(r.h, h_power)));
    }
    if (x.size() < 2) return std::nullopt;
    const auto f = num::linear_fit(x, y);
    return Fit{f.slope, f.intercept, f.n_points};
}

SweepReport run_sweep(const SweepConfig& cfg, PointEvaluator evaluator) {
    validate_config(cfg);
    SweepReport rep;
    std::optional<SweepContext> ctx;
    if (!evaluator) {
        ctx.emplace(make_context(cfg));
        rep.constants = ctx->constants;
        evaluator = [&ctx](double h) { return evaluate_point(*ctx, h); };
    }

    std::filesystem::create_directories(cfg.output_dir);
    const std::string path = (std::filesystem::path(cfg.output_dir) / "sweep.csv").string();
    std::ofstream csv(path);
    if (!csv) throw ConfigError("cannot write " + path);
    const int states = cfg.onewell_states;
    write_sweep_csv_header(csv, states);
    csv.flush();

    const int n = static_cast<int>(cfg.h_list.size());
    std::vector<std::optional<SweepRow>> done(n);
    int next = 0;
    int workers = cfg.workers > 0 ? cfg.workers : workers_from_env();
#ifdef _OPENMP
    if (workers <= 0) workers = omp_get_max_threads();
#else
    workers = 1;
#endif

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (int i = 0; i < n; ++i) {
        const double h = cfg.h_list[i];
        SweepRow row;
        try {
            row = evaluator(h);
        } catch (const std::exception& e) {
            row = SweepRow{};
            row.error = e.what();
        } catch (...) {
            row = SweepRow{};
            row.error = "unknown failure";
        }
        row.h = h;
#pragma omp critical(tunnel_sweep_csv)
        {
            done[i] = std::move(row);
            while (next < n && done[next]) {
                write_sweep_csv_row(csv, *done[next], states);
                ++next;
            }
            csv.flush();
        }
    }

    for (auto& r : done) rep.rows.push_back(std::move(*r));
    for (const auto& r : rep.rows) {
        if (!r.error.empty()) rep.flags.push_back("h=" + fmt_num(r.h) + ": failed: " + r.error);
        else if (r.precision_flag) rep.flags.push_back("h=" + fmt_num(r.h) + ": gap at the eigen-residual floor");
        if (r.agmon_overflow) rep.flags.push_back("h=" + fmt_num(r.h) + ": Agmon weight overflow");
    }
    rep.action_fit = action_fit(rep.rows, 0.0);
    rep.compensated_fit = action_fit(rep.rows, 1.25);

    std::ofstream fits((std::filesystem::path(cfg.output_dir) / "fits.csv").string());
    fits << "fit,slope,intercept,n_points\n";
    if (rep.action_fit)
        fits << "log_gap," << fmt_num(rep.action_fit->slope) << ',' << fmt_num(rep.action_fit->intercept) << ','
             << rep.action_fit->n_points << '\n';
    if (rep.compensated_fit)
        fits << "log_gap_over_h54," << fmt_num(rep.compensated_fit->slope) << ','
             << fmt_num(rep.compensated_fit->intercept) << ',' << rep.compensated_fit->n_points << '\n';
    return rep;
}

ConvergenceVerdict convergence_ratios(const std::vector<SweepRow>& rows) {
    ConvergenceVerdict v;
    for (const auto& r : rows) {
        if (r.flagged()) continue;
        v.h.push_back(r.h);
        v.ratios.push_back(r.gap12 / r.thm_pred);
        v.deviations.push_back(std::abs(v.ratios.back() - 1.0));
    }
    if (v.ratios.empty()) throw AnalyticsError("every sweep row is flagged");
    if (v.ratios.size() < 2) throw AnalyticsError("convergence trend needs two unflagged rows");
    v.monotone = true;
    for (std::size_t i = 1; i < v.deviations.size(); ++i) {
        // rows are h-descending, so the deviation must not grow
        if (v.deviations[i] > v.deviations[i - 1]) v.monotone = false;
    }
    return v;
}

namespace {

std::string describe(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s%.4g", i ? " " : "", v[i]);
        out += buf;
    }
    return out;
}

bool non_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1]) return false;
    return true;
}

}  // namespace

std::vector<CheckResult> sweep_checks(const SweepReport& rep) {
    std::vector<const SweepRow*> ok;
    for (const auto& r : rep.rows)
        if (!r.flagged()) ok.push_back(&r);
    std::vector<CheckResult> out;
    if (ok.size() < 2) {
        out.push_back({"sweep", false, "fewer than two unflagged rows"});
        return out;
    }
    const auto& c = rep.constants;

    {
        // lambda_n / h^{3/2} against (2n - 1) c0, n = 1..3
        CheckResult ck{"onewell_ladder", true, ""};
        for (int n = 1; n <= 3; ++n) {
            std::vector<double> dev;
            for (const auto* r : ok) {
                if (static_cast<int>(r->onewell.size()) < n) continue;
                const double target = (2 * n - 1) * c.c0;
                dev.push_back(std::abs(r->onewell[n - 1] / std::pow(r->h, 1.5) - target) / target);
            }
            if (dev.empty()) { ck.passed = false; continue; }
            const bool pass = dev.back() <= 0.10 && non_increasing(dev);
            ck.passed = ck.passed && pass;
            ck.detail += (n > 1 ? "; " : "") + std::string("n=") + std::to_string(n) + " rel dev " + describe(dev);
        }
        out.push_back(ck);
    }
    {
        CheckResult ck{"gap_clause", true, "gap23 / (c0 h^1.5):"};
        std::vector<double> q;
        for (const auto* r : ok) {
            q.push_back(r->gap23 / (c.c0 * std::pow(r->h, 1.5)));
            if (r->gap23 < 0.5 * 2.0 * c.c0 * std::pow(r->h, 1.5)) ck.passed = false;
        }
        ck.detail += " " + describe(q) + " (need >= 1)";
        out.push_back(ck);
    }
    {
        CheckResult ck{"splitting_ratio", true, ""};
        const SweepRow* nearest = ok.front();
        for (const auto* r : ok)
            if (std::abs(r->h - 0.05) < std::abs(nearest->h - 0.05)) nearest = r;
        const double ratio = nearest->gap12 / nearest->thm_pred;
        const auto v = convergence_ratios(rep.rows);
        ck.passed = ratio >= 0.7 && ratio <= 1.3 && v.monotone;
        char buf[64];
        std::snprintf(buf, sizeof buf, "ratio %.4f at h=%.3g; ", ratio, nearest->h);
        ck.detail = buf + std::string("|ratio-1| ") + describe(v.deviations);
        out.push_back(ck);
    }
    {
        CheckResult ck{"action_fit", false, "no fit"};
        if (rep.action_fit) {
            const double rel = std::abs(-rep.action_fit->slope - c.S) / c.S;
            ck.passed = rel <= 0.05;
            char buf[96];
            std::snprintf(buf, sizeof buf, "-slope %.4f vs S %.4f (rel %.3f)", -rep.action_fit->slope, c.S, rel);
            ck.detail = buf;
        }
        out.push_back(ck);
    }
    {
        CheckResult ck{"interaction_term", true, ""};
        std::vector<double> dw, dg;
        for (const auto* r : ok) {
            dw.push_back(std::abs(r->two_abs_wh - r->gap12) / r->gap12);
            dg.push_back(std::abs(r->gram_gap - r->gap12) / r->gap12);
            if (dw.back() > 0.3 || dg.back() > 0.05) ck.passed = false;
        }
        ck.detail = "|2|w|-gap|/gap " + describe(dw) + "; gram " + describe(dg);
        out.push_back(ck);
    }
    {
        CheckResult ck{"wkb_quality", true, ""};
        std::vector<double> lx, ly, ov;
        for (const auto* r : ok) {
            lx.push_back(std::log(r->h));
            ly.push_back(std::log(r->wkb_residual));
            ov.push_back(r->wkb_overlap);
            if (r->wkb_overlap < 1.0 - 2.0 * std::sqrt(r->h)) ck.passed = false;
        }
        const double slope = num::linear_fit(lx, ly).slope;
        if (slope < 1.8) ck.passed = false;
        char buf[48];
        std::snprintf(buf, sizeof buf, "residual slope %.3f; ", slope);
        ck.detail = buf + std::string("overlap ") + describe(ov);
        out.push_back(ck);
    }
    {
        CheckResult ck{"localization", true, ""};
        double worst_f = 0.0, worst_s = 0.0;
        std::vector<double> agmon;
        for (const auto* r : ok) {
            agmon.push_back(r->agmon_norm);
            if (r->agmon_overflow || !std::isfinite(r->agmon_norm)) ck.passed = false;
            if (r->h > 0.05 + 1e-12) continue;
            for (std::size_t i = 0; i < std::min<std::size_t>(3, r->fourier_tail.size()); ++i) {
                worst_f = std::max(worst_f, r->fourier_tail[i]);
                worst_s = std::max(worst_s, r->spatial_tail[i]);
            }
        }
        if (worst_f > 1e-6 || worst_s > 1e-2) ck.passed = false;
        // bounded across the sweep: no growth beyond 5% of the largest-h value
        const double bound = 1.05 * agmon.front();
        for (double a : agmon)
            if (a > bound) ck.passed = false;
        char buf[96];
        std::snprintf(buf, sizeof buf, "fourier tail %.2e, spatial tail %.3g (h<=0.05); ", worst_f, worst_s);
        ck.detail = buf + std::string("agmon ") + describe(agmon);
        out.push_back(ck);
    }
    return out;
}

void write_sweep_csv_header(std::ostream& os, int states) {
    os << "h,n_points,lambda1,lambda2,lambda3,gap12,gap23,mu";
    for (int i = 1; i <= states; ++i) os << ",onewell" << i;
    os << ",re_wh,im_wh,two_abs_wh,overlap_abs,gram_gap,gram_g11,thm_pred,formula_pred,ratio_thm,"
          "ratio_formula,parity1,parity2,wkb_residual,wkb_overlap,wkb_norm_raw";
    for (int i = 1; i <= states; ++i) os << ",fourier_tail" << i;
    for (int i = 1; i <= states; ++i) os << ",spatial_tail" << i;
    os << ",agmon_norm,agmon_overflow,precision_flag,error\n";
}

void write_sweep_csv_row(std::ostream& os, const SweepRow& r, int states) {
    auto vec = [&](const std::vector<double>& v) {
        for (int i = 0; i < states; ++i) os << ',' << (i < static_cast<int>(v.size()) ? fmt_num(v[i]) : "");
    };
    os << fmt_num(r.h) << ',' << r.n_points << ',' << fmt_num(r.lambda1) << ',' << fmt_num(r.lambda2) << ','
       << fmt_num(r.lambda3) << ',' << fmt_num(r.gap12) << ',' << fmt_num(r.gap23) << ',' << fmt_num(r.mu);
    vec(r.onewell);
    os << ',' << fmt_num(r.re_wh) << ',' << fmt_num(r.im_wh) << ',' << fmt_num(r.two_abs_wh) << ',' << fmt_num(r.overlap_abs)
       << ',' << fmt_num(r.gram_gap) << ',' << fmt_num(r.gram_g11) << ',' << fmt_num(r.thm_pred) << ','
       << fmt_num(r.formula_pred) << ',' << fmt_num(r.ratio_thm) << ',' << fmt_num(r.ratio_formula) << ','
       << fmt_num(r.parity1) << ',' << fmt_num(r.parity2) << ',' << fmt_num(r.wkb_residual) << ','
       << fmt_num(r.wkb_overlap) << ',' << fmt_num(r.wkb_norm_raw);
    vec(r.fourier_tail);
    vec(r.spatial_tail);
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << ',' << fmt_num(r.agmon_norm) << ',' << int(r.agmon_overflow) << ',' << int(r.precision_flag) << ','
       << err << '\n';
}

void write_splitting_csv_header(std::ostream& os) {
    os << "h,lambda1,lambda2,lambda3,gap12,gap23,mu,re_wh,im_wh,two_abs_wh,overlap_abs,gram_gap,"
          "thm_pred,formula_pred,ratio_thm,ratio_formula,precision_flag\n";
}

void write_splitting_csv_row(std::ostream& os, const SweepRow& r) {
    os << fmt_num(r.h) << ',' << fmt_num(r.lambda1) << ',' << fmt_num(r.lambda2) << ',' << fmt_num(r.lambda3) << ','
       << fmt_num(r.gap12) << ',' << fmt_num(r.gap23) << ',' << fmt_num(r.mu) << ',' << fmt_num(r.re_wh) << ','
       << fmt_num(r.im_wh) << ',' << fmt_num(r.two_abs_wh) << ',' << fmt_num(r.overlap_abs) << ',' << fmt_num(r.gram_gap)
       << ',' << fmt_num(r.thm_pred) << ',' << fmt_num(r.formula_pred) << ',' << fmt_num(r.ratio_thm) << ','
       << fmt_num(r.ratio_formula) << ',' << int(r.precision_flag) << '\n';
}

}  // namespace tunnel
