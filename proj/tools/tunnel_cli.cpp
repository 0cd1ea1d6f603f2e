// tunnel: command line front end for the double-well pipeline.
//
//   tunnel validate  <config>
//   tunnel spectrum  <config> --h H [--states K] [--dump-matrix PATH]
//   tunnel wkb       <config> --h H
//   tunnel effective <config> [--hbar-list 0.3,0.25]
//   tunnel splitting <config>
//   tunnel sweep     <config> [--check]
//
// Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 failed --check.

#include "CLI11.hpp"

#include "tunnel/errors.hpp"
#include "tunnel/harness.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

using namespace tunnel;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numeric = 3;
constexpr int exit_check = 4;

void print_constants(const ModelConstants& c) {
    std::printf("a2 %.15g\nV2 %.15g\nc0 %.15g\nkappa %.15g\nS %.15g\nA %.15g\nb_inf %.15g\n", c.a2, c.V2, c.c0,
                c.kappa, c.S, c.A, c.b_inf);
}

int cmd_validate(const std::string& path) {
    const SweepConfig cfg = load_config(path);
    const Model m = make_model(cfg);
    const auto rep = validate_model(m);
    for (const auto& c : rep.checks)
        std::printf("%-24s %s  %s\n", c.name.c_str(), c.passed ? "ok  " : "FAIL", c.detail.c_str());
    if (!rep.all_passed()) {
        std::fprintf(stderr, "model %s fails validation\n", m.name.c_str());
        return exit_config;
    }
    print_constants(derived_constants(m));
    return 0;
}

int cmd_spectrum(const std::string& path, double h, int states, const std::string& dump) {
    const SweepConfig cfg = load_config(path);
    const SweepContext ctx = make_context(cfg);
    const Grid g = make_grid(cfg.length, grid_points(cfg, h), h, cfg.xi_min);
    const OperatorMatrix L = assemble_L(ctx.model, g);
    if (!dump.empty()) dump_matrix(L, dump);
    const auto pairs = lowest_eigenpairs(L, states);
    const auto one = lowest_eigenpairs(assemble_onewell(ctx.model, g, Side::left, ctx.seal), states);
    std::printf("n,lambda,lambda_over_h32,parity,residual,onewell,onewell_over_h32\n");
    const double h32 = std::pow(h, 1.5);
    for (int i = 0; i < states; ++i)
        std::printf("%d,%.17g,%.17g,%.12g,%.3e,%.17g,%.17g\n", i + 1, pairs[i].value, pairs[i].value / h32,
                    parity_of(pairs[i].vector, g), pairs[i].residual, one[i].value, one[i].value / h32);
    if (L.warning) std::fprintf(stderr, "hermiticity defect %.3e above tolerance\n", L.hermiticity_defect);
    return 0;
}

int cmd_wkb(const std::string& path, double h) {
    const SweepConfig cfg = load_config(path);
    const SweepContext ctx = make_context(cfg);
    const Grid g = make_grid(cfg.length, grid_points(cfg, h), h, cfg.xi_min);
    const WkbQuasimode q = wkb_quasimode(ctx.constants, g, *ctx.phase, *ctx.amplitude);
    std::printf("x,Phi,Phi_tilde,re_u10,im_u10,re_psi,im_psi\n");
    for (int j = 0; j < g.n; ++j) {
        const double x = g.x[j];
        const cd u = (*ctx.amplitude)(x);
        std::printf("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x, (*ctx.phase)(x), ctx.phase->truncated(x),
                    u.real(), u.imag(), q.vector[j].real(), q.vector[j].imag());
    }
    std::fprintf(stderr, "lambda_wkb %.12g, raw norm %.12g\n", q.lambda_wkb, q.norm_raw);
    return 0;
}

int cmd_effective(const std::string& path, std::vector<double> hbars) {
    const SweepConfig cfg = load_config(path);
    const Model m = make_model(cfg);
    const ModelConstants c = derived_constants(m);
    if (hbars.empty())
        for (double h : cfg.h_list) hbars.push_back(std::sqrt(h));
    std::printf("hbar,lambda1,lambda2,lambda3,lambda4,gap12,formula,ratio\n");
    for (double hb : hbars) {
        const Grid g = make_grid(cfg.eff_length, cfg.eff_points, hb);
        const auto s = effective_spectrum(assemble_Mhbar(m, c.a2, g), 4);
        const double f = classical_splitting_formula(c, hb);
        std::printf("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", hb, s.lambda[0], s.lambda[1], s.lambda[2],
                    s.lambda[3], s.gap12, f, s.gap12 / f);
    }
    return 0;
}

int cmd_splitting(const std::string& path) {
    const SweepConfig cfg = load_config(path);
    const SweepReport rep = run_sweep(cfg);
    write_splitting_csv_header(std::cout);
    for (const auto& r : rep.rows) write_splitting_csv_row(std::cout, r);
    for (const auto& f : rep.flags) std::cerr << f << '\n';
    return 0;
}

int cmd_sweep(const std::string& path, bool check) {
    const SweepConfig cfg = load_config(path);
    const SweepReport rep = run_sweep(cfg);
    std::printf("rows %zu, output %s\n", rep.rows.size(), cfg.output_dir.c_str());
    for (const auto& f : rep.flags) std::printf("flag: %s\n", f.c_str());
    if (rep.action_fit)
        std::printf("action fit: slope %.6f (S = %.6f), %d points\n", rep.action_fit->slope, rep.constants.S,
                    rep.action_fit->n_points);
    if (rep.compensated_fit)
        std::printf("compensated fit: slope %.6f\n", rep.compensated_fit->slope);
    if (!check) return 0;
    bool ok = true;
    for (const auto& ck : sweep_checks(rep)) {
        std::printf("%s %s: %s\n", ck.passed ? "PASS" : "FAIL", ck.name.c_str(), ck.detail.c_str());
        ok = ok && ck.passed;
    }
    return ok ? 0 : exit_check;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semiclassical double-well tunneling"};
    app.set_help_flag("--help", "print this help and exit");  // -h would clash with --h
    app.require_subcommand(1);

    std::string config, dump;
    double h = 0.05;
    int states = 4;
    std::vector<double> hbars;
    bool check = false;

    auto* validate = app.add_subcommand("validate", "check model hypotheses, print derived constants");
    validate->add_option("config", config)->required()->check(CLI::ExistingFile);

    auto* spectrum = app.add_subcommand("spectrum", "lowest eigenvalues of L_h and the sealed operator");
    spectrum->add_option("config", config)->required()->check(CLI::ExistingFile);
    spectrum->add_option("--h", h)->required()->check(CLI::Range(1e-6, 1.0));
    spectrum->add_option("--states", states)->check(CLI::Range(1, 64));
    spectrum->add_option("--dump-matrix", dump, "write the matrix as PDOW binary");

    auto* wkb = app.add_subcommand("wkb", "phase, amplitude and quasimode on the grid (CSV)");
    wkb->add_option("config", config)->required()->check(CLI::ExistingFile);
    wkb->add_option("--h", h)->required()->check(CLI::Range(1e-6, 1.0));

    auto* effective = app.add_subcommand("effective", "spectrum of the effective operator (CSV)");
    effective->add_option("config", config)->required()->check(CLI::ExistingFile);
    effective->add_option("--hbar-list", hbars, "defaults to sqrt of the sweep h values")->delimiter(',');

    auto* splitting = app.add_subcommand("splitting", "measured and predicted splitting per h (CSV)");
    splitting->add_option("config", config)->required()->check(CLI::ExistingFile);

    auto* sweep = app.add_subcommand("sweep", "full sweep, writes sweep.csv and fits.csv");
    sweep->add_option("config", config)->required()->check(CLI::ExistingFile);
    sweep->add_flag("--check", check, "run the trend checks, exit 4 on failure");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (*validate) return cmd_validate(config);
        if (*spectrum) return cmd_spectrum(config, h, states, dump);
        if (*wkb) return cmd_wkb(config, h);
        if (*effective) return cmd_effective(config, hbars);
        if (*splitting) return cmd_splitting(config);
        if (*sweep) return cmd_sweep(config, check);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    }
    return 0;
}
