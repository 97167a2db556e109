// medianosc: command-line front end over the header-only library.
// stdout carries one JSON document per run; bulk arrays go to field or CSV files.
// Exit codes: 0 ok, 1 property violation, 2 I/O, 3 parameters.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "medianosc/io.hpp"
#include "medianosc/medianosc.hpp"
#include "medianosc/propcheck.hpp"

using namespace medianosc;
using nlohmann::json;

namespace {

constexpr int kExitViolation = 1;
constexpr int kExitIo = 2;
constexpr int kExitParams = 3;

[[noreturn]] void bad(const std::string& msg) { detail::fail(ErrorCode::InvalidParameter, msg); }

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            bad("bad number '" + tok + "' in " + what);
        }
    }
    if (out.empty()) bad(what + " is empty");
    return out;
}

// "lo0[,lo1[,lo2]]:len" in cell units; empty means the whole grid
CubeRegion parse_region(const std::string& text, const SampledFunction& f) {
    if (text.empty()) return f.whole();
    const auto colon = text.find(':');
    if (colon == std::string::npos) bad("region must look like lo0,lo1:len");
    const auto lo = parse_list(text.substr(0, colon), "region corner");
    const auto len = parse_list(text.substr(colon + 1), "region side");
    if (static_cast<int>(lo.size()) != f.dim() || len.size() != 1) bad("region corner needs one entry per axis");
    CubeRegion q{f.dim(), {}, static_cast<std::size_t>(len[0])};
    for (int i = 0; i < f.dim(); ++i) {
        if (lo[i] < 0) bad("region corner must be >= 0");
        q.lo[i] = static_cast<std::size_t>(lo[i]);
    }
    if (!q.valid_in(f.frame())) bad("region outside the grid");
    return q;
}

json region_json(const CubeRegion& q) {
    json lo = json::array();
    for (int i = 0; i < q.dim; ++i) lo.push_back(q.lo[i]);
    return {{"lo", lo}, {"len", q.len}};
}

CubeFamily family_for(const std::string& name, const CubeRegion& q) {
    return name.empty() ? default_family(q.dim, q.len) : parse_family(name);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) detail::fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
    return out;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

json forest_json(const DecompositionForest& forest) {
    json sel = json::array();
    for (const auto& c : forest.selected)
        sel.push_back({{"cube", region_json(c.cube)}, {"level", c.level}, {"median", c.median}});
    json disc = json::array();
    for (const auto& q : forest.discarded) disc.push_back(region_json(q));
    const auto& r = forest.report;
    return {{"root", region_json(forest.root)},
            {"params", {{"s", forest.params.s}, {"t", forest.params.t}, {"delta", forest.params.delta},
                        {"beta", forest.params.beta}}},
            {"offset", forest.offset},
            {"selected", sel},
            {"discarded", disc},
            {"floor_cells", forest.floor_cells.size()},
            {"report",
             {{"packing_ratio", r.packing_ratio},
              {"max_depth", r.max_depth},
              {"nonoverlapping", r.nonoverlapping},
              {"contains_low_sharp_cell", r.contains_low_sharp_cell},
              {"median_above_delta", r.median_above_delta},
              {"median_within_upper", r.median_within_upper},
              {"small_outside", r.small_outside},
              {"upper_bound_violations", r.upper_bound_violations},
              {"floor_level_selections", r.floor_level_selections},
              {"floor_upper_exceedances", r.floor_upper_exceedances},
              {"all_hold", r.all_hold()}}}};
}

void write_mask(const std::string& path, const SampledFunction& f, const DecompositionForest& forest) {
    const auto m = forest.mask();
    GridFrame frame = f.frame();
    const double w = frame.cell_width();
    for (int i = 0; i < frame.dim; ++i) frame.origin[i] += static_cast<double>(forest.root.lo[i]) * w;
    frame.side = static_cast<double>(forest.root.len) * w;
    frame.cells_per_side = forest.root.len;
    io::write_field(path, SampledFunction(frame, std::vector<double>(m.begin(), m.end())));
}

SampledFunction generate(const std::string& name, int dim, std::size_t n, std::uint64_t seed, double L, std::size_t width,
                         double center, unsigned levels, std::size_t block, double value) {
    if (name == "constant") return corpus::constant(dim, n, value);
    if (name == "step") return corpus::step(dim, n);
    if (name == "signed-step") return corpus::signed_step(dim, n);
    if (name == "linear") return corpus::linear(dim, n);
    if (name == "lipschitz") return corpus::lipschitz(dim, n, L);
    if (name == "spike") return corpus::spike(dim, n, width);
    if (name == "log-singularity") return corpus::log_singularity(dim, n, center);
    if (name == "piecewise") return corpus::piecewise(dim, n, levels, seed);
    if (name == "checkerboard") {
        if (dim != 2) bad("checkerboard is 2D only");
        return corpus::checkerboard(n, block);
    }
    bad("unknown corpus member '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Median oscillation toolkit"};
    app.require_subcommand(1);

    std::string input, region_text, family_name;
    double s = 0.0;

    // median
    auto* med = app.add_subcommand("median", "maximal median of a field over a cube");
    med->add_option("input", input, "field file or 1D CSV")->required();
    med->add_option("--s", s, "median parameter in (0,1)")->required();
    med->add_option("--region", region_text, "cube lo0[,lo1]:len in cells (default: whole grid)");

    // sharp
    std::string sharp_out;
    auto* shp = app.add_subcommand("sharp", "local sharp maximal function");
    shp->add_option("input", input)->required();
    shp->add_option("--s", s, "parameter in (0,1/2]")->required();
    shp->add_option("--family", family_name, "ALL | DYADIC | DYADIC_SHIFTED");
    shp->add_option("--region", region_text);
    shp->add_option("--out", sharp_out, "write the sharp field to this field file");

    // decompose
    double t = 0.5, delta = 0.0, beta = 0.0, eta = 0.0;
    bool two = false, center = false;
    std::string mask_out;
    auto* dec = app.add_subcommand("decompose", "dyadic median decomposition");
    dec->add_option("input", input)->required();
    dec->add_option("--s", s)->required();
    dec->add_option("--t", t, "median level in [1/2, 1-s]")->capture_default_str();
    auto* o_delta = dec->add_option("--delta", delta);
    auto* o_beta = dec->add_option("--beta", beta);
    dec->add_flag("--two-threshold", two, "run the two-threshold variant about m_f(t, Q)");
    auto* o_eta = dec->add_option("--eta", eta, "two-threshold slack (default beta/10)");
    dec->add_flag("--center", center, "decompose f - m_f(t, Q) instead of f");
    dec->add_option("--family", family_name);
    dec->add_option("--region", region_text);
    dec->add_option("--mask", mask_out, "write the selection mask (0 none, 1 discarded, 2 selected)");

    // oscillation
    std::string delta_grid, csv_out, pair_kind = "equal";
    std::size_t max_side = 8;
    double threshold = 0.0;
    auto* osc = app.add_subcommand("oscillation", "two-cube oscillation profile and continuity verdict");
    osc->add_option("input", input)->required();
    osc->add_option("--s", s, "parameter in (1/2,1)")->required();
    osc->add_option("--delta-grid", delta_grid, "comma list (default: 1/4 halved down to two cells)");
    auto* o_thr = osc->add_option("--threshold", threshold, "verdict threshold (default 3 w L)");
    osc->add_option("--pairs", pair_kind, "equal | all")->capture_default_str();
    osc->add_option("--max-side", max_side, "largest cube side in cells for equal pairs")->capture_default_str();
    osc->add_option("--csv", csv_out, "profile CSV: delta,omega_estimate,modulus,ratio");

    // jn
    std::string phi_text = "const", lambda_grid;
    std::size_t lambda_points = 200;
    auto* jn = app.add_subcommand("jn", "deviation tail and its fit");
    jn->add_option("input", input)->required();
    jn->add_option("--s", s)->required();
    jn->add_option("--phi", phi_text, "const[:c] | power:a[:c] | log[:c]")->capture_default_str();
    jn->add_option("--lambda-grid", lambda_grid, "comma list (default: evenly spaced to the largest deviation)");
    jn->add_option("--points", lambda_points, "default grid size")->capture_default_str();
    jn->add_option("--family", family_name);
    jn->add_option("--region", region_text);
    jn->add_option("--csv", csv_out, "tail CSV: lambda,measure");

    // vmo
    std::string u_grid;
    auto* vmo = app.add_subcommand("vmo", "vanishing-oscillation modulus and bmo norm");
    vmo->add_option("input", input)->required();
    vmo->add_option("--s", s)->required();
    vmo->add_option("--u-grid", u_grid, "comma list (default: cube measures from one cell up)");
    auto* o_phi = vmo->add_option("--phi", phi_text, "modulus for the norm");
    vmo->add_option("--family", family_name);
    vmo->add_option("--region", region_text);
    vmo->add_option("--csv", csv_out, "modulus CSV: u,phi_s");

    // gen
    std::string gen_name, gen_out, gen_out_g, format = "field";
    int dim = 1;
    std::size_t n = 64, width = 1, block = 1;
    std::uint64_t seed = 1;
    double L = 1.0, centre = 0.5, value = 0.0, s1 = 0.625;
    unsigned levels = 4;
    bool literal = false;
    auto* gen = app.add_subcommand("gen", "write a corpus field");
    gen->add_option("name", gen_name,
                    "constant | step | signed-step | linear | lipschitz | spike | log-singularity | piecewise | "
                    "checkerboard | pair-counterexample")
        ->required();
    gen->add_option("--out", gen_out, "output file")->required();
    gen->add_option("--dim", dim)->capture_default_str();
    gen->add_option("--n", n, "cells per side")->capture_default_str();
    gen->add_option("--seed", seed)->capture_default_str();
    gen->add_option("--L", L, "Lipschitz constant")->capture_default_str();
    gen->add_option("--width", width, "spike width in cells")->capture_default_str();
    gen->add_option("--center", centre, "singularity position")->capture_default_str();
    gen->add_option("--levels", levels, "piecewise levels")->capture_default_str();
    gen->add_option("--block", block, "checkerboard block")->capture_default_str();
    gen->add_option("--value", value, "constant value")->capture_default_str();
    gen->add_option("--s", s, "pair-counterexample s (default 0.75)");
    gen->add_option("--s1", s1, "pair-counterexample s1")->capture_default_str();
    gen->add_flag("--literal", literal, "pair-counterexample with closed supports");
    gen->add_option("--out-g", gen_out_g, "pair-counterexample: file for g");
    gen->add_option("--format", format, "field | csv")->capture_default_str();

    // propcheck
    std::string suite = "all";
    std::size_t cases = 1000;
    std::uint64_t pseed = 20240611;
    auto* prop = app.add_subcommand("propcheck", "randomized invariant suites");
    prop->add_option("--suite", suite, "median | rearrangement | sandwich | oracle | sharp | decompose | "
                                       "oscillation | bmo | all")
        ->capture_default_str();
    prop->add_option("--cases", cases)->capture_default_str();
    prop->add_option("--seed", pseed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", "InvalidParameter"}, {"message", e.what()}}.dump() << "\n";
        return kExitParams;
    }

    try {
        if (*med) {
            const SampledFunction f = io::read_field(input);
            const CubeRegion q = parse_region(region_text, f);
            const auto v = gather(f, q);
            const double m = maximal_median(v, s);
            const MedianCounts c = defining_counts(v, m);
            emit({{"command", "median"}, {"input", input}, {"s", s}, {"region", region_json(q)}, {"cells", v.size()},
                  {"median", m},
                  {"counts", {{"less", c.less}, {"less_equal", c.less_equal}, {"greater", c.greater},
                              {"greater_equal", c.greater_equal}}}});
        } else if (*shp) {
            const SampledFunction f = io::read_field(input);
            const CubeRegion q = parse_region(region_text, f);
            const CubeFamily fam = family_for(family_name, q);
            const SharpField sf = local_sharp_maximal(f, q, s, fam);
            double lo = sf.values.front(), sum = 0.0;
            for (double x : sf.values) {
                lo = std::min(lo, x);
                sum += x;
            }
            if (!sharp_out.empty()) {
                GridFrame frame = f.frame();
                const double w = frame.cell_width();
                for (int i = 0; i < frame.dim; ++i) frame.origin[i] += static_cast<double>(q.lo[i]) * w;
                frame.side = static_cast<double>(q.len) * w;
                frame.cells_per_side = q.len;
                io::write_field(sharp_out, SampledFunction(frame, sf.values));
            }
            emit({{"command", "sharp"}, {"input", input}, {"s", s}, {"family", to_string(fam)},
                  {"region", region_json(q)}, {"sup", sf.sup()}, {"inf", lo},
                  {"mean", sum / static_cast<double>(sf.values.size())}});
        } else if (*dec) {
            const SampledFunction f = io::read_field(input);
            const CubeRegion q = parse_region(region_text, f);
            const CubeFamily fam = family_for(family_name, q);
            const SharpField sharp = local_sharp_maximal(f, q, s, fam);
            json out{{"command", "decompose"}, {"input", input}, {"family", to_string(fam)},
                     {"sharp_sup", sharp.sup()}};
            bool ok = true;
            if (two) {
                // beta defaults to the sharp sup; a vanishing sup (constant input) falls back to 1
                const double b = o_beta->count() ? beta : (sharp.sup() > 0.0 ? sharp.sup() : 1.0);
                const double e = o_eta->count() ? eta : b / 10.0;
                const TwoThresholdResult r = two_threshold_decompose(f, q, s, t, b, e, sharp);
                out["two_threshold"] = {{"median", r.median},    {"beta", r.beta},
                                        {"eta", r.eta},          {"delta1", r.delta1},
                                        {"delta2", r.delta2},    {"packing", r.packing},
                                        {"packing_bound", r.packing_bound}, {"j_packing", r.j_packing},
                                        {"nesting_ok", r.nesting_ok}, {"disjoint_ok", r.disjoint_ok},
                                        {"packing_ok", r.packing_ok}, {"all_hold", r.all_hold()}};
                out["generation_j"] = forest_json(r.generation_j);
                out["generation_k"] = forest_json(r.generation_k);
                if (!mask_out.empty()) write_mask(mask_out, f, r.generation_j);
                ok = r.all_hold();
            } else {
                if (!o_delta->count() || !o_beta->count()) bad("decompose needs --delta and --beta (or --two-threshold)");
                const double offset = center ? maximal_median(gather(f, q), t) : 0.0;
                const DecompositionForest forest = median_decompose(f, q, {s, t, delta, beta}, sharp, offset);
                out["forest"] = forest_json(forest);
                if (!mask_out.empty()) write_mask(mask_out, f, forest);
                ok = forest.report.all_hold();
            }
            out["all_hold"] = ok;
            emit(out);
            return ok ? 0 : kExitViolation;
        } else if (*osc) {
            const SampledFunction f = io::read_field(input);
            std::vector<double> grid;
            const double w = f.frame().cell_width();
            if (delta_grid.empty()) {
                for (double d = 0.25 * f.frame().side; d >= 2.0 * w * 0.999; d /= 2.0) grid.push_back(d);
                if (grid.empty()) grid.push_back(2.0 * w);
            } else {
                grid = parse_list(delta_grid, "--delta-grid");
            }
            PairFamilyOptions opts;
            if (pair_kind == "all")
                opts.kind = PairFamily::All;
            else if (pair_kind != "equal")
                bad("--pairs must be equal or all");
            opts.max_side_cells = max_side;
            const std::optional<double> thr = o_thr->count() ? std::optional<double>(threshold) : std::nullopt;
            const OscillationReport rep = continuity_verdict(f, s, grid, thr, opts);
            json rows = json::array();
            for (const auto& r : rep.rows)
                rows.push_back({{"delta", r.delta}, {"omega_estimate", r.omega_estimate}, {"modulus", r.modulus},
                                {"ratio", r.ratio}});
            if (!csv_out.empty()) {
                auto out = open_out(csv_out);
                out << "delta,omega_estimate,modulus,ratio\n";
                for (const auto& r : rep.rows)
                    out << io::format_double(r.delta) << "," << io::format_double(r.omega_estimate) << ","
                        << io::format_double(r.modulus) << "," << io::format_double(r.ratio) << "\n";
            }
            emit({{"command", "oscillation"}, {"input", input}, {"s", s}, {"rows", rows},
                  {"omega_big", rep.omega_big}, {"lipschitz_estimate", rep.lipschitz_estimate},
                  {"threshold", rep.threshold}, {"threshold_source", rep.threshold_source},
                  {"verdict", to_string(rep.verdict)}});
        } else if (*jn) {
            const SampledFunction f = io::read_field(input);
            const CubeRegion q = parse_region(region_text, f);
            const CubeFamily fam = family_for(family_name, q);
            const Modulus phi = Modulus::parse(phi_text);
            const std::vector<double> grid =
                lambda_grid.empty() ? default_lambda_grid(f, q, s, lambda_points) : parse_list(lambda_grid, "--lambda-grid");
            const TailCurve curve = deviation_tail(f, q, s, grid, phi, fam);
            const TailFit fit = fit_tail(curve, phi);
            if (!csv_out.empty()) {
                auto out = open_out(csv_out);
                out << "lambda,measure\n";
                for (std::size_t i = 0; i < curve.lambdas.size(); ++i)
                    out << io::format_double(curve.lambdas[i]) << "," << io::format_double(curve.measures[i]) << "\n";
            }
            emit({{"command", "jn"}, {"input", input}, {"s", s}, {"phi", phi.describe()}, {"family", to_string(fam)},
                  {"median", curve.median}, {"normalizer", curve.normalizer}, {"q_measure", curve.q_measure},
                  {"fit",
                   {{"points", fit.points}, {"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2},
                    {"c1", fit.c1}, {"c2", fit.c2}, {"model_rss", fit.model_rss}, {"c2_reference", fit.c2_reference},
                    {"window", {fit.lo_fraction, fit.hi_fraction}}}}});
        } else if (*vmo) {
            const SampledFunction f = io::read_field(input);
            const CubeRegion q = parse_region(region_text, f);
            const CubeFamily fam = family_for(family_name, q);
            std::vector<double> grid;
            if (u_grid.empty()) {
                for (std::size_t l = 1; l <= q.len; l *= 2) grid.push_back(measure(f.frame(), CubeRegion{q.dim, {}, l}));
            } else {
                grid = parse_list(u_grid, "--u-grid");
            }
            const SizeProfile prof = size_profile(f, q, s, fam);
            const VmoProfile p = vmo_modulus(prof, grid);
            if (!csv_out.empty()) {
                auto out = open_out(csv_out);
                out << "u,phi_s\n";
                for (std::size_t i = 0; i < p.u.size(); ++i)
                    out << io::format_double(p.u[i]) << "," << io::format_double(p.phi_s[i]) << "\n";
            }
            json out{{"command", "vmo"}, {"input", input}, {"s", s}, {"family", to_string(fam)}, {"u", p.u},
                     {"phi_s", p.phi_s}, {"regime", s_regime(s, f.dim())}};
            if (o_phi->count()) {
                const Modulus phi = Modulus::parse(phi_text);
                const BmoNorm nm = bmo_phi_norm(prof, phi);
                out["norm"] = {{"phi", nm.phi}, {"value", nm.value}, {"about_median", nm.about_median},
                               {"argmax_len", nm.argmax_len}};
            }
            emit(out);
        } else if (*gen) {
            auto write = [&](const std::string& path, const SampledFunction& f) {
                if (format == "csv")
                    io::write_csv(path, f);
                else if (format == "field")
                    io::write_field(path, f);
                else
                    bad("--format must be field or csv");
            };
            json out{{"command", "gen"}, {"name", gen_name}, {"dim", dim}, {"n", n}, {"seed", seed},
                     {"generator", "mt19937_64"}, {"out", gen_out}};
            if (gen_name == "pair-counterexample") {
                const double ps = s > 0.0 ? s : 0.75;
                const auto pc = corpus::pair_counterexample(ps, s1, n, !literal);
                write(gen_out, pc.f);
                if (!gen_out_g.empty()) write(gen_out_g, pc.g);
                out["s"] = pc.s;
                out["s1"] = pc.s1;
                out["t"] = pc.t;
                out["strict"] = !literal;
            } else {
                write(gen_out, generate(gen_name, dim, n, seed, L, width, centre, levels, block, value));
            }
            emit(out);
        } else if (*prop) {
            std::vector<std::string> names;
            if (suite == "all")
                for (const auto& [k, fn] : propcheck::suites()) names.push_back(k);
            else
                names.push_back(suite);
            json reports = json::array();
            bool ok = true;
            for (const auto& name : names) {
                const auto rep = propcheck::run_suite(name, cases, pseed);
                json props = json::array();
                for (const auto& p : rep.properties)
                    props.push_back({{"name", p.name}, {"checked", p.checked}, {"violations", p.violations},
                                     {"skipped", p.skipped}, {"first_violation", p.first_violation}});
                reports.push_back({{"suite", rep.suite}, {"cases", rep.cases}, {"ok", rep.ok()},
                                   {"properties", props}, {"notes", rep.notes}});
                ok = ok && rep.ok();
            }
            emit({{"command", "propcheck"}, {"seed", pseed}, {"generator", "mt19937_64"}, {"ok", ok},
                  {"suites", reports}});
            return ok ? 0 : kExitViolation;
        }
    } catch (const Error& e) {
        std::cerr << json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump() << "\n";
        return e.code() == ErrorCode::Io ? kExitIo : kExitParams;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "InvalidParameter"}, {"message", e.what()}}.dump() << "\n";
        return kExitParams;
    }
    return 0;
}
