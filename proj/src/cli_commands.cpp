#include "cornerlog/cli_commands.hpp"

#include "cornerlog/estimate_verifier.hpp"
#include "cornerlog/serialization.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

namespace cornerlog {

namespace {

std::string format_complex(cplx<double> z) {
    std::string im = format_real(z.imag());
    if (im[0] != '-') im = "+" + im;
    return format_real(z.real()) + im + "i";
}

double parse_real(const std::string& s, const char* what) {
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || *end) throw DomainError(std::string("cannot parse ") + what + " '" + s + "'");
    return x;
}

template <class R>
VectorMap<R> planar_map(std::function<cplx<R>(const cplx<R>&)> f) {
    return [f](const std::vector<R>& x) {
        const cplx<R> w = f(cplx<R>(x[0], x[1]));
        return std::vector<R>{w.real(), w.imag()};
    };
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot write '" + path + "'");
    f << text;
}

// ---------------------------------------------------------------------------
// convert

struct ConvertArgs {
    std::string from, to, kind;
    std::string r, sigma, T, theta, t, rho, s, phi;
    double cutoff = kDefaultCutoff;
};

int cmd_convert(const ConvertArgs& a, std::ostream& out) {
    const std::vector<std::string> systems = {"raw", "log", "single-log", "double-log"};
    for (const auto* sys : {&a.from, &a.to}) {
        if (std::find(systems.begin(), systems.end(), *sys) == systems.end()) {
            throw DomainError("unknown coordinate system '" + *sys + "' (expected raw, log, single-log or double-log)");
        }
    }
    // the given value decides the node kind
    bool interior = false;
    std::string given;
    if (a.from == "raw") {
        if (!a.r.empty() == !a.sigma.empty()) throw DomainError("convert --from raw needs exactly one of --r, --sigma");
        interior = !a.sigma.empty();
    } else if (a.from == "log") {
        if (a.T.empty()) throw DomainError("convert --from log needs --T");
        interior = !a.theta.empty() || a.kind == "interior";
    } else if (a.from == "single-log") {
        if (!a.t.empty() == !a.rho.empty()) throw DomainError("convert --from single-log needs exactly one of --t, --rho");
        interior = !a.rho.empty();
    } else {
        if (!a.s.empty() == !a.phi.empty()) throw DomainError("convert --from double-log needs exactly one of --s, --phi");
        interior = !a.phi.empty();
    }
    if (!a.kind.empty() && a.kind != "boundary" && a.kind != "interior") {
        throw DomainError("--kind must be boundary or interior");
    }
    if (a.kind == "boundary" && interior) throw DomainError("--kind boundary contradicts a complex input");

    LogCoords L;
    L.cutoff = a.cutoff;
    if (a.from == "raw") {
        NodeParams p;
        p.cutoff = a.cutoff;
        if (interior) p.interior = {parse_complex(a.sigma)};
        else p.boundary = {parse_real(a.r, "r")};
        L = to_log(p);
    } else if (a.from == "log") {
        const double T = parse_real(a.T, "T");
        if (interior) {
            InteriorLog il{T, std::nullopt};
            if (!a.theta.empty()) il.theta = parse_real(a.theta, "theta");
            L.interior = {il};
        } else {
            L.boundary = {T};
        }
        L.validate();
    } else if (a.from == "single-log") {
        SingleLogCoords c;
        c.cutoff = a.cutoff;
        if (interior) c.interior = {parse_complex(a.rho)};
        else c.boundary = {parse_real(a.t, "t")};
        L = log_from_single_log(c);
    } else {
        DoubleLogCoords d;
        d.cutoff = a.cutoff;
        if (interior) d.interior = {parse_complex(a.phi)};
        else d.boundary = {parse_real(a.s, "s")};
        L = log_from_double_log(d);
    }

    if (a.to == "raw") {
        const auto p = from_log(L);
        if (interior) out << "sigma=" << format_complex(p.interior[0]) << "\n";
        else out << "r=" << format_real(p.boundary[0]) << "\n";
    } else if (a.to == "log") {
        if (interior) {
            out << "T=" << format_real(L.interior[0].T) << "\n";
            out << "theta=" << (L.interior[0].theta ? format_real(*L.interior[0].theta) : std::string("undefined")) << "\n";
        } else {
            out << "T=" << format_real(L.boundary[0]) << "\n";
        }
    } else if (a.to == "single-log") {
        const auto c = single_log_from_log(L);
        if (interior) out << "rho=" << format_complex(c.interior[0]) << "\n";
        else out << "t=" << format_real(c.boundary[0]) << "\n";
    } else {
        const auto d = double_log_from_log(L);
        if (interior) out << "phi=" << format_complex(d.interior[0]) << "\n";
        else out << "s=" << format_real(d.boundary[0]) << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyArgs {
    std::string map, lambda = "2.718281828459045", expect, presentation = "double-log", out;
    int order = 3;
};

int cmd_classify(const ClassifyArgs& a, std::ostream& out, std::ostream& err) {
    const auto rep = classify_named_map(a.map, parse_complex(a.lambda), a.order,
                                        presentation_from_string(a.presentation));
    Json j = to_json(rep);
    j["map"] = a.map;
    if (a.map.rfind("transition:", 0) == 0) j["presentation"] = a.presentation;
    else j["lambda"] = a.lambda;
    write_output(a.out, j.dump(2) + "\n", out);
    if (!a.out.empty()) out << rep.label() << "\n";
    if (!a.expect.empty() && !report_matches(rep, a.expect)) {
        err << "verdict " << rep.label() << " does not match --expect " << a.expect << "\n";
        return kExitExpect;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// plumb

struct PlumbArgs {
    std::string tree, out;
    std::vector<std::string> r, sigma, v;
};

int cmd_plumb(const PlumbArgs& a, std::ostream& out) {
    const auto c = load_center(a.tree);
    const std::size_t nb = c.tree.boundary_node_count(), ni = c.tree.interior_node_count();
    NodeParams p;
    p.cutoff = c.cutoff;
    for (const auto& x : a.r) p.boundary.push_back(parse_real(x, "r"));
    for (const auto& x : a.sigma) p.interior.push_back(parse_complex(x));
    if (a.r.empty()) p.boundary.assign(nb, 0.0);
    if (a.sigma.empty()) p.interior.assign(ni, {0.0, 0.0});
    if (p.boundary.size() != nb || p.interior.size() != ni) {
        throw DomainError("the tree has " + std::to_string(nb) + " boundary and " + std::to_string(ni) +
                          " interior nodes; got " + std::to_string(p.boundary.size()) + " --r and " +
                          std::to_string(p.interior.size()) + " --sigma values");
    }
    std::vector<double> v;
    for (const auto& x : a.v) v.push_back(parse_real(x, "v"));
    if (a.v.empty()) v = c.center_v();
    if (v.size() != c.free_dimension()) {
        throw DomainError("the center has " + std::to_string(c.free_dimension()) + " free parameters; got " +
                          std::to_string(v.size()) + " --v values");
    }
    p.validate();
    GluingParams<double> g{p.boundary, p.interior};
    Json j;
    j["center"] = c.name;
    j["v"] = v;
    j["configuration"] = to_json(plumb<double>(c, v, g));
    j["coordinates"] = to_json(chart_map_Phi(c, v, p));
    write_output(a.out, j.dump(2) + "\n", out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// transition

struct TransitionArgs {
    std::string pair, out, presentation = "double-log";
    std::vector<std::string> s, phi, v;
    int classify_order = 0;
};

int cmd_transition(const TransitionArgs& a, std::ostream& out) {
    const auto pr = load_pair(a.pair);
    DoubleLogCoords d;
    d.cutoff = pr.q.cutoff;
    for (const auto& x : a.s) d.boundary.push_back(parse_real(x, "s"));
    for (const auto& x : a.phi) d.interior.push_back(parse_complex(x));
    const std::size_t nb = pr.q.tree.boundary_node_count(), ni = pr.q.tree.interior_node_count();
    if (a.s.empty()) d.boundary.assign(nb, 0.0);
    if (a.phi.empty()) d.interior.assign(ni, {0.0, 0.0});
    if (d.boundary.size() != nb || d.interior.size() != ni) {
        throw DomainError("the pair has " + std::to_string(nb) + " boundary and " + std::to_string(ni) +
                          " interior nodes; got " + std::to_string(d.boundary.size()) + " --s and " +
                          std::to_string(d.interior.size()) + " --phi values");
    }
    std::vector<double> v;
    for (const auto& x : a.v) v.push_back(parse_real(x, "v"));
    if (a.v.empty()) v = pr.q.center_v();
    const auto [vp, dp] = chart_transition(pr.p, pr.q, d, v);
    auto side = [](const std::vector<double>& vv, const DoubleLogCoords& dd) {
        Json j;
        j["v"] = vv;
        j["s"] = dd.boundary;
        Json phi = Json::array();
        for (const auto& z : dd.interior) phi.push_back(to_json(z));
        j["phi"] = phi;
        return j;
    };
    Json j;
    j["pair"] = pr.name;
    j["q"] = side(v, d);
    j["p"] = side(vp, dp);
    if (a.classify_order > 0) {
        ChartTransition tr(pr.p, pr.q);
        const auto pres = presentation_from_string(a.presentation);
        Json c = to_json(classify_transition(tr, pres, a.classify_order));
        c["presentation"] = a.presentation;
        j["classification"] = c;
    }
    write_output(a.out, j.dump(2) + "\n", out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify-decay

struct VerifyArgs {
    std::string pair, out, estimates = "all";
    int max_n = 2;
    double t_min = 5.0, t_max = 40.0, t_step = 2.5;
    double c_min = 0.1, r2_min = 0.99;
    bool no_halving = false;
    int v_samples = 0;
    double v_spread = 0.05;
    std::uint64_t seed = 0;
};

int cmd_verify_decay(const VerifyArgs& a, std::ostream& out) {
    const auto pr = load_pair(a.pair);
    if (a.max_n < 1 || a.max_n > 4) throw DomainError("--max-n must be in 1..4");
    if (!(a.t_step > 0) || !(a.t_max > a.t_min)) throw DomainError("the T grid needs t-min < t-max and t-step > 0");
    std::vector<EstimateFamily> wanted;
    if (a.estimates != "all") {
        std::stringstream ss(a.estimates);
        std::string item;
        while (std::getline(ss, item, ',')) wanted.push_back(estimate_family_from_string(item));
    }
    VerifierOptions opt;
    opt.T_grid.clear();
    for (double T = a.t_min; T <= a.t_max + 1e-9; T += a.t_step) opt.T_grid.push_back(T);
    opt.inverse_radius_grid = opt.T_grid;
    opt.c_min = a.c_min;
    opt.r2_min = a.r2_min;
    opt.check_halving = !a.no_halving;

    // v values: the center's, then seeded samples around it
    std::vector<std::vector<double>> vs = {pr.q.center_v()};
    if (a.v_samples > 0 && !vs[0].empty()) {
        std::mt19937_64 rng(a.seed);
        std::uniform_real_distribution<double> u(-a.v_spread, a.v_spread);
        for (int k = 0; k < a.v_samples; ++k) {
            auto v = vs[0];
            for (auto& x : v) x += u(rng);
            vs.push_back(v);
        }
    }

    std::vector<DecayFit> all;
    bool ok = true;
    for (std::size_t iv = 0; iv < vs.size(); ++iv) {
        VerifierOptions o = opt;
        o.v = vs[iv];
        const EstimateVerifier ev(pr.p, pr.q, o);
        std::string tag;
        if (vs.size() > 1) {
            tag = "@v" + std::to_string(iv);
            out << "v" << iv << " =";
            for (double x : vs[iv]) out << " " << format_real(x);
            out << "\n";
        }
        for (const auto& spec : ev.default_suite(a.max_n)) {
            if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), spec.family) == wanted.end()) continue;
            for (auto f : ev.sample_estimate(spec)) {
                f.id += tag;
                char line[256];
                std::snprintf(line, sizeof line, "%-44s n=%d abscissa=%-7s slope=%+.6f r2=%.6f %s", f.id.c_str(), f.n,
                              f.abscissa.c_str(), f.slope, f.r2, f.passed() ? to_string(f.verdict) : "fail");
                out << line << (f.passed() || f.stable ? "" : " (unstable under grid halving)") << "\n";
                ok = ok && f.passed();
                all.push_back(std::move(f));
            }
        }
        for (std::size_t i = 0; i < pr.q.tree.interior_node_count(); ++i) {
            const auto off = estimate_angular_offset(pr.p, pr.q, i, opt.T_grid, o);
            out << "angular-offset[theta" << i << "]" << tag << " f=" << format_real(off.value) << " "
                << (off.converged ? "pass" : "fail") << "\n";
            ok = ok && off.converged;
        }
    }
    if (!a.out.empty()) {
        std::ostringstream csv;
        write_csv(csv, all);
        write_output(a.out, csv.str(), out);
    }
    out << (ok ? "all estimates pass" : "some estimates fail") << "\n";
    return ok ? kExitOk : kExitDecay;
}

}  // namespace

SmoothnessReport classify_named_map(const std::string& map, cplx<double> lambda, int max_order, Presentation pres) {
    if (max_order < 1 || max_order > 6) throw DomainError("order must be in 1..6");
    if (map.rfind("transition:", 0) == 0) {
        const auto pr = load_pair(map.substr(11));
        ChartTransition tr(pr.p, pr.q);
        return classify_transition(tr, pres, max_order);
    }
    const mp_real a = mp_real(RescaleFactor(lambda).log_real());
    if (map == "single-log-rescale" || map == "double-log-rescale") {
        const bool single = map == "single-log-rescale";
        const auto f = planar_map<mp_real>([a, single](const cplx<mp_real>& z) {
            return single ? rescale_single_log_kernel(z, a) : rescale_double_log_kernel(z, a);
        });
        const CornerPoint<mp_real> x0{{mp_real(0), mp_real(0)}, {VarKind::planar_re, VarKind::planar_im}};
        return classify_smoothness(f, x0, max_order);
    }
    if (map == "corner-rescale" || map == "corner-double-rescale") {
        const bool single = map == "corner-rescale";
        const VectorMap<mp_real> f = [a, single](const std::vector<mp_real>& x) {
            return std::vector<mp_real>{single ? rescale_corner_kernel(x[0], a) : rescale_corner_double_kernel(x[0], a)};
        };
        const CornerPoint<mp_real> x0{{mp_real(0)}, {VarKind::corner}};
        return classify_smoothness(f, x0, max_order);
    }
    throw DomainError("unknown map '" + map +
                      "' (expected single-log-rescale, double-log-rescale, corner-rescale, corner-double-rescale or "
                      "transition:<pair>)");
}

bool report_matches(const SmoothnessReport& r, const std::string& expect) {
    if (expect == "smooth" || expect == "C-infinity" || expect == "consistent-with-C-infinity") {
        return r.verdict == Verdict::consistent_with_smooth;
    }
    if (expect == "finitely-smooth") return r.verdict == Verdict::finitely_smooth;
    return r.label() == expect;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"cornerlog: double-log coordinates on moduli of stable marked disks", "cornerlog"};
    app.set_config("--config", "", "TOML or INI file with option values (flags on the command line win)");
    app.require_subcommand(1);

    ConvertArgs ca;
    auto* conv = app.add_subcommand("convert", "convert one gluing parameter between coordinate systems");
    conv->add_option("--from", ca.from, "raw, log, single-log or double-log")->required();
    conv->add_option("--to", ca.to, "raw, log, single-log or double-log")->required();
    conv->add_option("--kind", ca.kind, "boundary or interior (only needed for --T inf)");
    conv->add_option("--r", ca.r, "boundary gluing parameter");
    conv->add_option("--sigma", ca.sigma, "interior gluing parameter, e.g. 0.1+0.2i");
    conv->add_option("--T", ca.T, "log coordinate -log|parameter| (inf allowed)");
    conv->add_option("--theta", ca.theta, "angle -arg sigma");
    conv->add_option("--t", ca.t, "single-log corner coordinate");
    conv->add_option("--rho", ca.rho, "single-log planar coordinate");
    conv->add_option("--s", ca.s, "double-log corner coordinate");
    conv->add_option("--phi", ca.phi, "double-log planar coordinate");
    conv->add_option("--cutoff", ca.cutoff, "chart cutoff c");

    ClassifyArgs cl;
    auto* cls = app.add_subcommand("classify", "classify the smoothness of a map at the corner point");
    cls->add_option("--map", cl.map, "single-log-rescale, double-log-rescale, corner-rescale, corner-double-rescale, "
                                     "transition:<pair>")
        ->required();
    cls->add_option("--lambda", cl.lambda, "rescale factor (positive real)");
    cls->add_option("--order", cl.order, "highest derivative order to check (1..6)");
    cls->add_option("--expect", cl.expect, "smooth, finitely-smooth or a label such as C1-not-C2");
    cls->add_option("--presentation", cl.presentation, "single-log or double-log (transitions)");
    cls->add_option("--out", cl.out, "write the JSON report here");

    PlumbArgs pa;
    auto* plb = app.add_subcommand("plumb", "smooth the nodes of a tree and normalize");
    plb->add_option("--tree", pa.tree, "tree JSON file or built-in center name")->required();
    plb->add_option("--r", pa.r, "boundary gluing parameters, one per boundary node");
    plb->add_option("--sigma", pa.sigma, "interior gluing parameters, one per interior node");
    plb->add_option("--v", pa.v, "free parameters");
    plb->add_option("--out", pa.out, "write the JSON result here");

    TransitionArgs ta;
    auto* trn = app.add_subcommand("transition", "map a double-log chart point of q to the chart of p");
    trn->add_option("--pair", ta.pair, "pair JSON file or built-in pair such as mixed-2-2:rescale")->required();
    trn->add_option("--s", ta.s, "boundary double-log coordinates of q");
    trn->add_option("--phi", ta.phi, "interior double-log coordinates of q");
    trn->add_option("--v", ta.v, "free parameters of q");
    trn->add_option("--classify-order", ta.classify_order, "also classify the transition up to this order");
    trn->add_option("--presentation", ta.presentation, "presentation used by --classify-order");
    trn->add_option("--out", ta.out, "write the JSON result here");

    VerifyArgs va;
    auto* ver = app.add_subcommand("verify-decay", "fit the exponential-decay estimates on a chart pair");
    ver->add_option("--pair", va.pair, "pair JSON file or built-in pair")->required();
    ver->add_option("--estimates", va.estimates, "comma-separated families or all");
    ver->add_option("--max-n", va.max_n, "highest n (derivatives of order n-1 enter the norm)");
    ver->add_option("--t-min", va.t_min, "first grid value");
    ver->add_option("--t-max", va.t_max, "last grid value");
    ver->add_option("--t-step", va.t_step, "grid spacing");
    ver->add_option("--c-min", va.c_min, "largest accepted slope is -c-min");
    ver->add_option("--r2-min", va.r2_min, "smallest accepted R^2");
    ver->add_flag("--no-halving", va.no_halving, "skip the grid-halving stability check");
    ver->add_option("--v-samples", va.v_samples, "extra free-parameter samples around the center");
    ver->add_option("--v-spread", va.v_spread, "half-width of the free-parameter samples");
    ver->add_option("--seed", va.seed, "seed for the free-parameter samples");
    ver->add_option("--out", va.out, "write the CSV here");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        if (conv->parsed()) return cmd_convert(ca, out);
        if (cls->parsed()) return cmd_classify(cl, out, err);
        if (plb->parsed()) return cmd_plumb(pa, out);
        if (trn->parsed()) return cmd_transition(ta, out);
        if (ver->parsed()) return cmd_verify_decay(va, out);
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::range_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NoOverlapError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const FitDegenerateError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDecay;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << " (residual " << format_real(e.residual()) << ")\n";
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace cornerlog
