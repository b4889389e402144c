#include "cornerlog/cli_commands.hpp"
#include "cornerlog/estimate_verifier.hpp"
#include "cornerlog/serialization.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace cornerlog;

namespace {

using Reals = std::vector<double>;
using Complexes = std::vector<std::complex<double>>;

NodeParams node_params(const Reals& r, const Complexes& sigma, double cutoff) {
    NodeParams p;
    p.boundary = r;
    p.interior = sigma;
    p.cutoff = cutoff;
    return p;
}

py::dict log_dict(const LogCoords& L) {
    py::list iT, ith;
    for (const auto& x : L.interior) {
        iT.append(x.T);
        ith.append(x.theta ? py::object(py::float_(*x.theta)) : py::object(py::none()));
    }
    py::dict d;
    d["T_boundary"] = L.boundary;
    d["T_interior"] = iT;
    d["theta"] = ith;
    return d;
}

// Results that already have a JSON form cross the boundary as JSON text.
std::string dump(const Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_cornerlog, m) {
    m.doc() = "Single-log and double-log coordinates on moduli of stable marked disks";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NoOverlapError>(m, "NoOverlapError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);

    m.attr("DEFAULT_CUTOFF") = kDefaultCutoff;

    m.def(
        "to_log", [](const Reals& r, const Complexes& sigma, double c) { return log_dict(to_log(node_params(r, sigma, c))); },
        py::arg("r") = Reals{}, py::arg("sigma") = Complexes{}, py::arg("cutoff") = kDefaultCutoff,
        "Log coordinates T = -log r, T = -log|sigma|, theta = -arg sigma.");
    m.def(
        "to_single_log",
        [](const Reals& r, const Complexes& sigma, double c) {
            const auto s = to_single_log(node_params(r, sigma, c));
            return py::make_tuple(s.boundary, s.interior);
        },
        py::arg("r") = Reals{}, py::arg("sigma") = Complexes{}, py::arg("cutoff") = kDefaultCutoff,
        "(t, rho) with t = 1/T and rho = e^{i theta}/T.");
    m.def(
        "to_double_log",
        [](const Reals& r, const Complexes& sigma, double c) {
            const auto d = to_double_log(node_params(r, sigma, c));
            return py::make_tuple(d.boundary, d.interior);
        },
        py::arg("r") = Reals{}, py::arg("sigma") = Complexes{}, py::arg("cutoff") = kDefaultCutoff,
        "(s, phi) with s = 1/log T and phi = e^{i theta}/log T.");
    m.def(
        "from_single_log",
        [](const Reals& t, const Complexes& rho, double c) {
            const auto p = from_single_log(SingleLogCoords{t, rho, c});
            return py::make_tuple(p.boundary, p.interior);
        },
        py::arg("t") = Reals{}, py::arg("rho") = Complexes{}, py::arg("cutoff") = kDefaultCutoff);
    m.def(
        "from_double_log",
        [](const Reals& s, const Complexes& phi, double c) {
            const auto p = from_double_log(DoubleLogCoords{s, phi, c});
            return py::make_tuple(p.boundary, p.interior);
        },
        py::arg("s") = Reals{}, py::arg("phi") = Complexes{}, py::arg("cutoff") = kDefaultCutoff);

    m.def("rescale_single_log", [](std::complex<double> rho, std::complex<double> lam) {
        return rescale_single_log(rho, RescaleFactor(lam));
    });
    m.def("rescale_double_log", [](std::complex<double> phi, std::complex<double> lam) {
        return rescale_double_log(phi, RescaleFactor(lam));
    });
    m.def("rescale_corner", [](double t, double lam) { return rescale_corner(t, RescaleFactor::positive(lam)); });
    m.def("rescale_corner_double",
          [](double s, double lam) { return rescale_corner_double(s, RescaleFactor::positive(lam)); });

    m.def(
        "_classify",
        [](const std::string& map, std::complex<double> lam, int order, const std::string& pres) {
            return dump(to_json(classify_named_map(map, lam, order, presentation_from_string(pres))));
        },
        py::arg("map"), py::arg("lam"), py::arg("order"), py::arg("presentation"));
    m.def(
        "_chart_map",
        [](const std::string& tree, const Reals& r, const Complexes& sigma, std::optional<Reals> v) {
            const auto c = load_center(tree);
            return dump(to_json(chart_map_Phi(c, v ? *v : c.center_v(), node_params(r, sigma, c.cutoff))));
        },
        py::arg("tree"), py::arg("r"), py::arg("sigma"), py::arg("v") = py::none());
    m.def(
        "transition",
        [](const std::string& pair, const Reals& s, const Complexes& phi, std::optional<Reals> v) {
            const auto pr = load_pair(pair);
            const auto [vp, dp] =
                chart_transition(pr.p, pr.q, DoubleLogCoords{s, phi, pr.q.cutoff}, v ? *v : pr.q.center_v());
            return py::make_tuple(vp, dp.boundary, dp.interior);
        },
        py::arg("pair"), py::arg("s") = Reals{}, py::arg("phi") = Complexes{}, py::arg("v") = py::none(),
        "Maps a double-log point (v, s, phi) of q's chart to p's chart.");
    m.def(
        "_verify_decay",
        [](const std::string& pair, int max_n, const std::vector<std::string>& families, bool halving) {
            const auto pr = load_pair(pair);
            VerifierOptions o;
            o.check_halving = halving;
            const EstimateVerifier ev(pr.p, pr.q, o);
            Json out = Json::array();
            for (const auto& spec : ev.default_suite(max_n)) {
                if (!families.empty() &&
                    std::find(families.begin(), families.end(), to_string(spec.family)) == families.end()) {
                    continue;
                }
                for (const auto& f : ev.sample_estimate(spec)) out.push_back(to_json(f));
            }
            return dump(out);
        },
        py::arg("pair"), py::arg("max_n"), py::arg("families"), py::arg("halving"));
    m.def(
        "angular_offset",
        [](const std::string& pair, std::size_t node) {
            const auto pr = load_pair(pair);
            const auto a = estimate_angular_offset(pr.p, pr.q, node);
            return py::make_tuple(a.value, a.converged);
        },
        py::arg("pair"), py::arg("node") = 0, "(f, converged): the limiting angle offset of an interior node.");
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line in-process; returns (exit code, stdout, stderr).");
}
