#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "conical/config.hpp"
#include "conical/run.hpp"

namespace py = pybind11;
using namespace conical;

namespace {

std::shared_ptr<ConicalPotential> potential_from_json(const std::string& text) {
    // Reuse the run-config parser for the potential block alone.
    const std::string wrapped = "{\"potential\": " + text +
                                ", \"initial\": {\"kind\": \"coherent\", \"q\": [0], \"p\": [0]}}";
    // q/p sizes must match dim; retry with dim-2 placeholders on failure.
    try {
        return parse_config_json(wrapped).potential;
    } catch (const ConfigError&) {
        const std::string wrapped2 =
            "{\"potential\": " + text +
            ", \"initial\": {\"kind\": \"coherent\", \"q\": [0, 0], \"p\": [0, 0]}}";
        return parse_config_json(wrapped2).potential;
    }
}

py::array_t<double> to_array(const Vec& v) {
    py::array_t<double> out(v.size());
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<double> to_array(const Mat& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    auto buf = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) buf(i, j) = m(i, j);
    return out;
}

Vec from_array(const py::array_t<double>& a) {
    Vec v(a.size());
    std::copy(a.data(), a.data() + a.size(), v.begin());
    return v;
}

WavefunctionGrid grid_from_python(const py::array_t<cplx>& values,
                                  const std::vector<std::tuple<double, double>>& axes,
                                  double eps) {
    WavefunctionGrid psi;
    psi.eps = eps;
    const auto info = values.request();
    if (std::size_t(info.ndim) != axes.size())
        throw ConfigError("array rank must match the axis count");
    for (std::size_t i = 0; i < axes.size(); ++i)
        psi.axes.push_back(
            {std::get<0>(axes[i]), std::get<1>(axes[i]), std::size_t(info.shape[i])});
    validate_grid(psi.axes);
    psi.values.resize(psi.total());
    const cplx* src = static_cast<const cplx*>(info.ptr);
    std::copy(src, src + psi.total(), psi.values.begin());
    return psi;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Semiclassical dynamics through conical potential singularities";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<NumericalError>(m, "NumericalError");

    py::class_<ConicalPotential, std::shared_ptr<ConicalPotential>>(m, "Potential")
        .def(py::init(&potential_from_json), py::arg("json"),
             "Build from the potential JSON block used by run configs")
        .def_property_readonly("dim", &ConicalPotential::dim)
        .def_property_readonly("codim", &ConicalPotential::codim)
        .def("V", [](const ConicalPotential& p, const py::array_t<double>& x) {
            return p.V(from_array(x));
        })
        .def("grad_V",
             [](const ConicalPotential& p, const py::array_t<double>& x) {
                 return to_array(p.grad_V(from_array(x)));
             })
        .def("hessian_V",
             [](const ConicalPotential& p, const py::array_t<double>& x) {
                 return to_array(p.hessian_V(from_array(x)));
             })
        .def("one_sided_force",
             [](const ConicalPotential& p, const py::array_t<double>& x,
                const py::array_t<double>& xi, int side) {
                 return to_array(p.one_sided_force(from_array(x), from_array(xi), side));
             },
             py::arg("x"), py::arg("xi"), py::arg("side") = 1)
        .def("singular_hessian_B1",
             [](const ConicalPotential& p, const py::array_t<double>& x,
                const py::array_t<double>& xi) {
                 return to_array(p.singular_hessian_B1(from_array(x), from_array(xi)));
             });

    m.def(
        "flow",
        [](const std::shared_ptr<ConicalPotential>& pot, const py::array_t<double>& x,
           const py::array_t<double>& xi, double t) {
            const FlowResult res = flow_map(*pot, {from_array(x), from_array(xi)}, t);
            py::dict out;
            out["x"] = to_array(res.end.x);
            out["xi"] = to_array(res.end.xi);
            out["tau"] = res.trajectory.tau ? py::object(py::float_(*res.trajectory.tau))
                                            : py::object(py::none());
            py::list crossings;
            for (const auto& ev : res.trajectory.crossings) {
                py::dict e;
                e["t"] = ev.t_cross;
                e["x"] = to_array(ev.point.x);
                e["xi"] = to_array(ev.point.xi);
                e["generic"] = ev.generic;
                crossings.append(e);
            }
            out["crossings"] = crossings;
            return out;
        },
        py::arg("potential"), py::arg("x"), py::arg("xi"), py::arg("t"),
        "Generalized flow endpoint with crossing events");

    m.def(
        "variational_jacobian",
        [](const std::shared_ptr<ConicalPotential>& pot, const py::array_t<double>& x,
           const py::array_t<double>& xi, double t, double h) {
            return to_array(variational_jacobian(*pot, {from_array(x), from_array(xi)}, t, h));
        },
        py::arg("potential"), py::arg("x"), py::arg("xi"), py::arg("t"), py::arg("h") = 1e-4);

    m.def(
        "make_coherent",
        [](const py::array_t<double>& q, const py::array_t<double>& p, double eps,
           const std::vector<std::tuple<double, double, std::size_t>>& axes) {
            InitialStateSpec spec;
            spec.kind = InitialStateSpec::Kind::coherent;
            spec.q = from_array(q);
            spec.p = from_array(p);
            std::vector<AxisSpec> ax;
            for (const auto& [lo, hi, n] : axes) ax.push_back({lo, hi, n});
            const WavefunctionGrid psi = make_initial_state(spec, ax, eps);
            if (psi.dim() == 1) {
                py::array_t<cplx> out(psi.values.size());
                std::copy(psi.values.begin(), psi.values.end(), out.mutable_data());
                return out;
            }
            py::array_t<cplx> out({psi.axes[0].n, psi.axes[1].n});
            std::copy(psi.values.begin(), psi.values.end(), out.mutable_data());
            return out;
        },
        py::arg("q"), py::arg("p"), py::arg("eps"), py::arg("axes"));

    m.def(
        "evolve",
        [](const std::shared_ptr<ConicalPotential>& pot, const py::array_t<cplx>& psi0,
           const std::vector<std::tuple<double, double>>& axes, double eps, double t_final,
           double dt, const std::vector<double>& snapshots) {
            const WavefunctionGrid psi = grid_from_python(psi0, axes, eps);
            const EvolveResult res = evolve(*pot, psi, t_final, dt, snapshots);
            py::list snaps;
            for (const auto& s : res.snapshots) {
                if (s.dim() == 1) {
                    py::array_t<cplx> a(s.values.size());
                    std::copy(s.values.begin(), s.values.end(), a.mutable_data());
                    snaps.append(a);
                } else {
                    py::array_t<cplx> a({s.axes[0].n, s.axes[1].n});
                    std::copy(s.values.begin(), s.values.end(), a.mutable_data());
                    snaps.append(a);
                }
            }
            py::dict out;
            out["times"] = res.times;
            out["snapshots"] = snaps;
            out["norm_drift"] = res.norm_drift;
            out["energy_drift_rel"] = res.energy_drift_rel;
            return out;
        },
        py::arg("potential"), py::arg("psi0"), py::arg("axes"), py::arg("eps"),
        py::arg("t_final"), py::arg("dt") = 0.0,
        py::arg("snapshots") = std::vector<double>{});

    m.def(
        "wigner",
        [](const py::array_t<cplx>& psi0, const std::vector<std::tuple<double, double>>& axes,
           double eps) {
            const WavefunctionGrid psi = grid_from_python(psi0, axes, eps);
            const PhaseSpaceField w = wigner_transform(psi);
            py::dict out;
            if (w.dim() == 1) {
                py::array_t<double> vals({w.x_axes[0].n, w.xi_axes[0].n});
                std::copy(w.values.begin(), w.values.end(), vals.mutable_data());
                out["values"] = vals;
            } else {
                py::array_t<double> vals(
                    {w.x_axes[0].n, w.x_axes[1].n, w.xi_axes[0].n, w.xi_axes[1].n});
                std::copy(w.values.begin(), w.values.end(), vals.mutable_data());
                out["values"] = vals;
            }
            auto axis_list = [](const std::vector<AxisSpec>& as) {
                py::list l;
                for (const auto& a : as) l.append(py::make_tuple(a.lo, a.hi, a.n));
                return l;
            };
            out["x_axes"] = axis_list(w.x_axes);
            out["xi_axes"] = axis_list(w.xi_axes);
            out["mass"] = w.mass();
            return out;
        },
        py::arg("psi0"), py::arg("axes"), py::arg("eps"));

    m.def(
        "run",
        [](const std::string& config_json, const std::string& subcommand,
           const std::string& out_dir) {
            RunConfig cfg = parse_config_json(config_json);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            return run_subcommand(cfg, subcommand);
        },
        py::arg("config_json"), py::arg("subcommand"), py::arg("out_dir") = "",
        "Execute a CLI subcommand from a config string; returns the exit code");

    m.attr("__version__") = "0.1.0";
}
