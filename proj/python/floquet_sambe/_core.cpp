#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/stl.h>

#include "floquet/cli.hpp"
#include "floquet/errors.hpp"
#include "floquet/fqpe.hpp"
#include "floquet/prep.hpp"
#include "floquet/spectral.hpp"

namespace py = pybind11;
using namespace floquet;

namespace {

Boundary parse_boundary(const std::string& s) {
    if (s == "obc") return Boundary::Obc;
    if (s == "pbc") return Boundary::Pbc;
    throw ValidationError("boundary must be obc or pbc");
}

// results cross the boundary as JSON text, decoded on the Python side
std::string dump(const nlohmann::json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<Error>(m, "FloquetError", PyExc_RuntimeError);

    py::class_<FourierHamiltonian>(m, "Hamiltonian")
        .def_property_readonly("n_qubits", &FourierHamiltonian::n_qubits)
        .def_property_readonly("dim", &FourierHamiltonian::dim)
        .def_property_readonly("period", &FourierHamiltonian::period)
        .def_property_readonly("omega", &FourierHamiltonian::omega)
        .def_property_readonly("M", &FourierHamiltonian::M)
        .def_property_readonly("alpha", &FourierHamiltonian::alpha)
        .def_property_readonly("alphaT", &FourierHamiltonian::alphaT)
        .def_property_readonly("name", &FourierHamiltonian::name)
        .def("component", &FourierHamiltonian::component, py::arg("m"));

    m.def("load_hamiltonian", &load_hamiltonian, py::arg("path"));
    m.def("parse_hamiltonian", py::overload_cast<const std::string&>(&parse_hamiltonian), py::arg("text"));

    m.def(
        "sambe_matrix",
        [](const FourierHamiltonian& h, int L, const std::string& b) { return build_floquet(h, L, parse_boundary(b)).matrix; },
        py::arg("h"), py::arg("L"), py::arg("boundary") = "obc");
    m.def("alpha_F", &alpha_F, py::arg("h"), py::arg("L"));
    m.def("cutoff_for_accuracy", &cutoff_for_accuracy, py::arg("M"), py::arg("alphaT"), py::arg("eps"));
    m.def(
        "quasienergies",
        [](const FourierHamiltonian& h, int L, const std::string& b) {
            return diagonalize_sambe(build_floquet(h, L, parse_boundary(b))).central_values();
        },
        py::arg("h"), py::arg("L"), py::arg("boundary") = "obc");
    m.def(
        "floquet_operator",
        [](const FourierHamiltonian& h, long steps) { return floquet_operator(h, method::Discretized{steps}); },
        py::arg("h"), py::arg("steps") = 100000);
    m.def(
        "oracle_quasienergies",
        [](const FourierHamiltonian& h, long steps) { return make_oracle(h, steps).spectrum.central_values(); },
        py::arg("h"), py::arg("steps") = 100000);

    m.def(
        "_verify_bounds",
        [](const FourierHamiltonian& h, int L, const std::string& checks, long steps) {
            const Oracle o = make_oracle(h, steps);
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& r : verify_bounds(h, L, BoundTargets::parse(checks), &o))
                rows.push_back({{"check_id", r.check_id}, {"L", r.L}, {"measured", r.measured}, {"bound", r.bound},
                                {"pass", r.pass}});
            return dump(rows);
        },
        py::arg("h"), py::arg("L"), py::arg("checks"), py::arg("steps") = 100000);

    m.def(
        "_fqpe_physical",
        [](const FourierHamiltonian& h, const CVector& psi, double eps, double delta, std::optional<double> nu) {
            return dump(to_json(fqpe_physical(h, psi, {eps, delta, nu, 0.0})));
        },
        py::arg("h"), py::arg("psi"), py::arg("eps") = 1e-3, py::arg("delta") = 1e-3, py::arg("nu") = py::none());
    m.def(
        "_fqpe_sambe",
        [](const FourierHamiltonian& h, const CVector& psi, int L, double eps, double delta, std::optional<double> nu) {
            SambeQpeOptions o;
            o.L = L;
            o.eps = eps;
            o.delta = delta;
            o.nu = nu;
            return dump(to_json(fqpe_sambe(h, psi, o)));
        },
        py::arg("h"), py::arg("psi"), py::arg("L"), py::arg("eps") = 1e-3, py::arg("delta") = 1e-3,
        py::arg("nu") = py::none());

    m.def(
        "_prepare",
        [](const FourierHamiltonian& h, const CVector& psi, double eps_n, double Delta, double gamma, double delta,
           const std::string& target, std::optional<int> L) {
            PrepSpec s;
            s.eps_n = eps_n;
            s.Delta = Delta;
            s.gamma = gamma;
            s.delta = delta;
            s.target = target == "sambe" ? TargetKind::Sambe : TargetKind::Physical;
            s.L = L;
            return dump(to_json(prepare_eigenstate(h, psi, s)));
        },
        py::arg("h"), py::arg("psi"), py::arg("eps_n"), py::arg("Delta"), py::arg("gamma"), py::arg("delta") = 1e-3,
        py::arg("target") = "physical", py::arg("L") = py::none());

    m.def("f3", &f3, py::arg("x"));

    m.def(
        "cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
