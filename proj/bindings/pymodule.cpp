// Python bindings for the uccert core library.
//
// Reports that the C++ side serializes as JSON are handed to Python as
// plain dicts/lists (round-tripped through the standard json module, which
// preserves shortest-roundtrip doubles exactly).

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uccert/constants.hpp"
#include "uccert/entropy.hpp"
#include "uccert/kernels.hpp"
#include "uccert/maxcorr.hpp"
#include "uccert/measures.hpp"
#include "uccert/optimizer.hpp"
#include "uccert/psd_grid.hpp"
#include "uccert/rng.hpp"
#include "uccert/series.hpp"
#include "uccert/version.hpp"

namespace py = pybind11;
using namespace uccert;

namespace {

py::object json_to_py(const nlohmann::ordered_json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

ThetaVector theta_from_array(const std::array<double, 9>& v) {
  ThetaVector theta;
  theta.v = v;
  return theta;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Certification toolkit for the entropic union-closed sets bound: "
      "analytic constants, coupling kernels, PSD verifications, the "
      "9-dimensional mixture optimization, and the maximal-correlation scan.";
  m.attr("__version__") = version_string;

  // --- entropy ------------------------------------------------------------
  m.def("binary_entropy", &binary_entropy, py::arg("s"),
        "Binary entropy in bits, with 0 log 0 = 0.");
  m.def("binary_entropy_deriv", &binary_entropy_deriv, py::arg("s"),
        "h'(s) = log2((1-s)/s) on the open interval (0,1).");
  m.def("golden_threshold", &golden_threshold,
        "(3 - sqrt(5))/2, the branch point of iid_entropy_gain.");
  m.def("iid_entropy_gain", &iid_entropy_gain, py::arg("u"),
        "Sharp lower bound for E[h(XY)]/E[h(X)] at mean constraint u.");

  // --- kernels --------------------------------------------------------------
  m.def("a_opt", &a_opt, py::arg("t"),
        "Optimal mixing weight of the common-threshold coupling.");

  py::class_<KernelSpec>(m, "KernelSpec", "A coupling-kernel description.")
      .def_static("iid", &KernelSpec::iid)
      .def_static("max_entropy", &KernelSpec::max_entropy)
      .def_static("ciid_threshold", &KernelSpec::ciid_threshold)
      .def_static("ciid_product", &KernelSpec::ciid_product, py::arg("xp_coeffs"),
                  py::arg("scale"))
      .def_static("ciid_xxbar", &KernelSpec::ciid_xxbar)
      .def_static(
          "from_name",
          [](const std::string& name) {
            return KernelSpec::from_kind(coupling_kind_from_string(name));
          },
          py::arg("name"), "Parse 'iid' | 'maxent' | 'ciid-aopt' | 'ciid-xxbar'.")
      .def_property_readonly("name", &KernelSpec::name)
      .def("correction", &KernelSpec::correction, py::arg("x"))
      .def("__repr__",
           [](const KernelSpec& spec) { return "KernelSpec(" + spec.name() + ")"; });

  m.def("kernel_value", &kernel_value, py::arg("spec"), py::arg("s"), py::arg("t"),
        "Pi(0,0) in marginal coordinates.");
  m.def("kernel_value_x", &kernel_value_x, py::arg("spec"), py::arg("x"), py::arg("y"),
        "Pi(0,0) in survival coordinates x = 1-s, y = 1-t.");
  m.def(
      "joint_table",
      [](const KernelSpec& spec, double s, double t) {
        const JointTable table = joint_table(spec, s, t);
        py::dict d;
        d["p00"] = table.p00;
        d["p01"] = table.p01;
        d["p10"] = table.p10;
        d["p11"] = table.p11;
        return d;
      },
      py::arg("spec"), py::arg("s"), py::arg("t"),
      "Full joint table of the coupling as a dict.");
  m.def(
      "simulate_protocol",
      [](const KernelSpec& spec, double s, double t, std::uint64_t n, std::uint64_t seed) {
        const SimulationResult r = simulate_protocol(spec, s, t, n, seed);
        py::dict d;
        d["p00"] = r.empirical.p00;
        d["p01"] = r.empirical.p01;
        d["p10"] = r.empirical.p10;
        d["p11"] = r.empirical.p11;
        d["n"] = r.n;
        return d;
      },
      py::arg("spec"), py::arg("s"), py::arg("t"), py::arg("n"), py::arg("seed"),
      "Monte-Carlo sample of the coupling from its defining construction.");
  m.def("sawin_objective", &sawin_objective, py::arg("a"), py::arg("b"), py::arg("alpha"),
        "Convex-combination objective over the two-point family.");

  // --- constants ------------------------------------------------------------
  m.def(
      "solve_constants", [] { return json_to_py(solve_constants().to_json()); },
      "Solve every named constant; returns {name: {value, residual, "
      "defining_equation_text}}.");
  m.def("compute_pstar", &compute_pstar, py::arg("x"), "h(x)/h(x^2).");

  // --- measures -------------------------------------------------------------
  py::class_<DiscreteMeasure>(m, "DiscreteMeasure",
                              "Finitely supported probability measure on [0,1] "
                              "in survival coordinates.")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("atoms"),
           py::arg("weights"))
      .def_static("delta", &DiscreteMeasure::delta, py::arg("x"))
      .def_property_readonly("atoms",
                             [](const DiscreteMeasure& mu) { return mu.atoms(); })
      .def_property_readonly("weights",
                             [](const DiscreteMeasure& mu) { return mu.weights(); })
      .def("__len__", &DiscreteMeasure::size)
      .def("__repr__", [](const DiscreteMeasure& mu) {
        return std::string("DiscreteMeasure(") + mu.to_json().dump() + ")";
      });
  m.def("mean", &mean, py::arg("mu"), "E[x] under mu.");
  m.def("expect_h", &expect_h, py::arg("mu"), "E[h(x)] under mu.");
  m.def("quad_form_h", &quad_form_h, py::arg("spec"), py::arg("mu"), py::arg("nu"),
        "Double integral of h(kernel(x,y)) d mu d nu.");

  // --- grid PSD ---------------------------------------------------------------
  py::class_<GridSpec>(m, "GridSpec", "Uniform grid {0, sep, ..., 1} plus moment degrees.")
      .def_static("from_separation_string", &GridSpec::from_separation_string,
                  py::arg("separation"), py::arg("degrees"))
      .def_static("from_inv_sep", &GridSpec::from_inv_sep, py::arg("inv_sep"),
                  py::arg("degrees"))
      .def_property_readonly("separation", &GridSpec::separation)
      .def_property_readonly("inv_sep", [](const GridSpec& g) { return g.inv_sep; })
      .def_property_readonly("constraint_degrees",
                             [](const GridSpec& g) { return g.constraint_degrees; })
      .def("points", &GridSpec::points);
  m.def("build_grid_matrix", &build_grid_matrix, py::arg("spec"), py::arg("grid"),
        "M[i][j] = -h(kernel(x_i, x_j)) on the grid, as a numpy array.");
  m.def(
      "project_and_min_eig",
      [](const Eigen::MatrixXd& matrix, const GridSpec& grid) {
        const GridPsdResult r = project_and_min_eig(matrix, grid);
        py::dict d;
        d["min_eig"] = r.min_eig;
        d["subspace_dim"] = r.subspace_dim;
        d["certified"] = r.certified;
        return d;
      },
      py::arg("matrix"), py::arg("grid"),
      "Minimum eigenvalue of the matrix restricted to the moment-orthogonal "
      "subspace.");
  m.def(
      "verify_grid_psd",
      [](const KernelSpec& spec, const GridSpec& grid) {
        return json_to_py(verify_grid_psd(spec, grid));
      },
      py::arg("spec"), py::arg("grid"), "Full grid-PSD report as a dict.");

  // --- series PSD --------------------------------------------------------------
  m.def(
      "verify_series_psd",
      [](int order, int start, bool exact) {
        return json_to_py(verify_series_psd(order, start, exact).to_json());
      },
      py::arg("order"), py::arg("start") = 2, py::arg("exact") = false,
      "Series-coefficient PSD check as a dict.");
  m.def(
      "coeff_closed_form",
      [](const std::string& kind, int m_idx, int n_idx) {
        SeriesLogKind k;
        if (kind == "log-half") {
          k = SeriesLogKind::LogHalf;
        } else if (kind == "log-one-minus-i") {
          k = SeriesLogKind::LogOneMinusI;
        } else {
          throw std::invalid_argument("kind must be 'log-half' or 'log-one-minus-i'");
        }
        const Rational value = coeff_closed_form(k, m_idx, n_idx);
        return py::module_::import("fractions").attr("Fraction")(value.get_str());
      },
      py::arg("kind"), py::arg("m"), py::arg("n"),
      "Closed-form series coefficient as an exact fractions.Fraction.");
  m.def(
      "compare_closed_forms",
      [](int max_index) {
        const ClosedFormComparison c = compare_closed_forms(max_index);
        py::dict d;
        d["checked_through"] = c.checked_through;
        d["log_half_agrees"] = c.log_half_agrees;
        d["log_one_minus_i_mismatches"] = c.log_one_minus_i_mismatches;
        d["log_one_minus_i_first_mismatch"] =
            py::make_tuple(c.first_mismatch.first, c.first_mismatch.second);
        return d;
      },
      py::arg("max_index"),
      "Closed forms vs the series oracle on the full index box.");

  // --- optimizer -----------------------------------------------------------------
  m.def(
      "objective",
      [](const std::array<double, 9>& theta, double beta) {
        return objective(theta_from_array(theta), beta);
      },
      py::arg("theta"), py::arg("beta"),
      "Mixture-relaxation ratio objective at a packed 9-vector.");
  m.def(
      "mean_constraint",
      [](const std::array<double, 9>& theta) {
        return mean_constraint(theta_from_array(theta));
      },
      py::arg("theta"), "E_mu[x] of the packed 9-vector.");
  m.def(
      "conjectured_theta",
      [](double c, double beta) { return conjectured_theta(c, beta).v; },
      py::arg("c"), py::arg("beta"),
      "The conjectured optimizer at constraint level c, as a packed 9-vector.");
  m.def("family_ratio", &family_ratio, py::arg("x"), py::arg("beta"), py::arg("c"),
        "Objective along the two-point family p x = 1-c.");
  m.def(
      "certify",
      [](double c, double beta, int starts, std::uint64_t seed, const std::string& solver,
         int threads) {
        CertificationConfig config;
        config.c = c;
        config.beta = beta;
        config.n_starts = starts;
        config.seed = seed;
        config.solver = solver_kind_from_string(solver);
        config.threads = threads;
        config.validate();
        return json_to_py(certify(config).to_json());
      },
      py::arg("c"), py::arg("beta") = 0.0, py::arg("starts") = 1000, py::arg("seed") = 0,
      py::arg("solver") = "nm", py::arg("threads") = 0,
      "Deterministic multistart certification; returns the full report dict.");

  // --- maximal correlation ---------------------------------------------------------
  m.def("maxcorr_gap", py::overload_cast<double>(&maxcorr_gap), py::arg("rho"),
        "Correlation-constrained gap at the solved (a*, b*).");
  m.def("maxcorr_gap_at", py::overload_cast<double, double, double>(&maxcorr_gap),
        py::arg("rho"), py::arg("a"), py::arg("b"),
        "Correlation-constrained gap at explicit (a, b).");
  m.def(
      "scan_negativity",
      [](int n_points) { return json_to_py(scan_negativity(n_points).to_json()); },
      py::arg("n_points") = 999, "Negativity scan of the gap over (0,1) as a dict.");

  // --- rng (exposed so python tests can reproduce stream draws) ------------------
  m.def("stream_uniform", &stream_uniform, py::arg("seed"), py::arg("counter"));
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));
}
