// Python bindings. Fields cross the boundary as gpscat.Field objects; numpy
// arrays come in as physical samples of shape (N,)*d and go out either as
// physical samples or as coefficients in FFT order.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gpscat/besov.hpp"
#include "gpscat/errors.hpp"
#include "gpscat/estimates.hpp"
#include "gpscat/evolve.hpp"
#include "gpscat/linear.hpp"
#include "gpscat/multipliers.hpp"
#include "gpscat/normal_form.hpp"

namespace py = pybind11;
using namespace gpscat;

namespace {

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

Frame frame_from(const std::string& name) {
  if (name == "u") return Frame::u;
  if (name == "v") return Frame::v;
  if (name == "w") return Frame::w;
  if (name == "z") return Frame::z;
  throw InvalidArgument("frame must be one of u, v, w, z; got '" + name + "'");
}

std::vector<py::ssize_t> shape_of(const Grid& g) {
  return std::vector<py::ssize_t>(static_cast<std::size_t>(g.dim()), g.points());
}

ComplexArray to_array(const Grid& g, std::span<const Complex> values) {
  ComplexArray out(shape_of(g));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

SpectralField from_array(const Grid& g, const ComplexArray& a, const std::string& frame,
                         Representation rep) {
  if (static_cast<std::size_t>(a.size()) != g.size() || a.ndim() != g.dim())
    throw InvalidArgument("array shape must be (N,)*d for the grid");
  std::vector<Complex> values(a.data(), a.data() + a.size());
  return SpectralField(g, std::move(values), frame_from(frame), rep);
}

MultiplierSpec multiplier_by_name(const std::string& name) {
  if (name == "H") return multiplier::H();
  if (name == "U") return multiplier::U();
  if (name == "U_inverse") return multiplier::U_inverse();
  if (name == "P") return multiplier::P();
  if (name == "Q") return multiplier::Q();
  if (name == "laplacian") return multiplier::laplacian();
  if (name == "P_laplacian") return multiplier::P_laplacian();
  throw InvalidArgument("unknown multiplier '" + name + "'");
}

py::dict records_dict(const std::vector<ObserverRecord>& records) {
  std::vector<double> t, sup, vn;
  std::vector<std::optional<double>> identity, cauchy;
  for (const auto& r : records) {
    t.push_back(r.t);
    sup.push_back(r.sup_norm);
    vn.push_back(r.v_norm);
    identity.push_back(r.identity);
    cauchy.push_back(r.cauchy);
  }
  py::dict d;
  d["t"] = t;
  d["sup_norm"] = sup;
  d["v_norm"] = vn;
  d["w_identity"] = identity;
  d["cauchy"] = cauchy;
  return d;
}

py::dict fit_dict(const DecayFitResult& f) {
  py::dict d;
  d["exponent"] = f.exponent;
  d["predicted"] = f.predicted;
  d["residual"] = f.residual;
  d["window"] = py::make_tuple(f.t0, f.t1);
  d["constant"] = f.constant;
  d["times"] = f.times;
  d["norms"] = f.norms;
  d["envelope"] = f.envelope;
  return d;
}

SolveConfig solve_config(double dt, double T, int observe_every, double sigma, double s,
                         double epsilon_max) {
  SolveConfig cfg;
  cfg.dt = dt;
  cfg.T = T;
  cfg.observe_every = observe_every;
  cfg.sigma = sigma;
  cfg.s = s;
  cfg.epsilon_max = epsilon_max;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral core: multipliers, norms, linear flow, normal form, Strang evolution";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<RepresentationMismatch>(m, "RepresentationMismatch", base.ptr());
  py::register_exception<SingularZeroMode>(m, "SingularZeroMode", base.ptr());
  py::register_exception<SmallnessViolated>(m, "SmallnessViolated", base.ptr());
  py::register_exception<BlowupGuard>(m, "BlowupGuard", base.ptr());
  py::register_exception<GuardViolation>(m, "GuardViolation", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, int, double>(), py::arg("d"), py::arg("N"), py::arg("L"))
      .def_property_readonly("d", &Grid::dim)
      .def_property_readonly("N", &Grid::points)
      .def_property_readonly("L", &Grid::length)
      .def_property_readonly("size", &Grid::size)
      .def_property_readonly("spacing", &Grid::spacing)
      .def("abs_frequencies",
           [](const Grid& g) {
             const auto a = g.abs_frequencies();
             py::array_t<double> out(shape_of(g));
             std::copy(a.begin(), a.end(), out.mutable_data());
             return out;
           })
      .def("__eq__", &Grid::operator==)
      .def("__repr__", [](const Grid& g) {
        return "Grid(d=" + std::to_string(g.dim()) + ", N=" + std::to_string(g.points()) +
               ", L=" + std::to_string(g.length()) + ")";
      });

  py::class_<SpectralField>(m, "Field")
      .def(py::init([](const Grid& g, const ComplexArray& samples, const std::string& frame) {
             return from_array(g, samples, frame, Representation::physical);
           }),
           py::arg("grid"), py::arg("samples"), py::arg("frame") = "u",
           "Field from physical samples of shape (N,)*d.")
      .def_static(
          "from_coefficients",
          [](const Grid& g, const ComplexArray& c, const std::string& frame) {
            return from_array(g, c, frame, Representation::frequency);
          },
          py::arg("grid"), py::arg("coefficients"), py::arg("frame") = "u")
      .def_property_readonly("grid", &SpectralField::grid)
      .def_property_readonly("frame", [](const SpectralField& f) { return to_string(f.frame()); })
      .def("physical", [](const SpectralField& f) { return to_array(f.grid(), to_physical(f).values()); })
      .def("coefficients",
           [](const SpectralField& f) { return to_array(f.grid(), to_frequency(f).values()); })
      .def("with_frame", [](const SpectralField& f, const std::string& frame) {
        return f.with_frame(frame_from(frame));
      })
      .def("__add__", [](const SpectralField& a, const SpectralField& b) { return to_frequency(a) + to_frequency(b); })
      .def("__sub__", [](const SpectralField& a, const SpectralField& b) { return to_frequency(a) - to_frequency(b); })
      .def("__rmul__", [](const SpectralField& a, Complex c) { return c * a; })
      .def("__mul__", [](const SpectralField& a, Complex c) { return c * a; });

  // Fields and multipliers.
  m.def("random_field",
        [](const Grid& g, std::uint64_t seed, double decay, const std::string& frame) {
          Profile p = [decay](const Wavevector& w) { return std::exp(-decay * w.abs * w.abs); };
          return random_field(g, p, seed, frame_from(frame));
        },
        py::arg("grid"), py::arg("seed"), py::arg("decay") = 0.0, py::arg("frame") = "u",
        "Complex Gaussian coefficients with envelope exp(-decay |xi|^2).");
  m.def("dealias", &dealias, py::arg("field"), py::arg("order") = 2);
  m.def("without_mean", &without_mean);
  m.def("l2_norm", &l2_norm);
  m.def("real_part", &real_part);
  m.def("imag_part", &imag_part);
  m.def("max_abs_difference", &max_abs_difference);
  m.def("apply_multiplier",
        [](const std::string& name, const SpectralField& f) { return apply_multiplier(multiplier_by_name(name), f); },
        py::arg("name"), py::arg("field"),
        "name in H, U, U_inverse, P, Q, laplacian, P_laplacian.");
  m.def("apply_V",
        [](const SpectralField& f, bool inverse) {
          return apply_V(f, inverse ? Direction::inverse : Direction::forward);
        },
        py::arg("field"), py::arg("inverse") = false);
  m.def("symbol_H", &symbol_H);
  m.def("symbol_U", &symbol_U);
  m.def("cutoff_chi", &cutoff_chi);

  // Norms.
  m.def("besov_norm",
        [](const SpectralField& f, double a, double b, double q) { return besov_norm(f, NormSpec{a, b, q}); },
        py::arg("field"), py::arg("a"), py::arg("b"), py::arg("q") = 2.0);
  m.def("sobolev_norm", &sobolev_weighted_norm, py::arg("field"), py::arg("sigma"), py::arg("s"));
  m.def("lq_norm", &lq_norm, py::arg("field"), py::arg("q"));

  // Linear flow.
  m.def("propagate_diag", &propagate_diag, py::arg("v"), py::arg("t"));
  m.def("propagate_u_linear", py::overload_cast<const SpectralField&, double>(&propagate_u_linear),
        py::arg("u"), py::arg("t"));
  m.def("permode_oracle", &permode_oracle, py::arg("u"), py::arg("t"), py::arg("substeps") = 10000);
  m.def("stationary_phase_envelope", &stationary_phase_envelope, py::arg("d"), py::arg("R"), py::arg("t"));
  m.def("decay_fit_oracle",
        [](int d, double R, const std::vector<double>& times) { return fit_dict(decay_fit_oracle(d, R, times)); },
        py::arg("d"), py::arg("R"), py::arg("times"));
  m.def("decay_fit",
        [](const SpectralField& phi0, double q, const std::vector<double>& times) {
          return fit_dict(decay_fit(phi0, q, times));
        },
        py::arg("phi0"), py::arg("q"), py::arg("times"));

  // Normal form.
  m.def("to_normal_form", &to_normal_form);
  m.def("apply_M", &apply_M);
  m.def("invert_M",
        [](const SpectralField& z, double tol, int max_iter) {
          FixedPointOptions opt;
          opt.tol = tol;
          opt.max_iter = max_iter;
          auto [v, report] = invert_M(z, opt);
          return py::make_tuple(v, report.iterations, report.residual);
        },
        py::arg("z"), py::arg("tol") = 1e-12, py::arg("max_iter") = 200,
        "Returns (v, iterations, residual).");
  m.def("q_split", &q_split);
  m.def("w_identity_residual",
        [](const SpectralField& u, double m1, double m2) { return w_identity_residual(u, {m1, m2}); },
        py::arg("u"), py::arg("m1") = 0.0, py::arg("m2") = 0.0);

  // Evolution.
  m.def("make_initial_data",
        [](const Grid& g, const std::string& profile, double amplitude, std::uint64_t seed, double width,
           double sigma, double s) {
          DataSpec spec;
          spec.profile = profile;
          spec.amplitude = amplitude;
          spec.seed = seed;
          spec.width = width;
          spec.sigma = sigma;
          spec.s = s;
          return make_initial_data(g, spec);
        },
        py::arg("grid"), py::arg("profile") = "gaussian", py::arg("amplitude") = 0.01, py::arg("seed") = 1,
        py::arg("width") = 4.0, py::arg("sigma") = 0.0, py::arg("s") = -1.0);
  m.def("evolve",
        [](const SpectralField& u0, double dt, double T, int observe_every, double sigma, double s,
           double epsilon_max) {
          const auto traj = evolve(u0, solve_config(dt, T, observe_every, sigma, s, epsilon_max));
          return py::make_tuple(with_mean(traj.states.back(), traj.means.back()), records_dict(traj.records));
        },
        py::arg("u0"), py::arg("dt"), py::arg("T"), py::arg("observe_every") = 1, py::arg("sigma") = 0.0,
        py::arg("s") = -1.0, py::arg("epsilon_max") = 0.1,
        "Returns (u(T), records) with records a dict of per-observation lists.");
  m.def("scatter_forward",
        [](const SpectralField& u0, double dt, double T, double T0, double sigma, double s) {
          const auto diag = scatter_forward(u0, solve_config(dt, T, 1, sigma, s, 0.1), T0);
          py::dict d;
          d["times"] = diag.times;
          d["v_cauchy"] = diag.v_cauchy;
          d["z_cauchy"] = diag.z_cauchy;
          d["correction"] = diag.correction;
          d["profile"] = diag.profile;
          d["v_plus"] = diag.v_plus;
          d["z_plus"] = diag.z_plus;
          return d;
        },
        py::arg("u0"), py::arg("dt"), py::arg("T"), py::arg("T0") = 1.0, py::arg("sigma") = 0.0,
        py::arg("s") = -1.0);

  // Exponent algebra.
  m.def("theorem_parameters", [](int d) {
    const auto p = theorem_parameters(d);
    py::dict out;
    out["s"] = to_string(p.s);
    out["b"] = to_string(p.b);
    out["p"] = to_string(p.p);
    out["q"] = to_string(p.q);
    out["sigma_max"] = to_string(p.sigma_max);
    return out;
  });
  m.def("builtin_case_validity",
        [](int d, long long num, long long den) {
          std::vector<bool> out;
          for (const auto& c : builtin_cases(d, Rational(num, den))) out.push_back(check_conditions(c).valid);
          return out;
        },
        py::arg("d"), py::arg("sigma_num") = 0, py::arg("sigma_den") = 1,
        "Validity of the five bilinear embeddings at sigma = num/den.");
}
