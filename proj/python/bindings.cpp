// Python bindings for the main operations: state construction, the spectral
// kernels, forcing validation/Hoermander check, simulation, spectra and the
// Malliavin tools.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vort2d/config.hpp"
#include "vort2d/diagnostics.hpp"
#include "vort2d/malliavin.hpp"
#include "vort2d/tangent.hpp"

namespace py = pybind11;
using namespace vort2d;

namespace {

py::array_t<std::complex<double>> coeffs_array(const VorticityState& w) {
    const int n = w.grid.n;
    py::array_t<std::complex<double>> out({n, n});
    std::copy(w.coeffs.begin(), w.coeffs.end(), out.mutable_data());
    return out;
}

VorticityState state_from_array(const GridSpec& g,
                                py::array_t<std::complex<double>,
                                            py::array::c_style |
                                                py::array::forcecast> arr,
                                double time) {
    if (arr.ndim() != 2 || arr.shape(0) != g.n || arr.shape(1) != g.n)
        throw std::invalid_argument("coeffs must be an (n, n) complex array");
    VorticityState w(g);
    std::copy(arr.data(), arr.data() + w.coeffs.size(), w.coeffs.begin());
    w.time = time;
    enforce_invariants(w);
    return w;
}

ForcingSpec spec_from_triples(const std::vector<std::array<double, 3>>& triples,
                              bool auto_reflect) {
    std::vector<ForcingMode> raw;
    for (const auto& t : triples)
        raw.push_back(
            {static_cast<int>(t[0]), static_cast<int>(t[1]), t[2]});
    return validate_forcing(std::move(raw), auto_reflect);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "pseudo-spectral stochastic 2D vorticity toolkit";
    m.attr("__version__") = kVersion;

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](int n, double scale, double dealias_fraction) {
                 GridSpec g{n, scale, dealias_fraction};
                 g.validate();
                 return g;
             }),
             py::arg("n"), py::arg("scale") = 1.0,
             py::arg("dealias_fraction") = 2.0 / 3.0)
        .def_readonly("n", &GridSpec::n)
        .def_readonly("scale", &GridSpec::scale)
        .def_readonly("dealias_fraction", &GridSpec::dealias_fraction)
        .def_property_readonly("cutoff", &GridSpec::cutoff)
        .def_property_readonly("area", &GridSpec::area);

    py::class_<VorticityState>(m, "VorticityState")
        .def(py::init<const GridSpec&>())
        .def_readonly("grid", &VorticityState::grid)
        .def_readwrite("time", &VorticityState::time)
        .def_property_readonly("coeffs", &coeffs_array)
        .def("norm", [](const VorticityState& w) { return l2_norm(w); });

    m.def("state_from_coeffs", &state_from_array, py::arg("grid"),
          py::arg("coeffs"), py::arg("time") = 0.0);
    m.def("random_state", &random_state, py::arg("grid"), py::arg("seed"),
          py::arg("decay") = 1.0, py::arg("amplitude") = 1.0);
    m.def("add_real_coord", &add_real_coord);
    m.def("real_coord", &real_coord);

    py::class_<VelocityField>(m, "VelocityField")
        .def_property_readonly("u1",
                               [](const VelocityField& u) {
                                   const int n = u.grid.n;
                                   py::array_t<std::complex<double>> out({n, n});
                                   std::copy(u.u1.begin(), u.u1.end(),
                                             out.mutable_data());
                                   return out;
                               })
        .def_property_readonly("u2", [](const VelocityField& u) {
            const int n = u.grid.n;
            py::array_t<std::complex<double>> out({n, n});
            std::copy(u.u2.begin(), u.u2.end(), out.mutable_data());
            return out;
        });

    m.def("biot_savart", &biot_savart);
    m.def("nonlinear", &nonlinear);
    m.def("nonlinear_direct", &nonlinear_direct);
    m.def("project_low", &project_low);
    py::class_<Norms>(m, "Norms")
        .def_readonly("l2", &Norms::l2)
        .def_readonly("h1", &Norms::h1)
        .def_readonly("energy", &Norms::energy);
    m.def("norms", &norms);
    m.def("inner", &inner);

    py::class_<ForcingSpec>(m, "ForcingSpec")
        .def_readonly("eps", &ForcingSpec::eps)
        .def_readonly("eps_prime", &ForcingSpec::eps_prime)
        .def_readonly("kappa_f", &ForcingSpec::kappa_f)
        .def_readonly("kappa_f_rms", &ForcingSpec::kappa_f_rms)
        .def_property_readonly("modes", [](const ForcingSpec& s) {
            std::vector<std::tuple<int, int, double>> out;
            for (const auto& mo : s.modes)
                out.emplace_back(mo.k1, mo.k2, mo.gamma);
            return out;
        });
    m.def("validate_forcing", &spec_from_triples, py::arg("modes"),
          py::arg("auto_reflect") = false);

    py::class_<HormanderReport>(m, "HormanderReport")
        .def_readonly("cond_a", &HormanderReport::cond_a)
        .def_readonly("cond_b", &HormanderReport::cond_b)
        .def_readonly("cond_c", &HormanderReport::cond_c)
        .def("passes", &HormanderReport::pass)
        .def("describe", &HormanderReport::describe);
    m.def("hormander_check",
          [](const std::vector<std::array<int, 2>>& K) {
              return hormander_check(K);
          });

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init([](const GridSpec& grid, double nu, double tau, double dt,
                         double t_end, const ForcingSpec& forcing,
                         std::uint64_t seed, int output_every,
                         bool nonlinearity) {
                 SimConfig cfg;
                 cfg.grid = grid;
                 cfg.nu = nu;
                 cfg.tau = tau;
                 cfg.dt = dt;
                 cfg.t_end = t_end;
                 cfg.forcing = forcing;
                 cfg.seed = seed;
                 cfg.output_every = output_every;
                 cfg.nonlinearity = nonlinearity;
                 cfg.validate();
                 return cfg;
             }),
             py::arg("grid"), py::arg("nu"), py::arg("tau") = 0.0,
             py::arg("dt") = 0.0, py::arg("t_end") = 1.0,
             py::arg("forcing") = ForcingSpec{}, py::arg("seed") = 0,
             py::arg("output_every") = 1, py::arg("nonlinearity") = true)
        .def_readonly("nu", &SimConfig::nu)
        .def_readonly("tau", &SimConfig::tau)
        .def_readonly("dt", &SimConfig::dt)
        .def_readonly("t_end", &SimConfig::t_end);

    py::class_<ObsRecord>(m, "ObsRecord")
        .def_readonly("t", &ObsRecord::t)
        .def_readonly("enstrophy", &ObsRecord::enstrophy)
        .def_readonly("energy", &ObsRecord::energy)
        .def_readonly("h1_sq", &ObsRecord::h1_sq)
        .def_readonly("noise_qv", &ObsRecord::noise_qv);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("records", &Trajectory::records)
        .def_readonly("final_state", &Trajectory::final_state);

    m.def(
        "simulate",
        [](const SimConfig& cfg, std::optional<VorticityState> w0,
           std::uint64_t trajectory) {
            return simulate(cfg, std::move(w0), trajectory);
        },
        py::arg("cfg"), py::arg("w0") = std::nullopt, py::arg("trajectory") = 0);
    m.def("step", [](const VorticityState& w, const SimConfig& cfg,
                     const VorticityState& incr) { return step(w, cfg, incr); });
    m.def("sample_increment",
          [](const ForcingSpec& spec, const GridSpec& grid, double dt,
             std::uint64_t seed, std::uint64_t stream, std::uint64_t step) {
              CounterRng rng(seed, stream);
              return sample_increment(spec, grid, dt, rng, step);
          });
    m.def("checkpoint_save", &checkpoint_save);
    m.def("checkpoint_load", &checkpoint_load);

    py::class_<SpectrumSeries>(m, "SpectrumSeries")
        .def_readonly("kappa", &SpectrumSeries::kappa)
        .def_readonly("e", &SpectrumSeries::e)
        .def_readonly("z", &SpectrumSeries::z)
        .def("energy_density", &SpectrumSeries::energy_density)
        .def("enstrophy_density", &SpectrumSeries::enstrophy_density);
    m.def("energy_spectrum", &energy_spectrum);
    py::class_<SlopeFit>(m, "SlopeFit")
        .def_readonly("slope", &SlopeFit::slope)
        .def_readonly("stderr_slope", &SlopeFit::stderr_slope)
        .def_readonly("kappa_nu", &SlopeFit::kappa_nu)
        .def_readonly("kappa_tau", &SlopeFit::kappa_tau);
    m.def("slope_fit", &slope_fit);

    py::class_<GalerkinBasis>(m, "GalerkinBasis")
        .def(py::init<const GridSpec&, int>())
        .def_property_readonly("size", &GalerkinBasis::size)
        .def("low_indices", &GalerkinBasis::low_indices)
        .def("project", &GalerkinBasis::project)
        .def("embed", &GalerkinBasis::embed);

    py::class_<ConeMinResult>(m, "ConeMinResult")
        .def_readonly("value", &ConeMinResult::value)
        .def_readonly("mu", &ConeMinResult::mu)
        .def_readonly("interior", &ConeMinResult::interior);
    m.def("cone_min", &cone_min, py::arg("M"), py::arg("low_indices"),
          py::arg("alpha"));
}
