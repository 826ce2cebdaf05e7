// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// Python bindings of the core operations. Fields cross the boundary as complex128 arrays of shape
// (ny, nx), matching the row-major storage with x fastest.

#include "metafourier/analytics.hpp"
#include "metafourier/geometry.hpp"
#include "metafourier/grid_io.hpp"
#include "metafourier/metasurface.hpp"
#include "metafourier/oracle.hpp"
#include "metafourier/propagate.hpp"
#include "metafourier/scenario.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace metafourier;

namespace
{
    py::array_t<Complex> samples_array(const ComplexField &f)
    {
        py::array_t<Complex> a({f.grid.ny, f.grid.nx});
        std::copy(f.samples.begin(), f.samples.end(), a.mutable_data());
        return a;
    }

    ComplexField field_from_array(const GridSpec &grid, py::array_t<Complex, py::array::c_style | py::array::forcecast> a,
                                  std::string stage)
    {
        if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(0)) != grid.ny || static_cast<std::size_t>(a.shape(1)) != grid.nx)
            throw Error(ErrorCode::grid_mismatch, "samples must have shape (ny, nx)");
        return ComplexField(grid, std::vector<Complex>(a.data(), a.data() + a.size()), std::move(stage));
    }

    std::string error_name(ErrorCode code) { return std::string(to_string(code)); }
}

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Metasurface Fourier-transform link simulator";

    // metafourier.Error carries the failure category in its `code` attribute.
    static PyObject *error_type = PyErr_NewException("metafourier._core.Error", PyExc_RuntimeError, nullptr);
    m.attr("Error") = py::handle(error_type);
    py::register_exception_translator(
        [](std::exception_ptr p)
        {
            try
            {
                if (p)
                    std::rethrow_exception(p);
            }
            catch (const Error &e)
            {
                py::object instance = py::reinterpret_borrow<py::object>(error_type)(e.what());
                instance.attr("code") = error_name(e.code());
                PyErr_SetObject(error_type, instance.ptr());
            }
        });

    // Geometry
    py::class_<SurfaceFrame>(m, "SurfaceFrame")
        .def(py::init<>())
        .def(py::init([](const Vector3 &o, const Vector3 &a, const Vector3 &b) { return SurfaceFrame::from_axes(o, a, b); }),
             py::arg("origin"), py::arg("axis_a"), py::arg("axis_b"))
        .def_readwrite("origin", &SurfaceFrame::origin)
        .def_readwrite("axis_a", &SurfaceFrame::axis_a)
        .def_readwrite("axis_b", &SurfaceFrame::axis_b)
        .def_readwrite("normal", &SurfaceFrame::normal)
        .def("validate", &SurfaceFrame::validate);

    py::class_<LinkAxis>(m, "LinkAxis")
        .def_static("between", &LinkAxis::between)
        .def_readonly("direction", &LinkAxis::direction)
        .def_readonly("distance", &LinkAxis::distance);

    py::class_<DirectionCosines>(m, "DirectionCosines")
        .def_static("aligned", &DirectionCosines::aligned)
        .def_readonly("axis_source", &DirectionCosines::axis_source)
        .def_readonly("axis_destination", &DirectionCosines::axis_destination)
        .def_readonly("cross", &DirectionCosines::cross)
        .def("obliquity", &DirectionCosines::obliquity)
        .def("is_aligned", &DirectionCosines::is_aligned, py::arg("tolerance") = frame_tolerance)
        .def("reversed", &DirectionCosines::reversed);

    py::class_<ShearMatrix>(m, "ShearMatrix")
        .def_readonly("coupling", &ShearMatrix::coupling)
        .def_readonly("det", &ShearMatrix::det)
        .def_readonly("degenerate", &ShearMatrix::degenerate)
        .def("input_shear", &ShearMatrix::input_shear)
        .def("output_shear", &ShearMatrix::output_shear);

    m.def("direction_cosines", &direction_cosines, py::arg("source"), py::arg("destination"), py::arg("axis"));
    m.def("shear_matrix", &shear_matrix, py::arg("cosines"));
    m.def("verify_det_identity", [](const SurfaceFrame &s, const SurfaceFrame &d, const LinkAxis &a)
          {
              const DetIdentityReport r = verify_det_identity(s, d, a);
              return py::dict(py::arg("det") = r.det, py::arg("obliquity_product") = r.obliquity_product,
                              py::arg("abs_diff") = r.abs_diff); });

    // Grids, signals and fields
    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<std::size_t, std::size_t, double, double, double, double>(), py::arg("nx"), py::arg("ny"),
             py::arg("dx"), py::arg("dy"), py::arg("cx") = 0.0, py::arg("cy") = 0.0)
        .def_static("square", &GridSpec::square, py::arg("n"), py::arg("spacing"), py::arg("cx") = 0.0, py::arg("cy") = 0.0)
        .def_static("covering", &GridSpec::covering, py::arg("n"), py::arg("half_width"), py::arg("cx") = 0.0,
                    py::arg("cy") = 0.0)
        .def_readwrite("nx", &GridSpec::nx)
        .def_readwrite("ny", &GridSpec::ny)
        .def_readwrite("dx", &GridSpec::dx)
        .def_readwrite("dy", &GridSpec::dy)
        .def_readwrite("cx", &GridSpec::cx)
        .def_readwrite("cy", &GridSpec::cy)
        .def("x", &GridSpec::x)
        .def("y", &GridSpec::y)
        .def("area", &GridSpec::area)
        .def("validate", &GridSpec::validate)
        .def("__repr__", [](const GridSpec &g)
             {
                 std::ostringstream os;
                 os << "GridSpec(nx=" << g.nx << ", ny=" << g.ny << ", dx=" << g.dx << ", dy=" << g.dy << ", cx=" << g.cx
                    << ", cy=" << g.cy << ")";
                 return os.str(); });

    py::class_<ComplexField>(m, "ComplexField")
        .def(py::init(&field_from_array), py::arg("grid"), py::arg("samples"), py::arg("stage") = "")
        .def_readonly("grid", &ComplexField::grid)
        .def_readwrite("stage", &ComplexField::stage)
        .def_property_readonly("samples", &samples_array);

    py::class_<SignalSpec>(m, "SignalSpec")
        .def_static("rect", &SignalSpec::rect, py::arg("lx"), py::arg("ly"), py::arg("x0") = 0.0, py::arg("y0") = 0.0)
        .def_static("gaussian", &SignalSpec::gaussian, py::arg("sigma_x"), py::arg("sigma_y"), py::arg("x0") = 0.0,
                    py::arg("y0") = 0.0)
        .def_static("superposition", [](const std::vector<std::pair<double, SignalSpec>> &terms)
                    {
                        std::vector<WeightedSignal> w;
                        for (const auto &[weight, signal] : terms)
                            w.push_back(WeightedSignal{weight, signal});
                        return SignalSpec::superposition(std::move(w)); })
        .def("validate", &SignalSpec::validate);

    m.def("evaluate", &evaluate, py::arg("signal"), py::arg("x"), py::arg("y"));
    m.def("synthesize", &synthesize, py::arg("signal"), py::arg("grid"), py::arg("stage") = "S1");
    m.def("total_power", &total_power);
    m.def("relative_l2", &relative_l2);
    m.def("resample_affine", &resample_affine, py::arg("field"), py::arg("map"), py::arg("factor"), py::arg("out_grid"));
    m.def("power_moments", [](const ComplexField &f)
          {
              const PowerMoments p = power_moments(f);
              return py::dict(py::arg("power") = p.power, py::arg("cx") = p.cx, py::arg("cy") = p.cy,
                              py::arg("sx") = p.sx, py::arg("sy") = p.sy); });

    // Phase profiles
    py::enum_<SurfaceRole>(m, "SurfaceRole").value("tx", SurfaceRole::tx).value("rx", SurfaceRole::rx);
    py::class_<PhaseProfile>(m, "PhaseProfile")
        .def_readonly("grid", &PhaseProfile::grid)
        .def_property_readonly("recipe", [](const PhaseProfile &p) { return std::string(to_string(p.recipe)); })
        .def_property_readonly("theta", [](const PhaseProfile &p)
                               {
                                   py::array_t<double> a({p.grid.ny, p.grid.nx});
                                   std::copy(p.theta.begin(), p.theta.end(), a.mutable_data());
                                   return a; });
    m.def("phase_two_surface", &phase_two_surface, py::arg("role"), py::arg("cosines"), py::arg("k"), py::arg("distance"),
          py::arg("grid"));
    m.def("phase_ris", &phase_ris, py::arg("leg1"), py::arg("leg2"), py::arg("k"), py::arg("distance1"),
          py::arg("distance2"), py::arg("grid"));
    m.def("apply_phase", &apply_phase);
    m.def("remove_phase", &remove_phase);
    m.def("wrap_phase", &wrap_phase);

    // Propagation
    py::enum_<Backend>(m, "Backend")
        .value("direct_quadrature", Backend::direct_quadrature)
        .value("separable_sheared_dft", Backend::separable_sheared_dft)
        .value("exact_kernel", Backend::exact_kernel);

    py::class_<PropagationSpec>(m, "PropagationSpec")
        .def_static("aligned", &PropagationSpec::aligned, py::arg("wavelength"), py::arg("distance"),
                    py::arg("backend") = Backend::separable_sheared_dft)
        .def_static("between", &PropagationSpec::between, py::arg("source"), py::arg("destination"), py::arg("wavelength"),
                    py::arg("backend") = Backend::separable_sheared_dft)
        .def_readwrite("wavelength", &PropagationSpec::wavelength)
        .def_readwrite("axis", &PropagationSpec::axis)
        .def_readwrite("cosines", &PropagationSpec::cosines)
        .def_readwrite("backend", &PropagationSpec::backend)
        .def_readwrite("enforce_validity", &PropagationSpec::enforce_validity)
        .def_readwrite("conjugate", &PropagationSpec::conjugate)
        .def("wavenumber", &PropagationSpec::wavenumber)
        .def("distance", &PropagationSpec::distance);

    m.def("propagate_field", &propagate_field, py::arg("field"), py::arg("spec"), py::arg("out_grid"),
          py::arg("stage") = "F_out");
    m.def("propagate_signal", &propagate_signal, py::arg("field"), py::arg("spec"), py::arg("shear"), py::arg("out_grid"),
          py::arg("stage") = "S_out");
    m.def("roundtrip_double_ft", &roundtrip_double_ft, py::arg("source"), py::arg("distance1"), py::arg("distance2"),
          py::arg("spec"));
    m.def("max_input_spacing", &max_input_spacing);
    m.def("link_prefactor", &link_prefactor);
    m.def("reciprocal_grid", &reciprocal_grid);

    // Analytics
    m.def(
        "mode_count",
        [](const std::string &topology, const py::kwargs &kw)
        {
            static const std::map<std::string, ModeTopology> names{
                {"two_aligned", ModeTopology::two_aligned},
                {"two_unaligned", ModeTopology::two_unaligned},
                {"three_rect", ModeTopology::three_rect},
                {"three_gauss", ModeTopology::three_gauss},
                {"three_rect_unaligned", ModeTopology::three_rect_unaligned},
                {"three_gauss_unaligned", ModeTopology::three_gauss_unaligned}};
            const auto it = names.find(topology);
            if (it == names.end())
                throw Error(ErrorCode::schema, "unknown mode-count topology '" + topology + "'");
            ModeCountSpec s;
            const std::map<std::string, std::optional<double> ModeCountSpec::*> fields{
                {"m_tx", &ModeCountSpec::m_tx}, {"m_ris", &ModeCountSpec::m_ris}, {"m_rx", &ModeCountSpec::m_rx},
                {"wavelength", &ModeCountSpec::wavelength}, {"distance", &ModeCountSpec::distance},
                {"distance1", &ModeCountSpec::distance1}, {"distance2", &ModeCountSpec::distance2},
                {"det", &ModeCountSpec::det}, {"det1", &ModeCountSpec::det1}, {"det2", &ModeCountSpec::det2},
                {"gamma", &ModeCountSpec::gamma}, {"gamma1", &ModeCountSpec::gamma1}, {"gamma2", &ModeCountSpec::gamma2}};
            for (const auto &[key, value] : kw)
            {
                const auto f = fields.find(py::cast<std::string>(key));
                if (f == fields.end())
                    throw Error(ErrorCode::schema, "unknown mode-count field '" + py::cast<std::string>(key) + "'");
                s.*(f->second) = py::cast<double>(value);
            }
            return mode_count(s, it->second);
        },
        py::arg("topology"));
    m.def("predicted_power_ratio", [](const std::string &topology, double det1, double det2)
          {
              const PowerRatios r = predicted_power_ratio(parse_link_topology(topology), det1, det2);
              return py::make_tuple(r.stage2, r.stage3 ? py::cast(*r.stage3) : py::none()); },
          py::arg("topology"), py::arg("det1") = 1.0, py::arg("det2") = 1.0);

    // Oracles
    py::module_ o = m.def_submodule("oracle", "Closed-form reference fields");
    o.def("signal_ft", &oracle::signal_ft, py::arg("signal"), py::arg("wavelength"), py::arg("distance"), py::arg("u"),
          py::arg("v"));
    o.def("signal_double_ft", &oracle::signal_double_ft, py::arg("signal"), py::arg("wavelength"), py::arg("distance1"),
          py::arg("distance2"), py::arg("u"), py::arg("v"));
    o.def("sinc_power_capture", &oracle::sinc_power_capture);

    // File formats
    m.def("write_grid_csv", py::overload_cast<const std::filesystem::path &, const ComplexField &>(&write_grid_csv));
    m.def("read_grid_csv", py::overload_cast<const std::filesystem::path &>(&read_grid_csv));
    m.def("read_summary", &read_summary);

    // Scenarios
    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readwrite("name", &ScenarioConfig::name)
        .def_readwrite("output_directory", &ScenarioConfig::output_directory)
        .def_readwrite("enforce_validity", &ScenarioConfig::enforce_validity)
        .def_readwrite("grids", &ScenarioConfig::grids)
        .def_readonly("wavelength", &ScenarioConfig::wavelength)
        .def_readonly("distance1", &ScenarioConfig::distance1)
        .def_readonly("distance2", &ScenarioConfig::distance2);

    m.def("load_config", &load_config, py::arg("path"));
    m.def("parse_config", [](const std::string &text)
          {
              std::istringstream is(text);
              return parse_config(is, "<string>"); });
    m.def("validate", [](const ScenarioConfig &c)
          {
              std::vector<std::pair<std::string, std::string>> out;
              for (const auto &d : validate(c))
                  out.emplace_back(error_name(d.code), d.message);
              return out; });
    m.def(
        "run",
        [](const ScenarioConfig &c, bool write_files)
        {
            const RunResult r = run(c, RunOptions{write_files, true});
            py::dict fields;
            for (const auto &[stage, f] : r.fields)
                fields[py::str(stage)] = f;
            return py::dict(py::arg("values") = r.summary.values, py::arg("labels") = r.summary.labels,
                            py::arg("violations") = r.summary.violations, py::arg("files") = r.summary.files,
                            py::arg("fields") = fields);
        },
        py::arg("config"), py::arg("write_files") = true);
}
