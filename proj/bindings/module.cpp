#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reinforce_dyn/equilibria.hpp"
#include "reinforce_dyn/experiments.hpp"
#include "reinforce_dyn/flow.hpp"
#include "reinforce_dyn/model.hpp"
#include "reinforce_dyn/presets.hpp"
#include "reinforce_dyn/simulate.hpp"

namespace py = pybind11;
using namespace reinforce_dyn;

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Interacting reinforced walks on complete graphs: kernel, mean-field "
                "flow, equilibria, stochastic simulation";

    py::register_exception<AsymmetricAlpha>(mod, "AsymmetricAlphaError", PyExc_ValueError);
    py::register_exception<BadDimension>(mod, "BadDimensionError", PyExc_ValueError);
    py::register_exception<LyapunovUnavailable>(mod, "LyapunovUnavailableError", PyExc_ValueError);
    py::register_exception<BoundaryReference>(mod, "BoundaryReferenceError", PyExc_ValueError);
    py::register_exception<NegativeArgument>(mod, "NegativeArgumentError", PyExc_ValueError);
    py::register_exception<BoundaryInput>(mod, "BoundaryInputError", PyExc_ValueError);
    py::register_exception<StepTooLarge>(mod, "StepTooLargeError", PyExc_ValueError);
    py::register_exception<NonFiniteState>(mod, "NonFiniteStateError", PyExc_ArithmeticError);
    py::register_exception<NotAnEquilibrium>(mod, "NotAnEquilibriumError", PyExc_ValueError);
    py::register_exception<WrongShape>(mod, "WrongShapeError", PyExc_ValueError);
    py::register_exception<NoConvergence>(mod, "NoConvergenceError", PyExc_ArithmeticError);
    py::register_exception<OutOfRange>(mod, "OutOfRangeError", PyExc_ValueError);
    py::register_exception<NoSmallRoot>(mod, "NoSmallRootError", PyExc_ArithmeticError);
    py::register_exception<NotFoundOnGrid>(mod, "NotFoundOnGridError", PyExc_LookupError);
    py::register_exception<ConfigError>(mod, "ConfigurationError", PyExc_ValueError);
    py::register_exception<IoError>(mod, "OutputError", PyExc_OSError);

    py::class_<InteractionModel>(mod, "InteractionModel")
        .def(py::init<int, int, std::vector<double>, bool>(), py::arg("m"), py::arg("d"),
             py::arg("alpha"), py::arg("allow_asymmetric") = false)
        .def_property_readonly("m", &InteractionModel::num_walks)
        .def_property_readonly("d", &InteractionModel::num_vertices)
        .def_property_readonly("lyapunov_available", &InteractionModel::lyapunov_available)
        .def("alpha", &InteractionModel::alpha, py::arg("v"), py::arg("i"), py::arg("j"))
        .def_property_readonly("alpha_flat", &InteractionModel::alpha_flat);

    mod.def("make_model", &make_model, py::arg("m"), py::arg("d"), py::arg("alpha"),
            py::arg("allow_asymmetric") = false);
    mod.def("two_walk_k2", &two_walk_k2, py::arg("beta"));
    mod.def("three_walk_z", &three_walk_z, py::arg("beta"));
    mod.def("equal_beta_repelling", &equal_beta_repelling, py::arg("m"), py::arg("d"),
            py::arg("beta"));

    py::class_<OccupationPoint>(mod, "OccupationPoint")
        .def(py::init<int, int, std::vector<double>>(), py::arg("m"), py::arg("d"),
             py::arg("flat"))
        .def_static("uniform", &OccupationPoint::uniform, py::arg("m"), py::arg("d"))
        .def_property_readonly("m", &OccupationPoint::num_walks)
        .def_property_readonly("d", &OccupationPoint::num_vertices)
        .def_property_readonly("flat", &OccupationPoint::flat)
        .def("__getitem__",
             [](const OccupationPoint& p, std::pair<int, int> iv) {
                 if (iv.first < 0 || iv.first >= p.num_walks() || iv.second < 0 ||
                     iv.second >= p.num_vertices())
                     throw py::index_error();
                 return p(iv.first, iv.second);
             })
        .def("__repr__", [](const OccupationPoint& p) {
            std::string r = "OccupationPoint(m=" + std::to_string(p.num_walks()) +
                            ", d=" + std::to_string(p.num_vertices()) + ", [";
            for (std::size_t k = 0; k < p.flat().size(); ++k)
                r += (k ? ", " : "") + format_g17(p.flat()[k]);
            return r + "])";
        });

    py::class_<TangentVector>(mod, "TangentVector")
        .def(py::init<int, int, std::vector<double>>(), py::arg("m"), py::arg("d"),
             py::arg("flat"))
        .def_property_readonly("m", &TangentVector::num_walks)
        .def_property_readonly("d", &TangentVector::num_vertices)
        .def_property_readonly("flat", &TangentVector::flat)
        .def("max_abs", &TangentVector::max_abs);

    mod.def("kernel_pi", &kernel_pi, py::arg("model"), py::arg("x"));
    mod.def("field_F", &field_F, py::arg("model"), py::arg("x"));
    mod.def("jacobian_F", &jacobian_F, py::arg("model"), py::arg("x"));
    mod.def("lyapunov_L", &lyapunov_L, py::arg("model"), py::arg("x"));
    mod.def("relative_entropy", &relative_entropy, py::arg("x"), py::arg("y"));
    mod.def("gamma_matrix", &gamma_matrix, py::arg("model"), py::arg("x"));
    mod.def("ell", &ell, py::arg("z"));
    mod.def("entropy_derivative_identity_residual", &entropy_derivative_identity_residual,
            py::arg("model"), py::arg("x"));

    py::class_<Trajectory>(mod, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("points", &Trajectory::points)
        .def_readonly("lyapunov", &Trajectory::lyapunov)
        .def_readonly("min_entry_before_renorm", &Trajectory::min_entry_before_renorm);

    mod.def("integrate", &integrate, py::arg("model"), py::arg("x0"), py::arg("dt"),
            py::arg("t_end"), py::arg("record_every") = 1);

    py::class_<MonotoneReport>(mod, "MonotoneReport")
        .def_readonly("violations", &MonotoneReport::violations)
        .def_readonly("max_increase", &MonotoneReport::max_increase);

    mod.def("lyapunov_monotone_check", &lyapunov_monotone_check, py::arg("model"),
            py::arg("trajectory"), py::arg("slack") = 1e-9);

    py::enum_<Stability>(mod, "Stability")
        .value("LinearlyStable", Stability::LinearlyStable)
        .value("LinearlyUnstable", Stability::LinearlyUnstable)
        .value("NonHyperbolic", Stability::NonHyperbolic);

    py::class_<StabilityReport>(mod, "StabilityReport")
        .def_readonly("eigenvalues", &StabilityReport::eigenvalues)
        .def_readonly("classification", &StabilityReport::classification)
        .def_readonly("hyperbolic_margin", &StabilityReport::hyperbolic_margin);

    mod.def("classify", &classify, py::arg("model"), py::arg("x_star"),
            py::arg("margin_tol") = 1e-7);
    mod.def("tangent_spectrum", &tangent_spectrum, py::arg("model"), py::arg("x"));
    mod.def("characteristic_poly_check_3walk", &characteristic_poly_check_3walk,
            py::arg("beta"), py::arg("equilibrium"));

    py::class_<Equilibrium>(mod, "Equilibrium")
        .def_readonly("point", &Equilibrium::point)
        .def_readonly("residual", &Equilibrium::residual)
        .def_readonly("stability", &Equilibrium::stability)
        .def_readonly("basin_hits", &Equilibrium::basin_hits);

    py::class_<ConditionReport>(mod, "ConditionReport")
        .def_readonly("c1", &ConditionReport::c1)
        .def_readonly("c2", &ConditionReport::c2)
        .def_readonly("c3", &ConditionReport::c3)
        .def_readonly("c3_margin", &ConditionReport::c3_margin)
        .def_readonly("dominance_ok", &ConditionReport::dominance_ok);

    mod.def("solve_from", &solve_from, py::arg("model"), py::arg("x0"),
            py::arg("max_iter") = 20000, py::arg("tol") = 1e-12);
    mod.def("find_all", &find_all, py::arg("model"), py::arg("n_starts"), py::arg("seed"),
            py::arg("dedup_tol") = 1e-6, py::arg("max_iter") = 20000, py::arg("tol") = 1e-12);
    mod.def("check_conditions", &check_conditions, py::arg("model"));
    mod.def("a_of_beta", &a_of_beta, py::arg("beta"));
    mod.def("w_of_beta", &w_of_beta, py::arg("beta"));
    mod.def("w_within_cubed_bound", &w_within_cubed_bound, py::arg("beta"));
    mod.def("build_S", &build_S, py::arg("beta"));
    mod.def("probe_beta0", &probe_beta0, py::arg("beta_grid"));

    py::class_<WalkState>(mod, "WalkState")
        .def_readonly("m", &WalkState::m)
        .def_readonly("d", &WalkState::d)
        .def_readonly("n", &WalkState::n)
        .def_readonly("counts", &WalkState::counts)
        .def_readonly("positions", &WalkState::positions)
        .def_readonly("tau", &WalkState::tau)
        .def("gamma", &WalkState::gamma)
        .def("occupation", &WalkState::occupation);

    mod.def("init_walks", &init_walks, py::arg("model"), py::arg("seed"));
    mod.def("step", &step, py::arg("model"), py::arg("state"));

    py::class_<SaAudit>(mod, "SaAudit")
        .def_readonly("gamma_n", &SaAudit::gamma_n)
        .def_readonly("xi", &SaAudit::xi)
        .def_readonly("u_n", &SaAudit::u_n)
        .def_readonly("reconstruction_residual", &SaAudit::reconstruction_residual);

    mod.def("step_audited", &step_audited, py::arg("model"), py::arg("state"));

    py::class_<RunResult>(mod, "RunResult")
        .def_readonly("final_state", &RunResult::final_state)
        .def_readonly("sample_steps", &RunResult::sample_steps)
        .def_readonly("sample_tau", &RunResult::sample_tau)
        .def_readonly("sample_points", &RunResult::sample_points)
        .def_readonly("martingale_final", &RunResult::martingale_final)
        .def_readonly("martingale_max_norm", &RunResult::martingale_max_norm)
        .def_readonly("dyadic_increments", &RunResult::dyadic_increments);

    mod.def("run", &run, py::arg("model"), py::arg("seed"), py::arg("n_steps"),
            py::arg("record_stride") = 0);
    mod.def("noise_bound_s", &noise_bound_s, py::arg("model"), py::arg("x"));

    py::class_<ZWalkState>(mod, "ZWalkState")
        .def_readonly("s", &ZWalkState::s)
        .def_readonly("s0", &ZWalkState::s0)
        .def_readonly("inner", &ZWalkState::inner);

    py::class_<ZRunResult>(mod, "ZRunResult")
        .def_readonly("base", &ZRunResult::base)
        .def_readonly("final_state", &ZRunResult::final_state)
        .def_readonly("z_path", &ZRunResult::z_path)
        .def_readonly("empirical_step_probs", &ZRunResult::empirical_step_probs);

    mod.def("run_z_walks", &run_z_walks, py::arg("beta"), py::arg("seed"), py::arg("n_steps"),
            py::arg("s0") = std::array<long long, 3>{0, 0, 0}, py::arg("record_stride") = 0);

    mod.def("run_command", &run_command, py::arg("command"), py::arg("config_path"),
            py::arg("out_dir_override") = std::string());
}
