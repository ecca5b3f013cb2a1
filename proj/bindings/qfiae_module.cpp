#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <sstream>

#include "qfiae/artifacts.hpp"
#include "qfiae/fourier.hpp"
#include "qfiae/iqae.hpp"
#include "qfiae/ltd.hpp"
#include "qfiae/pipeline.hpp"
#include "qfiae/quad.hpp"
#include "qfiae/statevec.hpp"
#include "qfiae/vqc.hpp"

namespace py = pybind11;

using namespace qfiae;

namespace {

void bind_statevec(py::module_& m) {
    auto sv = m.def_submodule("statevec", "dense statevector simulator");

    py::class_<statevec::StateVector>(sv, "StateVector")
        .def(py::init<int>(), py::arg("n_qubits"))
        .def_static("basis", &statevec::StateVector::basis)
        .def_property_readonly("n_qubits", &statevec::StateVector::n_qubits)
        .def_property_readonly("dim", &statevec::StateVector::dim)
        .def("amplitudes",
             [](const statevec::StateVector& s) { return s.amplitudes(); })
        .def("norm_squared", &statevec::StateVector::norm_squared);

    py::class_<statevec::GateOp>(sv, "GateOp");
    py::class_<statevec::Circuit>(sv, "Circuit")
        .def(py::init<int>(), py::arg("n_qubits"))
        .def_readonly("n_qubits", &statevec::Circuit::n_qubits)
        .def_property_readonly("n_ops",
                               [](const statevec::Circuit& c) { return c.ops.size(); })
        .def("h", [](statevec::Circuit& c, int q) -> statevec::Circuit& { return c.add(statevec::h(q)); },
             py::return_value_policy::reference_internal)
        .def("x", [](statevec::Circuit& c, int q) -> statevec::Circuit& { return c.add(statevec::x(q)); },
             py::return_value_policy::reference_internal)
        .def("z", [](statevec::Circuit& c, int q) -> statevec::Circuit& { return c.add(statevec::z(q)); },
             py::return_value_policy::reference_internal)
        .def("rx", [](statevec::Circuit& c, int q, double a) -> statevec::Circuit& { return c.add(statevec::rx(q, a)); },
             py::return_value_policy::reference_internal)
        .def("ry", [](statevec::Circuit& c, int q, double a) -> statevec::Circuit& { return c.add(statevec::ry(q, a)); },
             py::return_value_policy::reference_internal)
        .def("rz", [](statevec::Circuit& c, int q, double a) -> statevec::Circuit& { return c.add(statevec::rz(q, a)); },
             py::return_value_policy::reference_internal)
        .def("cnot",
             [](statevec::Circuit& c, int ctrl, int tgt) -> statevec::Circuit& { return c.add(statevec::cnot(ctrl, tgt)); },
             py::return_value_policy::reference_internal)
        .def("cz", [](statevec::Circuit& c, int a, int b) -> statevec::Circuit& { return c.add(statevec::cz(a, b)); },
             py::return_value_policy::reference_internal)
        .def("cry",
             [](statevec::Circuit& c, int ctrl, int tgt, double a) -> statevec::Circuit& { return c.add(statevec::cry(ctrl, tgt, a)); },
             py::return_value_policy::reference_internal);

    sv.def("run", &statevec::run, py::arg("circuit"), py::arg("initial"));
    sv.def("expectation_z", &statevec::expectation_z);
    sv.def("probability_one", &statevec::probability_one);
    sv.def("sample", &statevec::sample, py::arg("state"), py::arg("qubit"), py::arg("shots"),
           py::arg("seed"));
}

void bind_quad(py::module_& m) {
    auto q = m.def_submodule("quad", "classical integration oracles on [0,1]^2");
    py::class_<quad::QuadResult>(q, "QuadResult")
        .def_readonly("value", &quad::QuadResult::value)
        .def_readonly("error_estimate", &quad::QuadResult::error_estimate)
        .def_readonly("evaluations", &quad::QuadResult::evaluations);
    q.def("gauss_2d", &quad::gauss_2d, py::arg("f"), py::arg("order") = 32, py::arg("panels") = 8);
    q.def("monte_carlo_2d", &quad::monte_carlo_2d, py::arg("f"), py::arg("samples"),
          py::arg("seed") = 0);
}

void bind_fourier(py::module_& m) {
    auto f = m.def_submodule("fourier", "truncated 2-D Fourier series");
    py::class_<fourier::Box2>(f, "Box2")
        .def(py::init([](double a1, double b1, double a2, double b2) {
                 return fourier::Box2{a1, b1, a2, b2};
             }),
             py::arg("a1") = 0.0, py::arg("b1") = 1.0, py::arg("a2") = 0.0, py::arg("b2") = 1.0)
        .def_readwrite("a1", &fourier::Box2::a1)
        .def_readwrite("b1", &fourier::Box2::b1)
        .def_readwrite("a2", &fourier::Box2::a2)
        .def_readwrite("b2", &fourier::Box2::b2)
        .def("volume", &fourier::Box2::volume);
    py::class_<fourier::FourierSeries2D>(f, "FourierSeries2D")
        .def_static("zero", &fourier::FourierSeries2D::zero)
        .def_readonly("n_max", &fourier::FourierSeries2D::n_max)
        .def("get", [](const fourier::FourierSeries2D& s, int w1, int w2) { return s.at(w1, w2); })
        .def("set", [](fourier::FourierSeries2D& s, int w1, int w2, std::complex<double> c) {
            s.at(w1, w2) = c;
        });
    py::class_<fourier::SinusoidTerm>(f, "SinusoidTerm")
        .def_readonly("amplitude", &fourier::SinusoidTerm::amplitude)
        .def_readonly("w1", &fourier::SinusoidTerm::w1)
        .def_readonly("w2", &fourier::SinusoidTerm::w2)
        .def_readonly("phase", &fourier::SinusoidTerm::phase);
    py::class_<fourier::TermList>(f, "TermList")
        .def_readonly("constant", &fourier::TermList::constant)
        .def_readonly("terms", &fourier::TermList::terms);
    f.def("extract", &fourier::extract, py::arg("f"), py::arg("n_max"));
    f.def("evaluate", &fourier::evaluate);
    f.def("analytic_integral", &fourier::analytic_integral);
    f.def("real_term_list", &fourier::real_term_list);
    f.def("truncate", &fourier::truncate);
    f.def("band_power_outside", &fourier::band_power_outside);
    f.def("hermitian_asymmetry", &fourier::hermitian_asymmetry);
}

void bind_iqae(py::module_& m) {
    auto q = m.def_submodule("iqae", "iterative quantum amplitude estimation");
    py::enum_<iqae::Mode>(q, "Mode")
        .value("ShotBased", iqae::Mode::ShotBased)
        .value("ExactExpectation", iqae::Mode::ExactExpectation);
    py::class_<iqae::IqaeConfig>(q, "IqaeConfig")
        .def(py::init<>())
        .def_readwrite("epsilon", &iqae::IqaeConfig::epsilon)
        .def_readwrite("alpha", &iqae::IqaeConfig::alpha)
        .def_readwrite("shots", &iqae::IqaeConfig::shots)
        .def_readwrite("max_rounds", &iqae::IqaeConfig::max_rounds)
        .def_readwrite("mode", &iqae::IqaeConfig::mode)
        .def_readwrite("seed", &iqae::IqaeConfig::seed);
    py::class_<iqae::IqaeResult>(q, "IqaeResult")
        .def_readonly("a_hat", &iqae::IqaeResult::a_hat)
        .def_readonly("a_lo", &iqae::IqaeResult::a_lo)
        .def_readonly("a_hi", &iqae::IqaeResult::a_hi)
        .def_readonly("oracle_queries", &iqae::IqaeResult::oracle_queries)
        .def_readonly("rounds", &iqae::IqaeResult::rounds)
        .def_readonly("converged", &iqae::IqaeResult::converged);
    py::class_<iqae::AmplitudeProblem>(q, "AmplitudeProblem")
        .def_readonly("ancilla", &iqae::AmplitudeProblem::ancilla)
        .def_readonly("prep", &iqae::AmplitudeProblem::prep);
    py::class_<iqae::TermEstimate>(q, "TermEstimate")
        .def_readonly("estimate", &iqae::TermEstimate::estimate)
        .def_readonly("half_width", &iqae::TermEstimate::half_width)
        .def_readonly("sinc_factor", &iqae::TermEstimate::sinc_factor)
        .def_readonly("iqae", &iqae::TermEstimate::iqae);
    py::class_<iqae::TermReport>(q, "TermReport")
        .def_readonly("w1", &iqae::TermReport::w1)
        .def_readonly("w2", &iqae::TermReport::w2)
        .def_readonly("amplitude", &iqae::TermReport::amplitude)
        .def_readonly("phase", &iqae::TermReport::phase)
        .def_readonly("a_hat", &iqae::TermReport::a_hat)
        .def_readonly("queries", &iqae::TermReport::queries)
        .def_readonly("rounds", &iqae::TermReport::rounds)
        .def_readonly("sinc_factor", &iqae::TermReport::sinc_factor)
        .def_readonly("skipped", &iqae::TermReport::skipped)
        .def_readonly("contribution", &iqae::TermReport::contribution)
        .def_readonly("half_width", &iqae::TermReport::half_width);
    py::class_<iqae::SeriesIntegral>(q, "SeriesIntegral")
        .def_readonly("total", &iqae::SeriesIntegral::total)
        .def_readonly("half_width", &iqae::SeriesIntegral::half_width)
        .def_readonly("total_queries", &iqae::SeriesIntegral::total_queries)
        .def_readonly("all_converged", &iqae::SeriesIntegral::all_converged)
        .def_readonly("terms", &iqae::SeriesIntegral::terms);
    q.def("make_bernoulli_problem", &iqae::make_bernoulli_problem, py::arg("a"));
    q.def("build_sinusoid_loader", &iqae::build_sinusoid_loader, py::arg("amplitude"),
          py::arg("omega"), py::arg("phase"), py::arg("grid_bits"), py::arg("domain"));
    q.def("grover_operator", &iqae::grover_operator);
    q.def("iqae_run", &iqae::iqae_run, py::arg("problem"), py::arg("config"));
    q.def("integrate_term", &iqae::integrate_term, py::arg("amplitude"), py::arg("omega"),
          py::arg("phase"), py::arg("box"), py::arg("grid_bits"), py::arg("config"));
    q.def("integrate_series", &iqae::integrate_series, py::arg("series"), py::arg("box"),
          py::arg("grid_bits"), py::arg("config"));
}

void bind_ltd(py::module_& m) {
    auto l = m.def_submodule("ltd", "LTD causal-unitary NLO decay-rate integrand");
    py::class_<ltd::OnShellEnergies>(l, "OnShellEnergies")
        .def(py::init([](std::array<double, 6> q) {
                 ltd::OnShellEnergies e;
                 e.q_plus = q;
                 return e;
             }),
             py::arg("q_plus"))
        .def_readonly("q_plus", &ltd::OnShellEnergies::q_plus);
    py::class_<ltd::ProcessSpec>(l, "ProcessSpec")
        .def_readwrite("process", &ltd::ProcessSpec::process)
        .def_readwrite("sqrt_s", &ltd::ProcessSpec::sqrt_s)
        .def_readwrite("mass_ratio", &ltd::ProcessSpec::mass_ratio)
        .def_readwrite("coupling", &ltd::ProcessSpec::coupling)
        .def_readwrite("masses", &ltd::ProcessSpec::masses);
    py::class_<ltd::Kinematics>(l, "Kinematics")
        .def(py::init([](double l1, double l2, double v, double sqrt_s,
                         std::array<double, 6> masses) {
                 return ltd::Kinematics{l1, l2, v, sqrt_s, masses};
             }),
             py::arg("l1"), py::arg("l2"), py::arg("v"), py::arg("sqrt_s"), py::arg("masses"));
    py::class_<ltd::DeltaRoot>(l, "DeltaRoot")
        .def_readonly("l2_star", &ltd::DeltaRoot::l2_star)
        .def_readonly("jacobian", &ltd::DeltaRoot::jacobian);
    py::class_<ltd::IntegrandParts>(l, "IntegrandParts")
        .def_readonly("two_body", &ltd::IntegrandParts::two_body)
        .def_readonly("three_body", &ltd::IntegrandParts::three_body)
        .def("total", &ltd::IntegrandParts::total);
    l.def("make_process", &ltd::make_process, py::arg("name"), py::arg("mass_ratio"),
          py::arg("sqrt_s") = 1.0, py::arg("coupling") = 1.0);
    l.def("registered_processes", &ltd::registered_processes);
    l.def("register_process",
          [](const std::string& name, const std::function<double(ltd::OnShellEnergies, double)>& f456,
             const std::function<double(ltd::OnShellEnergies, double)>& f1356) {
              ltd::register_process(
                  name,
                  [f456](const ltd::OnShellEnergies& e, const ltd::ProcessSpec& s) {
                      return f456(e, s.coupling);
                  },
                  [f1356](const ltd::OnShellEnergies& e, const ltd::ProcessSpec& s) {
                      return f1356(e, s.coupling);
                  });
          },
          py::arg("name"), py::arg("residue_456_fn"), py::arg("residue_1356_fn"),
          "register a plug-in process; the callables receive (on_shell_energies, coupling)");
    l.def("on_shell_energies", &ltd::on_shell_energies);
    l.def("causal_lambda",
          [](const ltd::OnShellEnergies& e, std::vector<int> unbarred, std::vector<int> barred) {
              return ltd::causal_lambda(e, unbarred, barred);
          },
          py::arg("energies"), py::arg("unbarred"), py::arg("barred") = std::vector<int>{});
    l.def("residue_456", &ltd::residue_456);
    l.def("residue_1356", &ltd::residue_1356);
    l.def("resolve_two_body", &ltd::resolve_two_body);
    l.def("resolve_three_body", &ltd::resolve_three_body);
    l.def("integrand_2d", &ltd::integrand_2d, py::arg("u1"), py::arg("u2"), py::arg("spec"));
    l.def("integrand_parts", &ltd::integrand_parts, py::arg("u1"), py::arg("u2"), py::arg("spec"));
}

void bind_vqc(py::module_& m) {
    auto v = m.def_submodule("vqc", "data re-uploading QNN and its trainer");
    py::class_<vqc::AnsatzSpec>(v, "AnsatzSpec")
        .def(py::init<>())
        .def_readwrite("n_qubits", &vqc::AnsatzSpec::n_qubits)
        .def_readwrite("n_layers", &vqc::AnsatzSpec::n_layers)
        .def_readwrite("encodings_per_variable", &vqc::AnsatzSpec::encodings_per_variable)
        .def_readwrite("n_variables", &vqc::AnsatzSpec::n_variables)
        .def_readwrite("measured_qubit", &vqc::AnsatzSpec::measured_qubit)
        .def("validate", &vqc::AnsatzSpec::validate)
        .def("total_params", &vqc::AnsatzSpec::total_params)
        .def("spectrum_bound", &vqc::AnsatzSpec::spectrum_bound)
        .def("depth_units", &vqc::AnsatzSpec::depth_units);
    py::class_<vqc::ParamSet>(v, "ParamSet")
        .def_static("zeros", &vqc::ParamSet::zeros)
        .def_static("random", &vqc::ParamSet::random, py::arg("ansatz"), py::arg("seed"))
        .def_readwrite("angles", &vqc::ParamSet::angles);
    py::class_<vqc::QnnModel>(v, "QnnModel")
        .def(py::init<>())
        .def_readwrite("ansatz", &vqc::QnnModel::ansatz)
        .def_readwrite("params", &vqc::QnnModel::params)
        .def_readwrite("input_scale", &vqc::QnnModel::input_scale)
        .def_readwrite("output_scale", &vqc::QnnModel::output_scale)
        .def_readwrite("output_offset", &vqc::QnnModel::output_offset);
    py::class_<vqc::TrainConfig>(v, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("max_steps", &vqc::TrainConfig::max_steps)
        .def_readwrite("step_size", &vqc::TrainConfig::step_size)
        .def_readwrite("beta1", &vqc::TrainConfig::beta1)
        .def_readwrite("beta2", &vqc::TrainConfig::beta2)
        .def_readwrite("epsilon_adam", &vqc::TrainConfig::epsilon_adam)
        .def_readwrite("seed", &vqc::TrainConfig::seed)
        .def_readwrite("restarts", &vqc::TrainConfig::restarts);
    py::class_<vqc::Dataset>(v, "Dataset")
        .def(py::init<>())
        .def_readwrite("points", &vqc::Dataset::points)
        .def_readwrite("targets", &vqc::Dataset::targets)
        .def_static("grid", &vqc::Dataset::grid, py::arg("f"), py::arg("n1"), py::arg("n2"));
    py::class_<vqc::TrainResult>(v, "TrainResult")
        .def_readonly("model", &vqc::TrainResult::model)
        .def_readonly("loss_history", &vqc::TrainResult::loss_history)
        .def_readonly("final_loss", &vqc::TrainResult::final_loss)
        .def_readonly("best_restart", &vqc::TrainResult::best_restart);
    v.def("build_circuit", &vqc::build_circuit);
    v.def("forward", &vqc::forward);
    v.def("forward_angles", &vqc::forward_angles);
    v.def("mse_loss", &vqc::mse_loss);
    v.def("parameter_shift_gradient", &vqc::parameter_shift_gradient);
    v.def("adjoint_gradient",
          [](const vqc::QnnModel& model, const vqc::Dataset& data) {
              double loss = 0.0;
              auto grad = vqc::adjoint_gradient(model, data, &loss);
              return py::make_tuple(grad, loss);
          });
    v.def("train", &vqc::train, py::arg("init"), py::arg("data"), py::arg("config"));
    v.def("prepare_output_scaling", &vqc::prepare_output_scaling, py::arg("model"),
          py::arg("data"), py::arg("margin") = 0.9);
}

void bind_pipeline(py::module_& m) {
    auto p = m.def_submodule("pipeline", "fit -> extract -> integrate -> scan workflow");
    py::class_<pipeline::RunConfig>(p, "RunConfig")
        .def(py::init<>())
        .def_readwrite("process", &pipeline::RunConfig::process)
        .def_readwrite("mass_scan", &pipeline::RunConfig::mass_scan)
        .def_readwrite("sqrt_s", &pipeline::RunConfig::sqrt_s)
        .def_readwrite("coupling", &pipeline::RunConfig::coupling)
        .def_readwrite("ansatz", &pipeline::RunConfig::ansatz)
        .def_readwrite("train", &pipeline::RunConfig::train)
        .def_readwrite("dataset_n1", &pipeline::RunConfig::dataset_n1)
        .def_readwrite("dataset_n2", &pipeline::RunConfig::dataset_n2)
        .def_readwrite("n_fourier", &pipeline::RunConfig::n_fourier)
        .def_readwrite("grid_bits", &pipeline::RunConfig::grid_bits)
        .def_readwrite("iqae", &pipeline::RunConfig::iqae)
        .def_readwrite("exact_mode", &pipeline::RunConfig::exact_mode)
        .def_readwrite("seed", &pipeline::RunConfig::seed)
        .def_readwrite("reuse_artifacts", &pipeline::RunConfig::reuse_artifacts)
        .def_readwrite("cache_dir", &pipeline::RunConfig::cache_dir)
        .def_readwrite("out_path", &pipeline::RunConfig::out_path)
        .def_readwrite("quad_order", &pipeline::RunConfig::quad_order)
        .def_readwrite("quad_panels", &pipeline::RunConfig::quad_panels);
    py::class_<pipeline::ScanRow>(p, "ScanRow")
        .def_readonly("process", &pipeline::ScanRow::process)
        .def_readonly("mass_ratio", &pipeline::ScanRow::mass_ratio)
        .def_readonly("method", &pipeline::ScanRow::method)
        .def_readonly("estimate", &pipeline::ScanRow::estimate)
        .def_readonly("half_width", &pipeline::ScanRow::half_width)
        .def_readonly("mse", &pipeline::ScanRow::mse)
        .def_readonly("queries", &pipeline::ScanRow::queries)
        .def_readonly("seconds", &pipeline::ScanRow::seconds)
        .def_readonly("flagged", &pipeline::ScanRow::flagged);
    py::class_<pipeline::FitOutcome>(p, "FitOutcome")
        .def_readonly("model", &pipeline::FitOutcome::model)
        .def_readonly("final_mse", &pipeline::FitOutcome::final_mse)
        .def_readonly("loss_history", &pipeline::FitOutcome::loss_history)
        .def_readonly("artifact_path", &pipeline::FitOutcome::artifact_path)
        .def_readonly("reused_artifact", &pipeline::FitOutcome::reused_artifact);
    py::class_<pipeline::IntegrateOutcome>(p, "IntegrateOutcome")
        .def_readonly("row", &pipeline::IntegrateOutcome::row)
        .def_readonly("report", &pipeline::IntegrateOutcome::report)
        .def_readonly("series", &pipeline::IntegrateOutcome::series)
        .def_readonly("out_of_band_power", &pipeline::IntegrateOutcome::out_of_band_power);
    py::class_<pipeline::ScanOutcome>(p, "ScanOutcome")
        .def_readonly("rows", &pipeline::ScanOutcome::rows)
        .def_readonly("csv", &pipeline::ScanOutcome::csv);
    p.def("process_for", &pipeline::process_for);
    p.def("cmd_fit", &pipeline::cmd_fit, py::arg("config"), py::arg("mass_ratio"));
    p.def("fit_function", &pipeline::fit_function, py::arg("config"), py::arg("target"),
          py::arg("train_seed"));
    p.def("cmd_integrate", &pipeline::cmd_integrate, py::arg("config"), py::arg("model"),
          py::arg("mass_ratio"), py::arg("fit_mse") = 0.0);
    p.def("cmd_oracle", &pipeline::cmd_oracle, py::arg("config"), py::arg("mass_ratio"));
    p.def("cmd_scan", [](const pipeline::RunConfig& cfg) { return pipeline::cmd_scan(cfg); });
    p.def("cmd_selftest", []() {
        std::ostringstream out;
        const bool ok = pipeline::cmd_selftest(out);
        return py::make_tuple(ok, out.str());
    });
    p.def("format_with_uncertainty", &pipeline::format_with_uncertainty);
    p.def("csv_header", &pipeline::csv_header);
}

void bind_artifacts(py::module_& m) {
    auto a = m.def_submodule("artifacts", "model and series persistence");
    a.def("save_model",
          [](const vqc::QnnModel& model, const std::string& path) {
              artifacts::save_model(model, {}, path);
          });
    a.def("load_model", [](const std::string& path) { return artifacts::load_model(path); });
    a.def("save_series", &artifacts::save_series);
    a.def("load_series", &artifacts::load_series);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "QFIAE: quantum Fourier amplitude-estimation integration of LTD decay rates";
    bind_statevec(m);
    bind_quad(m);
    bind_fourier(m);
    bind_iqae(m);
    bind_ltd(m);
    bind_vqc(m);
    bind_pipeline(m);
    bind_artifacts(m);
}
