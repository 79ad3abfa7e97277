#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spinmem/analysis.hpp"
#include "spinmem/hamiltonian.hpp"
#include "spinmem/propagator.hpp"
#include "spinmem/protocol.hpp"
#include "spinmem/sector_basis.hpp"

namespace py = pybind11;
using namespace spinmem;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact simulation of memory-assisted state transfer on spin chains";
  m.attr("__version__") = SPINMEM_VERSION;

  py::class_<SiteLayout>(m, "SiteLayout")
      .def(py::init([](int n_a, int n_c, int n_b) {
             SiteLayout l{n_a, n_c, n_b};
             l.validate();
             return l;
           }),
           py::arg("n_a"), py::arg("n_c"), py::arg("n_b"))
      .def_readonly("n_a", &SiteLayout::n_a)
      .def_readonly("n_c", &SiteLayout::n_c)
      .def_readonly("n_b", &SiteLayout::n_b)
      .def_property_readonly("total", &SiteLayout::total)
      .def("__repr__", [](const SiteLayout& l) {
        return "SiteLayout(n_a=" + std::to_string(l.n_a) + ", n_c=" + std::to_string(l.n_c) +
               ", n_b=" + std::to_string(l.n_b) + ")";
      });

  py::enum_<Model>(m, "Model")
      .value("Heisenberg", Model::Heisenberg)
      .value("XY", Model::XY);

  py::class_<ChainSpec>(m, "ChainSpec")
      .def(py::init([](const SiteLayout& layout, Model model, std::vector<double> couplings,
                       std::vector<double> fields) {
             ChainSpec spec{layout, model, std::move(couplings), std::move(fields), {}};
             if (spec.fields.empty()) spec.fields.assign(layout.total(), 0.0);
             spec.validate();
             return spec;
           }),
           py::arg("layout"), py::arg("model"), py::arg("couplings"),
           py::arg("fields") = std::vector<double>{})
      .def_readonly("layout", &ChainSpec::layout)
      .def_readonly("model", &ChainSpec::model)
      .def_readonly("couplings", &ChainSpec::couplings)
      .def_readonly("fields", &ChainSpec::fields)
      .def_readonly("rng_seed", &ChainSpec::rng_seed)
      .def("connected", &ChainSpec::connected);

  py::class_<SectorBasis>(m, "SectorBasis")
      .def(py::init<int, int>(), py::arg("site_count"), py::arg("excitations"))
      .def_property_readonly("site_count", &SectorBasis::site_count)
      .def_property_readonly("excitations", &SectorBasis::excitations)
      .def_property_readonly("dim", &SectorBasis::dim)
      .def("state", &SectorBasis::state, py::arg("k"))
      .def("states", &SectorBasis::states)
      .def("index_of", &SectorBasis::index_of, py::arg("pattern"));

  m.def("enumerate_sector", &enumerate_sector, py::arg("site_count"), py::arg("n"));

  py::class_<RegionSplit>(m, "RegionSplit")
      .def_readonly("region_mask", &RegionSplit::region_mask)
      .def_readonly("groups", &RegionSplit::groups);
  m.def("split_by_region",
        py::overload_cast<const SectorBasis&, std::uint32_t>(&split_by_region),
        py::arg("basis"), py::arg("region_mask"));

  py::class_<SectorHamiltonian>(m, "SectorHamiltonian")
      .def_readonly("basis", &SectorHamiltonian::basis)
      .def_readonly("matrix", &SectorHamiltonian::matrix);
  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("basis", &Spectrum::basis)
      .def_readonly("eigenvalues", &Spectrum::eigenvalues)
      .def_readonly("eigenvectors", &Spectrum::eigenvectors);

  m.def("build_chain", &build_chain, py::arg("spec"), py::arg("n"));
  m.def("random_chain", &random_chain, py::arg("layout"), py::arg("model"), py::arg("lo"),
        py::arg("hi"), py::arg("seed"));
  m.def("diagonalize", &diagonalize, py::arg("hamiltonian"));

  py::class_<SectorUnitary>(m, "SectorUnitary")
      .def_readonly("basis", &SectorUnitary::basis)
      .def_readonly("matrix", &SectorUnitary::matrix)
      .def_readonly("tau", &SectorUnitary::tau);
  py::class_<SectorContraction>(m, "SectorContraction")
      .def_readonly("basis", &SectorContraction::basis)
      .def_readonly("sub_index", &SectorContraction::sub_index)
      .def_readonly("matrix", &SectorContraction::matrix)
      .def_readonly("tau", &SectorContraction::tau);

  m.def("evolve", &evolve, py::arg("spectrum"), py::arg("tau"));
  m.def("build_T", &build_T, py::arg("unitary"), py::arg("layout"));
  m.def("operator_norm", &operator_norm, py::arg("matrix"));
  m.def("contraction_power", &contraction_power, py::arg("t"), py::arg("j"));
  m.def("apply",
        py::overload_cast<const SectorUnitary&, const Eigen::VectorXcd&>(&apply),
        py::arg("unitary"), py::arg("v"));
  m.def("apply",
        py::overload_cast<const SectorContraction&, const Eigen::VectorXcd&>(&apply),
        py::arg("t"), py::arg("v"));

  py::class_<ProtocolSchedule>(m, "ProtocolSchedule")
      .def(py::init([](std::vector<double> taus) {
             ProtocolSchedule s{std::move(taus)};
             s.validate();
             return s;
           }),
           py::arg("taus"))
      .def_static("uniform", &ProtocolSchedule::uniform, py::arg("tau"), py::arg("steps"))
      .def_readonly("taus", &ProtocolSchedule::taus)
      .def_property_readonly("steps", &ProtocolSchedule::steps);

  py::class_<JointState>(m, "JointState")
      .def_readonly("layout", &JointState::layout)
      .def_readonly("step", &JointState::step)
      .def_readonly("blocks", &JointState::blocks)
      .def("total_norm2", &JointState::total_norm2)
      .def("memory_excitation_expectation", &JointState::memory_excitation_expectation);

  py::class_<TrajectoryRow>(m, "TrajectoryRow")
      .def_readonly("step", &TrajectoryRow::step)
      .def_readonly("tau", &TrajectoryRow::tau)
      .def_readonly("success_prob", &TrajectoryRow::success_prob)
      .def_readonly("fidelity_bound", &TrajectoryRow::fidelity_bound)
      .def_readonly("p_at_least", &TrajectoryRow::p_at_least)
      .def_readonly("chain_excitation_expectation", &TrajectoryRow::chain_excitation_expectation)
      .def_readonly("b_occupancy_before_swap", &TrajectoryRow::b_occupancy_before_swap);
  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("layout", &TrajectoryRecord::layout)
      .def_readonly("rows", &TrajectoryRecord::rows);
  py::class_<SimulationResult>(m, "SimulationResult")
      .def_readonly("state", &SimulationResult::state)
      .def_readonly("record", &SimulationResult::record);

  py::class_<TransferMap>(m, "TransferMap")
      .def_readonly("steps", &TransferMap::steps)
      .def_readonly("alice_dim", &TransferMap::alice_dim)
      .def_readonly("memory_states", &TransferMap::memory_states)
      .def_readonly("matrix", &TransferMap::matrix);
  py::class_<RecoveryMetrics>(m, "RecoveryMetrics")
      .def_readonly("singular_values", &RecoveryMetrics::singular_values)
      .def_readonly("worst_case_fidelity_bound", &RecoveryMetrics::worst_case_fidelity_bound)
      .def_readonly("decoder", &RecoveryMetrics::decoder);
  py::class_<TransferRun>(m, "TransferRun")
      .def_readonly("final_map", &TransferRun::final_map)
      .def_readonly("stepwise_worst_case_bound", &TransferRun::stepwise_worst_case_bound);

  m.def("preset_all_up", &preset_all_up, py::arg("n_a"));
  m.def("preset_plus_state", &preset_plus_state, py::arg("n_a"));
  m.def("simulate", &simulate, py::arg("spec"), py::arg("schedule"), py::arg("alice_input"));
  m.def("transfer_map", &transfer_map, py::arg("spec"), py::arg("schedule"));
  m.def("transfer_map_run", &transfer_map_run, py::arg("spec"), py::arg("schedule"));
  m.def("transfer_map_steps", &transfer_map_steps, py::arg("spec"), py::arg("schedule"));
  m.def("recovery_metrics", &recovery_metrics, py::arg("k"));
  m.def("eta_direct", &eta_direct, py::arg("spec"), py::arg("tau"), py::arg("j"));
  m.def("survival_bound", &survival_bound, py::arg("spec"), py::arg("tau"), py::arg("n"),
        py::arg("j"));

  py::class_<SpectralRadiusResult>(m, "SpectralRadiusResult")
      .def_readonly("rho", &SpectralRadiusResult::rho)
      .def_readonly("gelfand", &SpectralRadiusResult::gelfand)
      .def_readonly("consistent", &SpectralRadiusResult::consistent);
  m.def("spectral_radius_checked", &spectral_radius_checked, py::arg("matrix"));
  m.def("spectral_radius", py::overload_cast<const Eigen::MatrixXcd&>(&spectral_radius),
        py::arg("matrix"));
  m.def("spectral_radius", py::overload_cast<const SectorContraction&>(&spectral_radius),
        py::arg("t"));

  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("sector", &ConditionReport::sector)
      .def_readonly("violated", &ConditionReport::violated)
      .def_readonly("worst_b_weight", &ConditionReport::worst_b_weight)
      .def_readonly("offending_eigenvalue", &ConditionReport::offending_eigenvalue)
      .def_readonly("tolerance", &ConditionReport::tolerance);
  m.def("check_condition", &check_condition, py::arg("spec"), py::arg("n"),
        py::arg("tol") = 1e-10);

  py::class_<TauScanPoint>(m, "TauScanPoint")
      .def_readonly("tau", &TauScanPoint::tau)
      .def_readonly("rho", &TauScanPoint::rho)
      .def_readonly("degenerate", &TauScanPoint::degenerate);
  m.def("scan_tau", &scan_tau, py::arg("spec"), py::arg("n"), py::arg("tau_grid"));

  m.def("estimate_Te", &estimate_Te, py::arg("spec"), py::arg("t_max"), py::arg("dt"));

  py::class_<TimescaleModel>(m, "TimescaleModel")
      .def_readonly("layout", &TimescaleModel::layout)
      .def_readonly("transit_time", &TimescaleModel::transit_time)
      .def_readonly("fitted_rate", &TimescaleModel::fitted_rate)
      .def_readonly("model_rate", &TimescaleModel::model_rate)
      .def("time_to_fidelity", &TimescaleModel::time_to_fidelity, py::arg("f"));
  m.def("fit_decay",
        py::overload_cast<const TrajectoryRecord&, const SiteLayout&>(&fit_decay),
        py::arg("record"), py::arg("layout"));
  m.def("fit_decay",
        py::overload_cast<const TrajectoryRecord&, const SiteLayout&, double>(&fit_decay),
        py::arg("record"), py::arg("layout"), py::arg("transit_time"));

  m.def("optimize_schedule",
        py::overload_cast<const ChainSpec&, int, double, double, int,
                          const Eigen::VectorXcd&>(&optimize_schedule),
        py::arg("spec"), py::arg("steps"), py::arg("tau_lo"), py::arg("tau_hi"),
        py::arg("grid_points"), py::arg("alice_input"));
  m.def("optimize_schedule",
        py::overload_cast<const ChainSpec&, int, double, double, int>(&optimize_schedule),
        py::arg("spec"), py::arg("steps"), py::arg("tau_lo"), py::arg("tau_hi"),
        py::arg("grid_points"));
}
