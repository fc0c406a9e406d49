#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rcp/analysis.hpp"
#include "rcp/config.hpp"
#include "rcp/distributions.hpp"
#include "rcp/engine.hpp"
#include "rcp/renewal.hpp"

namespace py = pybind11;
using namespace rcp;

PYBIND11_MODULE(_rcp, m) {
    m.doc() = "renewal contact process laboratory (C++ core)";

    py::enum_<InterarrivalLaw::IntervalKind>(m, "IntervalKind")
        .value("OPEN", InterarrivalLaw::IntervalKind::Open)
        .value("CLOSED", InterarrivalLaw::IntervalKind::Closed)
        .value("HALF_OPEN", InterarrivalLaw::IntervalKind::HalfOpen);

    py::class_<InterarrivalLaw>(m, "Law")
        .def_static("exponential", &InterarrivalLaw::exponential, py::arg("rate"))
        .def_static("pareto", &InterarrivalLaw::pareto, py::arg("alpha"),
                    py::arg("scale"))
        .def_static("oscillating", &InterarrivalLaw::oscillating, py::arg("alpha"),
                    py::arg("beta"), py::arg("breakpoints"))
        .def_static("empirical", &InterarrivalLaw::empirical, py::arg("points"))
        .def_static("parse", &parse_law, py::arg("text"))
        .def("tail_mass", &InterarrivalLaw::tail_mass)
        .def("interval_mass", &InterarrivalLaw::interval_mass, py::arg("a"),
             py::arg("b"), py::arg("kind") = InterarrivalLaw::IntervalKind::Open)
        .def("truncated_first_moment", &InterarrivalLaw::truncated_first_moment)
        .def("quantile_from_tail", &InterarrivalLaw::quantile_from_tail)
        .def("__repr__", &InterarrivalLaw::describe);

    py::class_<stats::BinomialEstimate>(m, "BinomialEstimate")
        .def_readonly("p_hat", &stats::BinomialEstimate::p_hat)
        .def_readonly("ci_low", &stats::BinomialEstimate::ci_low)
        .def_readonly("ci_high", &stats::BinomialEstimate::ci_high)
        .def_readonly("successes", &stats::BinomialEstimate::successes)
        .def_readonly("trials", &stats::BinomialEstimate::trials);

    py::class_<ConditionPoint>(m, "ConditionPoint")
        .def_readonly("point", &ConditionPoint::point)
        .def_readonly("lhs", &ConditionPoint::lhs)
        .def_readonly("rhs", &ConditionPoint::rhs)
        .def_readonly("margin", &ConditionPoint::margin)
        .def_readonly("passed", &ConditionPoint::pass);

    py::class_<ConditionReport>(m, "ConditionReport")
        .def_readonly("condition", &ConditionReport::condition)
        .def_readonly("points", &ConditionReport::points)
        .def_readonly("verdict", &ConditionReport::verdict);

    py::class_<ConditionParams>(m, "ConditionParams")
        .def(py::init<>())
        .def_readwrite("M1", &ConditionParams::M1)
        .def_readwrite("eps1", &ConditionParams::eps1)
        .def_readwrite("t0", &ConditionParams::t0)
        .def_readwrite("M2", &ConditionParams::M2)
        .def_readwrite("eps2", &ConditionParams::eps2)
        .def_readwrite("r2", &ConditionParams::r2)
        .def_readwrite("eps3", &ConditionParams::eps3)
        .def_readwrite("M3", &ConditionParams::M3);

    m.def("check_conditions", &check_conditions, py::arg("law"), py::arg("params"),
          py::arg("time_grid"), py::arg("rank_grid"));

    py::class_<GapEstimate>(m, "GapEstimate")
        .def_readonly("t", &GapEstimate::t)
        .def_readonly("big_factor", &GapEstimate::big_factor)
        .def_readonly("est", &GapEstimate::est);
    m.def("estimate_gap_probability", &estimate_gap_probability, py::arg("law"),
          py::arg("t"), py::arg("K"), py::arg("replicas"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<CountTailEstimate>(m, "CountTailEstimate")
        .def_readonly("t", &CountTailEstimate::t)
        .def_readonly("cutoff", &CountTailEstimate::cutoff)
        .def_readonly("est", &CountTailEstimate::est);
    m.def("estimate_count_tail", &estimate_count_tail, py::arg("law"), py::arg("t"),
          py::arg("eps3"), py::arg("replicas"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<QuietInterval>(m, "QuietInterval")
        .def_readonly("j_lo", &QuietInterval::j_lo)
        .def_readonly("j_hi", &QuietInterval::j_hi)
        .def_readonly("scan", &QuietInterval::scan)
        .def_readonly("fresh", &QuietInterval::fresh);
    m.def("find_quiet_subinterval", &find_quiet_subinterval, py::arg("law"),
          py::arg("i_lo"), py::arg("i_hi"), py::arg("eps3"), py::arg("replicas"),
          py::arg("seed"), py::call_guard<py::gil_scoped_release>());

    py::class_<CouplingTailRow>(m, "CouplingTailRow")
        .def_readonly("t", &CouplingTailRow::t)
        .def_readonly("est", &CouplingTailRow::est)
        .def_readonly("ratio", &CouplingTailRow::ratio);
    py::class_<CouplingSumRow>(m, "CouplingSumRow")
        .def_readonly("n", &CouplingSumRow::n)
        .def_readonly("bound", &CouplingSumRow::bound)
        .def_readonly("prob_exceed", &CouplingSumRow::prob_exceed);
    py::class_<CouplingTailTable>(m, "CouplingTailTable")
        .def_readonly("v0", &CouplingTailTable::v0)
        .def_readonly("rows", &CouplingTailTable::rows)
        .def_readonly("empirical_K", &CouplingTailTable::empirical_K)
        .def_readonly("sums", &CouplingTailTable::sums)
        .def_readonly("truncated", &CouplingTailTable::truncated);
    m.def("estimate_coupling_tails", &estimate_coupling_tails, py::arg("law"),
          py::arg("v0"), py::arg("t_grid"), py::arg("n_grid"), py::arg("replicas"),
          py::arg("seed"), py::call_guard<py::gil_scoped_release>());
    m.def("choose_coupling_interval", &choose_coupling_interval, py::arg("law"));

    py::class_<FarGapRow>(m, "FarGapRow")
        .def_readonly("s", &FarGapRow::s)
        .def_readonly("length", &FarGapRow::length)
        .def_readonly("est", &FarGapRow::est);
    py::class_<FarGapTable>(m, "FarGapTable")
        .def_readonly("rows", &FarGapTable::rows)
        .def_readonly("fitted_decay", &FarGapTable::fitted_decay);
    m.def("estimate_far_gap", &estimate_far_gap, py::arg("law"), py::arg("s_grid"),
          py::arg("exponent"), py::arg("replicas"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<const InterarrivalLaw&>(), py::arg("law"))
        .def_readwrite("lambda_", &SimConfig::lambda)
        .def_readwrite("half_width", &SimConfig::half_width)
        .def_readwrite("horizon", &SimConfig::horizon)
        .def_readwrite("initial", &SimConfig::initial)
        .def_readwrite("replicas", &SimConfig::replicas)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("one_sided", &SimConfig::one_sided)
        .def_readwrite("snapshot_times", &SimConfig::snapshot_times)
        .def_readwrite("lambda_ref", &SimConfig::lambda_ref);

    py::class_<Snapshot>(m, "Snapshot")
        .def_readonly("time", &Snapshot::time)
        .def_readonly("infected", &Snapshot::infected)
        .def_readonly("extent", &Snapshot::extent);

    py::class_<SimOutcome>(m, "SimOutcome")
        .def_readonly("survived", &SimOutcome::survived)
        .def_readonly("tau", &SimOutcome::tau)
        .def_readonly("max_extent", &SimOutcome::max_extent)
        .def_readonly("boundary_hit", &SimOutcome::boundary_hit)
        .def_readonly("snapshots", &SimOutcome::snapshots);

    py::class_<BatchSummary>(m, "BatchSummary")
        .def_readonly("survival", &BatchSummary::survival)
        .def_readonly("mean_tau_finite", &BatchSummary::mean_tau_finite)
        .def_readonly("n_finite", &BatchSummary::n_finite)
        .def_readonly("boundary_frac", &BatchSummary::boundary_frac)
        .def_readonly("outcomes", &BatchSummary::outcomes);

    m.def("run_replica", &run_replica, py::arg("config"), py::arg("replica_id"),
          py::arg("origin_min_gap") = 0.0,
          py::call_guard<py::gil_scoped_release>());
    m.def("run_batch", &run_batch, py::arg("config"),
          py::arg("retain_outcomes") = false,
          py::call_guard<py::gil_scoped_release>());
    m.def("conditioned_origin_batch", &conditioned_origin_batch, py::arg("config"),
          py::arg("c"), py::arg("retain_outcomes") = false,
          py::call_guard<py::gil_scoped_release>());

    py::class_<SurvivalCurveRow>(m, "SurvivalCurveRow")
        .def_readonly("horizon", &SurvivalCurveRow::horizon)
        .def_readonly("est", &SurvivalCurveRow::est);
    py::class_<SurvivalCurve>(m, "SurvivalCurve")
        .def_readonly("rows", &SurvivalCurve::rows)
        .def_readonly("pathwise_violations", &SurvivalCurve::pathwise_violations);
    m.def("survival_curve", &survival_curve, py::arg("base"), py::arg("horizons"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<LambdaScanRow>(m, "LambdaScanRow")
        .def_readonly("lambda_", &LambdaScanRow::lambda)
        .def_readonly("est", &LambdaScanRow::est);
    py::class_<LambdaScan>(m, "LambdaScan")
        .def_readonly("rows", &LambdaScan::rows)
        .def_readonly("pathwise_violations", &LambdaScan::pathwise_violations);
    m.def("lambda_scan", &lambda_scan, py::arg("base"), py::arg("lambdas"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<LambdaUpperResult>(m, "LambdaUpperResult")
        .def_readonly("lambda_hat", &LambdaUpperResult::lambda_hat)
        .def_readonly("theta", &LambdaUpperResult::theta)
        .def_readonly("horizon", &LambdaUpperResult::horizon)
        .def_readonly("half_width", &LambdaUpperResult::half_width)
        .def_readonly("replicas", &LambdaUpperResult::replicas)
        .def_readonly("bisection_steps", &LambdaUpperResult::bisection_steps);
    m.def("estimate_lambda_c_upper", &estimate_lambda_c_upper, py::arg("base"),
          py::arg("theta"), py::arg("lambda_lo"), py::arg("lambda_hi"),
          py::arg("tolerance"), py::call_guard<py::gil_scoped_release>());

    py::class_<BadEventRateRow>(m, "BadEventRateRow")
        .def_readonly("i", &BadEventRateRow::i)
        .def_readonly("est", &BadEventRateRow::est);
    py::class_<BadEventRateTable>(m, "BadEventRateTable")
        .def_readonly("t0", &BadEventRateTable::t0)
        .def_readonly("gamma", &BadEventRateTable::gamma)
        .def_readonly("lambda_", &BadEventRateTable::lambda)
        .def_readonly("rows", &BadEventRateTable::rows)
        .def_readonly("sum_rates", &BadEventRateTable::sum_rates)
        .def_readonly("exhausted", &BadEventRateTable::exhausted);
    m.def("estimate_bad_event_rates", &estimate_bad_event_rates, py::arg("law"),
          py::arg("lambda_"), py::arg("t0"), py::arg("gamma"), py::arg("i_max"),
          py::arg("replicas"), py::arg("seed"), py::arg("window_sites") = 4000,
          py::arg("use_log2") = false, py::call_guard<py::gil_scoped_release>());
}
