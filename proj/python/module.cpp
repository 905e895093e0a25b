#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "dfcal/batch.hpp"
#include "dfcal/binning.hpp"
#include "dfcal/covariate_shift.hpp"
#include "dfcal/density_ratio.hpp"
#include "dfcal/errors.hpp"
#include "dfcal/evaluation.hpp"
#include "dfcal/serialize.hpp"
#include "dfcal/simlab.hpp"
#include "dfcal/streaming.hpp"
#include "dfcal/tripod.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace dfcal;

using Doubles = std::vector<double>;
using Ints = std::vector<int>;

namespace {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidParameter: return "invalid_parameter";
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::OutOfDomain: return "out_of_domain";
    case ErrorKind::DegeneratePartition: return "degenerate_partition";
    case ErrorKind::EmptyBin: return "empty_bin";
    case ErrorKind::DegenerateBin: return "degenerate_bin";
    case ErrorKind::BoundsViolation: return "bounds_violation";
    case ErrorKind::Numeric: return "numeric";
  }
  return "unknown";
}

py::dict report_dict(const ReliabilityReport& r) {
  py::list bins;
  for (const auto& b : r.bins) {
    py::dict d("lower"_a = b.lower, "upper"_a = b.upper, "count"_a = b.count,
               "proportion"_a = b.proportion);
    d["fraction_positive"] = b.fraction_positive ? py::object(py::float_(*b.fraction_positive)) : py::none();
    d["mean_predicted"] = b.mean_predicted ? py::object(py::float_(*b.mean_predicted)) : py::none();
    bins.append(d);
  }
  return py::dict("bins"_a = bins, "ece"_a = r.ece);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distribution-free binned calibration";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::object(py::exception<Error>(m, "Error", PyExc_ValueError)); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& type = error_type.get_stored();
      py::object exc = type(e.what());
      exc.attr("kind") = kind_name(e.kind());
      if (const auto* eb = dynamic_cast<const EmptyBinError*>(&e)) exc.attr("bin") = eb->bin();
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });

  // binning
  py::enum_<BinningKind>(m, "BinningKind")
      .value("FIXED_WIDTH", BinningKind::FixedWidth)
      .value("UNIFORM_MASS", BinningKind::UniformMass);

  py::class_<BinningScheme>(m, "BinningScheme")
      .def(py::init<Doubles, BinningKind>(), "edges"_a, "kind"_a)
      .def_property_readonly("edges", &BinningScheme::edges)
      .def_property_readonly("kind", &BinningScheme::kind)
      .def_property_readonly("bin_count", &BinningScheme::bin_count)
      .def("assign", &BinningScheme::assign, "score"_a)
      .def("__len__", &BinningScheme::bin_count);

  m.def("fixed_width_scheme", &fixed_width_scheme, "bins"_a);
  m.def("uniform_mass_scheme",
        [](const Doubles& s, std::size_t bins) { return uniform_mass_scheme(s, bins); },
        "scores"_a, "bins"_a);
  m.def("bin_counts", [](const BinningScheme& sc, const Doubles& s) { return bin_counts(sc, s); },
        "scheme"_a, "scores"_a);
  m.def("well_balanced_check",
        [](const BinningScheme& sc, const Doubles& s, double beta) {
          const auto r = well_balanced_check(sc, s, beta);
          return py::dict("frequency"_a = r.frequency, "bin_ok"_a = r.bin_ok, "balanced"_a = r.balanced);
        },
        "scheme"_a, "scores"_a, "beta"_a);

  // tripod
  py::class_<Interval>(m, "Interval")
      .def(py::init<double, double>(), "lower"_a, "upper"_a)
      .def_readwrite("lower", &Interval::lower)
      .def_readwrite("upper", &Interval::upper)
      .def_property_readonly("width", &Interval::width)
      .def_property_readonly("midpoint", &Interval::midpoint)
      .def("contains", &Interval::contains, "x"_a)
      .def("__eq__", [](const Interval& a, const Interval& b) { return a == b; })
      .def("__repr__", [](const Interval& i) {
        return "Interval(" + std::to_string(i.lower) + ", " + std::to_string(i.upper) + ")";
      });

  py::class_<PredictionSet>(m, "PredictionSet")
      .def_readonly("contains_zero", &PredictionSet::contains_zero)
      .def_readonly("contains_one", &PredictionSet::contains_one)
      .def_property_readonly("empty", &PredictionSet::empty)
      .def_property_readonly("diameter", &PredictionSet::diameter)
      .def("__str__", &PredictionSet::to_string)
      .def("__repr__", &PredictionSet::to_string);

  m.def("calibrator_to_ci", &calibrator_to_ci, "prediction"_a, "epsilon"_a);
  m.def("ci_to_calibrator", [](const Interval& i) {
    const auto r = ci_to_calibrator(i);
    return py::make_tuple(r.midpoint, r.half_width);
  }, "interval"_a);
  m.def("ci_to_prediction_set", &ci_to_prediction_set, "interval"_a);

  // batch
  m.def("bernstein_radius", &bernstein_radius, "variance"_a, "count"_a, "bins"_a, "alpha"_a);
  m.def("hoeffding_min_count_bound", &hoeffding_min_count_bound, "n"_a, "bins"_a, "alpha"_a);

  py::class_<BinStats>(m, "BinStats")
      .def_readonly("count", &BinStats::count)
      .def_readonly("mean", &BinStats::mean)
      .def_readonly("variance", &BinStats::variance);

  py::class_<CalibratorModel>(m, "CalibratorModel")
      .def_property_readonly("scheme", &CalibratorModel::scheme)
      .def_property_readonly("stats", &CalibratorModel::stats)
      .def_property_readonly("alpha", &CalibratorModel::alpha)
      .def_property_readonly("radii", &CalibratorModel::radii)
      .def_property_readonly("epsilon_star", &CalibratorModel::epsilon_star)
      .def_property_readonly("epsilon_at_min_count", &CalibratorModel::epsilon_at_min_count)
      .def("radius", &CalibratorModel::radius, "bin"_a)
      .def("predict", &CalibratorModel::predict, "score"_a)
      .def("predict_many", [](const CalibratorModel& mo, const Doubles& s) {
        Doubles out;
        out.reserve(s.size());
        for (double v : s) out.push_back(mo.predict(v));
        return out;
      }, "scores"_a)
      .def("bin_interval", &CalibratorModel::bin_interval, "bin"_a)
      .def("predict_interval", &CalibratorModel::predict_interval, "score"_a)
      .def("to_json", [](const CalibratorModel& mo) { return to_json(mo); })
      .def_static("from_json", &calibrator_from_json, "text"_a);

  m.def("fit",
        [](const BinningScheme& sc, const Doubles& s, const Ints& y, double alpha) {
          return fit(sc, s, y, alpha);
        },
        "scheme"_a, "scores"_a, "labels"_a, "alpha"_a = 0.1);

  // streaming
  py::enum_<StreamMode>(m, "StreamMode")
      .value("CLOSED_FORM", StreamMode::ClosedForm)
      .value("STITCHED", StreamMode::Stitched);

  py::class_<StreamBinState>(m, "StreamBinState")
      .def(py::init<>())
      .def_readonly("count", &StreamBinState::count)
      .def_readonly("mean", &StreamBinState::mean)
      .def_readonly("cum_var_raw", &StreamBinState::cum_var_raw)
      .def("update", &StreamBinState::update, "label"_a);

  py::class_<StreamCalibrator>(m, "StreamCalibrator")
      .def(py::init<BinningScheme, double, StreamMode>(), "scheme"_a, "alpha"_a = 0.1,
           "mode"_a = StreamMode::ClosedForm)
      .def("observe", &StreamCalibrator::observe, "score"_a, "label"_a)
      .def("state", &StreamCalibrator::state, "bin"_a)
      .def("radius", &StreamCalibrator::radius, "bin"_a)
      .def("interval", &StreamCalibrator::interval, "bin"_a)
      .def_property_readonly("observations", &StreamCalibrator::observations);

  m.def("riemann_zeta", &riemann_zeta, "s"_a);
  m.def("stitching_constants", [](std::size_t bins, double alpha) {
    const auto p = StitchingParams::for_bins(bins, alpha);
    return py::dict("k1"_a = p.k1, "k2"_a = p.k2, "zeta"_a = p.zeta_s, "alpha_per_bin"_a = p.alpha_per_bin);
  }, "bins"_a = 1, "alpha"_a = 0.1);
  m.def("closed_form_radius", &closed_form_radius, "state"_a, "bins"_a, "alpha"_a);
  m.def("stitched_radius", &stitched_radius, "state"_a, "bins"_a, "alpha"_a);

  // covariate shift
  py::class_<ShiftBinEstimate>(m, "ShiftBinEstimate")
      .def_readonly("count", &ShiftBinEstimate::count)
      .def_readonly("weight_sum", &ShiftBinEstimate::weight_sum)
      .def_readonly("weighted_mean", &ShiftBinEstimate::weighted_mean)
      .def_readonly("weight_mean", &ShiftBinEstimate::weight_mean)
      .def_readonly("rel_mass", &ShiftBinEstimate::rel_mass);

  py::class_<ShiftModel>(m, "ShiftModel")
      .def_property_readonly("bins", &ShiftModel::bins)
      .def_property_readonly("radius", [](const ShiftModel& mo) { return mo.radius().radius; })
      .def_property_readonly("sample_size_ok", [](const ShiftModel& mo) { return mo.radius().sample_size_ok; })
      .def("predict", &ShiftModel::predict, "score"_a)
      .def("bin_interval", &ShiftModel::bin_interval, "bin"_a)
      .def("to_json", [](const ShiftModel& mo) { return to_json(mo); });

  m.def("weighted_shift_radius",
        [](double lower, double upper, std::size_t bins, std::size_t n, double alpha, double c) {
          return weighted_shift_radius({lower, upper}, bins, n, alpha, c).radius;
        },
        "lower"_a, "upper"_a, "bins"_a, "n"_a, "alpha"_a, "c"_a = 2.0);
  m.def("fit_weighted",
        [](const BinningScheme& sc, const Doubles& s, const Ints& y, const Doubles& w, double alpha,
           double lower, double upper, double c) {
          return fit_weighted(sc, s, y, w, alpha, {lower, upper}, c);
        },
        "scheme"_a, "scores"_a, "labels"_a, "weights"_a, "alpha"_a, "lower"_a, "upper"_a, "c"_a = 2.0);
  m.def("count_ratio_rel_mass",
        [](const std::vector<std::size_t>& s, const std::vector<std::size_t>& t) {
          return count_ratio_rel_mass(s, t);
        },
        "source_counts"_a, "target_counts"_a);

  // density ratio
  m.def("log_grid", &log_grid, "lo"_a, "hi"_a, "count"_a);
  py::class_<RatioModel>(m, "RatioModel")
      .def_property_readonly("sigma", &RatioModel::sigma)
      .def_property_readonly("lambda_", &RatioModel::lambda)
      .def_property_readonly("theta", &RatioModel::theta)
      .def_property_readonly("centers", &RatioModel::centers)
      .def_property_readonly("cv_score", &RatioModel::cv_score)
      .def("evaluate", &RatioModel::evaluate, "x"_a)
      .def("clipped", &RatioModel::clipped, "lower"_a, "upper"_a)
      .def("to_json", [](const RatioModel& mo) { return to_json(mo); });
  m.def("fit_ulsif",
        [](const Eigen::MatrixXd& src, const Eigen::MatrixXd& tgt, std::optional<Doubles> sigma_grid,
           std::optional<Doubles> lambda_grid, std::size_t n_centers, std::uint64_t seed) {
          UlsifOptions opt;
          if (sigma_grid) opt.sigma_grid = *sigma_grid;
          if (lambda_grid) opt.lambda_grid = *lambda_grid;
          opt.n_centers = n_centers;
          opt.seed = seed;
          py::gil_scoped_release release;
          return fit_ulsif(src, tgt, opt);
        },
        "source"_a, "target"_a, "sigma_grid"_a = py::none(), "lambda_grid"_a = py::none(),
        "n_centers"_a = 100, "seed"_a = 0);

  // evaluation
  m.def("reliability",
        [](const Doubles& p, const Ints& y, std::size_t bins) { return report_dict(reliability(p, y, bins)); },
        "predictions"_a, "labels"_a, "eval_bins"_a = 10);
  m.def("coverage_rate",
        [](const std::vector<Interval>& iv, const Doubles& t) { return coverage_rate(iv, t); },
        "intervals"_a, "truths"_a);

  // simlab
  m.def("gen_shift_data",
        [](std::size_t ns, std::size_t nt, std::uint64_t seed, std::uint64_t stream) {
          const auto d = gen_shift_data(reference_shift_config(seed), ns, nt, stream);
          return py::make_tuple(d.source.x, d.source.y, d.target.x, d.target.y);
        },
        "n_source"_a, "n_target"_a, "seed"_a = 0, "stream"_a = 0);
  m.def("true_ratio",
        [](const Eigen::MatrixXd& x) { return true_ratio(reference_shift_config(), x); }, "x"_a);
  m.def("gen_adversary",
        [](std::size_t n, std::uint64_t seed, std::uint64_t stream) {
          auto d = gen_adversary(n, seed, stream);
          return py::make_tuple(d.scores, d.labels);
        },
        "n"_a, "seed"_a = 0, "stream"_a = 0);
  m.def("platt_fit",
        [](const Doubles& s, const Ints& y) {
          const auto p = platt_fit(s, y);
          return py::make_tuple(p.slope, p.intercept);
        },
        "scores"_a, "labels"_a);
}
