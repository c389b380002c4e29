// Python bindings for the core operations. Posterior samples cross the
// boundary as (M, K) float64 arrays.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "uaeval/errors.h"
#include "uaeval/io.h"
#include "uaeval/irn.h"
#include "uaeval/metrics.h"
#include "uaeval/pl_gibbs.h"
#include "uaeval/pl_likelihood.h"
#include "uaeval/prirn.h"
#include "uaeval/rankings.h"
#include "uaeval/runner.h"
#include "uaeval/selfcheck.h"
#include "uaeval/simple_models.h"

namespace py = pybind11;

namespace uaeval {
namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array ToArray(const PosteriorSamples& samples) {
  Array out({samples.num_samples(), samples.num_classes()});
  std::copy(samples.values().begin(), samples.values().end(),
            out.mutable_data());
  return out;
}

PosteriorSamples FromArray(const Array& values) {
  if (values.ndim() != 2 || values.shape(0) < 1 || values.shape(1) < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "samples must be a non-empty (M, K) array");
  }
  const auto m = values.shape(0), k = values.shape(1);
  PosteriorSamples samples(static_cast<int>(k), {"external", 0.0, 0});
  for (py::ssize_t i = 0; i < m; ++i) {
    samples.Append({values.data() + i * k, static_cast<size_t>(k)});
  }
  return samples;
}

PredictionSet Prediction(const std::vector<ClassId>& ranked) {
  return {"", ranked};
}

}  // namespace
}  // namespace uaeval

PYBIND11_MODULE(_core, m) {
  using namespace uaeval;
  m.doc() = "Ranked-annotation aggregation and uncertainty-adjusted metrics";

  py::register_exception<Error>(m, "UaevalError", PyExc_ValueError);

  py::class_<PartialRanking>(m, "PartialRanking")
      .def(py::init(&PartialRanking::Create), py::arg("num_classes"),
           py::arg("blocks"))
      .def_property_readonly("num_classes", &PartialRanking::num_classes)
      .def_property_readonly(
          "ranked_blocks",
          [](const PartialRanking& r) {
            return std::vector<std::vector<ClassId>>(r.RankedBlocks().begin(),
                                                     r.RankedBlocks().end());
          })
      .def_property_readonly(
          "blocks",
          [](const PartialRanking& r) {
            return std::vector<std::vector<ClassId>>(r.Blocks().begin(),
                                                     r.Blocks().end());
          })
      .def("is_full_ranking", &PartialRanking::IsFullRanking)
      .def("soft_permutation", &ToSoftPermutation)
      .def(py::self == py::self)
      .def("__repr__", [](const PartialRanking& r) {
        std::string out = "PartialRanking(" + std::to_string(r.num_classes()) +
                          ", [";
        for (size_t b = 0; b < r.RankedBlocks().size(); ++b) {
          out += b ? ", [" : "[";
          const auto& block = r.RankedBlocks()[b];
          for (size_t i = 0; i < block.size(); ++i) {
            out += (i ? ", " : "") + std::to_string(block[i]);
          }
          out += "]";
        }
        return out + "])";
      });

  m.def(
      "irn_aggregate",
      [](const std::vector<PartialRanking>& rankings) {
        const IrnScores s = IrnAggregate(rankings);
        return py::make_tuple(s.normalized, s.unnormalized);
      },
      py::arg("rankings"),
      "IRN scores as (normalized, unnormalized).");
  m.def("top1_label", [](const std::vector<double>& s) { return Top1Label(s); });

  m.def(
      "prirn_sample",
      [](const std::vector<PartialRanking>& rankings, double gamma,
         int num_samples, uint64_t seed) {
        return ToArray(PrIrnSample(rankings, gamma, num_samples, seed));
      },
      py::arg("rankings"), py::arg("gamma"), py::arg("num_samples") = 1000,
      py::arg("seed") = 0);

  m.def(
      "pl_log_prob",
      [](const std::vector<double>& lambda, const PartialRanking& r) {
        return PlPartialRankingLogProb(lambda, r);
      },
      py::arg("lam"), py::arg("ranking"));
  m.def(
      "pl_log_likelihood",
      [](const std::vector<double>& lambda,
         const std::vector<PartialRanking>& rankings, int repetitions) {
        return PlLogLikelihoodMulti(lambda, rankings, repetitions);
      },
      py::arg("lam"), py::arg("rankings"), py::arg("repetitions") = 1);

  m.def(
      "gibbs_run",
      [](const std::vector<PartialRanking>& rankings, int num_classes,
         int num_samples, int burn_in, int thin, int repetitions, double alpha,
         double beta, uint64_t seed) {
        GibbsConfig config;
        config.alpha = alpha;
        config.beta = beta;
        config.burn_in = burn_in;
        config.thin = thin;
        config.iterations = burn_in + num_samples * thin;
        config.repetitions = repetitions;
        config.seed = seed;
        PosteriorSamples samples = [&] {
          py::gil_scoped_release release;
          return GibbsRun(rankings, num_classes, config);
        }();
        return ToArray(samples);
      },
      py::arg("rankings"), py::arg("num_classes"), py::arg("num_samples") = 1000,
      py::arg("burn_in") = 500, py::arg("thin") = 1, py::arg("repetitions") = 1,
      py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("seed") = 0);

  m.def(
      "dirichlet_from_counts",
      [](const std::vector<int>& counts, double gamma, double alpha_prior,
         int num_samples, uint64_t seed) {
        return ToArray(DirichletFromCounts({counts, gamma, alpha_prior},
                                           num_samples, seed));
      },
      py::arg("counts"), py::arg("gamma") = 1.0, py::arg("alpha_prior") = 0.01,
      py::arg("num_samples") = 1000, py::arg("seed") = 0);

  m.def(
      "score_threshold_certainty",
      [](const std::vector<double>& scores, double threshold, int num_samples,
         uint64_t seed, bool mean_probability) {
        const ScoreModel model{MomentMatchedPrior(scores), threshold};
        const auto r = ScoreThresholdCertainty(
            scores, model, num_samples, seed,
            mean_probability ? ThresholdAveraging::kMeanProbability
                             : ThresholdAveraging::kWinnerFrequency);
        return py::dict(py::arg("certainty") = r.certainty,
                        py::arg("mean_prob_below") = r.mean_prob_below,
                        py::arg("below_wins") = r.below_wins);
      },
      py::arg("scores"), py::arg("threshold") = 0.0,
      py::arg("num_samples") = 1000, py::arg("seed") = 0,
      py::arg("mean_probability") = false);

  m.def(
      "annotation_certainty",
      [](const Array& s, int j) {
        return AnnotationCertaintyTopJ(FromArray(s), j);
      },
      py::arg("samples"), py::arg("j") = 1);
  m.def(
      "ua_topk_accuracy",
      [](const Array& s, const std::vector<ClassId>& ranked, int k) {
        return UaTopKAccuracy(FromArray(s), Prediction(ranked), k);
      },
      py::arg("samples"), py::arg("ranked"), py::arg("k"));
  m.def(
      "ua_set_accuracy",
      [](const Array& s, const std::vector<ClassId>& ranked, int k) {
        return UaSetAccuracy(FromArray(s), Prediction(ranked), k);
      },
      py::arg("samples"), py::arg("ranked"), py::arg("k"));
  m.def(
      "ua_average_overlap",
      [](const Array& s, const std::vector<ClassId>& ranked, int depth) {
        return UaAverageOverlap(FromArray(s), Prediction(ranked), depth);
      },
      py::arg("samples"), py::arg("ranked"), py::arg("depth"));
  m.def("mean_average_overlap", &MeanAverageOverlapPartial, py::arg("a"),
        py::arg("b"), py::arg("depth"));
  m.def("loo_agreement", [](const std::vector<PartialRanking>& rankings) {
    return LooAgreement(rankings);
  });
  m.def(
      "risk_metrics",
      [](const Array& s, const std::vector<int>& risk,
         std::optional<std::vector<ClassId>> ranked) {
        const auto samples = FromArray(s);
        std::optional<PredictionSet> prediction;
        if (ranked) prediction = Prediction(*ranked);
        const RiskReport r =
            RiskMetrics(samples, risk, prediction ? &*prediction : nullptr);
        py::dict out;
        out["risk_certainty"] = r.risk_certainty;
        out["expected_risk_mean"] = r.expected_risk_mean;
        out["expected_risk_min"] = r.expected_risk_min;
        out["expected_risk_max"] = r.expected_risk_max;
        out["risk_accuracy"] = r.risk_accuracy;
        return out;
      },
      py::arg("samples"), py::arg("risk"), py::arg("ranked") = py::none());

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_static("for_model", &RunConfig::ForModel)
      .def_readwrite("model", &RunConfig::model)
      .def_readwrite("reliabilities", &RunConfig::reliabilities)
      .def_readwrite("num_samples", &RunConfig::num_samples)
      .def_readwrite("burn_in", &RunConfig::burn_in)
      .def_readwrite("thin", &RunConfig::thin)
      .def_readwrite("alpha", &RunConfig::alpha)
      .def_readwrite("beta", &RunConfig::beta)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("k_grid", &RunConfig::k_grid)
      .def_readwrite("overlap_depth", &RunConfig::overlap_depth)
      .def_readwrite("histogram_bins", &RunConfig::histogram_bins)
      .def_readwrite("score_threshold", &RunConfig::score_threshold)
      .def_readwrite("count_prior", &RunConfig::count_prior)
      .def_readwrite("workers", &RunConfig::workers)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_property(
          "stage",
          [](const RunConfig& c) {
            switch (c.stage) {
              case RunStage::kAggregate:
                return "aggregate";
              case RunStage::kCertainty:
                return "certainty";
              case RunStage::kEvaluate:
                break;
            }
            return "evaluate";
          },
          [](RunConfig& c, const std::string& stage) {
            if (stage == "aggregate") {
              c.stage = RunStage::kAggregate;
            } else if (stage == "certainty") {
              c.stage = RunStage::kCertainty;
            } else if (stage == "evaluate") {
              c.stage = RunStage::kEvaluate;
            } else {
              throw Error(ErrorCode::kConfigError, "unknown stage " + stage);
            }
          })
      .def("validate", &RunConfig::Validate);

  m.def(
      "run",
      [](const RunConfig& config, const std::filesystem::path& cases,
         const std::filesystem::path& annotations,
         std::optional<std::filesystem::path> predictions,
         std::optional<std::filesystem::path> classes_path) {
        std::optional<ClassSpace> classes;
        if (classes_path) classes = LoadClassSpace(*classes_path);
        const auto records = Ingest(cases, annotations, predictions,
                                    classes ? &*classes : nullptr);
        RunResult result;
        {
          py::gil_scoped_release release;
          result = Run(config, records, classes ? &*classes : nullptr);
        }
        py::list failures;
        for (const auto& f : result.failures) {
          failures.append(py::dict(py::arg("case_id") = f.case_id,
                                   py::arg("reliability") = f.reliability,
                                   py::arg("error") = f.error));
        }
        return py::dict(py::arg("reports") = result.reports,
                        py::arg("summary") = result.summary,
                        py::arg("manifest") = result.manifest,
                        py::arg("failures") = failures);
      },
      py::arg("config"), py::arg("cases"), py::arg("annotations"),
      py::arg("predictions") = py::none(), py::arg("classes") = py::none(),
      "Ingest line-delimited files and write reports under config.output_dir.");

  m.def(
      "selfcheck",
      [](uint64_t seed) {
        SelfcheckOptions options;
        options.seed = seed;
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const auto& s : RunSelfcheck(options)) {
          out.emplace_back(s.name, s.passed, s.detail);
        }
        return out;
      },
      py::arg("seed") = SelfcheckOptions{}.seed,
      "Oracle-equivalence suites as (name, passed, detail) tuples.");
}
