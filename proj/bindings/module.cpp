#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reqgrid/backend.hpp"
#include "reqgrid/config.hpp"
#include "reqgrid/metrics.hpp"
#include "reqgrid/prompts.hpp"
#include "reqgrid/stats.hpp"
#include "reqgrid/variations.hpp"
#include "reqgrid/zsl.hpp"

namespace py = pybind11;
using namespace reqgrid;

namespace {

py::dict report_to_dict(const MetricReport& report) {
  py::dict per_class;
  for (const auto& [cls, m] : report.per_class) {
    py::dict entry;
    entry["P"] = m.precision;
    entry["R"] = m.recall;
    entry["F1"] = m.f1;
    entry["support"] = m.support;
    per_class[py::str(cls)] = entry;
  }
  py::dict out;
  out["per_class"] = per_class;
  out["wP"] = report.weighted_precision;
  out["wR"] = report.weighted_recall;
  out["wF1"] = report.weighted_f1;
  out["flags"] = report.flags;
  return out;
}

py::dict stat_to_dict(const StatTestResult& r) {
  py::dict out;
  out["method"] = stat_method_name(r.method);
  out["statistic"] = r.statistic;
  out["df"] = r.df ? py::object(py::int_(*r.df)) : py::object(py::none());
  out["p_value"] = r.p_value;
  out["n"] = r.n_effective;
  out["notes"] = r.notes;
  return out;
}

VariationKind variation_arg(const std::string& name) {
  auto v = variation_from_name(name);
  if (!v) throw py::value_error("unknown variation '" + name + "'");
  return *v;
}

}  // namespace

PYBIND11_MODULE(_reqgrid, m) {
  m.doc() = "zero-shot requirements-classification harness (C++ core)";

  // pipeline math
  m.def("sigmoid", &sigmoid, py::arg("z"));
  m.def("softmax", &softmax, py::arg("zs"));
  m.def("cosine", &cosine, py::arg("a"), py::arg("b"));

  m.def(
      "predict_inference",
      [](const std::string& kind, const std::vector<std::string>& roster,
         const std::vector<double>& scores, int positive_index) {
        TaskKind k = kind == "binary" ? TaskKind::Binary : TaskKind::Multiclass;
        Prediction p = predict_inference(k, roster, scores, positive_index);
        py::dict out;
        out["predicted"] = p.predicted;
        out["probabilities"] = p.probabilities;
        return out;
      },
      py::arg("kind"), py::arg("roster"), py::arg("scores"), py::arg("positive_index") = 0);

  // metrics
  m.def(
      "score_predictions",
      [](const std::vector<std::string>& preds, const std::vector<std::string>& golds,
         const std::vector<std::string>& classes) {
        return report_to_dict(score_predictions(preds, golds, classes));
      },
      py::arg("preds"), py::arg("golds"), py::arg("classes"));
  m.def("f1_score", &f1_score, py::arg("precision"), py::arg("recall"));
  m.def("weighted_mean", &weighted_mean, py::arg("values"), py::arg("supports"));

  // statistics
  m.def("chi_square_sf", &chi_square_sf, py::arg("x"), py::arg("df"));
  m.def(
      "friedman_test",
      [](const std::vector<std::vector<double>>& values) {
        return stat_to_dict(friedman_test(values));
      },
      py::arg("values"));
  m.def(
      "wilcoxon_signed_rank",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return stat_to_dict(wilcoxon_signed_rank(x, y));
      },
      py::arg("x"), py::arg("y"));
  m.def("partition_groups", &partition_groups, py::arg("n"));
  m.def("group_wf1", &group_wf1, py::arg("preds"), py::arg("golds"), py::arg("groups"),
        py::arg("roster"));
  m.def(
      "rank_rows",
      [](const std::vector<std::vector<double>>& values) { return rank_rows(values).ranks; },
      py::arg("values"));

  // prompt rendering
  m.def(
      "render_prompt",
      [](const std::string& pattern_id, const std::string& text, const std::string& label,
         bool with_default_definitions) {
        auto pattern = pattern_from_id(pattern_id);
        if (!pattern) throw py::value_error("unknown pattern id '" + pattern_id + "'");
        DefinitionLexicon defs = default_definitions();
        RenderedPrompt r =
            render_prompt(*pattern, text, label, with_default_definitions ? &defs : nullptr);
        py::dict out;
        out["context"] = r.context;
        out["continuation"] = r.continuation;
        out["answer_mode"] = r.answer_mode == AnswerMode::YesToken ? "yes" : "span";
        return out;
      },
      py::arg("pattern_id"), py::arg("text"), py::arg("label"),
      py::arg("with_default_definitions") = true);
  m.def("pattern_ids", [] {
    std::vector<std::string> ids;
    for (const auto& p : canonical_patterns()) ids.push_back(p.id());
    return ids;
  });

  // variations
  m.def(
      "apply_text_variation",
      [](const std::string& text, const std::string& kind) {
        return apply_text_variation(text, variation_arg(kind));
      },
      py::arg("text"), py::arg("kind"));
  m.def(
      "apply_label_variation",
      [](const std::string& label, const std::string& kind) {
        return apply_label_variation(label, variation_arg(kind));
      },
      py::arg("label"), py::arg("kind"));

  // mock backend
  m.def(
      "mock_score",
      [](const std::string& context, const std::string& continuation) {
        LabelLexicon lex = default_label_lexicons();
        return mock_score(context, continuation, lex);
      },
      py::arg("context"), py::arg("continuation"));
  m.def("mock_embed", &mock_embed, py::arg("text"), py::arg("dim") = 256);
}
