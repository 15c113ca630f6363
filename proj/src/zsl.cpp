#include "reqgrid/zsl.hpp"

#include <algorithm>
#include <cmath>

#include "reqgrid/error.hpp"
#include "reqgrid/strings.hpp"

namespace reqgrid {

const std::vector<std::string>* LabelLexicon::terms_for(const std::string& class_name) const {
  auto it = entries.find(class_name);
  if (it != entries.end()) return &it->second;
  const std::string wanted = to_lower(class_name);
  for (const auto& [key, value] : entries)
    if (to_lower(key) == wanted) return &value;
  return nullptr;
}

double sigmoid(double z) {
  // Split on sign so exp never overflows.
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> softmax(const std::vector<double>& zs) {
  if (zs.size() < 2) throw config_error("softmax needs at least 2 components");
  double max_z = *std::max_element(zs.begin(), zs.end());
  std::vector<double> out(zs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    out[i] = std::exp(zs[i] - max_z);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

Prediction predict_inference(TaskKind kind, const std::vector<std::string>& roster,
                             const std::vector<double>& scores, int positive_index) {
  if (roster.size() != scores.size() || roster.empty())
    throw config_error("predict_inference: one score per roster class required");
  for (double s : scores)
    if (!std::isfinite(s)) throw config_error("predict_inference: non-finite score");

  Prediction pred;
  pred.classes = roster;
  pred.raw_scores = scores;
  pred.pipeline = Pipeline::Inference;

  if (kind == TaskKind::Binary) {
    if (roster.size() != 2) throw config_error("predict_inference: binary task needs 2 classes");
    if (positive_index < 0 || positive_index > 1)
      throw config_error("predict_inference: positive_index out of range");
    int other_index = 1 - positive_index;
    double z = scores[positive_index] - scores[other_index];
    double p_pos = sigmoid(z);
    pred.probabilities.assign(2, 0.0);
    pred.probabilities[positive_index] = p_pos;
    pred.probabilities[other_index] = 1.0 - p_pos;
    if (z > 0.0) {
      pred.predicted = roster[positive_index];
    } else if (z < 0.0) {
      pred.predicted = roster[other_index];
    } else {
      pred.predicted = roster[0];  // tie: earliest roster class
    }
  } else {
    pred.probabilities = softmax(scores);
    std::size_t best = 0;
    for (std::size_t i = 1; i < pred.probabilities.size(); ++i)
      if (pred.probabilities[i] > pred.probabilities[best]) best = i;
    pred.predicted = roster[best];
  }
  return pred;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw config_error("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw config_error("cosine: zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

Prediction classify_embedding(const std::vector<double>& req_vec,
                              const std::vector<std::string>& roster,
                              const std::vector<std::vector<double>>& label_vecs,
                              EmbeddingMode mode, double threshold) {
  if (roster.size() != label_vecs.size() || roster.empty())
    throw config_error("classify_embedding: one label vector per roster class required");

  Prediction pred;
  pred.classes = roster;
  pred.pipeline = Pipeline::Embedding;
  pred.probabilities.reserve(roster.size());
  for (const auto& lv : label_vecs) pred.probabilities.push_back(cosine(req_vec, lv));
  pred.raw_scores = pred.probabilities;

  std::size_t best = 0;
  for (std::size_t i = 1; i < pred.probabilities.size(); ++i)
    if (pred.probabilities[i] > pred.probabilities[best]) best = i;

  if (mode == EmbeddingMode::Threshold && !(pred.probabilities[best] > threshold)) {
    pred.abstained = true;
  } else {
    pred.predicted = roster[best];
  }
  return pred;
}

std::vector<double> label_vector(const std::vector<std::string>& lexicon_terms,
                                 const std::function<std::vector<double>(const std::string&)>& embed) {
  if (lexicon_terms.empty()) throw config_error("label_vector: empty term list");
  std::vector<double> mean;
  for (const auto& term : lexicon_terms) {
    std::vector<double> v = embed(term);
    if (mean.empty()) mean.assign(v.size(), 0.0);
    if (v.size() != mean.size()) throw config_error("label_vector: embedding dimension mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
  }
  double norm = 0.0;
  for (double& c : mean) {
    c /= static_cast<double>(lexicon_terms.size());
    norm += c * c;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) throw config_error("label_vector: zero mean vector");
  for (double& c : mean) c /= norm;
  return mean;
}

}  // namespace reqgrid
