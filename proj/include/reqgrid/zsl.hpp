#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "reqgrid/corpus.hpp"

namespace reqgrid {

enum class Pipeline { Inference, Embedding };
enum class EmbeddingMode { Argmax, Threshold };

// Expert-curated term lists representing each class for the embedding
// pipeline.
struct LabelLexicon {
  std::map<std::string, std::vector<std::string>> entries;

  const std::vector<std::string>* terms_for(const std::string& class_name) const;
};

struct Prediction {
  std::string requirement_id;
  std::vector<std::string> classes;      // roster order
  std::vector<double> raw_scores;        // aligned with classes
  std::vector<double> probabilities;     // aligned with classes
  std::string predicted;                 // empty when abstained
  bool abstained = false;
  Pipeline pipeline = Pipeline::Inference;
};

double sigmoid(double z);

// Numerically stable softmax (max subtraction); requires length >= 2.
std::vector<double> softmax(const std::vector<double>& zs);

// Multiclass: softmax over scores, argmax. Binary: the positive class wins
// iff score(positive) - score(other) > 0, with probability sigmoid of the
// difference. Ties go to the earliest roster class.
Prediction predict_inference(TaskKind kind, const std::vector<std::string>& roster,
                             const std::vector<double>& scores, int positive_index = 0);

double cosine(const std::vector<double>& a, const std::vector<double>& b);

// Similarities land in `probabilities` unnormalized. Threshold mode abstains
// when no similarity exceeds the threshold.
Prediction classify_embedding(const std::vector<double>& req_vec,
                              const std::vector<std::string>& roster,
                              const std::vector<std::vector<double>>& label_vecs,
                              EmbeddingMode mode, double threshold = 0.5);

// Mean of per-term embeddings, L2-normalized.
std::vector<double> label_vector(const std::vector<std::string>& lexicon_terms,
                                 const std::function<std::vector<double>(const std::string&)>& embed);

}  // namespace reqgrid
