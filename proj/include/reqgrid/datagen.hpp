#pragma once

#include <string>
#include <vector>

#include "reqgrid/corpus.hpp"

namespace reqgrid {

// Deterministic synthetic corpora with the canonical shapes of the three
// public requirement datasets (the real texts are not redistributable):
//   promise.csv            625 rows, scheme "promise", 12 labels
//   functional_quality.csv 956 rows, schemes "functional" + "quality"
//   secreq.csv             510 rows, scheme "secreq" (sec 187 / nonsec 323)
// Texts carry class-typical vocabulary so mock-backend runs produce
// non-degenerate confusion matrices.
std::vector<Requirement> sample_promise();
std::vector<Requirement> sample_functional_quality();
std::vector<Requirement> sample_secreq();

// Writes the three CSV files into `dir` (created if missing).
void write_sample_data(const std::string& dir);

}  // namespace reqgrid
