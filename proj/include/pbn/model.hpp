#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbn/expr.hpp"

namespace pbn {

/// One candidate update function of a gene together with the probability
/// of being the one applied in an asynchronous update of that gene.
struct Predictor {
  BoolExpr expr;
  double probability = 1.0;
};

/// A probabilistic Boolean network: per gene, one or more predictors whose
/// selection probabilities sum to 1. A network with exactly one predictor
/// per gene is an ordinary Boolean network. Immutable after construction.
class PbnModel {
public:
  PbnModel(std::vector<std::string> gene_names,
           std::vector<std::vector<Predictor>> predictors);

  int gene_count() const { return static_cast<int>(gene_names_.size()); }
  bool is_bn() const;
  const std::vector<std::string>& gene_names() const { return gene_names_; }
  const std::vector<Predictor>& predictors(int gene) const {
    return predictors_.at(gene);
  }

private:
  std::vector<std::string> gene_names_;
  std::vector<std::vector<Predictor>> predictors_;
};

/// Structural checks: probability sums (abs tolerance 1e-9), positive
/// probabilities, variable indices in range, at least one predictor per
/// gene. Returns one message per violation; empty means valid.
std::vector<std::string> validate(const PbnModel& model);

struct ModelIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Line-oriented text format:
///   genes: x0,x1,...
///   <gene>: <prob> :: <expr>     (PBN predictor)
///   <gene>: <expr>               (BN predictor, probability 1)
/// '#' starts a comment. Validation runs on load.
PbnModel load_model(const std::string& path);
void save_model(const PbnModel& model, const std::string& path);

PbnModel parse_model(const std::string& text);
std::string format_model(const PbnModel& model);

/// Deterministic random model: each predictor is a random expression over
/// at most max_parents parent genes; selection probabilities are uniform.
PbnModel random_model(int n, int max_parents, int predictors_per_gene,
                      std::uint64_t seed);

}  // namespace pbn
