#include "pbn/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace pbn {

PbnModel::PbnModel(std::vector<std::string> gene_names,
                   std::vector<std::vector<Predictor>> predictors)
    : gene_names_(std::move(gene_names)), predictors_(std::move(predictors)) {
  if (gene_names_.size() != predictors_.size())
    throw std::invalid_argument("gene name / predictor list size mismatch");
}

bool PbnModel::is_bn() const {
  return std::all_of(predictors_.begin(), predictors_.end(),
                     [](const auto& p) { return p.size() == 1; });
}

std::vector<std::string> validate(const PbnModel& model) {
  std::vector<std::string> issues;
  const int n = model.gene_count();
  for (int i = 0; i < n; ++i) {
    const auto& preds = model.predictors(i);
    const std::string& name = model.gene_names()[i];
    if (preds.empty()) {
      issues.push_back("gene " + name + ": no predictors");
      continue;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < preds.size(); ++j) {
      const Predictor& p = preds[j];
      if (p.probability <= 0.0)
        issues.push_back("gene " + name + " predictor " + std::to_string(j) +
                         ": non-positive probability");
      sum += p.probability;
      if (p.expr.max_variable() >= n)
        issues.push_back("gene " + name + " predictor " + std::to_string(j) +
                         ": variable out of range");
    }
    if (std::abs(sum - 1.0) > 1e-9)
      issues.push_back("gene " + name + ": probabilities sum to " +
                       std::to_string(sum) + ", expected 1");
  }
  return issues;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_line(int line_no, const std::string& what) {
  throw ModelIoError("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

PbnModel parse_model(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<std::string> names;
  std::vector<std::vector<Predictor>> predictors;
  bool saw_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (!saw_header) {
      if (line.rfind("genes:", 0) != 0)
        fail_line(line_no, "expected 'genes:' header");
      std::istringstream names_in(line.substr(6));
      std::string name;
      while (std::getline(names_in, name, ',')) {
        name = trim(name);
        if (name.empty()) fail_line(line_no, "empty gene name");
        if (std::find(names.begin(), names.end(), name) != names.end())
          fail_line(line_no, "duplicate gene name '" + name + "'");
        names.push_back(name);
      }
      if (names.empty()) fail_line(line_no, "no genes declared");
      predictors.resize(names.size());
      saw_header = true;
      continue;
    }

    std::size_t colon = line.find(':');
    if (colon == std::string::npos)
      fail_line(line_no, "expected '<gene>: ...'");
    std::string gene = trim(line.substr(0, colon));
    auto it = std::find(names.begin(), names.end(), gene);
    if (it == names.end())
      fail_line(line_no, "unknown gene '" + gene + "'");
    int gene_idx = static_cast<int>(it - names.begin());

    std::string rest = line.substr(colon + 1);
    double prob = 1.0;
    std::string expr_text;
    std::size_t sep = rest.find("::");
    if (sep != std::string::npos) {
      std::string prob_text = trim(rest.substr(0, sep));
      if (!prob_text.empty()) {
        try {
          std::size_t used = 0;
          prob = std::stod(prob_text, &used);
          if (used != prob_text.size()) throw std::invalid_argument(prob_text);
        } catch (const std::exception&) {
          fail_line(line_no, "bad probability '" + prob_text + "'");
        }
      }
      expr_text = trim(rest.substr(sep + 2));
    } else {
      expr_text = trim(rest);
    }

    try {
      predictors[gene_idx].push_back({parse_expression(expr_text, names), prob});
    } catch (const ParseError& e) {
      fail_line(line_no, e.what());
    }
  }

  if (!saw_header) throw ModelIoError("empty model file");
  PbnModel model(std::move(names), std::move(predictors));
  auto issues = validate(model);
  if (!issues.empty()) {
    std::string joined = "validation failed: ";
    for (std::size_t i = 0; i < issues.size(); ++i) {
      if (i) joined += "; ";
      joined += issues[i];
    }
    throw ModelIoError(joined);
  }
  return model;
}

std::string format_model(const PbnModel& model) {
  std::ostringstream out;
  out << "genes: ";
  for (int i = 0; i < model.gene_count(); ++i) {
    if (i) out << ",";
    out << model.gene_names()[i];
  }
  out << "\n";
  const bool bn = model.is_bn();
  out.precision(17);
  for (int i = 0; i < model.gene_count(); ++i) {
    for (const Predictor& p : model.predictors(i)) {
      out << model.gene_names()[i] << ": ";
      if (!bn) out << p.probability << " :: ";
      out << p.expr.to_string(model.gene_names()) << "\n";
    }
  }
  return out.str();
}

PbnModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelIoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

void save_model(const PbnModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelIoError("cannot open '" + path + "' for writing");
  out << format_model(model);
}

namespace {

BoolExpr random_expr(const std::vector<int>& parents, int budget,
                     std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coin(0, 3);
  if (budget <= 1 || coin(rng) == 0) {
    std::uniform_int_distribution<std::size_t> pick(0, parents.size() - 1);
    BoolExpr leaf = BoolExpr::variable(parents[pick(rng)]);
    if (coin(rng) < 2) leaf = BoolExpr::negation(std::move(leaf));
    return leaf;
  }
  int left = 1 + static_cast<int>(
                     std::uniform_int_distribution<int>(0, budget - 2)(rng));
  BoolExpr lhs = random_expr(parents, left, rng);
  BoolExpr rhs = random_expr(parents, budget - left, rng);
  if (coin(rng) < 2)
    return BoolExpr::conjunction(std::move(lhs), std::move(rhs));
  return BoolExpr::disjunction(std::move(lhs), std::move(rhs));
}

}  // namespace

PbnModel random_model(int n, int max_parents, int predictors_per_gene,
                      std::uint64_t seed) {
  if (n < 1 || max_parents < 1 || max_parents > n || predictors_per_gene < 1)
    throw std::invalid_argument("random_model: bad arguments");
  std::mt19937_64 rng(seed);
  std::vector<std::string> names;
  names.reserve(n);
  for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));

  std::vector<std::vector<Predictor>> predictors(n);
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < predictors_per_gene; ++j) {
      std::shuffle(all.begin(), all.end(), rng);
      int k = std::uniform_int_distribution<int>(1, max_parents)(rng);
      std::vector<int> parents(all.begin(), all.begin() + k);
      BoolExpr expr = random_expr(parents, k, rng);
      predictors[i].push_back({std::move(expr), 1.0 / predictors_per_gene});
    }
  }
  return PbnModel(std::move(names), std::move(predictors));
}

}  // namespace pbn
