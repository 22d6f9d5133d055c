#include <doctest.h>

#include "pbn/model.hpp"

using pbn::PbnModel;

namespace {
const std::string kExample1 = std::string(PBN_DATA_DIR) + "/example1.pbn";
}

TEST_CASE("loads the bundled 4-gene example") {
  PbnModel model = pbn::load_model(kExample1);
  CHECK(model.gene_count() == 4);
  CHECK_FALSE(model.is_bn());
  for (int i = 0; i < 4; ++i) {
    CHECK(model.predictors(i).size() == 2);
    CHECK(model.predictors(i)[0].probability == doctest::Approx(0.5));
  }
  CHECK(pbn::validate(model).empty());
}

TEST_CASE("probability sum violation fails on load") {
  const std::string text =
      "genes: x0,x1\n"
      "x0: 0.5 :: x0\n"
      "x0: 0.4 :: !x0\n"
      "x1: x1\n";
  CHECK_THROWS_AS(pbn::parse_model(text), pbn::ModelIoError);
}

TEST_CASE("single-predictor file loads as a BN") {
  const std::string text =
      "genes: a,b\n"
      "a: !b\n"
      "b: a\n";
  PbnModel model = pbn::parse_model(text);
  CHECK(model.is_bn());
  CHECK(model.predictors(0)[0].probability == 1.0);
}

TEST_CASE("parse errors carry a line number") {
  CHECK_THROWS_WITH_AS(pbn::parse_model("genes: a\nb: a\n"),
                       doctest::Contains("line 2"), pbn::ModelIoError);
  CHECK_THROWS_WITH_AS(pbn::parse_model("a: 1\n"),
                       doctest::Contains("genes"), pbn::ModelIoError);
}

TEST_CASE("validate reports each violation") {
  using pbn::BoolExpr;
  std::vector<std::vector<pbn::Predictor>> preds(2);
  preds[0].push_back({BoolExpr::variable(0), -0.1});
  preds[0].push_back({BoolExpr::variable(1), 1.1});
  preds[1].push_back({BoolExpr::variable(2), 1.0});  // index 2 of 2 genes
  PbnModel model({"x0", "x1"}, std::move(preds));
  auto issues = pbn::validate(model);
  REQUIRE(issues.size() == 2);
  CHECK(issues[0].find("non-positive probability") != std::string::npos);
  CHECK(issues[1].find("variable out of range") != std::string::npos);
}

TEST_CASE("save/load round trip preserves structure") {
  PbnModel model = pbn::load_model(kExample1);
  std::string text = pbn::format_model(model);
  PbnModel reparsed = pbn::parse_model(text);
  CHECK(pbn::format_model(reparsed) == text);
  CHECK(reparsed.gene_count() == model.gene_count());
  for (int i = 0; i < model.gene_count(); ++i) {
    REQUIRE(reparsed.predictors(i).size() == model.predictors(i).size());
    for (std::size_t j = 0; j < model.predictors(i).size(); ++j) {
      for (std::uint64_t s = 0; s < 16; ++s)
        CHECK(reparsed.predictors(i)[j].expr.evaluate(s) ==
              model.predictors(i)[j].expr.evaluate(s));
    }
  }
}

TEST_CASE("random models are deterministic in the seed and validate") {
  for (std::uint64_t seed : {1ULL, 2ULL, 77ULL}) {
    PbnModel a = pbn::random_model(7, 3, 3, seed);
    PbnModel b = pbn::random_model(7, 3, 3, seed);
    CHECK(pbn::format_model(a) == pbn::format_model(b));
    CHECK(pbn::validate(a).empty());
    for (int i = 0; i < 7; ++i) {
      CHECK(a.predictors(i).size() == 3);
      CHECK(a.predictors(i)[0].expr.variables().size() <= 3);
    }
  }
  PbnModel bn = pbn::random_model(7, 3, 1, 1);
  CHECK(bn.is_bn());
  CHECK(pbn::validate(bn).empty());
}
