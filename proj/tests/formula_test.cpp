#include <gtest/gtest.h>

#include "ipd/error.hpp"
#include "ipd/formula.hpp"

namespace ipd {
namespace {

TEST(ParseFormula, SingleCovariate) {
  const auto f = parse_formula("Y - f ~ X1");
  EXPECT_EQ(f.observed, "Y");
  EXPECT_EQ(f.predicted, "f");
  EXPECT_EQ(f.covariates, (std::vector<std::string>{"X1"}));
  EXPECT_TRUE(f.intercept);
}

TEST(ParseFormula, CovariateOrderPreserved) {
  const auto f = parse_formula("Y - f ~ X1 + X2 + X3");
  EXPECT_EQ(f.covariates, (std::vector<std::string>{"X1", "X2", "X3"}));
  EXPECT_EQ(parse_formula("Y - f ~ X3 + X1").covariates,
            (std::vector<std::string>{"X3", "X1"}));
}

TEST(ParseFormula, MissingPredictedIsParseError) {
  EXPECT_THROW(parse_formula("Y ~ X1"), ParseError);
}

TEST(ParseFormula, EqualsSeparatorAndWhitespace) {
  EXPECT_EQ(parse_formula("Y-f=X1+X2"), parse_formula("  Y  -  f  ~  X1 +   X2 "));
}

TEST(ParseFormula, EmptyRightHandSide) {
  EXPECT_TRUE(parse_formula("Y - f ~ 1").covariates.empty());
  EXPECT_TRUE(parse_formula("Y - f ~").covariates.empty());
  EXPECT_EQ(parse_formula("Y - f ~ 1 + X1").covariates, (std::vector<std::string>{"X1"}));
}

TEST(ParseFormula, Errors) {
  EXPECT_THROW(parse_formula(""), ParseError);
  EXPECT_THROW(parse_formula("Y - f"), ParseError);
  EXPECT_THROW(parse_formula("Y - f ~ X1 ~ X2"), ParseError);
  EXPECT_THROW(parse_formula("Y - f ~ X1 + X1"), ValidationError);
  EXPECT_THROW(parse_formula("Y - Y ~ X1"), ValidationError);
  EXPECT_THROW(parse_formula("Y - f ~ f"), ValidationError);
  EXPECT_THROW(parse_formula("Y - f ~ X1 +"), ParseError);
  EXPECT_THROW(parse_formula("Y - f ~ X2^2"), ParseError);
}

TEST(ParseFormula, RenderRoundTrip) {
  for (const char* text : {"Y - f ~ X1", "outcome - pred ~ a + b.c + d_e", "Y - f ~ 1",
                           "Y-f=X1+X2+X3"}) {
    const auto f = parse_formula(text);
    EXPECT_EQ(parse_formula(render_formula(f)), f) << text;
  }
  EXPECT_EQ(render_formula(parse_formula("Y-f=X1+X2")), "Y - f ~ X1 + X2");
}

}  // namespace
}  // namespace ipd
