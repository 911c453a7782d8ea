#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ipd/dataset.hpp"
#include "ipd/error.hpp"

namespace ipd {
namespace {

const Formula kFormula = parse_formula("Y - f ~ X1");

StackedDataset load(const std::string& text, const Formula& formula = kFormula) {
  std::istringstream in(text);
  return load_stacked(in, "set", formula);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

TEST(LoadStacked, ValidDataset) {
  const auto d = load(
      "set,Y,f,X1\n"
      "labeled,1.5,1.0,0.1\n"
      "labeled,2.5,2.0,0.2\n"
      "unlabeled,NA,3.0,0.3\n"
      "unlabeled,,4.0,0.4\n");
  EXPECT_EQ(d.rows(), 4u);
  EXPECT_EQ(d.count(RowLabel::kLabeled), 2u);
  EXPECT_EQ(d.count(RowLabel::kUnlabeled), 2u);
  EXPECT_DOUBLE_EQ(d.frame().column("Y")[1], 2.5);
  EXPECT_TRUE(is_missing(d.frame().column("Y")[2]));
  EXPECT_TRUE(is_missing(d.frame().column("Y")[3]));
}

TEST(LoadStacked, LabeledMissingOutcomeRejected) {
  EXPECT_THROW(load("set,Y,f,X1\nlabeled,NA,1,0\nunlabeled,NA,1,0\n"), ValidationError);
}

TEST(LoadStacked, MissingPredictionRejected) {
  EXPECT_THROW(load("set,Y,f,X1\nlabeled,1,1,0\nunlabeled,NA,NA,0\n"), ValidationError);
  // Training rows may lack a prediction.
  EXPECT_NO_THROW(load("set,Y,f,X1\ntraining,1,NA,0\nlabeled,1,1,0\nunlabeled,NA,1,0\n"));
}

TEST(LoadStacked, SchemaErrorListsMissingColumns) {
  try {
    load("set,Y,X9\nlabeled,1,0\n", parse_formula("Y - f ~ X1 + X2"));
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.missing_columns(), (std::vector<std::string>{"f", "X1", "X2"}));
  }
  std::istringstream in("Y,f,X1\n1,1,1\n");
  EXPECT_THROW(load_stacked(in, "set", kFormula), SchemaError);
}

TEST(LoadStacked, NonNumericTokenNamesRow) {
  try {
    load("set,Y,f,X1\nlabeled,1,1,0\nlabeled,1,abc,0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(LoadStacked, UnknownLabelRejected) {
  EXPECT_THROW(load("set,Y,f,X1\nlabelled,1,1,0\n"), ValidationError);
}

TEST(LoadStacked, RaggedRowRejected) {
  EXPECT_THROW(load("set,Y,f,X1\nlabeled,1,1\n"), ParseError);
}

TEST(LoadStacked, QuotedFieldsAndCrlf) {
  const auto d = load("\"set\",\"Y\",\"f\",\"X1\"\r\n\"labeled\",1,2,3\r\n\"unlabeled\",NA,2,3\r\n");
  EXPECT_EQ(d.count(RowLabel::kLabeled), 1u);
  EXPECT_DOUBLE_EQ(d.frame().column("X1")[0], 3.0);
}

TEST(Split, CountsAndDropsTraining) {
  std::string text = "set,Y,f,X1\n";
  for (int i = 0; i < 5; ++i) text += "training,1,NA,0\n";
  for (int i = 0; i < 3; ++i) text += "labeled," + std::to_string(i) + ",1,0\n";
  for (int i = 0; i < 4; ++i) text += "unlabeled,NA,1," + std::to_string(i) + "\n";
  const auto s = split(load(text));
  EXPECT_EQ(s.n(), 3u);
  EXPECT_EQ(s.N(), 4u);
  EXPECT_DOUBLE_EQ(s.labeled.column("Y")[2], 2.0);
  EXPECT_DOUBLE_EQ(s.unlabeled.column("X1")[3], 3.0);
}

TEST(Split, NeedsBothSides) {
  EXPECT_THROW(split(load("set,Y,f,X1\nlabeled,1,1,0\nlabeled,2,1,0\n")), ValidationError);
  EXPECT_THROW(split(load("set,Y,f,X1\nunlabeled,NA,1,0\n")), ValidationError);
}

TEST(Split, IsAPartition) {
  std::mt19937_64 gen(11);
  std::string text = "set,Y,f,X1\n";
  const char* names[] = {"training", "labeled", "unlabeled"};
  std::size_t non_training = 0;
  double y_sum = 0;
  for (int i = 0; i < 300; ++i) {
    const int k = i < 2 ? i + 1 : static_cast<int>(gen() % 3);
    text += std::string(names[k]) + "," + std::to_string(i) + ",1,0\n";
    if (k != 0) {
      ++non_training;
      y_sum += i;
    }
  }
  const auto s = split(load(text));
  EXPECT_EQ(s.n() + s.N(), non_training);
  double seen = 0;
  for (double v : s.labeled.column("Y")) seen += v;
  for (double v : s.unlabeled.column("Y")) seen += v;
  EXPECT_EQ(seen, y_sum);
}

TEST(DesignMatrix, InterceptAndColumnSelection) {
  const auto d = load("set,Y,f,X1\nlabeled,1,10,0.5\nlabeled,2,20,1.5\nlabeled,3,30,2.5\n"
                      "unlabeled,NA,40,3.5\n");
  const auto s = split(d);
  const auto dm = design_matrix(s.labeled, kFormula, Outcome::kObserved);
  ASSERT_EQ(dm.x.rows(), 3);
  ASSERT_EQ(dm.x.cols(), 2);
  EXPECT_TRUE((dm.x.col(0).array() == 1.0).all());
  EXPECT_DOUBLE_EQ(dm.x(2, 1), 2.5);
  EXPECT_DOUBLE_EQ(dm.y(1), 2.0);

  const auto du = design_matrix(s.unlabeled, kFormula, Outcome::kPredicted);
  EXPECT_DOUBLE_EQ(du.y(0), 40.0);
  EXPECT_THROW(design_matrix(s.unlabeled, kFormula, Outcome::kObserved), ValidationError);
}

TEST(DesignMatrix, NonFiniteCovariate) {
  const auto d = load("set,Y,f,X1\nlabeled,1,1,NA\nunlabeled,NA,1,0\n");
  EXPECT_THROW(design_matrix(split(d).labeled, kFormula, Outcome::kObserved), ValidationError);
}

TEST(StackSeparate, SynthesizesLabels) {
  std::istringstream lin("Y,f,X1\n1,1.5,0\n2,2.5,1\n");
  std::istringstream uin("f,X1\n3,2\n4,3\n5,4\n");
  const auto d = stack_separate(read_frame_csv(lin), read_frame_csv(uin), kFormula);
  EXPECT_EQ(d.label_column(), "set");
  EXPECT_EQ(d.count(RowLabel::kLabeled), 2u);
  EXPECT_EQ(d.count(RowLabel::kUnlabeled), 3u);
  EXPECT_TRUE(is_missing(d.frame().column("Y")[4]));

  std::istringstream bad("f\n3\n");
  std::istringstream lin2("Y,f,X1\n1,1.5,0\n");
  EXPECT_THROW(stack_separate(read_frame_csv(lin2), read_frame_csv(bad), kFormula), SchemaError);
}

// Property: write_csv / read_stacked_csv preserves every finite value bit for
// bit and every missing value as missing.
TEST(CsvRoundTrip, BitExactProperty) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> expo(-300, 300);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t rows = 1 + gen() % 40;
    Frame frame;
    for (const char* name : {"Y", "f", "X1", "X2"}) {
      std::vector<double> col(rows);
      for (auto& v : col) {
        switch (gen() % 6) {
          case 0:
            v = kMissing;
            break;
          case 1:
            v = z(gen) * std::pow(10.0, expo(gen));
            break;
          case 2:
            v = std::nextafter(z(gen), 1e300);
            break;
          case 3:
            v = -0.0;
            break;
          default:
            v = z(gen);
        }
      }
      frame.add_column(name, std::move(col));
    }
    std::vector<RowLabel> labels(rows);
    for (auto& l : labels) l = static_cast<RowLabel>(gen() % 3);
    const StackedDataset original(frame, labels, "set", gen() % 5);

    std::stringstream buf;
    write_csv(buf, original);
    const auto back = read_stacked_csv(buf, "set");
    ASSERT_EQ(back.labels(), original.labels());
    ASSERT_EQ(back.frame().names(), original.frame().names());
    EXPECT_EQ(back.label_position(), original.label_position());
    for (std::size_t c = 0; c < frame.num_columns(); ++c) {
      for (std::size_t r = 0; r < rows; ++r) {
        const double a = original.frame().column(c)[r];
        const double b = back.frame().column(c)[r];
        if (is_missing(a)) {
          EXPECT_TRUE(is_missing(b));
        } else {
          EXPECT_TRUE(same_bits(a, b)) << a << " vs " << b;
        }
      }
    }
  }
}

TEST(FormatDouble, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(kMissing), "NA");
  EXPECT_EQ(format_double(2.0), "2");
}

}  // namespace
}  // namespace ipd
