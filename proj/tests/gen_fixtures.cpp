// Writes the CSV fixtures used by cli_test.sh into the directory given as
// argv[1]. Deterministic: fixed seeds, values serialized by write_csv.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "rad/dataset.hpp"
#include "support.hpp"

using rad::Index;
using rad::Matrix;

namespace {

Matrix planted_rank2(Index n, Index d, unsigned seed) {
  Matrix coeffs(n, 2);
  coeffs.col(0) = radtest::bounded_matrix(n, 1, seed).col(0) * 5.0;
  coeffs.col(1) = radtest::bounded_signed_matrix(n, 1, seed + 1).col(0) * 2.0;
  Matrix directions(d, 2);
  directions.col(0) = radtest::bounded_matrix(d, 1, seed + 2).col(0);
  directions.col(1) = radtest::bounded_signed_matrix(d, 1, seed + 3).col(0);
  return coeffs * directions.transpose();
}

std::vector<std::string> feature_names(Index d) {
  std::vector<std::string> names;
  for (Index j = 0; j < d; ++j) names.push_back("s" + std::to_string(j));
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: rad_gen_fixtures OUTDIR\n";
    return 1;
  }
  const std::filesystem::path outdir(argv[1]);
  std::filesystem::create_directories(outdir);

  const Index n = 500;
  const Index d = 20;
  const Matrix train = planted_rank2(n, d, 100);

  rad::Dataset train_ds;
  train_ds.matrix = train;
  train_ds.column_names = feature_names(d);
  rad::write_csv(train_ds, (outdir / "planted_rank2.csv").string());

  // labeled test set: clean planted rows with a large in-span shift on
  // rows 30..39, which any reasonable threshold flags instantly
  const Index n_test = 60;
  Matrix test = planted_rank2(n_test, d, 100);
  rad::Vector direction = radtest::bounded_matrix(d, 1, 102).col(0);  // = b1
  std::vector<rad::Label> labels(static_cast<std::size_t>(n_test),
                                 rad::Label::kNormal);
  for (Index i = 30; i < 40; ++i) {
    test.row(i) += 40.0 * direction.transpose();
    labels[static_cast<std::size_t>(i)] = rad::Label::kAttack;
  }
  rad::Dataset test_ds;
  test_ds.matrix = test;
  test_ds.column_names = feature_names(d);
  test_ds.labels = labels;
  test_ds.label_name = "label";
  rad::write_csv(test_ds, (outdir / "planted_test_labeled.csv").string());

  rad::Dataset constant_ds;
  constant_ds.matrix = Matrix::Zero(20, 3);
  for (Index i = 0; i < 20; ++i) constant_ds.matrix.row(i) << 4.0, -2.0, 7.0;
  constant_ds.column_names = feature_names(3);
  rad::write_csv(constant_ds, (outdir / "constant.csv").string());

  // power-testbed shape: rank-9 subspace in d = 31 for the footprint checks
  {
    const Index rows = 300;
    const Index dim = 31;
    const Index rank = 9;
    Matrix coeffs = radtest::random_matrix(rows, rank, 103);
    for (Index k = 0; k < rank; ++k) {
      coeffs.col(k) *= 10.0 - static_cast<double>(k);
    }
    const Matrix basis = radtest::random_orthonormal(dim, rank, 104);
    rad::Dataset power_ds;
    power_ds.matrix = coeffs * basis.transpose();
    power_ds.column_names = feature_names(dim);
    rad::write_csv(power_ds, (outdir / "planted31.csv").string());
  }

  // headerless rows for watch: 4 valid, one malformed in the middle
  {
    std::ofstream rows(outdir / "watch_rows.csv");
    for (Index i = 0; i < 2; ++i) {
      for (Index j = 0; j < d; ++j) {
        if (j > 0) rows << ',';
        rows << test(i, j);
      }
      rows << '\n';
    }
    rows << "definitely,not,numbers\n";
    for (Index i = 2; i < 4; ++i) {
      for (Index j = 0; j < d; ++j) {
        if (j > 0) rows << ',';
        rows << test(i, j);
      }
      rows << '\n';
    }
  }

  std::cout << "fixtures written to " << outdir.string() << "\n";
  return 0;
}
