#include "costa/problems/sparse_logistic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace costa::problems {

namespace {

using SparseRow = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

// log(1 + exp(-m)) without overflow on either tail.
Scalar logistic_loss(Scalar margin) {
  if (margin >= 0.0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

// d/dm log(1+exp(-m)) = -sigma(-m)
Scalar logistic_sigma_neg(Scalar margin) {
  if (margin >= 0.0) {
    const Scalar e = std::exp(-margin);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(margin));
}

Scalar row_dot(const SparseRow& features, int row, const Vector& x) {
  Scalar acc = 0.0;
  for (SparseRow::InnerIterator it(features, row); it; ++it) acc += it.value() * x[it.col()];
  return acc;
}

void row_axpy(const SparseRow& features, int row, Scalar coeff, Vector& out) {
  for (SparseRow::InnerIterator it(features, row); it; ++it)
    out[it.col()] += coeff * it.value();
}

}  // namespace

Dataset load_libsvm(const std::string& path, Scalar positive_label,
                    Eigen::Index expected_dimension) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("load_libsvm: cannot open " + path);

  std::vector<Eigen::Triplet<Scalar>> triplets;
  std::vector<Scalar> raw_labels;
  Eigen::Index max_index = 0;

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Scalar label;
    if (!(ls >> label)) throw InvalidInput("load_libsvm: malformed label in " + path);
    const int row = static_cast<int>(raw_labels.size());
    raw_labels.push_back(label);

    std::string pair;
    while (ls >> pair) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos)
        throw InvalidInput("load_libsvm: malformed feature '" + pair + "'");
      const long index = std::stol(pair.substr(0, colon));
      const Scalar value = std::stod(pair.substr(colon + 1));
      if (index < 1) throw InvalidInput("load_libsvm: indices are 1-based");
      max_index = std::max<Eigen::Index>(max_index, index);
      triplets.emplace_back(row, static_cast<int>(index - 1), value);
    }
  }
  if (raw_labels.empty()) throw InvalidInput("load_libsvm: empty dataset " + path);

  Eigen::Index dim = expected_dimension > 0 ? expected_dimension : max_index;
  if (max_index > dim)
    throw InvalidInput("load_libsvm: feature index exceeds the expected dimension");

  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(raw_labels.size()), dim);
  ds.features.setFromTriplets(triplets.begin(), triplets.end());
  ds.labels.resize(static_cast<Eigen::Index>(raw_labels.size()));
  for (std::size_t k = 0; k < raw_labels.size(); ++k)
    ds.labels[static_cast<Eigen::Index>(k)] = raw_labels[k] == positive_label ? 1.0 : -1.0;
  ds.train_indices.resize(raw_labels.size());
  std::iota(ds.train_indices.begin(), ds.train_indices.end(), 0);
  return ds;
}

void assign_random_split(Dataset& dataset, Scalar test_fraction, RngStream& rng) {
  if (test_fraction < 0.0 || test_fraction >= 1.0)
    throw InvalidInput("assign_random_split: test fraction must lie in [0, 1)");
  std::vector<int> all(static_cast<std::size_t>(dataset.rows()));
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  const auto test_count =
      static_cast<std::size_t>(test_fraction * static_cast<Scalar>(all.size()));
  dataset.test_indices.assign(all.begin(), all.begin() + test_count);
  dataset.train_indices.assign(all.begin() + test_count, all.end());
}

Dataset make_synthetic_classification(Eigen::Index dimension, Eigen::Index rows,
                                      int support_size, Scalar label_noise,
                                      std::uint64_t seed) {
  if (dimension < 1 || rows < 2) throw InvalidInput("synthetic dataset: degenerate shape");
  if (support_size < 1 || support_size > dimension)
    throw InvalidInput("synthetic dataset: bad support size");

  RngStream rng = substream(seed, 101);
  std::normal_distribution<Scalar> gauss(0.0, 1.0);

  Vector truth = Vector::Zero(dimension);
  for (int k = 0; k < support_size; ++k) truth[k] = (k % 2 == 0 ? 1.0 : -1.0) * 1.5;

  std::vector<Eigen::Triplet<Scalar>> triplets;
  Vector labels(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    Scalar margin = 0.0;
    for (Eigen::Index c = 0; c < dimension; ++c) {
      const Scalar value = gauss(rng);
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(c), value);
      margin += value * truth[c];
    }
    labels[r] = margin + label_noise * gauss(rng) >= 0.0 ? 1.0 : -1.0;
  }

  Dataset ds;
  ds.features.resize(rows, dimension);
  ds.features.setFromTriplets(triplets.begin(), triplets.end());
  ds.labels = labels;
  ds.train_indices.resize(static_cast<std::size_t>(rows));
  std::iota(ds.train_indices.begin(), ds.train_indices.end(), 0);
  assign_random_split(ds, 0.2, rng);
  return ds;
}

StochasticProblem build_sparse_logistic(std::shared_ptr<const Dataset> dataset,
                                        const McpParams& mcp) {
  if (!dataset || dataset->rows() == 0) throw InvalidInput("sparse logistic: empty dataset");
  if (dataset->train_indices.empty())
    throw InvalidInput("sparse logistic: empty training split");
  mcp.validate();

  StochasticProblem problem;
  problem.dimension = dataset->dimension();

  problem.draw_sample = [dataset](RngStream& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, dataset->train_indices.size() - 1);
    return Sample(dataset->train_indices[pick(rng)]);
  };
  problem.objective_value = [dataset](const Vector& x, const Sample& xi) {
    const int row = std::any_cast<int>(xi);
    return logistic_loss(dataset->labels[row] * row_dot(dataset->features, row, x));
  };
  problem.objective_gradient = [dataset](const Vector& x, const Sample& xi) {
    const int row = std::any_cast<int>(xi);
    const Scalar b = dataset->labels[row];
    const Scalar coeff = -b * logistic_sigma_neg(b * row_dot(dataset->features, row, x));
    Vector grad = Vector::Zero(x.size());
    row_axpy(dataset->features, row, coeff, grad);
    return grad;
  };
  problem.mean_value = [dataset](const Vector& x) {
    Scalar acc = 0.0;
    for (int row : dataset->train_indices)
      acc += logistic_loss(dataset->labels[row] * row_dot(dataset->features, row, x));
    return acc / static_cast<Scalar>(dataset->train_indices.size());
  };
  problem.mean_gradient = [dataset](const Vector& x) {
    Vector grad = Vector::Zero(x.size());
    for (int row : dataset->train_indices) {
      const Scalar b = dataset->labels[row];
      const Scalar coeff = -b * logistic_sigma_neg(b * row_dot(dataset->features, row, x));
      row_axpy(dataset->features, row, coeff, grad);
    }
    grad /= static_cast<Scalar>(dataset->train_indices.size());
    return grad;
  };

  problem.nonconvex_constraints.push_back(mcp_constraint(mcp));
  problem.regularizer = Regularizer::zero();

  Scalar max_row_norm_sq = 0.0;
  for (int row : dataset->train_indices) {
    Scalar norm_sq = 0.0;
    for (SparseRow::InnerIterator it(dataset->features, row); it; ++it)
      norm_sq += it.value() * it.value();
    max_row_norm_sq = std::max(max_row_norm_sq, norm_sq);
  }
  // One L and one G must cover the loss and the constraint alike; the
  // smoothed penalty's curvature λ/sqrt(ϱ) + 1/θ usually dominates.
  const Scalar mcp_curvature = mcp.lambda / std::sqrt(mcp.smoothing) + 1.0 / mcp.theta;
  problem.meta.smoothness = std::max(max_row_norm_sq / 4.0, mcp_curvature);
  problem.meta.lipschitz = std::max(
      std::sqrt(max_row_norm_sq),
      mcp.lambda * std::sqrt(static_cast<Scalar>(problem.dimension)));
  return problem;
}

Scalar accuracy(const Dataset& dataset, const std::vector<int>& indices, const Vector& x) {
  if (indices.empty()) throw InvalidInput("accuracy: empty index set");
  long correct = 0;
  for (int row : indices) {
    const Scalar prediction = row_dot(dataset.features, row, x) >= 0.0 ? 1.0 : -1.0;
    if (prediction == dataset.labels[row]) ++correct;
  }
  return static_cast<Scalar>(correct) / static_cast<Scalar>(indices.size());
}

}  // namespace costa::problems
