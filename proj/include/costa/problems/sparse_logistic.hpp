#pragma once

#include "costa/problem.hpp"
#include "costa/problems/mcp.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <string>

namespace costa::problems {

struct Dataset {
  Eigen::SparseMatrix<Scalar, Eigen::RowMajor> features;  // one row per sample
  Vector labels;                                           // ±1
  std::vector<int> train_indices;
  std::vector<int> test_indices;

  Eigen::Index dimension() const { return features.cols(); }
  Eigen::Index rows() const { return features.rows(); }
};

/// Reads LIBSVM text: "label index:value index:value ..." with 1-based
/// indices. Raw labels equal to `positive_label` map to +1, everything else
/// to −1. All rows land in the train split. `expected_dimension` of 0 infers
/// the dimension from the largest index seen.
Dataset load_libsvm(const std::string& path, Scalar positive_label = 1.0,
                    Eigen::Index expected_dimension = 0);

void assign_random_split(Dataset& dataset, Scalar test_fraction, RngStream& rng);

/// Linearly separable-ish rows from a sparse ground truth, labels flipped by
/// additive noise before taking the sign.
Dataset make_synthetic_classification(Eigen::Index dimension, Eigen::Index rows,
                                      int support_size, Scalar label_noise,
                                      std::uint64_t seed);

/// Logistic loss f(x, {a,b}) = log(1 + exp(−b a'x)) over uniformly drawn
/// training rows, constrained by the smoothed sparsity penalty
/// mcp(x) ≤ level. The mean oracles average over the full training split.
StochasticProblem build_sparse_logistic(std::shared_ptr<const Dataset> dataset,
                                        const McpParams& mcp);

Scalar accuracy(const Dataset& dataset, const std::vector<int>& indices, const Vector& x);

}  // namespace costa::problems
