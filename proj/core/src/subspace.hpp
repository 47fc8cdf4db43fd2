#pragma once

// Dense helpers for block eigensolvers: blocks are column-major n x m
// matrices whose columns are grid fields.

#include <Eigen/Dense>

#include <cstdint>
#include <random>

#include "nehari/operator.hpp"

namespace nehari::detail {

using Block = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

inline std::span<const double> column(const Block& b, Eigen::Index j) {
  return {b.data() + j * b.rows(), static_cast<std::size_t>(b.rows())};
}

inline std::span<double> column(Block& b, Eigen::Index j) {
  return {b.data() + j * b.rows(), static_cast<std::size_t>(b.rows())};
}

/// Uniform [-1,1) block from a fixed-seed mt19937_64 (same stream on every
/// platform).
inline Block random_block(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Block b(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      b(i, j) = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
  return b;
}

/// Orthonormal basis of the column span (Euclidean).
inline Block orthonormalize(const Block& y) {
  Eigen::HouseholderQR<Block> qr(y);
  Block q = qr.householderQ() * Block::Identity(y.rows(), y.cols());
  // A second pass keeps orthogonality at round-off when columns are nearly
  // dependent.
  Eigen::HouseholderQR<Block> qr2(q);
  return qr2.householderQ() * Block::Identity(y.rows(), y.cols());
}

/// Columns of y, then of b and c when given.
inline Block stack(const Block& y, const Block* b, const Block* c, Eigen::Index n) {
  const Eigen::Index cols = y.cols() + (b ? b->cols() : 0) + (c ? c->cols() : 0);
  Block out(n, cols);
  out.leftCols(y.cols()) = y;
  Eigen::Index at = y.cols();
  if (b) {
    out.middleCols(at, b->cols()) = *b;
    at += b->cols();
  }
  if (c) out.middleCols(at, c->cols()) = *c;
  return out;
}

inline Block apply_columns(const LinearMap& m, const Block& x) {
  Block y(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) m(column(x, j), column(y, j));
  return y;
}

struct RitzPairs {
  Eigen::VectorXd values;  // ascending
  Block vectors;           // n x m, Q-orthonormal
};

/// Ritz pairs of the pencil (P, Q) on span(q), q Euclidean-orthonormal and
/// Q positive definite on the span. P and Q are given by their products
/// with q (pq = P q, qq = Q q); null qq means Q = I.
inline RitzPairs rayleigh_ritz(const Block& q, const Block& pq, const Block* qq) {
  Eigen::MatrixXd hp = q.transpose() * pq;
  hp = 0.5 * (hp + hp.transpose()).eval();
  RitzPairs out;
  if (!qq) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hp);
    out.values = es.eigenvalues();
    out.vectors = q * es.eigenvectors();
    return out;
  }
  Eigen::MatrixXd hq = q.transpose() * (*qq);
  hq = 0.5 * (hq + hq.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(hp, hq);
  out.values = es.eigenvalues();
  out.vectors = q * es.eigenvectors();
  return out;
}

}  // namespace nehari::detail
