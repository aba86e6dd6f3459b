#pragma once

#include <cstddef>
#include <vector>

#include "revstream/error.hpp"

namespace revstream {

/// Inputs for folding the embeddings of a token's description words into one
/// initialization vector. Empty weights mean uniform.
struct EmbeddingInitSpec {
  std::vector<std::vector<double>> description_vectors;
  std::vector<double> weights;
};

/// Weighted average of the description vectors, summed in input order so the
/// result is reproducible bit for bit.
inline std::vector<double> semantic_init(const EmbeddingInitSpec& spec) {
  const auto& vs = spec.description_vectors;
  if (vs.empty()) throw Error(ErrorKind::empty_description, "no description vectors");
  const std::size_t dim = vs.front().size();
  for (const auto& v : vs)
    if (v.size() != dim)
      throw Error(ErrorKind::dimension_mismatch, "description vectors disagree on dimension");

  std::vector<double> w = spec.weights;
  if (w.empty()) w.assign(vs.size(), 1.0);
  if (w.size() != vs.size())
    throw Error(ErrorKind::dimension_mismatch, "one weight per description vector required");

  double z = 0.0;
  for (double x : w) z += x;
  if (!(z > 0.0)) throw Error(ErrorKind::invalid_weights, "weights must sum to a positive value");

  std::vector<double> acc(dim, 0.0);
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t d = 0; d < dim; ++d) acc[d] += w[i] * vs[i][d];
  for (double& x : acc) x /= z;
  return acc;
}

}  // namespace revstream
