#pragma once
// Normalized hard-sample mining loss over a Siamese batch.
//
// For each aligned pair (e_s, e_t) and direction s->t:
//   z   = standard score (population std) of {sim(e_s, e'_t) : e'_t in B_t},
//         the positive candidate included
//   l_j = gamma + z_j - z_pos          (the positive's element is exactly gamma)
//   term = LogSumExp(lambda * l)
// The loss sums the term over pairs in both directions (s->t and t->s).
// sim is the dot product of encoder outputs. Normalizing the similarity
// vector before the margin makes hard negatives (candidates whose normalized
// similarity approaches the positive's) dominate the LogSumExp, while batch-
// wide shifts and positive rescalings of the similarities cancel exactly.
//
// Two-candidate case at gamma = 1: z = {+1, -1}; with the positive ranked
// first, LSE(lambda*l) = log(e^lambda + e^-lambda) = log(2*cosh(lambda)), so
// the full loss is 2*log(2*cosh(lambda)).

#include <stdexcept>

#include "kgalign/autodiff.hpp"

namespace kgalign {

// hs/ht: tape ids of batch outputs; rows 0..n_pairs-1 of each are the aligned
// positives, remaining rows are negatives. Returns the tape id of the 1x1 loss.
// The per-direction chain runs through the fused tape op so only the batch
// similarity matrix (and its gradient) is ever materialized.
template <class T>
int nhsm_loss(Tape<T>& tape, int hs, int ht, int n_pairs, T gamma, T lambda) {
  if (n_pairs < 1) throw std::runtime_error("nhsm_loss: need at least one pair");
  if (tape.val(hs).rows() < 2 || tape.val(ht).rows() < 2)
    throw std::runtime_error("nhsm_loss: each side needs at least 2 candidates");
  if (!(lambda > T(0))) throw std::runtime_error("nhsm_loss: lambda must be positive");

  int sim = tape.matmul_nt_op(hs, ht);  // |B_s| x |B_t|
  int loss_st = tape.sum_all(tape.nhsm_direction(sim, n_pairs, gamma, lambda, false));
  int loss_ts = tape.sum_all(tape.nhsm_direction(sim, n_pairs, gamma, lambda, true));
  return tape.add(loss_st, loss_ts);
}

}  // namespace kgalign
