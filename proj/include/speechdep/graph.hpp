#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "speechdep/treebank.hpp"

namespace speechdep {

// Scores for every candidate arc of one sentence. Row h in [0, n] is the
// head (0 = virtual root), column d in [0, n) is the dependent token d+1.
// Self-arcs (row d+1, column d) are ignored by decoding regardless of
// their stored value.
struct ArcScoreMatrix {
  Eigen::MatrixXd scores;  // (n+1) x n

  int length() const { return static_cast<int>(scores.cols()); }
};

// Per-arc relation scores over a vocabulary of L relations, flattened
// row-major by head then dependent: row h*n + d scores arc h -> d+1.
struct LabelScoreTensor {
  int n = 0;
  Eigen::MatrixXd scores;  // ((n+1)*n) x L

  int num_relations() const { return static_cast<int>(scores.cols()); }
  double at(int head, int dep_column, int relation) const {
    return scores(head * n + dep_column, relation);
  }
};

// Arc scorer parameters: bilinear form plus per-side linear terms and a
// scalar bias.
struct BiaffineParams {
  Eigen::MatrixXd bilinear;     // d_h x d_d
  Eigen::VectorXd head_weight;  // d_h
  Eigen::VectorXd dep_weight;   // d_d
  double bias = 0.0;
};

// scores[h][d] = head[h]' * bilinear * dep[d+1] + head_weight . head[h]
//              + dep_weight . dep[d+1] + bias.
// head_reprs has n+1 rows (row 0 is the root representation), dep_reprs
// has n rows (row d is token d+1).
ArcScoreMatrix biaffine_scores(const Eigen::MatrixXd& head_reprs,
                               const Eigen::MatrixXd& dep_reprs,
                               const BiaffineParams& params);

// Maximum spanning arborescence rooted at node 0 (Chu-Liu/Edmonds),
// returned as heads[d] for tokens d = 1..n. Under SingleRoot exactly one
// arc leaves the root. Among equal-score optima the lexicographically
// smallest head sequence is returned; tie detection is exact whenever the
// score entries and their sums are exactly representable (e.g.
// integer-valued scores).
std::vector<int> decode_mst(const ArcScoreMatrix& m, RootPolicy policy);

// Exhaustive oracle over all (n+1)^n head assignments with the same
// tie-break. Guarded to n <= 8.
std::vector<int> decode_mst_bruteforce(const ArcScoreMatrix& m, RootPolicy policy);

// deprel[d] = vocab[argmax_l t(heads[d], d, l)], ties to the lowest index.
std::vector<std::string> assign_labels(const std::vector<int>& heads,
                                       const LabelScoreTensor& tensor,
                                       const std::vector<std::string>& vocab);

}  // namespace speechdep
