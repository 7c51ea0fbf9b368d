#include "speechdep/graph.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace speechdep {

ArcScoreMatrix biaffine_scores(const Eigen::MatrixXd& head_reprs,
                               const Eigen::MatrixXd& dep_reprs,
                               const BiaffineParams& params) {
  const Eigen::Index d_h = params.bilinear.rows();
  const Eigen::Index d_d = params.bilinear.cols();
  if (head_reprs.cols() != d_h || dep_reprs.cols() != d_d ||
      params.head_weight.size() != d_h || params.dep_weight.size() != d_d)
    throw std::invalid_argument("biaffine parameter dimensions do not match inputs");
  if (head_reprs.rows() != dep_reprs.rows() + 1)
    throw std::invalid_argument("expected one more head row (the root) than dep rows");

  ArcScoreMatrix m;
  m.scores = head_reprs * params.bilinear * dep_reprs.transpose();
  m.scores.colwise() += head_reprs * params.head_weight;
  m.scores.rowwise() += (dep_reprs * params.dep_weight).transpose();
  m.scores.array() += params.bias;
  return m;
}

namespace {

// Arborescence weight augmented with a lexicographic tie key. tie[d-1]
// accumulates -head(d), so maximizing (score, tie) lexicographically picks,
// among equal-score trees, the smallest head sequence. (R x Z^n, +) with
// this order is a totally ordered abelian group, which is all
// Chu-Liu/Edmonds needs.
struct ArcWeight {
  double score = 0.0;
  Eigen::VectorXd tie;
  bool absent = true;  // no arc (acts as -infinity)

  static ArcWeight none() { return ArcWeight{}; }

  static ArcWeight arc(double s, int head, int dep, int n) {
    ArcWeight w;
    w.score = s;
    w.tie = Eigen::VectorXd::Zero(n);
    w.tie[dep - 1] = -head;
    w.absent = false;
    return w;
  }
};

bool weight_less(const ArcWeight& a, const ArcWeight& b) {
  if (a.absent || b.absent) return a.absent && !b.absent;
  if (a.score != b.score) return a.score < b.score;
  for (Eigen::Index i = 0; i < a.tie.size(); ++i)
    if (a.tie[i] != b.tie[i]) return a.tie[i] < b.tie[i];
  return false;
}

ArcWeight weight_sub(const ArcWeight& a, const ArcWeight& b) {
  if (a.absent) return ArcWeight::none();
  ArcWeight out;
  out.score = a.score - b.score;
  out.tie = a.tie - b.tie;
  out.absent = false;
  return out;
}

// One contraction level of Chu-Liu/Edmonds. Nodes are 0..V-1 with 0 the
// root; w is a dense V x V matrix of incoming weights, w[h*V+d] for arc
// h -> d. Returns the head of every node 1..V-1 in the maximum
// arborescence. Precondition: an arborescence exists (every non-root node
// has a finite incoming arc, recursively preserved).
std::vector<int> cle(int V, const std::vector<ArcWeight>& w) {
  std::vector<int> best(V, -1);
  for (int d = 1; d < V; ++d) {
    for (int h = 0; h < V; ++h) {
      if (h == d || w[h * V + d].absent) continue;
      if (best[d] < 0 || weight_less(w[best[d] * V + d], w[h * V + d])) best[d] = h;
    }
    if (best[d] < 0) throw std::logic_error("node with no incoming arc");
  }

  // Find a cycle among the best-incoming arcs.
  std::vector<int> color(V, 0);  // 0 unknown, 1 on walk, 2 done
  color[0] = 2;
  std::vector<int> cycle;
  for (int start = 1; start < V && cycle.empty(); ++start) {
    if (color[start] != 0) continue;
    std::vector<int> walk;
    int node = start;
    while (color[node] == 0) {
      color[node] = 1;
      walk.push_back(node);
      node = best[node];
    }
    if (color[node] == 1) {
      auto begin = std::find(walk.begin(), walk.end(), node);
      cycle.assign(begin, walk.end());
    }
    for (int visited : walk) color[visited] = 2;
  }

  if (cycle.empty()) return best;

  std::vector<bool> in_cycle(V, false);
  for (int member : cycle) in_cycle[member] = true;

  // Contracted graph: root and non-cycle nodes keep their relative order,
  // the supernode goes last.
  std::vector<int> keep;  // contracted index -> old index
  std::vector<int> to_new(V, -1);
  for (int v = 0; v < V; ++v) {
    if (!in_cycle[v]) {
      to_new[v] = static_cast<int>(keep.size());
      keep.push_back(v);
    }
  }
  const int super = static_cast<int>(keep.size());
  const int VC = super + 1;

  // enter_member[h'] = cycle member whose adjusted incoming arc from old
  // node keep[h'] is maximal; leave_member[d'] = member supplying the best
  // outgoing arc to keep[d'].
  std::vector<ArcWeight> wc(static_cast<std::size_t>(VC) * VC, ArcWeight::none());
  std::vector<int> enter_member(VC, -1);
  std::vector<int> leave_member(VC, -1);

  for (int h = 0; h < V; ++h) {
    if (in_cycle[h]) continue;
    const int hn = to_new[h];
    for (int d = 0; d < V; ++d) {
      if (d == h) continue;
      if (!in_cycle[d]) {
        if (d != 0) wc[hn * VC + to_new[d]] = w[h * V + d];
        continue;
      }
      if (w[h * V + d].absent) continue;
      // Arc into the cycle: charge the member's own cycle arc.
      ArcWeight adjusted = weight_sub(w[h * V + d], w[best[d] * V + d]);
      ArcWeight& slot = wc[hn * VC + super];
      if (slot.absent || weight_less(slot, adjusted)) {
        slot = adjusted;
        enter_member[hn] = d;
      }
    }
  }
  for (int d = 0; d < V; ++d) {
    if (in_cycle[d] || d == 0) continue;
    const int dn = to_new[d];
    for (int member : cycle) {
      if (w[member * V + d].absent) continue;
      ArcWeight& slot = wc[super * VC + dn];
      if (slot.absent || weight_less(slot, w[member * V + d])) {
        slot = w[member * V + d];
        leave_member[dn] = member;
      }
    }
  }

  std::vector<int> sub = cle(VC, wc);

  // Expand: all cycle arcs stay except the one into the member that the
  // supernode's incoming arc selects.
  std::vector<int> heads(V, -1);
  for (int dn = 1; dn < VC; ++dn) {
    if (dn == super) continue;
    const int d = keep[dn];
    heads[d] = sub[dn] == super ? leave_member[dn] : keep[sub[dn]];
  }
  const int entry = enter_member[sub[super]];
  for (int member : cycle) heads[member] = member == entry ? keep[sub[super]] : best[member];
  return heads;
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<ArcWeight> build_weights(const ArcScoreMatrix& m,
                                     int forced_root_child = 0) {
  const int n = m.length();
  const int V = n + 1;
  std::vector<ArcWeight> w(static_cast<std::size_t>(V) * V, ArcWeight::none());
  for (int h = 0; h <= n; ++h) {
    for (int d = 1; d <= n; ++d) {
      if (h == d) continue;
      if (h == 0 && forced_root_child != 0 && d != forced_root_child) continue;
      const double s = m.scores(h, d - 1);
      if (s == kNegInf) continue;
      w[h * V + d] = ArcWeight::arc(s, h, d, n);
    }
  }
  return w;
}

int count_roots(const std::vector<int>& heads) {
  return static_cast<int>(std::count(heads.begin() + 1, heads.end(), 0));
}

double canonical_score(const ArcScoreMatrix& m, const std::vector<int>& heads) {
  double total = 0.0;
  for (int d = 1; d <= m.length(); ++d) total += m.scores(heads[d], d - 1);
  return total;
}

// (score desc, head sequence asc) over 1-indexed head vectors.
bool tree_better(const ArcScoreMatrix& m, const std::vector<int>& a,
                 const std::vector<int>& b) {
  const double sa = canonical_score(m, a);
  const double sb = canonical_score(m, b);
  if (sa != sb) return sa > sb;
  return std::lexicographical_compare(a.begin() + 1, a.end(), b.begin() + 1, b.end());
}

std::vector<int> strip_root_slot(const std::vector<int>& heads) {
  return std::vector<int>(heads.begin() + 1, heads.end());
}

}  // namespace

std::vector<int> decode_mst(const ArcScoreMatrix& m, RootPolicy policy) {
  const int n = m.length();
  if (n == 0) throw std::invalid_argument("cannot decode an empty sentence");
  if (m.scores.rows() != n + 1)
    throw std::invalid_argument("arc score matrix must have n+1 rows");

  std::vector<int> heads = cle(n + 1, build_weights(m));
  if (policy == RootPolicy::SingleRoot && count_roots(heads) != 1) {
    std::vector<int> best;
    for (int r = 1; r <= n; ++r) {
      std::vector<int> candidate = cle(n + 1, build_weights(m, r));
      if (best.empty() || tree_better(m, candidate, best)) best = candidate;
    }
    heads = std::move(best);
  }
  return strip_root_slot(heads);
}

std::vector<int> decode_mst_bruteforce(const ArcScoreMatrix& m, RootPolicy policy) {
  const int n = m.length();
  if (n == 0) throw std::invalid_argument("cannot decode an empty sentence");
  if (n > 8) throw std::invalid_argument("brute-force decoding is limited to n <= 8");

  std::vector<int> assignment(n + 1, 0);
  std::vector<int> best;
  double best_score = kNegInf;
  int roots = n;  // zeros in the current assignment, kept incrementally

  // Reaches-root memo, stamped per assignment.
  std::vector<int> safe_stamp(n + 1, -1);
  std::vector<int> walk_stamp(n + 1, -1);
  int walk[9];
  int stamp = 0;

  auto valid_tree = [&]() {
    ++stamp;
    for (int start = 1; start <= n; ++start) {
      int node = start;
      int depth = 0;
      while (node != 0 && safe_stamp[node] != stamp) {
        if (walk_stamp[node] == stamp) return false;  // cycle
        walk_stamp[node] = stamp;
        walk[depth++] = node;
        node = assignment[node];
      }
      while (depth > 0) safe_stamp[walk[--depth]] = stamp;
    }
    return true;
  };

  while (true) {
    const bool root_count_ok =
        policy == RootPolicy::MultiRoot ? roots >= 1 : roots == 1;
    if (root_count_ok && valid_tree()) {
      const double score = canonical_score(m, assignment);
      if (best.empty() || score > best_score ||
          (score == best_score &&
           std::lexicographical_compare(assignment.begin() + 1, assignment.end(),
                                        best.begin() + 1, best.end()))) {
        best = assignment;
        best_score = score;
      }
    }
    // Odometer over head vectors, token n least significant, self-arcs
    // skipped in place.
    int d = n;
    for (;;) {
      if (d == 0) break;
      if (assignment[d] == 0) --roots;
      ++assignment[d];
      if (assignment[d] == d) ++assignment[d];
      if (assignment[d] <= n) break;
      assignment[d] = 0;
      ++roots;
      --d;
    }
    if (d == 0) break;
  }

  if (best.empty()) throw std::logic_error("no arborescence found");
  return strip_root_slot(best);
}

std::vector<std::string> assign_labels(const std::vector<int>& heads,
                                       const LabelScoreTensor& tensor,
                                       const std::vector<std::string>& vocab) {
  const int n = static_cast<int>(heads.size());
  if (tensor.n != n)
    throw std::invalid_argument("label tensor length does not match head count");
  if (static_cast<int>(vocab.size()) != tensor.num_relations())
    throw std::invalid_argument("relation vocabulary size does not match tensor");
  if (tensor.num_relations() < 1)
    throw std::invalid_argument("relation vocabulary is empty");

  std::vector<std::string> deprels;
  deprels.reserve(n);
  for (int d = 0; d < n; ++d) {
    const int head = heads[d];
    if (head < 0 || head > n)
      throw std::invalid_argument("head index " + std::to_string(head) +
                                  " out of range");
    int best = 0;
    for (int l = 1; l < tensor.num_relations(); ++l)
      if (tensor.at(head, d, l) > tensor.at(head, d, best)) best = l;
    deprels.push_back(vocab[best]);
  }
  return deprels;
}

}  // namespace speechdep
