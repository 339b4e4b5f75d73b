#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lexmt/corpus.hpp"

namespace lexmt {

// Sentence-level word alignment: set of (source index, target index) links.
struct AlignmentMatrix {
  std::size_t src_len = 0;
  std::size_t tgt_len = 0;
  std::set<std::pair<std::size_t, std::size_t>> links;

  bool operator==(const AlignmentMatrix& o) const = default;
};

// t(f|e): probability of source token f given target token e.  The empty
// target token (NULL) is stored under kNull.  For every e the row sums to 1.
struct TranslationTable {
  static constexpr const char* kNull = "<NULL>";

  std::map<std::string, std::map<std::string, double>> t;  // t[e][f]

  double prob(const std::string& f, const std::string& e) const {
    auto row = t.find(e);
    if (row == t.end()) return 0.0;
    auto cell = row->second.find(f);
    return cell == row->second.end() ? 0.0 : cell->second;
  }
};

// IBM Model 1 expectation maximization.  Uniform initialization over
// co-occurring (f,e) pairs plus NULL.  If log_likelihoods is given it
// receives one corpus log-likelihood per iteration (computed under the
// parameters in force at the start of that iteration); the sequence is
// non-decreasing.  Deterministic for any jobs value: per-pair expected
// counts are reduced in corpus order.
TranslationTable train_model1(const std::vector<SentencePair>& pairs,
                              int iterations, int jobs = 1,
                              std::vector<double>* log_likelihoods = nullptr);

// Links every source token to its argmax target token (or NULL, omitted from
// the matrix).  Ties go to the lowest target index, with NULL at index -1.
AlignmentMatrix viterbi_align(const SentencePair& pair,
                              const TranslationTable& table);

AlignmentMatrix transpose(const AlignmentMatrix& a);
AlignmentMatrix intersect(const AlignmentMatrix& a, const AlignmentMatrix& b);
AlignmentMatrix unite(const AlignmentMatrix& a, const AlignmentMatrix& b);

// grow-diag-final-and symmetrization.  Starts from the intersection; grows
// with union links 8-adjacent to the current set whose row or column is
// still uncovered (round-based, to fixpoint); finally adds union links with
// both endpoints uncovered, scanning row-major.
AlignmentMatrix grow_diag_final_and(const AlignmentMatrix& fwd,
                                    const AlignmentMatrix& rev);

// Conventional alignment text format: links as "i-j" separated by spaces.
std::string format_alignment(const AlignmentMatrix& a);
AlignmentMatrix parse_alignment(const std::string& line, std::size_t src_len,
                                std::size_t tgt_len);
void write_alignments(const std::string& path,
                      const std::vector<AlignmentMatrix>& alignments);

}  // namespace lexmt
