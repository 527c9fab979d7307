// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_PRIOR_LAB_HPP
#define OPAQUE_PRIOR_LAB_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "opaque/distributions.hpp"
#include "opaque/matrix_pattern.hpp"
#include "opaque/sample_table.hpp"

namespace opaque {

/// One univariate prior per free entry of a pattern.
class StructuredPriorAssignment {
 public:
  StructuredPriorAssignment(MatrixPattern pattern,
                            std::vector<UnivariatePrior> priors);

  /// `{"default": {...}, "entries": [{"pair": [a,b], ...prior...}]}`.
  /// Every free entry must end up with exactly one prior.
  static StructuredPriorAssignment from_json(MatrixPattern pattern,
                                             const nlohmann::json& doc);

  const MatrixPattern& pattern() const { return pattern_; }
  const std::vector<std::pair<int, int>>& free_entries() const { return free_; }
  const UnivariatePrior& prior_for(std::size_t free_idx) const { return priors_[free_idx]; }
  const UnivariatePrior& prior_for(std::pair<int, int> entry) const;
  std::size_t free_index(std::pair<int, int> entry) const;  // throws if fixed

  StructuredPriorAssignment with_fixed_zero(
      const std::vector<std::pair<int, int>>& entries) const;

 private:
  MatrixPattern pattern_;
  std::vector<std::pair<int, int>> free_;
  std::vector<UnivariatePrior> priors_;
};

struct RejectionOptions {
  std::uint64_t seed = 1;
  int workers = 1;
  std::size_t max_in_memory = 1'000'000;      // rows kept in RAM
  std::optional<std::string> spill_csv;       // overflow target, appended
};

/// Accepted structured correlation draws plus rejection accounting.
/// Free-entry values are stored per accepted proposal, in proposal order,
/// which makes the result byte-identical for a fixed seed under any worker
/// count. Matrices can be re-assembled on demand.
class RejectionResult {
 public:
  RejectionResult(MatrixPattern pattern, std::vector<std::pair<int, int>> free_entries,
                  std::uint64_t seed);

  std::size_t n_proposed() const { return n_proposed_; }
  std::size_t n_rejected() const { return n_rejected_; }
  std::size_t accepted_count() const { return accepted_rows_; }
  std::size_t stored_count() const { return free_.empty() ? 0 : values_.size() / free_.size(); }
  double acceptance_rate() const;
  std::uint64_t seed() const { return seed_; }

  const MatrixPattern& pattern() const { return pattern_; }
  const std::vector<std::pair<int, int>>& free_entries() const { return free_; }

  double value(std::size_t row, std::size_t free_idx) const;
  SymmetricMatrix assemble(std::size_t row) const;

  /// Accepted-sample vector for one free entry (the implied marginal).
  std::vector<double> entry_samples(std::pair<int, int> entry) const;
  std::size_t free_index(std::pair<int, int> entry) const;

  std::vector<std::string> headers() const;  // "a~~b" per free entry
  SampleTable to_table() const;

 private:
  friend RejectionResult sample_structured_corr(const StructuredPriorAssignment&,
                                                std::size_t, const RejectionOptions&);

  MatrixPattern pattern_;
  std::vector<std::pair<int, int>> free_;
  std::vector<double> values_;  // row-major accepted free-entry values
  std::size_t n_proposed_ = 0;
  std::size_t n_rejected_ = 0;
  std::size_t accepted_rows_ = 0;
  std::uint64_t seed_ = 0;
};

/// Draw every free correlation from its prior, keep the assembled matrix iff
/// it is positive definite. Each (entry, proposal) pair has its own RNG
/// substream keyed by (seed, entry_id, proposal_index).
RejectionResult sample_structured_corr(const StructuredPriorAssignment& assignment,
                                       std::size_t n_proposals,
                                       const RejectionOptions& options = {});

std::vector<double> implied_marginal(const RejectionResult& result,
                                     std::pair<int, int> entry);

}  // namespace opaque

#endif  // OPAQUE_PRIOR_LAB_HPP
