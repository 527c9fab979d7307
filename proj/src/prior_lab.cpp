// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/prior_lab.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace opaque {

StructuredPriorAssignment::StructuredPriorAssignment(
    MatrixPattern pattern, std::vector<UnivariatePrior> priors)
    : pattern_(std::move(pattern)), free_(pattern_.free_entries()), priors_(std::move(priors)) {
  if (priors_.size() != free_.size())
    throw std::invalid_argument("priors: need exactly one prior per free entry");
  for (std::size_t k = 0; k < free_.size(); ++k) {
    validate_prior(priors_[k]);
    const bool offdiag = free_[k].first != free_[k].second;
    if (pattern_.kind() == MatrixKind::Correlation && offdiag &&
        !prior_support_in_open_unit(priors_[k]))
      throw std::invalid_argument(
          "priors: correlation entries need a prior supported on (-1,1), got " +
          prior_to_string(priors_[k]));
  }
}

StructuredPriorAssignment StructuredPriorAssignment::from_json(
    MatrixPattern pattern, const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("priors: document must be an object");
  const auto free_list = pattern.free_entries();
  std::vector<UnivariatePrior> priors(free_list.size());
  std::vector<char> assigned(free_list.size(), 0);
  if (doc.contains("default")) {
    const UnivariatePrior def = prior_from_json(doc.at("default"));
    for (std::size_t k = 0; k < free_list.size(); ++k) {
      priors[k] = def;
      assigned[k] = 1;
    }
  }
  if (doc.contains("entries")) {
    for (const auto& e : doc.at("entries")) {
      if (!e.contains("pair"))
        throw std::invalid_argument("priors: entry needs a \"pair\" key");
      const int a = pattern.name_index(e.at("pair")[0].get<std::string>());
      const int b = pattern.name_index(e.at("pair")[1].get<std::string>());
      const std::pair<int, int> key{std::max(a, b), std::min(a, b)};
      const auto it = std::find(free_list.begin(), free_list.end(), key);
      if (it == free_list.end())
        throw std::invalid_argument("priors: entry (" + e.at("pair")[0].get<std::string>() +
                                    "," + e.at("pair")[1].get<std::string>() +
                                    ") is not free in the pattern");
      const auto k = static_cast<std::size_t>(it - free_list.begin());
      priors[k] = prior_from_json(e);
      assigned[k] = 1;
    }
  }
  for (std::size_t k = 0; k < free_list.size(); ++k)
    if (!assigned[k])
      throw std::invalid_argument("priors: free entry " +
                                  pattern.entry_label(free_list[k].first, free_list[k].second) +
                                  " has no prior (add it or a \"default\")");
  return StructuredPriorAssignment(std::move(pattern), std::move(priors));
}

const UnivariatePrior& StructuredPriorAssignment::prior_for(
    std::pair<int, int> entry) const {
  return priors_[free_index(entry)];
}

std::size_t StructuredPriorAssignment::free_index(std::pair<int, int> entry) const {
  if (entry.first < entry.second) std::swap(entry.first, entry.second);
  const auto it = std::find(free_.begin(), free_.end(), entry);
  if (it == free_.end())
    throw std::invalid_argument("priors: entry is not free in the pattern");
  return static_cast<std::size_t>(it - free_.begin());
}

StructuredPriorAssignment StructuredPriorAssignment::with_fixed_zero(
    const std::vector<std::pair<int, int>>& entries) const {
  MatrixPattern restricted = pattern_.with_fixed_zero(entries);
  const auto remaining = restricted.free_entries();
  std::vector<UnivariatePrior> priors;
  priors.reserve(remaining.size());
  for (const auto& e : remaining) priors.push_back(prior_for(e));
  return StructuredPriorAssignment(std::move(restricted), std::move(priors));
}

RejectionResult::RejectionResult(MatrixPattern pattern,
                                 std::vector<std::pair<int, int>> free_entries,
                                 std::uint64_t seed)
    : pattern_(std::move(pattern)), free_(std::move(free_entries)), seed_(seed) {}

double RejectionResult::acceptance_rate() const {
  return n_proposed_ == 0 ? 0.0
                          : static_cast<double>(accepted_rows_) /
                                static_cast<double>(n_proposed_);
}

double RejectionResult::value(std::size_t row, std::size_t free_idx) const {
  return values_[row * free_.size() + free_idx];
}

SymmetricMatrix RejectionResult::assemble(std::size_t row) const {
  SymmetricMatrix m(pattern_.dim());
  for (int i = 0; i < pattern_.dim(); ++i)
    for (int j = 0; j <= i; ++j)
      if (!pattern_.is_free(i, j)) m.set(i, j, pattern_.entry(i, j).value);
  for (std::size_t k = 0; k < free_.size(); ++k)
    m.set(free_[k].first, free_[k].second, value(row, k));
  return m;
}

std::size_t RejectionResult::free_index(std::pair<int, int> entry) const {
  if (entry.first < entry.second) std::swap(entry.first, entry.second);
  const auto it = std::find(free_.begin(), free_.end(), entry);
  if (it == free_.end())
    throw std::invalid_argument("rejection result: entry is fixed or out of range");
  return static_cast<std::size_t>(it - free_.begin());
}

std::vector<double> RejectionResult::entry_samples(std::pair<int, int> entry) const {
  const std::size_t k = free_index(entry);
  if (stored_count() == 0)
    throw std::invalid_argument("rejection result: no accepted samples stored");
  std::vector<double> out(stored_count());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = value(r, k);
  return out;
}

std::vector<std::string> RejectionResult::headers() const {
  std::vector<std::string> out;
  out.reserve(free_.size());
  for (const auto& [i, j] : free_) out.push_back(pattern_.entry_label(i, j));
  return out;
}

SampleTable RejectionResult::to_table() const {
  SampleTable t(headers());
  std::vector<double> row(free_.size());
  for (std::size_t r = 0; r < stored_count(); ++r) {
    for (std::size_t k = 0; k < free_.size(); ++k) row[k] = value(r, k);
    t.add_row(row);
  }
  return t;
}

namespace {

struct WorkerOutput {
  std::vector<double> accepted;  // row-major free-entry values
  std::size_t proposed = 0;
};

void run_range(const StructuredPriorAssignment& assignment, std::uint64_t seed,
               std::size_t begin, std::size_t end, WorkerOutput& out) {
  const auto& pattern = assignment.pattern();
  const auto& free = assignment.free_entries();
  const int dim = pattern.dim();

  SymmetricMatrix m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j)
      if (!pattern.is_free(i, j)) m.set(i, j, pattern.entry(i, j).value);

  std::vector<double> draw(free.size());
  out.accepted.reserve((end - begin) / 2 * free.size());
  for (std::size_t prop = begin; prop < end; ++prop) {
    for (std::size_t k = 0; k < free.size(); ++k) {
      const auto [i, j] = free[k];
      Rng rng(seed, {static_cast<std::uint64_t>(pattern.entry_id(i, j)), prop});
      draw[k] = sample_prior(assignment.prior_for(k), rng);
      m.set(i, j, draw[k]);
    }
    ++out.proposed;
    if (is_positive_definite(m))
      out.accepted.insert(out.accepted.end(), draw.begin(), draw.end());
  }
}

}  // namespace

RejectionResult sample_structured_corr(const StructuredPriorAssignment& assignment,
                                       std::size_t n_proposals,
                                       const RejectionOptions& options) {
  if (assignment.pattern().kind() != MatrixKind::Correlation)
    throw std::invalid_argument("sample_structured_corr: pattern must be correlation kind");
  if (n_proposals == 0)
    throw std::invalid_argument("sample_structured_corr: n_proposals must be positive");

  const int workers = std::max(1, options.workers);
  std::vector<WorkerOutput> outputs(workers);
  if (workers == 1) {
    run_range(assignment, options.seed, 0, n_proposals, outputs[0]);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (n_proposals + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(n_proposals, w * chunk);
      const std::size_t end = std::min(n_proposals, begin + chunk);
      threads.emplace_back(run_range, std::cref(assignment), options.seed, begin, end,
                           std::ref(outputs[w]));
    }
    for (auto& t : threads) t.join();
  }

  RejectionResult result(assignment.pattern(), assignment.free_entries(), options.seed);
  const std::size_t width = assignment.free_entries().size();
  std::ofstream spill;
  for (const auto& out : outputs) {
    result.n_proposed_ += out.proposed;
    const std::size_t rows = width == 0 ? 0 : out.accepted.size() / width;
    for (std::size_t r = 0; r < rows; ++r) {
      ++result.accepted_rows_;
      if (result.stored_count() < options.max_in_memory) {
        result.values_.insert(result.values_.end(), out.accepted.begin() + r * width,
                              out.accepted.begin() + (r + 1) * width);
      } else {
        if (!options.spill_csv)
          throw std::runtime_error(
              "sample_structured_corr: in-memory cap exceeded and no spill file set");
        if (!spill.is_open()) {
          spill.open(*options.spill_csv, std::ios::binary);
          if (!spill) throw std::runtime_error("cannot write file: " + *options.spill_csv);
          const auto hdr = result.headers();
          for (std::size_t k = 0; k < hdr.size(); ++k)
            spill << (k ? "," : "") << hdr[k];
          spill << '\n';
        }
        for (std::size_t k = 0; k < width; ++k)
          spill << (k ? "," : "") << format_double(out.accepted[r * width + k]);
        spill << '\n';
      }
    }
  }
  result.n_rejected_ = result.n_proposed_ - result.accepted_rows_;
  return result;
}

std::vector<double> implied_marginal(const RejectionResult& result,
                                     std::pair<int, int> entry) {
  return result.entry_samples(entry);
}

}  // namespace opaque
