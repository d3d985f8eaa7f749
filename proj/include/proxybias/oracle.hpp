#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "proxybias/record.hpp"

namespace proxybias::sampling {

/// Discloses true attributes on request. Implementations may be stateful
/// (one per sampling run).
class AttributeOracle {
 public:
  virtual ~AttributeOracle() = default;
  /// Attribute of each id, in request order. Throws Error(OracleFailure).
  virtual std::vector<bool> reveal(std::span<const std::string> ids) = 0;
};

/// Answers from records that already carry `a`; the sampling engine never
/// reads `a` from the pool itself.
class InMemoryOracle final : public AttributeOracle {
 public:
  explicit InMemoryOracle(std::span<const PredictionRecord> records);
  std::vector<bool> reveal(std::span<const std::string> ids) override;

 private:
  std::unordered_map<std::string, bool> truth_;
};

/// Batch-boundary exchange with an external annotator: for request k the
/// oracle writes `request_<k>.csv` (header `id`) into `dir` and waits for
/// `answer_<k>.csv` (header `id,a`, a in {0,1}). Annotators should write the
/// answer under a temporary name and rename it into place.
class FileExchangeOracle final : public AttributeOracle {
 public:
  FileExchangeOracle(std::filesystem::path dir, std::chrono::milliseconds timeout,
                     std::chrono::milliseconds poll_interval = std::chrono::milliseconds(50));
  std::vector<bool> reveal(std::span<const std::string> ids) override;

  std::filesystem::path request_path(std::size_t k) const;
  std::filesystem::path answer_path(std::size_t k) const;

 private:
  std::filesystem::path dir_;
  std::chrono::milliseconds timeout_;
  std::chrono::milliseconds poll_;
  std::size_t next_request_ = 0;
};

/// Ids revealed so far plus an optional query cap.
struct OracleBudgetState {
  std::unordered_set<std::string> revealed;
  std::size_t queries_used = 0;
  std::optional<std::size_t> budget;

  std::size_t remaining() const noexcept;
};

/// Oracle front end used by the samplers: rejects repeated ids and never
/// exceeds the budget.
class OracleSession {
 public:
  OracleSession(AttributeOracle& oracle, std::optional<std::size_t> budget);

  /// False if revealing `count` more ids would exceed the budget.
  bool can_reveal(std::size_t count) const noexcept;
  /// Throws InvalidArgument on an id already revealed, OracleFailure when
  /// over budget.
  std::vector<bool> reveal(std::span<const std::string> ids);
  const OracleBudgetState& state() const noexcept { return state_; }

 private:
  AttributeOracle& oracle_;
  OracleBudgetState state_;
};

}  // namespace proxybias::sampling
