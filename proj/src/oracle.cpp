#include "proxybias/oracle.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "proxybias/error.hpp"

namespace proxybias::sampling {

InMemoryOracle::InMemoryOracle(std::span<const PredictionRecord> records) {
  for (const auto& rec : records) {
    if (rec.a) truth_.emplace(rec.id, *rec.a);
  }
}

std::vector<bool> InMemoryOracle::reveal(std::span<const std::string> ids) {
  std::vector<bool> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = truth_.find(id);
    if (it == truth_.end()) throw Error(ErrorCode::OracleFailure, "no true attribute for '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

FileExchangeOracle::FileExchangeOracle(std::filesystem::path dir, std::chrono::milliseconds timeout,
                                       std::chrono::milliseconds poll_interval)
    : dir_(std::move(dir)), timeout_(timeout), poll_(poll_interval) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path FileExchangeOracle::request_path(std::size_t k) const {
  return dir_ / ("request_" + std::to_string(k) + ".csv");
}

std::filesystem::path FileExchangeOracle::answer_path(std::size_t k) const {
  return dir_ / ("answer_" + std::to_string(k) + ".csv");
}

std::vector<bool> FileExchangeOracle::reveal(std::span<const std::string> ids) {
  const std::size_t k = next_request_++;
  {
    std::ofstream req(request_path(k));
    req << "id\n";
    for (const auto& id : ids) req << id << '\n';
    if (!req) throw Error(ErrorCode::OracleFailure, "cannot write " + request_path(k).string());
  }

  const auto answer = answer_path(k);
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (!std::filesystem::exists(answer)) {
    if (std::chrono::steady_clock::now() >= deadline) {
      throw Error(ErrorCode::OracleFailure, "timed out waiting for " + answer.string());
    }
    std::this_thread::sleep_for(poll_);
  }

  std::ifstream in(answer);
  std::string line;
  if (!std::getline(in, line) || line != "id,a") {
    throw Error(ErrorCode::OracleFailure, answer.string() + ": expected header 'id,a'");
  }
  std::unordered_map<std::string, bool> answers;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string value = comma == std::string::npos ? "" : line.substr(comma + 1);
    if (value != "0" && value != "1") {
      throw Error(ErrorCode::OracleFailure, answer.string() + ":" + std::to_string(line_no) + ": a must be 0 or 1");
    }
    answers[line.substr(0, comma)] = value == "1";
  }

  std::vector<bool> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = answers.find(id);
    if (it == answers.end()) throw Error(ErrorCode::OracleFailure, answer.string() + ": no answer for '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

std::size_t OracleBudgetState::remaining() const noexcept {
  if (!budget) return std::numeric_limits<std::size_t>::max();
  return *budget > queries_used ? *budget - queries_used : 0;
}

OracleSession::OracleSession(AttributeOracle& oracle, std::optional<std::size_t> budget) : oracle_(oracle) {
  state_.budget = budget;
}

bool OracleSession::can_reveal(std::size_t count) const noexcept { return count <= state_.remaining(); }

std::vector<bool> OracleSession::reveal(std::span<const std::string> ids) {
  if (!can_reveal(ids.size())) throw Error(ErrorCode::OracleFailure, "query budget exhausted");
  std::unordered_set<std::string> batch;
  for (const auto& id : ids) {
    if (state_.revealed.count(id) || !batch.insert(id).second) {
      throw Error(ErrorCode::InvalidArgument, "id '" + id + "' requested twice");
    }
  }
  std::vector<bool> answers = oracle_.reveal(ids);
  if (answers.size() != ids.size()) throw Error(ErrorCode::OracleFailure, "oracle answered wrong number of ids");
  state_.revealed.insert(batch.begin(), batch.end());
  state_.queries_used += ids.size();
  return answers;
}

}  // namespace proxybias::sampling
