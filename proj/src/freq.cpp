#include "rdk/freq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rdk {

TokenFrequencyTable TokenFrequencyTable::from_counts(std::vector<std::uint64_t> counts) {
  TokenFrequencyTable t;
  t.counts_ = std::move(counts);
  t.total_ = 0;
  for (std::uint64_t c : t.counts_) t.total_ += c;
  return t;
}

TokenFrequencyTable TokenFrequencyTable::from_stream(std::istream& in) {
  TokenFrequencyTable t;
  std::string tok;
  while (in >> tok) {
    std::size_t pos = 0;
    unsigned long long id = 0;
    try {
      id = std::stoull(tok, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("token stream: not an unsigned integer: " + tok);
    }
    if (pos != tok.size() || tok[0] == '-') {
      throw std::invalid_argument("token stream: not an unsigned integer: " + tok);
    }
    if (id > 0xFFFFFFFFULL) {
      throw std::invalid_argument("token stream: token id too large: " + tok);
    }
    t.add(static_cast<std::uint32_t>(id));
  }
  if (t.total_ == 0) {
    throw std::invalid_argument("token stream: no tokens");
  }
  return t;
}

void TokenFrequencyTable::add(std::uint32_t token, std::uint64_t n) {
  if (token >= counts_.size()) counts_.resize(token + 1, 0);
  counts_[token] += n;
  total_ += n;
}

std::uint64_t TokenFrequencyTable::count(std::uint32_t token) const {
  return token < counts_.size() ? counts_[token] : 0;
}

std::vector<std::uint32_t> TokenFrequencyTable::ranked() const {
  std::vector<std::uint32_t> order(counts_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
  std::stable_sort(order.begin(), order.end(), [this](std::uint32_t a, std::uint32_t b) {
    if (counts_[a] != counts_[b]) return counts_[a] > counts_[b];
    return a < b;
  });
  return order;
}

std::vector<double> TokenFrequencyTable::coverage_curve() const {
  const std::vector<std::uint32_t> order = ranked();
  std::vector<double> curve(order.size());
  std::uint64_t cum = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    cum += counts_[order[k]];
    curve[k] = total_ == 0 ? 0.0 : static_cast<double>(cum) / static_cast<double>(total_);
  }
  return curve;
}

std::size_t TokenFrequencyTable::min_tokens_for_quantile(double quantile) const {
  if (!(quantile > 0.0 && quantile <= 1.0)) {
    throw std::invalid_argument("min_tokens_for_quantile: quantile outside (0, 1]");
  }
  if (total_ == 0) {
    throw std::domain_error("min_tokens_for_quantile: empty table");
  }
  const std::vector<std::uint32_t> order = ranked();
  std::uint64_t cum = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    cum += counts_[order[k]];
    if (static_cast<double>(cum) / static_cast<double>(total_) >= quantile) {
      return k + 1;
    }
  }
  return order.size();
}

TokenFrequencyTable zipf_counts(std::size_t m, double s, double scale) {
  if (m == 0) throw std::invalid_argument("zipf_counts: m must be >= 1");
  if (!(s > 0.0) || !(scale >= 1.0)) {
    throw std::invalid_argument("zipf_counts: need s > 0 and scale >= 1");
  }
  std::vector<std::uint64_t> counts(m);
  for (std::size_t i = 0; i < m; ++i) {
    counts[i] =
        static_cast<std::uint64_t>(scale / std::pow(static_cast<double>(i + 1), s));
  }
  return TokenFrequencyTable::from_counts(std::move(counts));
}

}  // namespace rdk
