// SPDX-License-Identifier: Apache-2.0

#include "ctcdec/lm/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "ctcdec/error.hpp"
#include "ctcdec/log_math.hpp"

namespace ctcdec {

namespace {

constexpr std::string_view kMagic = "NGLM1";

const char* DirectionName(Direction d) {
  return d == Direction::kForward ? "forward" : "backward";
}

}  // namespace

std::size_t NGramLM::KeyHash::operator()(const std::vector<TokenId>& key) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ key.size();
  for (TokenId id : key) {
    h ^= static_cast<std::uint32_t>(id);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

NGramLM::NGramLM(std::shared_ptr<const Alphabet> alphabet, int order, Direction direction,
                 std::size_t shift)
    : alphabet_(std::move(alphabet)), order_(order), direction_(direction), shift_(shift) {
  if (!alphabet_) throw DomainError("ngram: null alphabet");
  if (order_ < 1 || order_ > kMaxOrder) {
    throw DomainError("ngram: order must lie in [1, " + std::to_string(kMaxOrder) + "]");
  }
  if (direction_ == Direction::kForward && shift_ != 0) {
    throw DomainError("ngram: future shift only applies to backward models");
  }
  for (std::size_t i = 0; i < alphabet_->size(); ++i) {
    if (InSupport(static_cast<TokenId>(i))) ++support_size_;
  }
}

NGramLM::NGramLM(const NGramLM& other)
    : alphabet_(other.alphabet_),
      order_(other.order_),
      direction_(other.direction_),
      shift_(other.shift_),
      noise_epsilon_(other.noise_epsilon_),
      support_size_(other.support_size_),
      table_(other.table_) {}

NGramLM::NGramLM(NGramLM&& other) noexcept
    : alphabet_(std::move(other.alphabet_)),
      order_(other.order_),
      direction_(other.direction_),
      shift_(other.shift_),
      noise_epsilon_(other.noise_epsilon_),
      support_size_(other.support_size_),
      table_(std::move(other.table_)),
      advance_calls_(other.advance_calls_.load()) {}

bool NGramLM::InSupport(TokenId id) const {
  return alphabet_->Valid(id) && id != alphabet_->blank_id() && id != alphabet_->bos_id();
}

void NGramLM::CheckToken(TokenId token) const {
  if (!alphabet_->Valid(token)) {
    throw DomainError("ngram: invalid token id " + std::to_string(token));
  }
  if (alphabet_->IsBlank(token)) throw DomainError("ngram: blank never enters the LM");
}

void NGramLM::AddEvent(std::span<const TokenId> context, TokenId token) {
  if (!InSupport(token)) {
    throw DomainError("ngram: token " + std::to_string(token) + " cannot be predicted");
  }
  const std::size_t len = std::min(context.size(), static_cast<std::size_t>(order_ - 1));
  std::vector<TokenId> key;
  key.reserve(len);
  for (std::size_t k = 0; k <= len; ++k) {
    if (k > 0) {
      CheckToken(context[k - 1]);
      key.push_back(context[k - 1]);
    }
    auto& entry = table_[key];
    auto it = std::lower_bound(entry.counts.begin(), entry.counts.end(), token,
                               [](const auto& p, TokenId t) { return p.first < t; });
    if (it == entry.counts.end() || it->first != token) {
      entry.counts.insert(it, {token, 1});
    } else {
      ++it->second;
    }
    ++entry.total;
  }
}

LMState NGramLM::StartState() const {
  LMState s = EmptyState();
  if (order_ > 1) {
    s.context.push_back(direction_ == Direction::kForward ? alphabet_->bos_id()
                                                          : alphabet_->eos_id());
  }
  return s;
}

LMState NGramLM::StateFor(std::span<const TokenId> tokens) const {
  LMState s = EmptyState();
  const auto limit = static_cast<std::size_t>(order_ - 1);
  if (direction_ == Direction::kForward) {
    for (auto it = tokens.rbegin(); it != tokens.rend() && s.context.size() < limit; ++it) {
      CheckToken(*it);
      s.context.push_back(*it);
    }
    if (s.context.size() < limit) s.context.push_back(alphabet_->bos_id());
  } else {
    for (auto it = tokens.begin(); it != tokens.end() && s.context.size() < limit; ++it) {
      CheckToken(*it);
      s.context.push_back(*it);
    }
    if (s.context.size() < limit) s.context.push_back(alphabet_->eos_id());
  }
  return s;
}

LMState NGramLM::Advance(const LMState& state, TokenId token) const {
  CheckToken(token);
  advance_calls_.fetch_add(1, std::memory_order_relaxed);
  LMState next{state.direction, {}};
  const auto limit = static_cast<std::size_t>(order_ - 1);
  if (limit == 0) return next;
  next.context.reserve(limit);
  next.context.push_back(token);
  for (std::size_t i = 0; i < state.context.size() && next.context.size() < limit; ++i) {
    next.context.push_back(state.context[i]);
  }
  return next;
}

std::vector<double> NGramLM::Predict(const LMState& state) const {
  const std::size_t vocab = alphabet_->size();
  std::vector<double> prob(vocab, 0.0);
  const double uniform = 1.0 / static_cast<double>(support_size_);
  for (std::size_t w = 0; w < vocab; ++w) {
    if (InSupport(static_cast<TokenId>(w))) prob[w] = uniform;
  }
  // Interpolated Witten-Bell, from the empty context outwards:
  //   p_k(w) = (c_k(w) + T_k * p_{k-1}(w)) / (N_k + T_k)
  // where N_k is the context count and T_k the number of distinct followers.
  const std::size_t len = std::min(state.context.size(), static_cast<std::size_t>(order_ - 1));
  std::vector<TokenId> key;
  key.reserve(len);
  for (std::size_t k = 0; k <= len; ++k) {
    if (k > 0) key.push_back(state.context[k - 1]);
    auto it = table_.find(key);
    if (it == table_.end()) break;
    const auto& entry = it->second;
    const auto types = static_cast<double>(entry.counts.size());
    const auto denom = static_cast<double>(entry.total) + types;
    const double backoff = types / denom;
    for (double& p : prob) p *= backoff;
    for (const auto& [token, count] : entry.counts) {
      prob[static_cast<std::size_t>(token)] += static_cast<double>(count) / denom;
    }
  }
  std::vector<double> out(vocab, kLogZero);
  for (std::size_t w = 0; w < vocab; ++w) {
    if (InSupport(static_cast<TokenId>(w))) out[w] = std::log(prob[w]);
  }
  return out;
}

double NGramLM::LogProb(const LMState& state, TokenId token) const {
  if (!alphabet_->Valid(token)) throw DomainError("ngram: invalid token id");
  return Predict(state)[static_cast<std::size_t>(token)];
}

std::uint64_t NGramLM::Count(std::span<const TokenId> context, TokenId token) const {
  auto it = table_.find(std::vector<TokenId>(context.begin(), context.end()));
  if (it == table_.end()) return 0;
  for (const auto& [t, c] : it->second.counts) {
    if (t == token) return c;
  }
  return 0;
}

std::uint64_t NGramLM::ContextTotal(std::span<const TokenId> context) const {
  auto it = table_.find(std::vector<TokenId>(context.begin(), context.end()));
  return it == table_.end() ? 0 : it->second.total;
}

void NGramLM::Write(std::ostream& out) const {
  out << kMagic << '\n'
      << "order " << order_ << '\n'
      << "direction " << DirectionName(direction_) << '\n'
      << "shift " << shift_ << '\n';
  out << "noise_epsilon ";
  if (noise_epsilon_) {
    out << std::setprecision(std::numeric_limits<double>::max_digits10) << *noise_epsilon_;
  } else {
    out << "none";
  }
  out << '\n'
      << "vocab_hash " << std::hex << std::setw(16) << std::setfill('0')
      << alphabet_->Fingerprint() << std::dec << std::setfill(' ') << '\n'
      << "vocab_size " << alphabet_->size() << '\n'
      << "contexts " << table_.size() << '\n';
  // Sorted so that files are stable across runs and diffable.
  std::map<std::vector<TokenId>, const ContextCounts*> sorted;
  for (const auto& [key, entry] : table_) sorted.emplace(key, &entry);
  for (const auto& [key, entry] : sorted) {
    out << key.size();
    for (TokenId id : key) out << ' ' << id;
    out << " |";
    for (const auto& [token, count] : entry->counts) out << ' ' << token << ':' << count;
    out << '\n';
  }
}

NGramLM NGramLM::Read(std::istream& in, std::shared_ptr<const Alphabet> alphabet) {
  std::string magic, key;
  if (!(in >> magic) || magic != kMagic) throw IoError("ngram: missing NGLM1 header");
  auto expect = [&in](const char* name) {
    std::string k;
    if (!(in >> k) || k != name) throw IoError(std::string("ngram: expected field ") + name);
  };
  int order = 0;
  std::string direction_name, eps_text;
  std::size_t shift = 0, vocab_size = 0, contexts = 0;
  std::uint64_t hash = 0;
  expect("order");
  in >> order;
  expect("direction");
  in >> direction_name;
  expect("shift");
  in >> shift;
  expect("noise_epsilon");
  in >> eps_text;
  expect("vocab_hash");
  in >> std::hex >> hash >> std::dec;
  expect("vocab_size");
  in >> vocab_size;
  expect("contexts");
  in >> contexts;
  if (!in) throw IoError("ngram: malformed NGLM1 header");
  if (direction_name != "forward" && direction_name != "backward") {
    throw IoError("ngram: unknown direction " + direction_name);
  }
  if (hash != alphabet->Fingerprint() || vocab_size != alphabet->size()) {
    throw IoError("ngram: model was trained with a different alphabet");
  }
  const Direction direction =
      direction_name == "forward" ? Direction::kForward : Direction::kBackward;
  NGramLM lm = [&] {
    try {
      return NGramLM(std::move(alphabet), order, direction, shift);
    } catch (const DomainError& e) {
      throw IoError(e.what());
    }
  }();
  if (eps_text != "none") {
    try {
      lm.noise_epsilon_ = std::stod(eps_text);
    } catch (const std::exception&) {
      throw IoError("ngram: bad noise_epsilon " + eps_text);
    }
  }
  std::string line;
  std::getline(in, line);
  for (std::size_t c = 0; c < contexts; ++c) {
    if (!std::getline(in, line)) throw IoError("ngram: truncated context table");
    std::istringstream row(line);
    std::size_t len = 0;
    row >> len;
    if (!row || len >= static_cast<std::size_t>(order)) throw IoError("ngram: bad context record");
    std::vector<TokenId> ctx(len);
    for (auto& id : ctx) {
      row >> id;
      if (!row || !lm.alphabet_->Valid(id)) throw IoError("ngram: bad context token");
    }
    std::string bar;
    row >> bar;
    if (bar != "|") throw IoError("ngram: bad context record");
    ContextCounts entry;
    std::string cell;
    while (row >> cell) {
      auto colon = cell.find(':');
      if (colon == std::string::npos) throw IoError("ngram: bad count cell " + cell);
      try {
        auto token = static_cast<TokenId>(std::stol(cell.substr(0, colon)));
        auto count = static_cast<std::uint64_t>(std::stoull(cell.substr(colon + 1)));
        if (!lm.InSupport(token) || count == 0) throw IoError("ngram: bad count cell " + cell);
        entry.counts.emplace_back(token, count);
        entry.total += count;
      } catch (const std::logic_error&) {
        throw IoError("ngram: bad count cell " + cell);
      }
    }
    std::sort(entry.counts.begin(), entry.counts.end());
    lm.table_.emplace(std::move(ctx), std::move(entry));
  }
  return lm;
}

void NGramLM::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model " + path);
  Write(out);
  if (!out) throw IoError("write failed for " + path);
}

NGramLM NGramLM::Load(const std::string& path, std::shared_ptr<const Alphabet> alphabet) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model " + path);
  return Read(in, std::move(alphabet));
}

NGramLM TrainNGram(std::span<const Transcript> corpus, std::shared_ptr<const Alphabet> alphabet,
                   int order, Direction direction, std::size_t shift) {
  if (corpus.empty()) throw DomainError("ngram: empty training corpus");
  NGramLM lm(std::move(alphabet), order, direction, shift);
  const TokenId eos = lm.alphabet().eos_id();
  const auto limit = static_cast<std::size_t>(order - 1);
  std::vector<TokenId> context;
  for (const auto& sentence : corpus) {
    const auto& y = sentence.labels;
    const std::size_t n = y.size();
    for (std::size_t t = 0; t <= n; ++t) {
      const TokenId target = t < n ? y[t] : eos;
      if (direction == Direction::kForward) {
        context = lm.StateFor(std::span(y.data(), t)).context;
      } else {
        const std::size_t start = t + 1 + shift;
        context.clear();
        if (start <= n) context = lm.StateFor(std::span(y.data() + start, n - start)).context;
      }
      if (context.size() > limit) context.resize(limit);
      lm.AddEvent(context, target);
    }
  }
  return lm;
}

NGramLM TrainBackwardNGram(std::span<const AugmentedPair> pairs,
                           std::shared_ptr<const Alphabet> alphabet, int order,
                           std::size_t shift, std::optional<double> noise_epsilon) {
  if (pairs.empty()) throw DomainError("ngram: empty training corpus");
  NGramLM lm(std::move(alphabet), order, Direction::kBackward, shift);
  lm.set_noise_epsilon(noise_epsilon);
  const TokenId eos = lm.alphabet().eos_id();
  std::vector<TokenId> context;
  for (const auto& pair : pairs) {
    const auto& y = pair.target.labels;
    const auto& noisy = pair.noisy_future.labels;
    if (pair.alignment_map.size() != y.size()) {
      throw DomainError("ngram: alignment map length does not match target");
    }
    for (std::size_t t = 0; t <= y.size(); ++t) {
      context.clear();
      if (t < y.size() && pair.alignment_map[t] != kFutureEnd) {
        const std::size_t start = pair.alignment_map[t];
        if (start > noisy.size()) throw DomainError("ngram: alignment index out of range");
        context = lm.StateFor(std::span(noisy.data() + start, noisy.size() - start)).context;
      }
      lm.AddEvent(context, t < y.size() ? y[t] : eos);
    }
  }
  return lm;
}

}  // namespace ctcdec
