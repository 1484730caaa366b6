#pragma once

// Generators and brute-force oracles shared by the unit tests and the
// acceptance runner. Nothing here calls into the extraction or emission code
// under test.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "seqlab/core.hpp"

namespace seqlab::testing {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::string data_path(const std::string& name) {
  return std::string(SEQLAB_TEST_DATA) + "/" + name;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<Prefix> prefixes_of(Scheme s) {
  switch (s) {
    case Scheme::IO: return {Prefix::I, Prefix::O};
    case Scheme::BIO: return {Prefix::B, Prefix::I, Prefix::O};
    case Scheme::BILOU: return {Prefix::B, Prefix::I, Prefix::L, Prefix::O, Prefix::U};
  }
  return {};
}

/// Every label of a scheme over the given classes, "O" first.
inline std::vector<Label> alphabet(Scheme s, const std::vector<std::string>& classes) {
  std::vector<Label> out{Label::outside()};
  for (auto p : prefixes_of(s)) {
    if (p == Prefix::O) continue;
    for (const auto& c : classes) out.push_back(Label::make(p, c));
  }
  return out;
}

/// Calls f on every sequence of exactly `length` labels drawn from `alpha`.
template <class F>
void for_each_sequence(const std::vector<Label>& alpha, std::size_t length, F&& f) {
  std::vector<std::size_t> idx(length, 0);
  std::vector<Label> seq(length, alpha.front());
  while (true) {
    for (std::size_t i = 0; i < length; ++i) seq[i] = alpha[idx[i]];
    f(seq);
    std::size_t k = 0;
    while (k < length && ++idx[k] == alpha.size()) idx[k++] = 0;
    if (k == length) return;
  }
}

inline std::vector<Label> random_labels(Rng& rng, Scheme s,
                                        const std::vector<std::string>& classes,
                                        std::size_t length) {
  const auto alpha = alphabet(s, classes);
  std::vector<Label> out;
  for (std::size_t i = 0; i < length; ++i) out.push_back(alpha[uniform(rng, 0, alpha.size() - 1)]);
  return out;
}

using ChunkTriple = std::tuple<std::string, std::size_t, std::size_t>;

/// Strict chunks by trying every span against the scheme's chunk pattern.
inline std::set<ChunkTriple> oracle_chunks(const std::vector<Label>& labels, Scheme s) {
  std::set<ChunkTriple> out;
  const auto n = labels.size();
  auto is = [&](std::size_t i, Prefix p, const std::string& c) {
    return labels[i].prefix == p && labels[i].class_name == c;
  };
  for (std::size_t a = 0; a < n; ++a) {
    if (labels[a].is_outside()) continue;
    const auto& c = labels[a].class_name;
    for (std::size_t b = a + 1; b <= n; ++b) {
      bool match = false;
      if (s == Scheme::IO) {
        match = (a == 0 || !is(a - 1, Prefix::I, c)) && (b == n || !is(b, Prefix::I, c));
        for (std::size_t i = a; i < b && match; ++i) match = is(i, Prefix::I, c);
      } else if (s == Scheme::BIO) {
        match = is(a, Prefix::B, c) && (b == n || !is(b, Prefix::I, c));
        for (std::size_t i = a + 1; i < b && match; ++i) match = is(i, Prefix::I, c);
      } else {
        if (b == a + 1) {
          match = is(a, Prefix::U, c);
        } else {
          match = is(a, Prefix::B, c) && is(b - 1, Prefix::L, c);
          for (std::size_t i = a + 1; i + 1 < b && match; ++i) match = is(i, Prefix::I, c);
        }
      }
      if (match) out.emplace(c, a, b);
    }
  }
  return out;
}

/// A sequence is consistent iff every non-O position lies inside an oracle chunk.
inline bool oracle_consistent(const std::vector<Label>& labels, Scheme s) {
  std::vector<bool> covered(labels.size(), false);
  for (const auto& [c, a, b] : oracle_chunks(labels, s))
    for (auto i = a; i < b; ++i) covered[i] = true;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (!labels[i].is_outside() && !covered[i]) return false;
  return true;
}

/// Random consistent sequence built from random chunks; returns the chunks too.
inline std::vector<Label> random_consistent(Rng& rng, Scheme s,
                                            const std::vector<std::string>& classes,
                                            std::size_t length,
                                            std::set<ChunkTriple>* chunks = nullptr) {
  std::vector<Label> out;
  out.reserve(length);
  while (out.size() < length) {
    if (uniform(rng, 0, 2) == 0) {
      out.push_back(Label::outside());
      continue;
    }
    const auto len = std::min(uniform(rng, 1, 4), length - out.size());
    const auto& c = classes[uniform(rng, 0, classes.size() - 1)];
    if (s == Scheme::IO && !out.empty() && out.back().class_name == c) {
      out.push_back(Label::outside());
      continue;
    }
    const auto start = out.size();
    for (std::size_t k = 0; k < len; ++k) {
      Prefix p = Prefix::I;
      if (s == Scheme::BIO && k == 0) p = Prefix::B;
      if (s == Scheme::BILOU) {
        if (len == 1) p = Prefix::U;
        else if (k == 0) p = Prefix::B;
        else if (k + 1 == len) p = Prefix::L;
      }
      out.push_back(Label::make(p, c));
    }
    if (chunks) chunks->emplace(c, start, start + len);
  }
  return out;
}

inline std::string join(const std::vector<Label>& labels) {
  std::string s;
  for (const auto& l : labels) s += (s.empty() ? "" : " ") + l.str();
  return s;
}

}  // namespace seqlab::testing
