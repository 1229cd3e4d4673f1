#pragma once

// Words in the HNN extension of a pair: sequences of stable letters t^±1
// and group letters, with the standard pinch reduction.  A reduced word
// contains no subword t^-1 a t with a in A and no subword t b t^-1 with
// b in B.

#include <cstdint>
#include <string>
#include <vector>

#include "resp/hnn.hpp"

namespace resp {

struct Letter {
  int t = 0;   // +1 or -1 for a stable letter, 0 for a group letter
  Element g;   // meaningful only when t == 0

  static Letter stable(int sign) {
    Letter l;
    l.t = sign;
    return l;
  }
  static Letter group(Element e) {
    Letter l;
    l.g = std::move(e);
    return l;
  }
  bool operator==(const Letter&) const = default;
};

using Word = std::vector<Letter>;

// Merges adjacent group letters and drops identity letters; the result
// alternates stable and group letters (identity-only words become empty).
Word normalize_word(const HnnPair& pair, Word w);

// Repeatedly removes the leftmost pinch: t^-1 a t -> phi(a) for a in A,
// t b t^-1 -> phi^{-1}(b) for b in B.  The result is reduced.
Word britton_reduce(const HnnPair& pair, Word w);

bool is_britton_reduced(const HnnPair& pair, const Word& w);

// True when the word reduces to a single group letter (or the empty word).
bool reduces_to_group_letter(const HnnPair& pair, const Word& w);

// Word for t^i g t^-i (i may be negative).
Word conjugated_generator_word(const Element& g, int i);

// {g in A ∩ B : t^i g t^-i reduces to a group letter for all |i| <= bound}.
// This is a two-sided orbit set; it equals the core once bound exceeds the
// fixpoint index.
Subgroup core_britton_oracle(const HnnPair& pair, int bound);

// Image of the word under the homomorphism to `target` sending the stable
// letter to y and group letters through alpha.
Element evaluate_word(const GroupMap& alpha, const Group& target,
                      const Element& y, const Word& w);

std::string format_word(const Word& w);

}  // namespace resp
