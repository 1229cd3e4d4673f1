#include "resp/words.hpp"

#include <algorithm>

namespace resp {

Word normalize_word(const HnnPair& pair, Word w) {
  Word out;
  for (Letter& l : w) {
    if (l.t == 0) {
      if (!pair.G.contains(l.g))
        throw Error("word letter " + format_element(l.g) + " outside the group");
      if (pair.G.is_identity(l.g)) continue;
      if (!out.empty() && out.back().t == 0) {
        out.back().g = pair.G.mul(out.back().g, l.g);
        if (pair.G.is_identity(out.back().g)) out.pop_back();
      } else {
        out.push_back(std::move(l));
      }
    } else if (l.t == 1 || l.t == -1) {
      out.push_back(l);
    } else {
      throw Error("stable letter exponent must be +1 or -1");
    }
  }
  return out;
}

Word britton_reduce(const HnnPair& pair, Word w) {
  Word cur = normalize_word(pair, std::move(w));
  while (true) {
    // Find the leftmost pinch t^-1 a t or t b t^-1 (with an optional group
    // letter in the middle; a missing middle letter is the identity).
    bool pinched = false;
    for (std::size_t i = 0; i < cur.size() && !pinched; ++i) {
      if (cur[i].t == 0) continue;
      // Locate the next stable letter after i.
      std::size_t mid = i + 1;
      Element g = pair.G.identity();
      if (mid < cur.size() && cur[mid].t == 0) {
        g = cur[mid].g;
        ++mid;
      }
      if (mid >= cur.size() || cur[mid].t == 0) continue;
      if (cur[i].t == -1 && cur[mid].t == 1) {
        if (!pair.A.contains(g)) continue;
        Element img = pair.phi.apply(g);
        Word next(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(i));
        next.push_back(Letter::group(img));
        next.insert(next.end(), cur.begin() + static_cast<std::ptrdiff_t>(mid) + 1,
                    cur.end());
        cur = normalize_word(pair, std::move(next));
        pinched = true;
      } else if (cur[i].t == 1 && cur[mid].t == -1) {
        if (!pair.B.contains(g)) continue;
        Element img = pair.phi_inv.apply(g);
        Word next(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(i));
        next.push_back(Letter::group(img));
        next.insert(next.end(), cur.begin() + static_cast<std::ptrdiff_t>(mid) + 1,
                    cur.end());
        cur = normalize_word(pair, std::move(next));
        pinched = true;
      }
    }
    if (!pinched) return cur;
  }
}

bool is_britton_reduced(const HnnPair& pair, const Word& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].t == 0) continue;
    std::size_t mid = i + 1;
    Element g = pair.G.identity();
    if (mid < w.size() && w[mid].t == 0) {
      g = w[mid].g;
      ++mid;
    }
    if (mid >= w.size() || w[mid].t == 0) continue;
    if (w[i].t == -1 && w[mid].t == 1 && pair.A.contains(g)) return false;
    if (w[i].t == 1 && w[mid].t == -1 && pair.B.contains(g)) return false;
  }
  return true;
}

bool reduces_to_group_letter(const HnnPair& pair, const Word& w) {
  Word r = britton_reduce(pair, w);
  return r.empty() || (r.size() == 1 && r[0].t == 0);
}

Word conjugated_generator_word(const Element& g, int i) {
  Word w;
  int sign = i >= 0 ? 1 : -1;
  int n = i >= 0 ? i : -i;
  for (int k = 0; k < n; ++k) w.push_back(Letter::stable(sign));
  w.push_back(Letter::group(g));
  for (int k = 0; k < n; ++k) w.push_back(Letter::stable(-sign));
  return w;
}

Subgroup core_britton_oracle(const HnnPair& pair, int bound) {
  std::vector<Element> out;
  Subgroup ab = intersect(pair.A, pair.B);
  for (const Element& g : ab.elements()) {
    bool good = true;
    for (int i = -bound; i <= bound && good; ++i)
      good = reduces_to_group_letter(pair, conjugated_generator_word(g, i));
    if (good) out.push_back(g);
  }
  // The set is a two-sided partial-orbit set, hence a subgroup; validate.
  return Subgroup::from_elements(pair.G, std::move(out));
}

Element evaluate_word(const GroupMap& alpha, const Group& target,
                      const Element& y, const Word& w) {
  Element acc = target.identity();
  Element y_inv = target.inverse(y);
  for (const Letter& l : w) {
    if (l.t == 0) {
      acc = target.mul(acc, alpha.apply(l.g));
    } else {
      acc = target.mul(acc, l.t == 1 ? y : y_inv);
    }
  }
  return acc;
}

std::string format_word(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (const Letter& l : w) {
    if (!s.empty()) s += " ";
    if (l.t == 1)
      s += "t";
    else if (l.t == -1)
      s += "t^-1";
    else
      s += format_element(l.g);
  }
  return s;
}

}  // namespace resp
