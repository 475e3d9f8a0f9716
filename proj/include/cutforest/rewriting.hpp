#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cutforest/errors.hpp"

namespace cutforest {

// A group given by an exact normal-form machine: multiplication is
// concatenate-and-normalize, inversion is reverse-and-swap-letters.
// Uppercase is the inverse of lowercase except where a letter is declared
// self-inverse.  Subgroup H membership is decided on normal forms.
struct GroupOracle {
  std::string name;
  std::vector<char> s_letters;                        // default generating set S
  std::map<char, char> letter_inverse;                // involutions map to themselves
  std::function<std::string(const std::string&)> normalize;
  std::function<bool(const std::string&)> h_member;   // on normal forms
  std::vector<std::string> h_generators;              // words generating H
  // canonical representative of the left coset gH; same string iff same coset
  std::function<std::string(const std::string&)> coset_canon;

  std::string multiply(const std::string& a, const std::string& b) const { return normalize(a + b); }

  std::string inverse(const std::string& w) const {
    std::string r;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      auto f = letter_inverse.find(*it);
      require(f != letter_inverse.end(), std::string("unknown generator letter: ") + *it);
      r += f->second;
    }
    return normalize(r);
  }

  bool is_identity(const std::string& w) const { return normalize(w).empty(); }

  bool in_h(const std::string& w) const { return h_member(normalize(w)); }

  // Words of S-length <= radius over the given letters, deduplicated by
  // normal form, in (length, lexicographic) discovery order.
  std::vector<std::string> ball(int radius, const std::vector<char>& letters) const {
    std::vector<std::string> out{""};
    std::set<std::string> seen{""};
    std::size_t frontier_begin = 0;
    for (int d = 0; d < radius; ++d) {
      std::size_t frontier_end = out.size();
      for (std::size_t i = frontier_begin; i < frontier_end; ++i)
        for (char c : letters) {
          std::string w = normalize(out[i] + std::string(1, c));
          if (seen.insert(w).second) out.push_back(w);
        }
      frontier_begin = frontier_end;
    }
    return out;
  }

  std::vector<char> letters_with_inverses(const std::vector<char>& base) const {
    std::vector<char> out;
    for (char c : base) {
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
      char inv = letter_inverse.at(c);
      if (std::find(out.begin(), out.end(), inv) == out.end()) out.push_back(inv);
    }
    return out;
  }
};

namespace detail {

inline std::string free_reduce(const std::string& w, const std::map<char, char>& inv) {
  std::string out;
  for (char c : w) {
    if (!out.empty() && inv.at(out.back()) == c)
      out.pop_back();
    else
      out += c;
  }
  return out;
}

// fixpoint of a rule list; every fixture system here is finite and complete
inline std::string rewrite_fixpoint(std::string w,
                                    const std::vector<std::pair<std::string, std::string>>& rules) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [lhs, rhs] : rules) {
      auto pos = w.find(lhs);
      if (pos != std::string::npos) {
        w = w.substr(0, pos) + rhs + w.substr(pos + lhs.size());
        changed = true;
        break;
      }
    }
  }
  return w;
}

}  // namespace detail

// z: the infinite cyclic group <t>, H trivial
inline GroupOracle oracle_z() {
  GroupOracle o;
  o.name = "z";
  o.s_letters = {'t'};
  o.letter_inverse = {{'t', 'T'}, {'T', 't'}};
  o.normalize = [](const std::string& w) {
    long k = 0;
    for (char c : w) {
      if (c == 't') ++k;
      else if (c == 'T') --k;
      else throw precondition_error("z: unknown letter");
    }
    return std::string((std::size_t)std::labs(k), k >= 0 ? 't' : 'T');
  };
  o.h_member = [](const std::string& w) { return w.empty(); };
  o.h_generators = {};
  o.coset_canon = o.normalize;
  return o;
}

// z2: Z x Z = <x, y | xy = yx>, H = <x>
inline GroupOracle oracle_z2() {
  GroupOracle o;
  o.name = "z2";
  o.s_letters = {'x', 'y'};
  o.letter_inverse = {{'x', 'X'}, {'X', 'x'}, {'y', 'Y'}, {'Y', 'y'}};
  o.normalize = [](const std::string& w) {
    long a = 0, b = 0;
    for (char c : w) {
      if (c == 'x') ++a;
      else if (c == 'X') --a;
      else if (c == 'y') ++b;
      else if (c == 'Y') --b;
      else throw precondition_error("z2: unknown letter");
    }
    return std::string((std::size_t)std::labs(a), a >= 0 ? 'x' : 'X') +
           std::string((std::size_t)std::labs(b), b >= 0 ? 'y' : 'Y');
  };
  o.h_member = [](const std::string& w) {
    return w.find('y') == std::string::npos && w.find('Y') == std::string::npos;
  };
  o.h_generators = {"x"};
  o.coset_canon = [norm = o.normalize](const std::string& w) {
    std::string nf = norm(w), out;
    for (char c : nf)
      if (c == 'y' || c == 'Y') out += c;
    return out;
  };
  return o;
}

// f2: the free group <a, b>, H = <a>
inline GroupOracle oracle_f2() {
  GroupOracle o;
  o.name = "f2";
  o.s_letters = {'a', 'b'};
  o.letter_inverse = {{'a', 'A'}, {'A', 'a'}, {'b', 'B'}, {'B', 'b'}};
  auto inv = o.letter_inverse;
  o.normalize = [inv](const std::string& w) { return detail::free_reduce(w, inv); };
  o.h_member = [](const std::string& w) {
    for (char c : w)
      if (c != 'a' && c != 'A') return false;
    return true;
  };
  o.h_generators = {"a"};
  o.coset_canon = [norm = o.normalize](const std::string& w) {
    std::string nf = norm(w);
    while (!nf.empty() && (nf.back() == 'a' || nf.back() == 'A')) nf.pop_back();
    return nf;
  };
  return o;
}

// dinf: the infinite dihedral group <s, t | s^2 = t^2 = 1>, H = <s>
inline GroupOracle oracle_dinf() {
  GroupOracle o;
  o.name = "dinf";
  o.s_letters = {'s', 't'};
  o.letter_inverse = {{'s', 's'}, {'t', 't'}};
  o.normalize = [](const std::string& w) {
    std::string out;
    for (char c : w) {
      if (c != 's' && c != 't') throw precondition_error("dinf: unknown letter");
      if (!out.empty() && out.back() == c)
        out.pop_back();
      else
        out += c;
    }
    return out;
  };
  o.h_member = [](const std::string& w) { return w.empty() || w == "s"; };
  o.h_generators = {"s"};
  o.coset_canon = [norm = o.normalize](const std::string& w) {
    std::string nf = norm(w);
    if (!nf.empty() && nf.back() == 's') nf.pop_back();
    return nf;
  };
  return o;
}

// z2z3: the free product Z/2 * Z/3 = <s, u | s^2 = u^3 = 1>, H = <s>
inline GroupOracle oracle_z2z3() {
  GroupOracle o;
  o.name = "z2z3";
  o.s_letters = {'s', 'u'};
  o.letter_inverse = {{'s', 's'}, {'u', 'U'}, {'U', 'u'}};
  o.normalize = [](const std::string& w) {
    for (char c : w)
      if (c != 's' && c != 'u' && c != 'U') throw precondition_error("z2z3: unknown letter");
    return detail::rewrite_fixpoint(
        w, {{"ss", ""}, {"uU", ""}, {"Uu", ""}, {"uu", "U"}, {"UU", "u"}});
  };
  o.h_member = [](const std::string& w) { return w.empty() || w == "s"; };
  o.h_generators = {"s"};
  o.coset_canon = [norm = o.normalize](const std::string& w) {
    std::string nf = norm(w);
    if (!nf.empty() && nf.back() == 's') nf.pop_back();
    return nf;
  };
  return o;
}

// bs-amalgam: Z *_{2Z} Z = <a, b | a^2 = b^2>, H = the factor <a>.
// z = a^2 is central; every element is z^k v with v an alternating word in
// a, b.  Normal form strings: (aa)^k or (AA)^-k followed by v.
inline GroupOracle oracle_bs_amalgam() {
  GroupOracle o;
  o.name = "bs-amalgam";
  o.s_letters = {'a', 'b'};
  o.letter_inverse = {{'a', 'A'}, {'A', 'a'}, {'b', 'B'}, {'B', 'b'}};
  o.normalize = [](const std::string& w) {
    long k = 0;
    std::string v;
    auto push = [&](char c) {
      if (!v.empty() && v.back() == c) {
        v.pop_back();
        ++k;  // c*c = z
      } else {
        v += c;
      }
    };
    for (char c : w) {
      switch (c) {
        case 'a': push('a'); break;
        case 'b': push('b'); break;
        case 'A':
          if (!v.empty() && v.back() == 'a') v.pop_back();
          else { --k; push('a'); }
          break;
        case 'B':
          if (!v.empty() && v.back() == 'b') v.pop_back();
          else { --k; push('b'); }
          break;
        default: throw precondition_error("bs-amalgam: unknown letter");
      }
    }
    std::string out;
    for (long i = 0; i < std::labs(k); ++i) out += (k > 0 ? "aa" : "AA");
    return out + v;
  };
  o.h_member = [](const std::string& w) {
    // <a> = {z^k, z^k a}: exactly the normal forms using only a and A
    for (char c : w)
      if (c != 'a' && c != 'A') return false;
    return true;
  };
  o.h_generators = {"a"};
  o.coset_canon = [norm = o.normalize](const std::string& w) {
    // z^k v H = vH since z = a^2 lies in H; a trailing a of v is absorbed
    // too.  The z-power prefix is an even run of A's or merges into a run
    // of a's whose parity tells whether v starts with a.
    std::string nf = norm(w), v;
    if (!nf.empty() && nf[0] == 'A') {
      std::size_t i = 0;
      while (i < nf.size() && nf[i] == 'A') ++i;
      v = nf.substr(i);
    } else {
      std::size_t run = 0;
      while (run < nf.size() && nf[run] == 'a') ++run;
      v = (run % 2 ? "a" : "") + nf.substr(run);
    }
    if (!v.empty() && v.back() == 'a') v.pop_back();
    return v;
  };
  return o;
}

inline GroupOracle group_fixture(const std::string& name) {
  if (name == "z") return oracle_z();
  if (name == "z2") return oracle_z2();
  if (name == "f2") return oracle_f2();
  if (name == "dinf") return oracle_dinf();
  if (name == "z2z3") return oracle_z2z3();
  if (name == "bs-amalgam") return oracle_bs_amalgam();
  throw precondition_error("unknown group fixture: " + name);
}

inline std::vector<std::string> group_fixture_names() {
  return {"z", "z2", "f2", "dinf", "z2z3", "bs-amalgam"};
}

// Sampled soundness checks for a normal-form machine: idempotence,
// multiplicativity, inverses, and H-closure on the ball of the given radius.
// A failure means two normal forms for one element somewhere.
inline void check_oracle(const GroupOracle& o, int radius) {
  auto letters = o.letters_with_inverses(o.s_letters);
  for (auto& hw : o.h_generators)
    for (char c : hw)
      if (std::find(letters.begin(), letters.end(), c) == letters.end()) letters.push_back(c);
  auto words = o.ball(radius, letters);
  for (auto& w : words) {
    if (o.normalize(o.normalize(w)) != o.normalize(w))
      throw precondition_error(o.name + ": normalize is not idempotent on " + w);
    if (!o.is_identity(o.multiply(w, o.inverse(w))))
      throw precondition_error(o.name + ": inverse law fails on " + w);
  }
  // associativity and multiplicativity on sampled triples
  std::size_t step = std::max<std::size_t>(1, words.size() / 12);
  for (std::size_t i = 0; i < words.size(); i += step)
    for (std::size_t j = 0; j < words.size(); j += step)
      for (std::size_t k = 0; k < words.size(); k += step) {
        auto ab_c = o.multiply(o.multiply(words[i], words[j]), words[k]);
        auto a_bc = o.multiply(words[i], o.multiply(words[j], words[k]));
        if (ab_c != a_bc)
          throw precondition_error(o.name + ": associativity fails on sampled triple");
      }
  // H is closed under product and inverse on sampled pairs
  std::vector<std::string> h_elems;
  for (auto& w : words)
    if (o.in_h(w)) h_elems.push_back(o.normalize(w));
  for (auto& x : h_elems)
    for (auto& y : h_elems) {
      if (!o.in_h(o.multiply(x, y)))
        throw precondition_error(o.name + ": H not closed under product");
      if (!o.in_h(o.inverse(x)))
        throw precondition_error(o.name + ": H not closed under inverse");
    }
}

}  // namespace cutforest
