#include "fo2dec/validation.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace fo2dec {

namespace {

std::string hset_name(ForestMorphism const& m, HSet x) {
  std::string s = "{";
  bool first = true;
  for_bits(x, [&](unsigned h) {
    s += (first ? "" : ",") + m.algebra.H.name(h);
    first = false;
  });
  return s + "}";
}

constexpr std::size_t kMaxCounterexamples = 5;
constexpr std::size_t kMaxRealizers = 40;
constexpr std::size_t kMaxShal = 64;  // game solver limit
constexpr std::size_t kMiddleLen = 4;

Shal concat(Shal a, Shal const& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Shals spelled out by the derivations of a Sat[X] run.
class Realizers {
 public:
  Realizers(ConfigSpace& space, SatState const& st, unsigned k)
      : space_(space), st_(st), k_(k), memo_(st.elements.size()),
        done_(st.elements.size(), false) {}

  std::vector<Shal> const& of(std::size_t e) {
    if (done_[e]) return memo_[e];
    done_[e] = true;
    auto const& d = st_.derivations[e];
    std::vector<Shal> out;
    switch (d.rule) {
      case SatDerivation::Rule::Letter:
        out.push_back(Shal{d.letter});
        break;
      case SatDerivation::Rule::Sum: {
        auto const& a = of(d.left);
        auto const& b = of(d.right);
        for (auto const& u : a)
          for (auto const& v : b)
            if (out.size() < kMaxRealizers) push(out, concat(u, v));
        break;
      }
      case SatDerivation::Rule::Padded: {
        auto l = padded(d.left);
        auto r = padded(d.right);
        auto mids = middles(d.middle);
        for (auto const& m : mids)
          for (auto const& u : l)
            for (auto const& v : r)
              if (out.size() < kMaxRealizers)
                push(out, concat(concat(u, m), v));
        break;
      }
    }
    memo_[e] = std::move(out);
    return memo_[e];
  }

 private:
  static void push(std::vector<Shal>& out, Shal s) {
    if (s.size() <= kMaxShal) out.push_back(std::move(s));
  }

  // u^r with U^r = omega(U) and r >= k
  std::vector<Shal> padded(std::size_t e) {
    Configuration const& u = st_.elements[e];
    Configuration w = space_.omega(u);
    Configuration p = u;
    std::size_t ex = 1;
    while (!(p == w) && ex < kMaxShal) {
      p = space_.sum(p, u);
      ++ex;
    }
    std::size_t r = ex * ((k_ + ex - 1) / ex);
    std::vector<Shal> out;
    for (auto const& s : of(e)) {
      Shal t;
      for (std::size_t i = 0; i < r && t.size() <= kMaxShal; ++i)
        t = concat(std::move(t), s);
      push(out, std::move(t));
      if (out.size() >= 2) break;
    }
    return out;
  }

  // witnesses of the uplift profiles first, then short shals with
  // exactly the alphabet bs
  std::vector<Shal> middles(LetterSet bs) {
    auto& table = space_.profiles();
    std::vector<Shal> out;
    auto add = [&](Shal const& s) {
      if (alphabet_of(s) == bs
          && std::find(out.begin(), out.end(), s) == out.end())
        out.push_back(s);
    };
    Configuration up = space_.uplift(bs);
    for (SetId sid : up.family)
      for (ProfileId p : space_.set(sid)) add(table.witness_shal(p));
    std::vector<LetterId> ls;
    for_bits(bs, [&](unsigned c) { ls.push_back(c); });
    for (auto const& s : enumerate_shals(ls, kMiddleLen)) {
      if (out.size() >= kMaxRealizers / 2) break;
      add(s);
    }
    return out;
  }

  ConfigSpace& space_;
  SatState const& st_;
  unsigned k_;
  std::vector<std::vector<Shal>> memo_;
  std::vector<bool> done_;
};

bool derivation_witness(ConfigSpace& space, Realizers& rz, std::size_t e,
                        Configuration const& el, unsigned k, HSet x) {
  std::vector<Shal> q;
  try {
    q = rz.of(e);
  } catch (BudgetExceeded const&) {
    return false;
  }
  if (q.empty()) return false;
  GkUniverse uni(space, k, x, q);
  std::vector<SetId> fam;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j)
      if (!uni.linked(i, j)) return false;
    auto const& f = uni.config(i).family;
    fam.insert(fam.end(), f.begin(), f.end());
  }
  return space.leq(el, space.make(std::move(fam)));
}

}  // namespace

ProfileValidation validate_profiles(ForestMorphism const& m,
                                    std::size_t max_len,
                                    std::optional<std::vector<LetterId>> letters,
                                    bool plugged) {
  ProfileTable table(m);
  auto const& la = table.letters();
  std::vector<LetterId> ls;
  if (letters) {
    ls = *letters;
  } else {
    for (LetterId c = 0; c < la.size(); ++c) ls.push_back(c);
  }
  ProfileValidation out;
  for (auto const& p : enumerate_shals(ls, max_len)) {
    for (std::size_t pos = 0; pos < p.size(); ++pos) {
      ++out.positions;
      Profile const folded = table.get(shal_profile(table, p, pos));
      Profile const sem = semantic_profile(m, la, p, pos);
      bool bad = !(folded == sem);
      if (!bad && plugged) bad = !(plugged_profile(m, la, p, pos) == sem);
      if (bad) {
        ++out.mismatches;
        if (out.counterexamples.size() < kMaxCounterexamples)
          out.counterexamples.push_back(print_shal(p, la) + " @" +
                                        std::to_string(pos));
      }
    }
  }
  return out;
}

bool PropAlgoReport::ok() const {
  return std::all_of(cases.begin(), cases.end(), [](PropAlgoCase const& c) {
    return c.sat_complete && c.not_below == 0 && c.unverified == 0;
  });
}

unsigned prop_algo_rounds(std::size_t letters, std::size_t profiles,
                          unsigned cap) {
  std::size_t k = 2 * letters * letters * (profiles + 1);
  return static_cast<unsigned>(std::min<std::size_t>(k, cap));
}

PropAlgoReport validate_prop_algo(ForestMorphism const& m,
                                  std::optional<unsigned> k,
                                  std::size_t len_bound,
                                  SatOptions const& opts) {
  ProfileTable table(m);
  ConfigSpace space(table);
  PropAlgoReport rep;
  rep.len_bound = len_bound;
  std::size_t nh = m.h_size();
  std::vector<SatState> sats;
  for (HSet x = 0; x < (HSet{1} << nh); ++x)
    sats.push_back(sat_fixpoint(space, x, opts));
  if (k) {
    rep.k = *k;
  } else {
    // profiles reached by the fixpoints stand in for the configuration count
    rep.k = prop_algo_rounds(table.letter_count(), table.size());
  }
  for (HSet x = 0; x < (HSet{1} << nh); ++x) {
    auto const& st = sats[x];
    PropAlgoCase c;
    c.x = x;
    c.x_name = hset_name(m, x);
    c.sat_elements = st.elements.size();
    c.sat_complete = st.complete;
    GkUniverse uni(space, rep.k, x, len_bound);
    c.shals = uni.shals().size();
    std::map<LetterSet, std::vector<std::size_t>> by_alpha;
    for (std::size_t i = 0; i < st.elements.size(); ++i)
      by_alpha[st.elements[i].alphabet].push_back(i);
    std::map<LetterSet, std::vector<std::size_t>> gk_alpha;
    for (std::size_t i = 0; i < c.shals; ++i)
      gk_alpha[uni.config(i).alphabet].push_back(i);
    auto const& la = table.letters();
    for (std::size_t i = 0; i < c.shals; ++i) {
      auto const& g = uni.config(i);
      auto const& cands = by_alpha[g.alphabet];
      bool below = std::any_of(cands.begin(), cands.end(), [&](std::size_t e) {
        return space.leq(g, st.elements[e]);
      });
      if (!below) {
        ++c.not_below;
        if (c.counterexamples.size() < kMaxCounterexamples)
          c.counterexamples.push_back("not below Sat: " +
                                      print_shal(uni.shals()[i], la));
      }
    }
    Realizers rz(space, st, rep.k);
    for (std::size_t e = 0; e < st.elements.size(); ++e) {
      auto const& el = st.elements[e];
      auto const& cands = gk_alpha[el.alphabet];
      bool found = std::any_of(cands.begin(), cands.end(), [&](std::size_t i) {
        return space.leq(el, uni.config(i));
      });
      if (!found && derivation_witness(space, rz, e, el, rep.k, x)) {
        ++c.by_derivation;
        found = true;
      }
      if (!found) {
        ++c.unverified;
        if (c.counterexamples.size() < kMaxCounterexamples)
          c.counterexamples.push_back("no witness: " +
                                      space.dump(el));
      }
    }
    rep.cases.push_back(std::move(c));
  }
  return rep;
}

}  // namespace fo2dec
