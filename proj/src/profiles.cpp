#include "fo2dec/profiles.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>

namespace fo2dec {

std::size_t ProfileHash::operator()(Profile const& p) const noexcept {
  std::size_t h = std::hash<std::uint64_t>{}(p.alphabet) * 31 + p.arity;
  for (HSet x : p.fh) {
    h = h * 1000003u ^ x;
  }
  for (VSet x : p.fv) {
    h = h * 1000003u ^ std::hash<std::uint64_t>{}(x);
  }
  return h;
}

////////////////////////////////////////////////////////////////////////
// SetAlgebra
////////////////////////////////////////////////////////////////////////

SetAlgebra::SetAlgebra(ForestAlgebra const& alg)
    : alg_(alg), nh_(alg.H.size()), nv_(alg.V.size()) {
  if (nh_ > kMaxH) {
    throw AlgebraError(AlgebraError::Kind::TooLarge,
                       "profiles support at most " + std::to_string(kMaxH)
                           + " forest types");
  }
  if (nv_ > kMaxV) {
    throw AlgebraError(AlgebraError::Kind::TooLarge,
                       "profiles support at most " + std::to_string(kMaxV)
                           + " context types");
  }
  if (nh_ <= 6) {
    std::size_t n = subsets();
    plus_table_.resize(n * n);
    for (HSet a = 0; a < n; ++a) {
      for (HSet b = 0; b < n; ++b) {
        HSet out = 0;
        for_bits(a, [&](unsigned x) {
          for_bits(b, [&](unsigned y) { out |= HSet{1} << alg_.plus(x, y); });
        });
        plus_table_[(a << nh_) | b] = out;
      }
    }
  }
}

HSet SetAlgebra::plus(HSet a, HSet b) const {
  if (!plus_table_.empty()) {
    return plus_table_[(a << nh_) | b];
  }
  HSet out = 0;
  for_bits(a, [&](unsigned x) {
    for_bits(b, [&](unsigned y) { out |= HSet{1} << alg_.plus(x, y); });
  });
  return out;
}

HSet SetAlgebra::act(VSet v, HSet g) const {
  HSet out = 0;
  for_bits(v, [&](unsigned x) {
    for_bits(g, [&](unsigned y) { out |= HSet{1} << alg_.act(x, y); });
  });
  return out;
}

VSet SetAlgebra::ins_r(VSet v, HSet g) const {
  VSet out = 0;
  for_bits(v, [&](unsigned x) {
    for_bits(g, [&](unsigned y) { out |= VSet{1} << alg_.ins_r(x, y); });
  });
  return out;
}

VSet SetAlgebra::ins_l(HSet g, VSet v) const {
  VSet out = 0;
  for_bits(g, [&](unsigned x) {
    for_bits(v, [&](unsigned y) { out |= VSet{1} << alg_.ins_l(x, y); });
  });
  return out;
}

VSet SetAlgebra::times(VSet a, VSet b) const {
  VSet out = 0;
  for_bits(a, [&](unsigned x) {
    for_bits(b, [&](unsigned y) { out |= VSet{1} << alg_.times(x, y); });
  });
  return out;
}

VSet SetAlgebra::closure(VSet gens) const {
  VSet cur = gens;
  while (true) {
    VSet next = cur | times(cur, cur);
    if (next == cur) {
      return cur;
    }
    cur = next;
  }
}

////////////////////////////////////////////////////////////////////////
// Profiles
////////////////////////////////////////////////////////////////////////

Profile letter_profile(LetterId c, ShalAlphabet const& letters,
                       ForestMorphism const& m, SetAlgebra const& sa) {
  if (c >= letters.size()) {
    throw TermError(TermError::Kind::UnknownLabel, "unknown shal letter");
  }
  auto const& l = letters.letter(c);
  auto const& alg = m.algebra;
  std::size_t n = sa.subsets();
  Profile p;
  p.alphabet = LetterSet{1} << c;
  p.fh.assign(n, 0);
  p.fv.assign(n, 0);
  switch (l.kind) {
    case ShalLetter::Kind::Leaf:
      std::fill(p.fh.begin(), p.fh.end(), HSet{1} << m.leaf_image.at(l.leaf));
      break;
    case ShalLetter::Kind::InnerLeaf:
      std::fill(p.fh.begin(), p.fh.end(),
                HSet{1} << alg.act(m.inner_image.at(l.inner),
                                   m.leaf_image.at(l.leaf)));
      break;
    case ShalLetter::Kind::InnerPort: {
      p.arity = 1;
      Elem vb = m.inner_image.at(l.inner);
      for (HSet g = 0; g < n; ++g) {
        p.fh[g] = sa.act(VSet{1} << vb, g);
        p.fv[g] = VSet{1} << vb;
      }
      break;
    }
  }
  return p;
}

Profile profile_sum(Profile const& u, Profile const& v, Keep keep,
                    SetAlgebra const& sa) {
  std::size_t n = sa.subsets();
  Profile out;
  out.arity = static_cast<std::uint8_t>(std::min(u.arity + v.arity, 2));
  out.alphabet = u.alphabet | v.alphabet;
  out.fh.resize(n);
  out.fv.resize(n);
  for (std::size_t g = 0; g < n; ++g) {
    out.fh[g] = sa.plus(u.fh[g], v.fh[g]);
    out.fv[g] = keep == Keep::Left ? sa.ins_r(u.fv[g], v.fh[g])
                                   : sa.ins_l(u.fh[g], v.fv[g]);
  }
  return out;
}

ProfileTable::ProfileTable(ForestMorphism m)
    : m_(std::move(m)), letters_(m_.alphabet), sa_(m_.algebra) {
  if (letters_.size() > kMaxLetters) {
    throw AlgebraError(AlgebraError::Kind::TooLarge,
                       "profiles support at most "
                           + std::to_string(kMaxLetters) + " shal letters");
  }
  letter_ids_.assign(letters_.size(), std::nullopt);
}

ProfileId ProfileTable::intern(Profile p, Shal witness, std::size_t pos) {
  auto it = index_.find(p);
  if (it != index_.end()) {
    return it->second;
  }
  auto id = static_cast<ProfileId>(profiles_.size());
  index_.emplace(p, id);
  profiles_.push_back(std::move(p));
  witness_.emplace_back(std::move(witness), pos);
  return id;
}

ProfileId ProfileTable::letter(LetterId c) {
  if (!letter_ids_.at(c)) {
    letter_ids_[c] = intern(letter_profile(c, letters_, m_, sa_), Shal{c}, 0);
  }
  return *letter_ids_[c];
}

ProfileId ProfileTable::sum(ProfileId u, ProfileId v, Keep keep) {
  auto key = (std::uint64_t{u} << 32) | v;
  auto& memo = keep == Keep::Left ? sum_l_ : sum_r_;
  if (auto it = memo.find(key); it != memo.end()) {
    return it->second;
  }
  Profile p = profile_sum(profiles_[u], profiles_[v], keep, sa_);
  Shal w = witness_[u].first;
  w.insert(w.end(), witness_[v].first.begin(), witness_[v].first.end());
  std::size_t pos = keep == Keep::Left
                        ? witness_[u].second
                        : witness_[u].first.size() + witness_[v].second;
  ProfileId id = intern(std::move(p), std::move(w), pos);
  memo.emplace(key, id);
  return id;
}

ProfileId ProfileTable::forest_part(ProfileId id) {
  if (auto it = forest_part_.find(id); it != forest_part_.end()) {
    return it->second;
  }
  Profile p = profiles_[id];
  std::fill(p.fv.begin(), p.fv.end(), 0);
  // the witness position is irrelevant once fV is cleared
  ProfileId out = intern(std::move(p), witness_[id].first, witness_[id].second);
  forest_part_.emplace(id, out);
  return out;
}

bool ProfileTable::is_port(ProfileId id) const {
  auto const& fv = profiles_.at(id).fv;
  return std::any_of(fv.begin(), fv.end(), [](VSet s) { return s != 0; });
}

std::string ProfileTable::letter_set_name(LetterSet s) const {
  std::string out = "{";
  bool first = true;
  for_bits(s, [&](unsigned c) {
    if (!first) {
      out += ", ";
    }
    first = false;
    out += letters_.name(c);
  });
  return out + "}";
}

std::string ProfileTable::dump(ProfileId id) const {
  auto const& p = profiles_.at(id);
  auto const& H = m_.algebra.H;
  auto const& V = m_.algebra.V;
  auto hset = [&](HSet s) {
    std::string out = "{";
    bool first = true;
    for_bits(s, [&](unsigned h) {
      out += (first ? "" : ",") + H.name(h);
      first = false;
    });
    return out + "}";
  };
  auto vset = [&](VSet s) {
    std::string out = "{";
    bool first = true;
    for_bits(s, [&](unsigned v) {
      out += (first ? "" : ",") + V.name(v);
      first = false;
    });
    return out + "}";
  };
  std::ostringstream out;
  out << int(p.arity) << " | " << letter_set_name(p.alphabet) << " | ";
  for (std::size_t g = 0; g < p.fh.size(); ++g) {
    out << (g == 0 ? "" : " ") << hset(p.fh[g]);
  }
  out << " | ";
  for (std::size_t g = 0; g < p.fv.size(); ++g) {
    out << (g == 0 ? "" : " ") << vset(p.fv[g]);
  }
  return out.str();
}

ProfileId shal_profile(ProfileTable& table, Shal const& p, std::size_t pos) {
  if (p.empty() || pos >= p.size()) {
    throw TermError(TermError::Kind::BadNodeRef, "position outside the shal");
  }
  ProfileId acc = table.letter(p[0]);
  for (std::size_t i = 1; i < p.size(); ++i) {
    acc = table.sum(acc, table.letter(p[i]),
                    i <= pos ? Keep::Right : Keep::Left);
  }
  return acc;
}

////////////////////////////////////////////////////////////////////////
// Semantic cross-checks
////////////////////////////////////////////////////////////////////////

Profile semantic_profile(ForestMorphism const& m, ShalAlphabet const& letters,
                         Shal const& p, std::size_t pos) {
  auto const& alg = m.algebra;
  std::size_t nh = alg.H.size();
  std::size_t n = std::size_t{1} << nh;
  Profile out;
  std::size_t ports = 0;
  for (LetterId c : p) {
    out.alphabet |= LetterSet{1} << c;
    if (letters.letter(c).kind == ShalLetter::Kind::InnerPort) {
      ++ports;
    }
  }
  out.arity = static_cast<std::uint8_t>(std::min<std::size_t>(ports, 2));
  out.fh.assign(n, 0);
  out.fv.assign(n, 0);
  bool x_is_port = letters.letter(p.at(pos)).kind
                   == ShalLetter::Kind::InnerPort;

  for (std::size_t g = 0; g < n; ++g) {
    // types a single tree can take
    auto tree_types = [&](LetterId c) {
      std::vector<bool> t(nh, false);
      auto const& l = letters.letter(c);
      if (l.kind == ShalLetter::Kind::Leaf) {
        t[m.leaf_image[l.leaf]] = true;
      } else if (l.kind == ShalLetter::Kind::InnerLeaf) {
        t[alg.act(m.inner_image[l.inner], m.leaf_image[l.leaf])] = true;
      } else {
        for (Elem h = 0; h < nh; ++h) {
          if ((g >> h) & 1u) {
            t[alg.act(m.inner_image[l.inner], h)] = true;
          }
        }
      }
      return t;
    };
    auto concat = [&](std::vector<bool> const& a, std::vector<bool> const& b) {
      std::vector<bool> r(nh, false);
      for (Elem x = 0; x < nh; ++x) {
        for (Elem y = 0; y < nh; ++y) {
          if (a[x] && b[y]) {
            r[alg.plus(x, y)] = true;
          }
        }
      }
      return r;
    };
    // forests sums over index ranges
    auto range_sum = [&](std::size_t from, std::size_t to) {
      std::vector<bool> acc = tree_types(p[from]);
      for (std::size_t i = from + 1; i < to; ++i) {
        acc = concat(acc, tree_types(p[i]));
      }
      return acc;
    };
    auto whole = range_sum(0, p.size());
    for (Elem h = 0; h < nh; ++h) {
      if (whole[h]) {
        out.fh[g] |= HSet{1} << h;
      }
    }
    if (!x_is_port) {
      continue;
    }
    std::vector<bool> ctx(alg.V.size(), false);
    ctx[m.inner_image[letters.letter(p[pos]).inner]] = true;
    if (pos + 1 < p.size()) {
      auto right = range_sum(pos + 1, p.size());
      std::vector<bool> next(alg.V.size(), false);
      for (Elem v = 0; v < alg.V.size(); ++v) {
        for (Elem h = 0; h < nh; ++h) {
          if (ctx[v] && right[h]) {
            next[alg.ins_r(v, h)] = true;
          }
        }
      }
      ctx = next;
    }
    if (pos > 0) {
      auto left = range_sum(0, pos);
      std::vector<bool> next(alg.V.size(), false);
      for (Elem v = 0; v < alg.V.size(); ++v) {
        for (Elem h = 0; h < nh; ++h) {
          if (ctx[v] && left[h]) {
            next[alg.ins_l(h, v)] = true;
          }
        }
      }
      ctx = next;
    }
    for (Elem v = 0; v < alg.V.size(); ++v) {
      if (ctx[v]) {
        out.fv[g] |= VSet{1} << v;
      }
    }
  }
  return out;
}

std::vector<std::optional<ForestTerm>> representative_forests(
    ForestMorphism const& m) {
  auto const& alg = m.algebra;
  std::vector<std::optional<ForestTerm>> rep(alg.H.size());
  std::vector<Elem> known;
  auto add = [&](Elem h, std::vector<Node> trees) {
    if (!rep[h]) {
      rep[h] = ForestTerm(std::move(trees));
      known.push_back(h);
      return true;
    }
    return false;
  };
  for (LabelId a = 0; a < m.alphabet.leaf_count(); ++a) {
    add(m.leaf_image[a], {Node{NodeKind::Leaf, a, {}}});
  }
  bool changed = true;
  while (changed) {
    changed = false;
    auto snapshot = known;
    for (Elem h : snapshot) {
      for (LabelId b = 0; b < m.alphabet.inner_count(); ++b) {
        changed |= add(alg.act(m.inner_image[b], h),
                       {Node{NodeKind::Inner, b, rep[h]->trees()}});
      }
      for (Elem g : snapshot) {
        auto trees = rep[h]->trees();
        trees.insert(trees.end(), rep[g]->trees().begin(),
                     rep[g]->trees().end());
        changed |= add(alg.plus(h, g), std::move(trees));
      }
    }
  }
  return rep;
}

Profile plugged_profile(ForestMorphism const& m, ShalAlphabet const& letters,
                        Shal const& p, std::size_t pos) {
  auto const& alg = m.algebra;
  std::size_t nh = alg.H.size();
  std::size_t n = std::size_t{1} << nh;
  auto reps = representative_forests(m);
  Profile out;
  std::vector<std::size_t> ports;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.alphabet |= LetterSet{1} << p[i];
    if (letters.letter(p[i]).kind == ShalLetter::Kind::InnerPort) {
      ports.push_back(i);
    }
  }
  out.arity = static_cast<std::uint8_t>(std::min<std::size_t>(ports.size(), 2));
  out.fh.assign(n, 0);
  out.fv.assign(n, 0);
  bool x_is_port = std::find(ports.begin(), ports.end(), pos) != ports.end();

  auto fill_all = [&](HSet g, std::size_t slots, auto&& sink) {
    std::vector<Elem> avail;
    for (Elem h = 0; h < nh; ++h) {
      if (((g >> h) & 1u) && reps[h]) {
        avail.push_back(h);
      }
    }
    if (slots > 0 && avail.empty()) {
      return;
    }
    std::vector<std::size_t> idx(slots, 0);
    while (true) {
      std::vector<ForestTerm> forests;
      for (std::size_t i = 0; i < slots; ++i) {
        forests.push_back(*reps[avail[idx[i]]]);
      }
      sink(forests);
      std::size_t i = 0;
      while (i < slots && ++idx[i] == avail.size()) {
        idx[i] = 0;
        ++i;
      }
      if (i == slots) {
        return;
      }
    }
  };

  for (HSet g = 0; g < n; ++g) {
    fill_all(g, ports.size(), [&](std::vector<ForestTerm> const& fs) {
      auto r = shal_plug(p, fs, std::nullopt, letters);
      out.fh[g] |= HSet{1} << eval_forest(m, std::get<ForestTerm>(r));
    });
    if (x_is_port) {
      fill_all(g, ports.size() - 1, [&](std::vector<ForestTerm> const& fs) {
        auto r = shal_plug(p, fs, pos, letters);
        out.fv[g] |= VSet{1} << eval_context(m, std::get<ContextTerm>(r));
      });
    }
  }
  return out;
}

////////////////////////////////////////////////////////////////////////
// Closure
////////////////////////////////////////////////////////////////////////

std::size_t ProfileSet::total() const {
  std::size_t n = 0;
  for (auto const& [a, ids] : by_alphabet) {
    n += ids.size();
  }
  return n;
}

ProfileSet all_profiles(ProfileTable& table, LetterSet restrict,
                        std::size_t budget, std::uint64_t seed) {
  std::vector<ProfileId> found;
  std::vector<bool> in_set;
  auto mark = [&](ProfileId id) {
    if (id >= in_set.size()) {
      in_set.resize(id + 1, false);
    }
    if (in_set[id]) {
      return false;
    }
    in_set[id] = true;
    found.push_back(id);
    return true;
  };
  std::deque<ProfileId> work;
  for (LetterId c = 0; c < table.letter_count(); ++c) {
    if ((restrict >> c) & 1u) {
      ProfileId id = table.letter(c);
      if (mark(id)) {
        work.push_back(id);
      }
    }
  }
  std::mt19937_64 rng(seed);
  ProfileSet out;
  while (!work.empty()) {
    if (seed != 0 && work.size() > 1) {
      std::uniform_int_distribution<std::size_t> pick(0, work.size() - 1);
      std::swap(work.front(), work[pick(rng)]);
    }
    ProfileId u = work.front();
    work.pop_front();
    std::size_t count = found.size();
    for (std::size_t i = 0; i < count; ++i) {
      ProfileId w = found[i];
      for (Keep k : {Keep::Left, Keep::Right}) {
        for (auto [a, b] : {std::pair{u, w}, std::pair{w, u}}) {
          ProfileId s = table.sum(a, b, k);
          if (mark(s)) {
            work.push_back(s);
          }
        }
      }
    }
    if (found.size() > budget) {
      out.complete = false;
      break;
    }
  }
  for (ProfileId id : found) {
    out.by_alphabet[table.get(id).alphabet].push_back(id);
  }
  for (auto& [a, ids] : out.by_alphabet) {
    std::sort(ids.begin(), ids.end(), [&](ProfileId x, ProfileId y) {
      return table.get(x) < table.get(y);
    });
  }
  return out;
}

}  // namespace fo2dec
