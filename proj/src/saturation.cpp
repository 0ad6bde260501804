#include "fo2dec/saturation.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "fo2dec/syntactic.hpp"

namespace fo2dec {

namespace {

std::vector<HSet> subsets_by_size(std::size_t nh) {
  std::vector<HSet> xs;
  for (HSet x = 1; x < (HSet{1} << nh); ++x) {
    xs.push_back(x);
  }
  std::stable_sort(xs.begin(), xs.end(), [](HSet a, HSet b) {
    return popcount(a) < popcount(b);
  });
  return xs;
}

// Images of X under v; a singleton means v is constant on X.
HSet image(ForestAlgebra const& alg, Elem v, HSet x) {
  HSet out = 0;
  for_bits(x, [&](unsigned h) { out |= HSet{1} << alg.act(v, h); });
  return out;
}

std::optional<std::pair<Elem, Elem>> separated(ForestAlgebra const& alg,
                                               Elem e, HSet x) {
  std::optional<Elem> first;
  std::optional<std::pair<Elem, Elem>> out;
  for_bits(x, [&](unsigned h) {
    if (out) {
      return;
    }
    if (!first) {
      first = h;
    } else if (alg.act(e, *first) != alg.act(e, h)) {
      out = std::pair<Elem, Elem>{*first, h};
    }
  });
  return out;
}

}  // namespace

std::vector<Configuration> initial_configs(ConfigSpace& space) {
  std::vector<Configuration> out;
  for (LetterId c = 0; c < space.profiles().letter_count(); ++c) {
    out.push_back(space.letter_config(c));
  }
  return out;
}

////////////////////////////////////////////////////////////////////////
// Fixpoint
////////////////////////////////////////////////////////////////////////

namespace {

// Alphabets Bs of which both cs and ds are X-approximations.
std::vector<LetterSet> approximated_alphabets(LetterSet cs, LetterSet ds,
                                              HSet x, ProfileTable const& t) {
  auto const& m = t.morphism();
  auto const& letters = t.letters();
  LetterSet base = cs | ds;
  auto blurred = [&](LetterId c) {
    auto const& l = letters.letter(c);
    return l.kind == ShalLetter::Kind::InnerPort
           || (l.kind == ShalLetter::Kind::InnerLeaf
               && ((x >> m.leaf_image[l.leaf]) & 1u));
  };
  auto has_blurred = [&](LetterSet s, LabelId b) {
    bool found = false;
    for_bits(s, [&](unsigned c) {
      found = found || (blurred(c) && letters.letter(c).inner == b);
    });
    return found;
  };
  std::vector<LetterId> ext;
  for (LetterId c = 0; c < letters.size(); ++c) {
    if (((base >> c) & 1u) || !blurred(c)) {
      continue;
    }
    LabelId b = letters.letter(c).inner;
    if (has_blurred(cs, b) && has_blurred(ds, b)) {
      ext.push_back(c);
    }
  }
  if (ext.size() > 20) {
    throw BudgetExceeded("too many alphabet extensions");
  }
  std::vector<LetterSet> out;
  for (std::uint64_t e = 0; e < (std::uint64_t{1} << ext.size()); ++e) {
    LetterSet bs = base;
    for (std::size_t i = 0; i < ext.size(); ++i) {
      if ((e >> i) & 1u) {
        bs |= LetterSet{1} << ext[i];
      }
    }
    if (is_x_approximation(cs, bs, x, m, letters)
        && is_x_approximation(ds, bs, x, m, letters)) {
      out.push_back(bs);
    }
  }
  return out;
}

}  // namespace

SatState sat_fixpoint(ConfigSpace& space, HSet x, SatOptions const& opts,
                      SatObserver const& observer) {
  SatState st;
  st.x = x;
  std::unordered_map<Configuration, std::size_t, ConfigurationHash> index;
  std::mt19937_64 rng(opts.seed);

  auto add = [&](Configuration c, SatDerivation const& d) {
    if (index.count(c) != 0) {
      return;
    }
    if (opts.prune_leq) {
      for (auto const& e : st.elements) {
        if (e.alphabet == c.alphabet && space.leq(c, e) && space.leq(e, c)) {
          return;
        }
      }
    }
    index.emplace(c, st.elements.size());
    st.elements.push_back(std::move(c));
    st.derivations.push_back(d);
    switch (d.rule) {
      case SatDerivation::Rule::Letter:
        st.trace.push_back("letter "
                           + space.profiles().letters().name(d.letter));
        break;
      case SatDerivation::Rule::Sum:
        st.trace.push_back("sum " + std::to_string(d.left) + " "
                           + std::to_string(d.right));
        break;
      case SatDerivation::Rule::Padded:
        st.trace.push_back("omega " + std::to_string(d.left) + " + up "
                           + space.profiles().letter_set_name(d.middle)
                           + " + omega " + std::to_string(d.right));
        break;
    }
    if (st.elements.size() > opts.budget) {
      throw BudgetExceeded("Sat element budget");
    }
  };
  auto shuffle = [&](auto& v) {
    if (opts.seed != 0) {
      std::shuffle(v.begin(), v.end(), rng);
    }
  };

  std::map<std::pair<LetterSet, LetterSet>, std::vector<LetterSet>> bs_memo;
  try {
    auto init = initial_configs(space);
    for (LetterId c = 0; c < init.size(); ++c) {
      SatDerivation d;
      d.letter = c;
      add(init[c], d);
    }
    if (observer && observer(st)) {
      return st;
    }
    std::size_t sum_done = 0;
    std::size_t rule2_done = 0;
    // observer runs again whenever the element count doubled
    std::size_t next_check = st.elements.size() * 2;
    struct Stop {};
    auto maybe_observe = [&] {
      if (observer && st.elements.size() >= next_check) {
        next_check = st.elements.size() * 2;
        if (observer(st)) {
          throw Stop{};
        }
      }
    };
    // all pairs (i, j) < n with max(i, j) >= done, rows and columns in
    // shuffled order
    std::size_t const max_steps =
        opts.steps != 0 ? opts.steps : opts.budget * 200;
    std::size_t steps = 0;
    auto for_pairs = [&](std::size_t n, std::size_t done, auto&& f) {
      std::vector<std::size_t> rows(n);
      std::iota(rows.begin(), rows.end(), 0);
      std::vector<std::size_t> cols = rows;
      shuffle(rows);
      shuffle(cols);
      for (std::size_t i : rows) {
        for (std::size_t j : cols) {
          if (std::max(i, j) >= done) {
            if (++steps > max_steps) {
              throw BudgetExceeded("Sat step budget");
            }
            f(i, j);
          }
        }
      }
    };
    try {
      while (true) {
        ++st.generations;
        std::size_t n = st.elements.size();
        for_pairs(n, sum_done, [&](std::size_t i, std::size_t j) {
          Configuration s = space.sum(st.elements[i], st.elements[j]);
          SatDerivation d;
          d.rule = SatDerivation::Rule::Sum;
          d.left = i;
          d.right = j;
          add(std::move(s), d);
          maybe_observe();
        });
        sum_done = n;
        if (observer && st.elements.size() > n && observer(st)) {
          return st;
        }
        next_check = st.elements.size() * 2;

        std::size_t n2 = st.elements.size();
        for_pairs(n2, rule2_done, [&](std::size_t i, std::size_t j) {
          LetterSet ci = st.elements[i].alphabet;
          LetterSet cj = st.elements[j].alphabet;
          auto key = std::make_pair(ci, cj);
          auto it = bs_memo.find(key);
          if (it == bs_memo.end()) {
            it = bs_memo
                     .emplace(key, approximated_alphabets(ci, cj, x,
                                                          space.profiles()))
                     .first;
          }
          if (it->second.empty()) {
            return;
          }
          Configuration oi = space.omega(st.elements[i]);
          Configuration oj = space.omega(st.elements[j]);
          for (LetterSet bs : it->second) {
            Configuration c = space.sum(space.sum(oi, space.uplift(bs)), oj);
            SatDerivation d;
            d.rule = SatDerivation::Rule::Padded;
            d.left = i;
            d.right = j;
            d.middle = bs;
            add(std::move(c), d);
            maybe_observe();
          }
        });
        rule2_done = n2;
        if (observer && st.elements.size() > n2 && observer(st)) {
          return st;
        }
        next_check = st.elements.size() * 2;
        if (st.elements.size() == n) {
          st.complete = true;
          return st;
        }
      }
    } catch (Stop const&) {
      return st;
    }
  } catch (BudgetExceeded const&) {
    st.complete = false;
  }
  return st;
}

////////////////////////////////////////////////////////////////////////
// Saturated context types
////////////////////////////////////////////////////////////////////////

namespace {

// Minimal requirement sets: for each member without a non-port profile the
// union of its context mappings on x, intersected with w. nullopt if some
// requirement is empty.
std::optional<std::vector<VSet>> requirements(ConfigSpace const& space,
                                              Configuration const& u, HSet x,
                                              VSet w) {
  auto const& table = space.profiles();
  std::vector<VSet> reqs;
  for (SetId s : u.family) {
    VSet raw = 0;
    bool exempt = false;
    for (ProfileId p : space.set(s)) {
      VSet fv = table.get(p).fv[x];
      if (fv == 0) {
        exempt = true;
        break;
      }
      raw |= fv;
    }
    if (exempt) {
      continue;
    }
    if ((raw & w) == 0) {
      return std::nullopt;
    }
    reqs.push_back(raw & w);
  }
  std::sort(reqs.begin(), reqs.end());
  reqs.erase(std::unique(reqs.begin(), reqs.end()), reqs.end());
  std::vector<VSet> minimal;
  for (VSet r : reqs) {
    bool dominated = std::any_of(reqs.begin(), reqs.end(), [&](VSet o) {
      return o != r && (o & r) == o;
    });
    if (!dominated) {
      minimal.push_back(r);
    }
  }
  return minimal;
}

SaturatedResult saturated_from(ForestAlgebra const& alg, VSet w,
                               std::vector<VSet> const& reqs) {
  SaturatedResult res;
  std::size_t nv = alg.V.size();
  res.factorization.assign(nv, {});
  std::size_t r = reqs.size();
  if (r > 16) {
    throw BudgetExceeded("too many saturation requirements");
  }
  std::uint32_t full = (std::uint32_t{1} << r) - 1;
  std::vector<Elem> gens;
  for_bits(w, [&](unsigned v) { gens.push_back(v); });
  auto cover = [&](Elem v) {
    std::uint32_t c = 0;
    for (std::size_t i = 0; i < r; ++i) {
      if ((reqs[i] >> v) & 1u) {
        c |= std::uint32_t{1} << i;
      }
    }
    return c;
  };
  std::size_t states = nv << r;
  constexpr std::uint32_t kNone = ~std::uint32_t{0};
  std::vector<std::uint32_t> parent(states, kNone);
  std::vector<Elem> last(states, 0);
  std::vector<bool> seen(states, false);
  std::deque<std::uint32_t> queue;
  auto id = [&](Elem v, std::uint32_t m) {
    return static_cast<std::uint32_t>((std::size_t{v} << r) | m);
  };
  for (Elem g : gens) {
    auto s = id(g, cover(g));
    if (!seen[s]) {
      seen[s] = true;
      last[s] = g;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    Elem v = s >> r;
    std::uint32_t m = s & full;
    for (Elem g : gens) {
      auto t = id(alg.times(v, g), m | cover(g));
      if (!seen[t]) {
        seen[t] = true;
        parent[t] = s;
        last[t] = g;
        queue.push_back(t);
      }
    }
  }
  for (Elem v = 0; v < nv; ++v) {
    auto s = id(v, full);
    if (!seen[s]) {
      continue;
    }
    res.elements |= VSet{1} << v;
    std::vector<Elem> f;
    for (auto cur = s; cur != kNone; cur = parent[cur]) {
      f.push_back(last[cur]);
    }
    std::reverse(f.begin(), f.end());
    res.factorization[v] = std::move(f);
  }
  return res;
}

}  // namespace

SaturatedResult saturated_elements(ConfigSpace const& space,
                                   Configuration const& u, HSet x) {
  auto const& alg = space.profiles().morphism().algebra;
  auto rep = space.validity(u);
  auto reqs = requirements(space, u, x, rep.valid_v);
  if (!reqs) {
    SaturatedResult none;
    none.factorization.assign(alg.V.size(), {});
    return none;
  }
  return saturated_from(alg, rep.valid_v, *reqs);
}

////////////////////////////////////////////////////////////////////////
// Union search
////////////////////////////////////////////////////////////////////////

bool x_may_violate(ForestAlgebra const& alg, HSet x) {
  if (popcount(x) < 2) {
    return false;
  }
  auto om = omega_data(alg.V);
  bool any = false;
  for (Elem v = 0; v < alg.V.size() && !any; ++v) {
    any = popcount(image(alg, om.idempotent[v], x)) > 1;
  }
  if (!any) {
    return false;
  }
  // every element of X reaches every other one through some context type
  bool ok = true;
  for_bits(x, [&](unsigned h) {
    HSet reach = HSet{1} << h;
    for (Elem v = 0; v < alg.V.size(); ++v) {
      reach |= HSet{1} << alg.act(v, h);
    }
    ok = ok && (reach & x) == x;
  });
  return ok;
}

namespace {

struct Candidate {
  Configuration config;
  std::vector<VSet> reqs;  // raw, minimal, sorted
};

// Keeps the profiles whose forest mapping stays inside x; nullopt if a
// member becomes empty.
std::optional<Configuration> shrink(ConfigSpace& space,
                                    Configuration const& c, HSet x) {
  auto const& table = space.profiles();
  HSet full = table.sets().full_h();
  std::vector<SetId> fam;
  for (SetId s : c.family) {
    std::vector<ProfileId> keep;
    for (ProfileId p : space.set(s)) {
      auto const& pr = table.get(p);
      HSet img = pr.arity == 0 ? pr.fh[full] : pr.fh[x];
      if ((img & ~x) == 0) {
        keep.push_back(p);
      }
    }
    if (keep.empty()) {
      return std::nullopt;
    }
    fam.push_back(space.intern_set(std::move(keep)));
  }
  return space.make(std::move(fam));
}

bool compatible(ValidityReport const& r, HSet x) {
  return r.branching && r.reduced && r.valid_h == x;
}

}  // namespace

std::optional<SaturationWitness> find_violation(
    ConfigSpace& space, HSet x, std::vector<Configuration> const& elements,
    std::size_t max_union, UnionSearchStats* stats) {
  auto const& alg = space.profiles().morphism().algebra;
  auto om = omega_data(alg.V);
  UnionSearchStats local;
  UnionSearchStats& st = stats ? *stats : local;
  st = UnionSearchStats{};
  if (popcount(x) < 2) {
    return std::nullopt;
  }

  // canonical shrinks, killers dropped
  std::set<Configuration> seen;
  std::vector<Candidate> cands;
  for (auto const& e : elements) {
    auto s = shrink(space, e, x);
    if (!s || !seen.insert(*s).second) {
      continue;
    }
    auto reqs = requirements(space, *s, x, ~VSet{0});
    if (!reqs) {
      continue;
    }
    bool killer = std::any_of(reqs->begin(), reqs->end(), [&](VSet t) {
      bool all_const = true;
      for_bits(t, [&](unsigned v) {
        all_const = all_const && popcount(image(alg, v, x)) == 1;
      });
      return all_const;
    });
    if (!killer) {
      cands.push_back({std::move(*s), std::move(*reqs)});
    }
  }
  st.candidates = cands.size();
  if (cands.empty()) {
    return std::nullopt;
  }
  Configuration all;
  for (auto const& c : cands) {
    all = space.unite(all, c.config);
  }
  auto rep_all = space.validity(all);
  if (!compatible(rep_all, x)) {
    return std::nullopt;
  }
  {
    bool any = false;
    for_bits(rep_all.valid_v, [&](unsigned v) {
      any = any || popcount(image(alg, om.idempotent[v], x)) > 1;
    });
    if (!any) {
      return std::nullopt;
    }
  }

  std::map<std::vector<VSet>, std::size_t> sig_index;
  std::vector<std::vector<VSet>> sigs;
  for (auto const& c : cands) {
    if (!c.reqs.empty() && sig_index.emplace(c.reqs, sigs.size()).second) {
      sigs.push_back(c.reqs);
    }
  }
  st.signatures = sigs.size();
  st.exact = sigs.size() <= max_union;

  auto try_seed = [&](std::vector<std::size_t> const& seed)
      -> std::optional<SaturationWitness> {
    ++st.seeds;
    std::vector<VSet> k;
    for (std::size_t i : seed) {
      k.insert(k.end(), sigs[i].begin(), sigs[i].end());
    }
    Configuration u;
    for (auto const& c : cands) {
      bool dominated = std::all_of(c.reqs.begin(), c.reqs.end(), [&](VSet t) {
        return std::any_of(k.begin(), k.end(),
                           [&](VSet r) { return (r & t) == r; });
      });
      if (dominated) {
        u = space.unite(u, c.config);
      }
    }
    if (u.empty()) {
      return std::nullopt;
    }
    auto rep = space.validity(u);
    if (!compatible(rep, x)) {
      return std::nullopt;
    }
    auto sat = saturated_elements(space, u, x);
    for (Elem v = 0; v < alg.V.size(); ++v) {
      if (!((sat.elements >> v) & 1u)) {
        continue;
      }
      if (auto hs = separated(alg, om.idempotent[v], x)) {
        SaturationWitness w;
        w.x = x;
        w.configuration = u;
        w.factorization = sat.factorization[v];
        w.v = v;
        w.h1 = hs->first;
        w.h2 = hs->second;
        return w;
      }
    }
    return std::nullopt;
  };

  // seeds in size-ascending order
  std::size_t n = sigs.size();
  std::vector<std::size_t> seed;
  if (auto w = try_seed(seed)) {
    return w;
  }
  for (std::size_t size = 1; size <= std::min(max_union, n); ++size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) {
      idx[i] = i;
    }
    while (true) {
      if (auto w = try_seed(idx)) {
        return w;
      }
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == n - size + i - 1) {
        --i;
      }
      if (i == 0) {
        break;
      }
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j) {
        idx[j] = idx[j - 1] + 1;
      }
    }
  }
  return std::nullopt;
}

////////////////////////////////////////////////////////////////////////
// Records
////////////////////////////////////////////////////////////////////////

namespace {

std::vector<std::string> hset_names(FiniteSemigroup const& h, HSet x) {
  std::vector<std::string> out;
  for_bits(x, [&](unsigned e) { out.push_back(h.name(e)); });
  return out;
}

}  // namespace

WitnessRecord make_record(ProfileTable const& table, ConfigSpace const& space,
                          SaturationWitness const& w) {
  auto const& alg = table.morphism().algebra;
  WitnessRecord r;
  r.x = hset_names(alg.H, w.x);
  for (SetId s : w.configuration.family) {
    std::vector<std::pair<std::string, std::size_t>> member;
    std::ostringstream dump;
    dump << "member";
    for (ProfileId p : space.set(s)) {
      member.emplace_back(print_shal(table.witness_shal(p), table.letters()),
                          table.witness_pos(p));
      dump << "\n  " << table.dump(p);
    }
    r.family.push_back(std::move(member));
    r.configuration_dump.push_back(dump.str());
  }
  for (Elem f : w.factorization) {
    r.factorization.push_back(alg.V.name(f));
  }
  r.v = alg.V.name(w.v);
  r.h1 = alg.H.name(w.h1);
  r.h2 = alg.H.name(w.h2);
  return r;
}

////////////////////////////////////////////////////////////////////////
// Profile saturation
////////////////////////////////////////////////////////////////////////

SaturationResult check_profile_saturation(ProfileTable& table,
                                          SatOptions const& opts,
                                          unsigned threads) {
  auto const& alg = table.morphism().algebra;
  std::vector<HSet> xs;
  for (HSet x : subsets_by_size(alg.H.size())) {
    if (x_may_violate(alg, x)) {
      xs.push_back(x);
    }
  }
  struct TaskResult {
    std::optional<WitnessRecord> record;
    std::optional<SaturationWitness> witness;
    bool complete = false;
    bool exact = true;
    std::size_t elements = 0;
    std::string note;
  };
  std::vector<TaskResult> results(xs.size());

  auto x_name = [&](HSet x) {
    std::string n = "X={";
    bool first = true;
    for_bits(x, [&](unsigned h) {
      n += (first ? "" : ",") + alg.H.name(h);
      first = false;
    });
    return n + "}";
  };

  // Runs X number i with the given element budget; best holds the least
  // index with a witness in this stage.
  auto run = [&](std::size_t i, ProfileTable& t, std::size_t budget,
                 std::atomic<std::size_t>& best, std::uint64_t seed) {
    ConfigSpace space(t);
    HSet x = xs[i];
    TaskResult res;
    SatOptions o = opts;
    o.budget = budget;
    o.seed = seed;
    std::size_t checked = 0;
    auto observer = [&](SatState const& st) {
      if (best.load() < i) {
        return true;
      }
      if (st.elements.size() == checked) {
        return false;
      }
      checked = st.elements.size();
      UnionSearchStats us;
      auto w = find_violation(space, x, st.elements, opts.max_union, &us);
      res.exact = res.exact && us.exact;
      if (w) {
        res.record = make_record(t, space, *w);
        res.witness = std::move(w);
        std::size_t cur = best.load();
        while (i < cur && !best.compare_exchange_weak(cur, i)) {
        }
        return true;
      }
      return false;
    };
    try {
      auto st = sat_fixpoint(space, x, o, observer);
      res.elements = st.elements.size();
      res.complete = st.complete;
      std::ostringstream note;
      note << x_name(x) << ": " << st.elements.size() << " Sat elements, "
           << st.generations << " generations"
           << (st.complete ? "" : ", stopped early");
      res.note = note.str();
    } catch (BudgetExceeded const& e) {
      res.note = x_name(x) + ": budget: " + e.what();
    }
    results[i] = std::move(res);
  };

  // element budgets, growing by a factor of 8 up to the requested one
  std::vector<std::size_t> stages;
  for (std::size_t b = opts.budget; b > 0; b /= 8) {
    stages.push_back(b);
    if (b < 2000) {
      break;
    }
  }
  std::reverse(stages.begin(), stages.end());

  SaturationResult out;
  for (std::size_t stage = 0; stage < stages.size(); ++stage) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!results[i].complete) {
        todo.push_back(i);
      }
    }
    if (todo.empty()) {
      break;
    }
    std::atomic<std::size_t> best{xs.size()};
    if (threads <= 1 || todo.size() <= 1) {
      for (std::size_t i : todo) {
        run(i, table, stages[stage], best, opts.seed);
        if (results[i].witness) {
          break;
        }
      }
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      unsigned n = static_cast<unsigned>(
          std::min<std::size_t>(threads, todo.size()));
      for (unsigned k = 0; k < n; ++k) {
        pool.emplace_back([&] {
          ProfileTable own(table.morphism());
          while (true) {
            std::size_t t = next.fetch_add(1);
            if (t >= todo.size() || todo[t] > best.load()) {
              return;
            }
            run(todo[t], own, stages[stage], best, opts.seed);
          }
        });
      }
      for (auto& th : pool) {
        th.join();
      }
    }
    for (std::size_t i : todo) {
      if (results[i].witness) {
        // The early exit depends on the worklist order and on the profile
        // ids already handed out. Redo the winning X unshuffled on a fresh
        // table so the witness depends on neither seed nor threads.
        TaskResult keep = std::move(results[i]);
        std::atomic<std::size_t> solo{xs.size()};
        ProfileTable fresh(table.morphism());
        run(i, fresh, opts.budget, solo, 0);
        if (!results[i].witness) {
          results[i] = std::move(keep);
        }
      }
      auto& r = results[i];
      if (r.witness) {
        out.record = r.record;
        if (threads <= 1) {
          out.witness = r.witness;
        }
        out.notes.push_back(r.note + ", violation found");
        out.complete = true;
        return out;
      }
    }
  }
  for (auto& r : results) {
    out.notes.push_back(r.note);
    out.sat_elements += r.elements;
    out.complete = out.complete && r.complete;
    out.exact = out.exact && r.exact;
  }
  return out;
}

////////////////////////////////////////////////////////////////////////
// Variant configurations
////////////////////////////////////////////////////////////////////////

namespace {

bool is_blurred(ShalLetter const& l, HSet x, ForestMorphism const& m) {
  return l.kind == ShalLetter::Kind::InnerPort
         || (l.kind == ShalLetter::Kind::InnerLeaf
             && ((x >> m.leaf_image.at(l.leaf)) & 1u));
}

// Letters with count two, with port and X-nodes of one inner label pooled
// onto the port letter when that letter occurs.
LetterSet pooled_twos(LetterSet alpha, LetterSet two, HSet x,
                      ForestMorphism const& m, ShalAlphabet const& letters) {
  LetterSet out = two;
  std::map<LabelId, int> pool;
  for_bits(alpha, [&](unsigned c) {
    auto const& l = letters.letter(c);
    if (!is_blurred(l, x, m)) {
      return;
    }
    LetterId port = letters.port_letter(l.inner);
    if (!((alpha >> port) & 1u)) {
      return;
    }
    out &= ~(LetterSet{1} << c);
    pool[l.inner] += ((two >> c) & 1u) ? 2 : 1;
  });
  for (auto [b, count] : pool) {
    if (count >= 2) {
      out |= LetterSet{1} << letters.port_letter(b);
    }
  }
  return out;
}

}  // namespace

std::string variant_key(Shal const& p, std::size_t pos, HSet x,
                        GameVariant v, ForestMorphism const& m,
                        ShalAlphabet const& letters) {
  LetterSet alpha = 0;
  LetterSet two = 0;
  for (LetterId c : p) {
    if ((alpha >> c) & 1u) {
      two |= LetterSet{1} << c;
    }
    alpha |= LetterSet{1} << c;
  }
  std::ostringstream out;
  out << alpha << ":" << p.at(pos);
  if (v == GameVariant::SNEQ) {
    out << ":" << pooled_twos(alpha, two, x, m, letters);
  }
  return out.str();
}

std::vector<Configuration> variant_relevant_configs(ConfigSpace& space,
                                                    HSet x, GameVariant v,
                                                    std::size_t budget) {
  auto& table = space.profiles();
  std::size_t nl = table.letter_count();
  std::vector<Configuration> out;
  if (v == GameVariant::S) {
    if (nl > 20) {
      throw BudgetExceeded("too many letters for alphabet enumeration");
    }
    for (LetterSet bs = 1; bs < (LetterSet{1} << nl); ++bs) {
      out.push_back(space.uplift(bs, budget));
      if (out.size() > budget) {
        throw BudgetExceeded("variant configurations");
      }
    }
    return out;
  }
  if (v != GameVariant::SNEQ) {
    throw std::invalid_argument("variant configurations exist for S and SNEQ");
  }
  auto const& m = table.morphism();
  auto const& letters = table.letters();
  // forest summaries annotated with letters occurring twice
  using Ann = std::pair<ProfileId, LetterSet>;
  std::vector<Ann> forests;
  std::set<Ann> seen;
  auto add = [&](Ann a) {
    if (seen.insert(a).second) {
      forests.push_back(a);
      if (forests.size() > budget) {
        throw BudgetExceeded("annotated forest closure");
      }
    }
  };
  for (LetterId c = 0; c < nl; ++c) {
    add({table.forest_part(table.letter(c)), 0});
  }
  auto combine = [&](Ann const& a, Ann const& b) {
    LetterSet two = a.second | b.second
                    | (table.get(a.first).alphabet
                       & table.get(b.first).alphabet);
    return Ann{table.sum(a.first, b.first, Keep::Left), two};
  };
  for (std::size_t i = 0; i < forests.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Ann a = forests[i];
      Ann b = forests[j];
      add(combine(a, b));
      add(combine(b, a));
    }
  }
  // class (alphabet, pooled twos) -> letter -> profiles
  std::map<std::pair<LetterSet, LetterSet>,
           std::map<LetterId, std::vector<ProfileId>>>
      classes;
  for (LetterId c = 0; c < nl; ++c) {
    ProfileId pc = table.letter(c);
    LetterSet lc = LetterSet{1} << c;
    std::set<Ann> left{{pc, 0}};
    for (auto const& u : forests) {
      LetterSet two = u.second | (table.get(u.first).alphabet & lc);
      left.insert({table.sum(u.first, pc, Keep::Right), two});
    }
    std::set<Ann> full(left.begin(), left.end());
    for (auto const& l : left) {
      for (auto const& w : forests) {
        LetterSet two = l.second | w.second
                        | (table.get(l.first).alphabet
                           & table.get(w.first).alphabet);
        full.insert({table.sum(l.first, w.first, Keep::Left), two});
      }
      if (full.size() > budget) {
        throw BudgetExceeded("annotated positions");
      }
    }
    for (auto const& [p, two] : full) {
      LetterSet alpha = table.get(p).alphabet;
      classes[{alpha, pooled_twos(alpha, two, x, m, letters)}][c].push_back(p);
    }
  }
  for (auto& [key, members] : classes) {
    std::vector<SetId> fam;
    for (auto& [c, ps] : members) {
      fam.push_back(space.intern_set(std::move(ps)));
    }
    out.push_back(space.make(std::move(fam)));
  }
  return out;
}

SaturationResult check_variant_saturation(ProfileTable& table, Logic logic,
                                          SatOptions const& opts) {
  GameVariant v = logic == Logic::EFH ? GameVariant::S : GameVariant::SNEQ;
  auto const& alg = table.morphism().algebra;
  ConfigSpace space(table);
  SaturationResult out;
  std::optional<std::vector<Configuration>> s_configs;
  for (HSet x : subsets_by_size(alg.H.size())) {
    if (!x_may_violate(alg, x)) {
      continue;
    }
    try {
      std::vector<Configuration> configs;
      if (v == GameVariant::S) {
        if (!s_configs) {
          s_configs = variant_relevant_configs(space, x, v, opts.budget);
        }
        configs = *s_configs;
      } else {
        configs = variant_relevant_configs(space, x, v, opts.budget);
      }
      out.sat_elements += configs.size();
      UnionSearchStats us;
      auto w = find_violation(space, x, configs, opts.max_union, &us);
      out.exact = out.exact && us.exact;
      if (w) {
        out.record = make_record(table, space, *w);
        out.witness = std::move(w);
        return out;
      }
    } catch (BudgetExceeded const& e) {
      out.complete = false;
      out.notes.push_back(std::string("budget: ") + e.what());
    }
  }
  return out;
}

////////////////////////////////////////////////////////////////////////
// Decision
////////////////////////////////////////////////////////////////////////

char const* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Definable:
      return "Definable";
    case Outcome::NotDefinable:
      return "NotDefinable";
    case Outcome::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

char const* condition_name(FailedCondition c) {
  switch (c) {
    case FailedCondition::None:
      return "None";
    case FailedCondition::IdentityH:
      return "IdentityH";
    case FailedCondition::IdentityV:
      return "IdentityV";
    case FailedCondition::VariantIdentity:
      return "VariantIdentity";
    case FailedCondition::Saturation:
      return "Saturation";
  }
  return "?";
}

ForestMorphism decision_morphism(ForestMorphism const& m) {
  return leaf_completion(syntactic_quotient(m).quotient);
}

Verdict decide(ForestMorphism const& m, DecideOptions const& opts) {
  using Clock = std::chrono::steady_clock;
  Verdict out;
  out.logic = opts.logic;
  out.budget = opts.sat.budget;
  out.max_union = opts.sat.max_union;
  auto t0 = Clock::now();
  auto lap = [&](char const* name) {
    auto t1 = Clock::now();
    out.timings.emplace_back(
        name, std::chrono::duration<double>(t1 - t0).count());
    t0 = t1;
  };

  auto q = syntactic_quotient(m).quotient;
  out.quotient_h = q.algebra.H.size();
  out.quotient_v = q.algebra.V.size();
  lap("syntactic");

  IdentityReport hrep = opts.logic == Logic::FO2
                            ? check_eqh(q.algebra.H)
                            : check_variant_identities(q.algebra.H,
                                                       opts.logic);
  IdentityReport vrep = check_eqv(q.algebra.V);
  out.identities = {hrep, vrep};
  lap("identities");
  if (!hrep.holds) {
    out.outcome = Outcome::NotDefinable;
    out.failed = opts.logic == Logic::FO2 ? FailedCondition::IdentityH
                                          : FailedCondition::VariantIdentity;
    out.identity_witness = hrep;
  } else if (!vrep.holds) {
    out.outcome = Outcome::NotDefinable;
    out.failed = FailedCondition::IdentityV;
    out.identity_witness = vrep;
  }
  bool identities_failed = out.failed != FailedCondition::None;
  if (identities_failed && !opts.all_conditions) {
    return out;
  }
  if (opts.logic == Logic::FO2SUCC) {
    if (!identities_failed) {
      out.outcome = Outcome::Inconclusive;
      out.notes.push_back(
          "identities hold; saturation for the successor logic is undecided "
          "and not checked");
    }
    return out;
  }

  ProfileTable table(leaf_completion(q));
  lap("completion");
  SaturationResult sat;
  if (opts.logic == Logic::FO2) {
    sat = check_profile_saturation(table, opts.sat, opts.threads);
  } else {
    sat = check_variant_saturation(table, opts.logic, opts.sat);
  }
  lap("saturation");
  out.notes.insert(out.notes.end(), sat.notes.begin(), sat.notes.end());
  out.exact = sat.exact;
  if (identities_failed) {
    out.witness = sat.record;
    out.notes.push_back(sat.record ? "saturation also fails"
                        : sat.complete ? "saturation holds"
                                       : "saturation check hit the budget");
    return out;
  }
  if (sat.record) {
    out.outcome = Outcome::NotDefinable;
    out.failed = FailedCondition::Saturation;
    out.witness = sat.record;
    return out;
  }
  if (!sat.complete) {
    out.outcome = Outcome::Inconclusive;
    out.notes.push_back("budget exhausted before the saturation check ended");
    return out;
  }
  out.outcome = Outcome::Definable;
  return out;
}

////////////////////////////////////////////////////////////////////////
// Verification
////////////////////////////////////////////////////////////////////////

namespace {

std::optional<Elem> find_elem(FiniteSemigroup const& s,
                              std::string const& name) {
  return s.find(name);
}

VerifyResult verify_record(ForestMorphism const& q, WitnessRecord const& w) {
  VerifyResult res;
  auto mc = leaf_completion(q);
  auto const& alg = mc.algebra;
  ShalAlphabet letters(mc.alphabet);
  std::size_t nh = alg.H.size();
  auto fail = [&](std::string msg) {
    res.ok = false;
    res.message = std::move(msg);
    return res;
  };

  HSet x = 0;
  for (auto const& name : w.x) {
    auto e = find_elem(alg.H, name);
    if (!e) {
      return fail("unknown forest type " + name);
    }
    x |= HSet{1} << *e;
  }
  if (popcount(x) < 2) {
    return fail("X needs two elements");
  }
  std::vector<std::vector<Profile>> family;
  try {
    for (auto const& member : w.family) {
      std::vector<Profile> ps;
      for (auto const& [text, pos] : member) {
        Shal p = parse_shal(text, letters);
        ps.push_back(semantic_profile(mc, letters, p, pos));
      }
      if (ps.empty()) {
        return fail("empty member");
      }
      family.push_back(std::move(ps));
    }
  } catch (std::exception const& e) {
    return fail(std::string("bad profile witness: ") + e.what());
  }
  if (family.empty()) {
    return fail("empty configuration");
  }

  // valid forest types
  HSet full = static_cast<HSet>((std::size_t{1} << nh) - 1);
  HSet valid = 0;
  bool branching = false;
  while (true) {
    HSet next = valid;
    for (auto const& ps : family) {
      for (auto const& p : ps) {
        next |= p.fh[p.arity == 0 ? full : valid];
        branching = branching || p.arity == 2;
      }
    }
    if (next == valid) {
      break;
    }
    valid = next;
  }
  if (valid != x) {
    return fail("valid forest types differ from X");
  }
  if (!branching) {
    return fail("configuration is not branching");
  }
  // valid context types: product closure
  std::vector<bool> wv(alg.V.size(), false);
  for (auto const& ps : family) {
    for (auto const& p : ps) {
      for_bits(p.fv[x], [&](unsigned e) { wv[e] = true; });
    }
  }
  for (bool grew = true; grew;) {
    grew = false;
    for (Elem a = 0; a < alg.V.size(); ++a) {
      for (Elem b = 0; b < alg.V.size(); ++b) {
        if (wv[a] && wv[b] && !wv[alg.times(a, b)]) {
          wv[alg.times(a, b)] = true;
          grew = true;
        }
      }
    }
  }
  // reduced: every h reaches every h'
  bool reduced = true;
  for_bits(x, [&](unsigned h) {
    for_bits(x, [&](unsigned g) {
      if (h == g) {
        return;
      }
      bool r = false;
      for (Elem e = 0; e < alg.V.size(); ++e) {
        r = r || (wv[e] && alg.act(e, h) == g);
      }
      reduced = reduced && r;
    });
  });
  if (!reduced) {
    return fail("configuration is not reduced");
  }
  // factorization
  if (w.factorization.empty()) {
    return fail("empty factorization");
  }
  std::vector<Elem> factors;
  for (auto const& name : w.factorization) {
    auto e = find_elem(alg.V, name);
    if (!e || !wv[*e]) {
      return fail("factor " + name + " is not a valid context type");
    }
    factors.push_back(*e);
  }
  Elem prod = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i) {
    prod = alg.times(prod, factors[i]);
  }
  auto ve = find_elem(alg.V, w.v);
  if (!ve || *ve != prod) {
    return fail("factorization does not multiply to v");
  }
  for (auto const& ps : family) {
    bool port_only = std::all_of(ps.begin(), ps.end(), [&](Profile const& p) {
      return p.fv[x] != 0;
    });
    if (!port_only) {
      continue;
    }
    bool met = std::any_of(factors.begin(), factors.end(), [&](Elem f) {
      return std::any_of(ps.begin(), ps.end(), [&](Profile const& p) {
        return (p.fv[x] >> f) & 1u;
      });
    });
    if (!met) {
      return fail("a port member is not met by the factorization");
    }
  }
  auto h1 = find_elem(alg.H, w.h1);
  auto h2 = find_elem(alg.H, w.h2);
  if (!h1 || !h2 || !((x >> *h1) & 1u) || !((x >> *h2) & 1u)) {
    return fail("h1, h2 must lie in X");
  }
  Elem e = power(alg.V, prod, omega_data(alg.V).exponent);
  if (alg.act(e, *h1) == alg.act(e, *h2)) {
    return fail("v^omega agrees on h1 and h2");
  }
  res.ok = true;
  res.message = "saturation witness re-verified";
  return res;
}

}  // namespace

VerifyResult verify(ForestMorphism const& m, Verdict const& v) {
  VerifyResult res;
  if (v.outcome != Outcome::NotDefinable) {
    res.message = "verdict carries no witness";
    return res;
  }
  auto q = syntactic_quotient(m).quotient;
  if (v.failed == FailedCondition::Saturation && !v.witness) {
    res.message = "saturation witness missing";
    return res;
  }
  if (v.failed != FailedCondition::Saturation) {
    if (!v.identity_witness) {
      res.message = "identity witness missing";
      return res;
    }
    auto const& s = v.failed == FailedCondition::IdentityV ? q.algebra.V
                                                           : q.algebra.H;
    try {
      res.ok = witness_is_violation(s, *v.identity_witness);
    } catch (std::exception const& e) {
      res.message = e.what();
      return res;
    }
    res.message = res.ok ? "identity violated as claimed"
                         : "identity witness does not violate";
    if (!res.ok) {
      return res;
    }
  }
  if (v.witness) {
    auto sat = verify_record(q, *v.witness);
    if (!sat.ok || v.failed == FailedCondition::Saturation) {
      return sat;
    }
    res.message += "; " + sat.message;
  }
  return res;
}

}  // namespace fo2dec
