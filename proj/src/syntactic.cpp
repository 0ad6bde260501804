#include "fo2dec/syntactic.hpp"

#include <map>

namespace fo2dec {

ImageSets morphism_image(ForestMorphism const& m) {
  auto const& alg = m.algebra;
  std::size_t nh = alg.H.size();
  std::size_t nv = alg.V.size();
  ImageSets img{std::vector<bool>(nh, false), std::vector<bool>(nv, false)};
  for (Elem h : m.leaf_image) {
    img.h[h] = true;
  }
  for (Elem v : m.inner_image) {
    img.v[v] = true;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    auto add_h = [&](Elem h) {
      if (!img.h[h]) {
        img.h[h] = true;
        changed = true;
      }
    };
    auto add_v = [&](Elem v) {
      if (!img.v[v]) {
        img.v[v] = true;
        changed = true;
      }
    };
    for (Elem x = 0; x < nh; ++x) {
      if (!img.h[x]) {
        continue;
      }
      for (Elem y = 0; y < nh; ++y) {
        if (img.h[y]) {
          add_h(alg.plus(x, y));
        }
      }
      for (Elem v = 0; v < nv; ++v) {
        if (img.v[v]) {
          add_h(alg.act(v, x));
          add_v(alg.ins_l(x, v));
          add_v(alg.ins_r(v, x));
        }
      }
    }
    for (Elem v = 0; v < nv; ++v) {
      if (!img.v[v]) {
        continue;
      }
      for (Elem w = 0; w < nv; ++w) {
        if (img.v[w]) {
          add_v(alg.times(v, w));
        }
      }
    }
  }
  return img;
}

namespace {

std::vector<Elem> members(std::vector<bool> const& mask) {
  std::vector<Elem> out;
  for (Elem e = 0; e < mask.size(); ++e) {
    if (mask[e]) {
      out.push_back(e);
    }
  }
  return out;
}

// Renumbers classes by first occurrence in `elems` order using signatures.
// Returns true if the number of classes grew.
template <typename SigFn>
bool refine(std::vector<Elem> const& elems, std::vector<Elem>& cls,
            SigFn const& signature) {
  std::map<std::vector<Elem>, Elem> ids;
  std::vector<Elem> next(cls.size(), 0);
  for (Elem e : elems) {
    std::vector<Elem> sig{cls[e]};
    signature(e, sig);
    auto [it, inserted] = ids.emplace(std::move(sig),
                                      static_cast<Elem>(ids.size()));
    next[e] = it->second;
  }
  std::size_t before = 0;
  {
    std::vector<bool> seen(cls.size(), false);
    for (Elem e : elems) {
      if (!seen[cls[e]]) {
        seen[cls[e]] = true;
        ++before;
      }
    }
  }
  cls = std::move(next);
  return ids.size() != before;
}

}  // namespace

SyntacticResult syntactic_quotient(ForestMorphism const& m) {
  auto const& alg = m.algebra;
  auto img = morphism_image(m);
  auto hs = members(img.h);
  auto vs = members(img.v);

  std::vector<Elem> hc(alg.H.size(), 0);
  std::vector<Elem> vc(alg.V.size(), 0);
  for (Elem h : hs) {
    hc[h] = m.accepting[h] ? 1 : 0;
  }
  // normalize to first-occurrence numbering
  refine(hs, hc, [](Elem, std::vector<Elem>&) {});
  refine(vs, vc, [](Elem, std::vector<Elem>&) {});

  SyntacticResult res;
  while (true) {
    ++res.rounds;
    auto h_snapshot = hc;
    auto v_snapshot = vc;
    bool grew_h = refine(hs, hc, [&](Elem h, std::vector<Elem>& sig) {
      for (Elem g : hs) {
        sig.push_back(h_snapshot[alg.plus(h, g)]);
        sig.push_back(h_snapshot[alg.plus(g, h)]);
      }
      for (Elem v : vs) {
        sig.push_back(h_snapshot[alg.act(v, h)]);
        sig.push_back(v_snapshot[alg.ins_l(h, v)]);
        sig.push_back(v_snapshot[alg.ins_r(v, h)]);
      }
    });
    bool grew_v = refine(vs, vc, [&](Elem v, std::vector<Elem>& sig) {
      for (Elem h : hs) {
        sig.push_back(h_snapshot[alg.act(v, h)]);
        sig.push_back(v_snapshot[alg.ins_l(h, v)]);
        sig.push_back(v_snapshot[alg.ins_r(v, h)]);
      }
      for (Elem w : vs) {
        sig.push_back(v_snapshot[alg.times(v, w)]);
        sig.push_back(v_snapshot[alg.times(w, v)]);
      }
    });
    if (!grew_h && !grew_v) {
      break;
    }
  }

  // representatives: first member of each class
  std::vector<Elem> h_rep;
  std::vector<Elem> v_rep;
  for (Elem h : hs) {
    if (hc[h] == h_rep.size()) {
      h_rep.push_back(h);
    }
  }
  for (Elem v : vs) {
    if (vc[v] == v_rep.size()) {
      v_rep.push_back(v);
    }
  }
  std::size_t nh = h_rep.size();
  std::size_t nv = v_rep.size();

  std::vector<std::string> h_names;
  std::vector<std::string> v_names;
  for (Elem r : h_rep) {
    h_names.push_back(alg.H.name(r));
  }
  for (Elem r : v_rep) {
    v_names.push_back(alg.V.name(r));
  }
  std::vector<Elem> hplus(nh * nh);
  std::vector<Elem> vtimes(nv * nv);
  std::vector<Elem> action(nv * nh);
  std::vector<Elem> ins_l(nh * nv);
  std::vector<Elem> ins_r(nv * nh);
  for (std::size_t x = 0; x < nh; ++x) {
    for (std::size_t y = 0; y < nh; ++y) {
      hplus[x * nh + y] = hc[alg.plus(h_rep[x], h_rep[y])];
    }
  }
  for (std::size_t x = 0; x < nv; ++x) {
    for (std::size_t y = 0; y < nv; ++y) {
      vtimes[x * nv + y] = vc[alg.times(v_rep[x], v_rep[y])];
    }
  }
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t h = 0; h < nh; ++h) {
      action[v * nh + h] = hc[alg.act(v_rep[v], h_rep[h])];
      ins_r[v * nh + h] = vc[alg.ins_r(v_rep[v], h_rep[h])];
      ins_l[h * nv + v] = vc[alg.ins_l(h_rep[h], v_rep[v])];
    }
  }

  ForestMorphism q;
  q.algebra.H = FiniteSemigroup(h_names, hplus);
  q.algebra.V = FiniteSemigroup(v_names, vtimes);
  q.algebra.action = std::move(action);
  q.algebra.insert_l = std::move(ins_l);
  q.algebra.insert_r = std::move(ins_r);
  q.alphabet = m.alphabet;
  for (Elem a : m.leaf_image) {
    q.leaf_image.push_back(hc[a]);
  }
  for (Elem b : m.inner_image) {
    q.inner_image.push_back(vc[b]);
  }
  q.accepting.assign(nh, false);
  for (std::size_t x = 0; x < nh; ++x) {
    q.accepting[x] = m.accepting[h_rep[x]];
  }
  validate(q);

  res.quotient = std::move(q);
  res.h_class.assign(alg.H.size(), std::nullopt);
  res.v_class.assign(alg.V.size(), std::nullopt);
  for (Elem h : hs) {
    res.h_class[h] = hc[h];
  }
  for (Elem v : vs) {
    res.v_class[v] = vc[v];
  }
  return res;
}

}  // namespace fo2dec
