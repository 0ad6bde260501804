// fo2dec command-line tool.

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "fo2dec/report.hpp"
#include "fo2dec/syntactic.hpp"
#include "fo2dec/validation.hpp"

using namespace fo2dec;
using nlohmann::json;

namespace {

constexpr char const* kVersion = "1.0.0";

enum Exit { kOk = 0, kNo = 1, kInconclusive = 2, kInputError = 3, kBudget = 4 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(std::string const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(std::string const& path, std::string const& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

std::string sha256_hex(std::string const& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

ForestMorphism load_algebra(std::string const& path) {
  try {
    return parse_morphism(read_file(path));
  } catch (AlgebraError const& e) {
    std::string msg = path + ": " + e.what();
    if (!e.witness().empty()) {
      msg += " [witness:";
      for (auto const& w : e.witness()) msg += " " + w;
      msg += "]";
    }
    throw InputError(msg);
  } catch (TermError const& e) {
    throw InputError(path + ": " + e.what());
  }
}

Logic logic_arg(std::string const& s) {
  auto l = parse_logic(s);
  if (!l) throw InputError("unknown logic '" + s + "'");
  return *l;
}

unsigned thread_count() {
  if (char const* env = std::getenv("FO2DEC_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n <= 0)
      throw InputError("FO2DEC_THREADS must be a positive integer");
    return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Labels followed by "(" are inner labels, all others leaves.
Alphabet infer_alphabet(std::vector<std::string> const& texts) {
  std::vector<std::string> leaves, inners;
  auto add = [](std::vector<std::string>& v, std::string const& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  for (auto const& t : texts) {
    for (std::size_t i = 0; i < t.size();) {
      auto c = static_cast<unsigned char>(t[i]);
      if (std::isalpha(c) || c == '_') {
        std::size_t j = i;
        while (j < t.size() && (std::isalnum(static_cast<unsigned char>(t[j])) ||
                                t[j] == '_'))
          ++j;
        std::size_t k = j;
        while (k < t.size() && std::isspace(static_cast<unsigned char>(t[k])))
          ++k;
        add(k < t.size() && t[k] == '(' ? inners : leaves, t.substr(i, j - i));
        i = j;
      } else {
        ++i;
      }
    }
  }
  for (auto const& b : inners)
    leaves.erase(std::remove(leaves.begin(), leaves.end(), b), leaves.end());
  return Alphabet(leaves, inners);
}

std::string strip_comments(std::string const& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (auto p = line.find('#'); p != std::string::npos) line.resize(p);
    out += line + "\n";
  }
  return out;
}

////////////////////////////////////////////////////////////////////////
// decide / verify / replay
////////////////////////////////////////////////////////////////////////

struct DecideArgs {
  std::string algebra;
  std::string logic = "fo2";
  std::size_t budget = SatOptions{}.budget;
  std::size_t max_union = SatOptions{}.max_union;
  std::uint64_t seed = 0;
  bool json = false;
  bool timings = false;
  bool prune_leq = false;
  bool all_conditions = false;
  std::string manifest;
  std::string save_verdict;
};

int exit_for(Outcome o) {
  switch (o) {
    case Outcome::Definable: return kOk;
    case Outcome::NotDefinable: return kNo;
    case Outcome::Inconclusive: return kInconclusive;
  }
  return kInconclusive;
}

Verdict run_decide(DecideArgs const& a, ForestMorphism const& m) {
  DecideOptions opts;
  opts.logic = logic_arg(a.logic);
  opts.sat.budget = a.budget;
  opts.sat.max_union = a.max_union;
  opts.sat.seed = a.seed;
  opts.sat.prune_leq = a.prune_leq;
  opts.all_conditions = a.all_conditions;
  opts.threads = thread_count();
  return decide(m, opts);
}

json manifest_for(DecideArgs const& a, std::vector<std::string> const& argv,
                  std::string const& algebra_text, std::string const& report) {
  return {{"tool", "fo2dec"},
          {"version", kVersion},
          {"commandLine", argv},
          {"inputs", {{"algebra", {{"path", a.algebra},
                                   {"sha256", sha256_hex(algebra_text)}}}}},
          {"logic", a.logic},
          {"budgets", {{"satElements", a.budget}, {"maxUnion", a.max_union}}},
          {"pruneLeq", a.prune_leq},
          {"allConditions", a.all_conditions},
          {"seed", a.seed},
          {"report", {{"sha256", sha256_hex(report)}}}};
}

int cmd_decide(DecideArgs const& a, std::vector<std::string> const& argv) {
  auto text = read_file(a.algebra);
  auto m = load_algebra(a.algebra);
  Verdict v = run_decide(a, m);
  auto j = verdict_to_json(v, a.timings);
  std::string report = j.dump(2) + "\n";
  if (!a.save_verdict.empty()) write_file(a.save_verdict, report);
  if (a.json) {
    std::cout << report;
  } else {
    std::cout << verdict_text(v);
    if (v.outcome == Outcome::NotDefinable) {
      std::cout << "re-check: fo2dec verify --algebra " << a.algebra
                << " --verdict "
                << (a.save_verdict.empty() ? "<verdict.json>" : a.save_verdict)
                << "\n";
    }
  }
  if (!a.manifest.empty()) {
    auto mj = manifest_for(a, argv, text, verdict_to_json(v).dump(2) + "\n");
    mj["outcome"] = outcome_name(v.outcome);
    write_file(a.manifest, mj.dump(2) + "\n");
  }
  return exit_for(v.outcome);
}

int cmd_verify(std::string const& algebra, std::string const& verdict_file) {
  auto m = load_algebra(algebra);
  Verdict v;
  try {
    v = verdict_from_json(json::parse(read_file(verdict_file)));
  } catch (json::exception const& e) {
    throw InputError(verdict_file + ": " + e.what());
  } catch (std::runtime_error const& e) {
    throw InputError(verdict_file + ": " + e.what());
  }
  auto r = verify(m, v);
  std::cout << (r.ok ? "verified: " : "REJECTED: ") << r.message << "\n";
  return r.ok ? kOk : kNo;
}

int cmd_replay(std::string const& manifest_file) {
  json mj;
  try {
    mj = json::parse(read_file(manifest_file));
  } catch (json::exception const& e) {
    throw InputError(manifest_file + ": " + e.what());
  }
  DecideArgs a;
  try {
    a.algebra = mj.at("inputs").at("algebra").at("path").get<std::string>();
    a.logic = mj.at("logic").get<std::string>();
    a.budget = mj.at("budgets").at("satElements").get<std::size_t>();
    a.max_union = mj.at("budgets").at("maxUnion").get<std::size_t>();
    a.prune_leq = mj.value("pruneLeq", false);
    a.all_conditions = mj.value("allConditions", false);
    a.seed = mj.at("seed").get<std::uint64_t>();
  } catch (json::exception const& e) {
    throw InputError(manifest_file + ": " + e.what());
  }
  auto text = read_file(a.algebra);
  auto want = mj["inputs"]["algebra"]["sha256"].get<std::string>();
  if (sha256_hex(text) != want) {
    std::cout << "input changed: " << a.algebra << "\n";
    return kNo;
  }
  auto m = load_algebra(a.algebra);
  Verdict v = run_decide(a, m);
  auto report = verdict_to_json(v).dump(2) + "\n";
  bool same = sha256_hex(report) == mj["report"]["sha256"].get<std::string>();
  std::cout << "outcome " << outcome_name(v.outcome) << ", report "
            << (same ? "identical" : "DIFFERS") << "\n";
  return same ? kOk : kNo;
}

////////////////////////////////////////////////////////////////////////
// syntactic / check-identities
////////////////////////////////////////////////////////////////////////

int cmd_syntactic(std::string const& algebra, std::string const& out,
                  bool as_json) {
  auto m = load_algebra(algebra);
  auto r = syntactic_quotient(m);
  auto const& q = r.quotient;
  auto class_map = [](FiniteSemigroup const& orig, FiniteSemigroup const& qs,
                      std::vector<std::optional<Elem>> const& cls) {
    json j = json::object();
    for (Elem e = 0; e < orig.size(); ++e)
      j[orig.name(e)] = cls[e] ? json(qs.name(*cls[e])) : json(nullptr);
    return j;
  };
  json j = {{"H", class_map(m.algebra.H, q.algebra.H, r.h_class)},
            {"V", class_map(m.algebra.V, q.algebra.V, r.v_class)},
            {"sizes", {{"H", q.h_size()}, {"V", q.v_size()}}},
            {"rounds", r.rounds}};
  if (!out.empty()) write_file(out, write_morphism(q));
  if (as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "syntactic algebra: |H|=" << q.h_size()
              << " |V|=" << q.v_size() << "\n";
    for (auto const& part : {"H", "V"}) {
      for (auto it = j[part].begin(); it != j[part].end(); ++it)
        std::cout << part << " " << it.key() << " -> "
                  << (it.value().is_null() ? std::string("(unreachable)")
                                           : it.value().get<std::string>())
                  << "\n";
    }
    if (out.empty()) std::cout << write_morphism(q);
  }
  return kOk;
}

int cmd_check_identities(std::string const& algebra, std::string const& logic,
                         bool as_json) {
  auto m = load_algebra(algebra);
  auto q = syntactic_quotient(m).quotient;
  Logic l = logic_arg(logic);
  std::vector<IdentityReport> reps = {
      l == Logic::FO2 ? check_eqh(q.algebra.H)
                      : check_variant_identities(q.algebra.H, l),
      check_eqv(q.algebra.V)};
  bool all = true;
  json arr = json::array();
  for (auto const& r : reps) {
    all = all && r.holds;
    arr.push_back(identity_to_json(r));
  }
  if (as_json) {
    std::cout << json{{"logic", logic_name(l)}, {"identities", arr}}.dump(2)
              << "\n";
  } else {
    for (auto const& r : reps) {
      std::cout << r.identity << ": " << (r.holds ? "holds" : "fails");
      if (!r.holds) {
        std::cout << " at";
        for (auto const& [k, val] : r.witness) std::cout << " " << k << "=" << val;
        std::cout << " (" << r.lhs << " != " << r.rhs << ")";
      }
      std::cout << "\n";
    }
  }
  return all ? kOk : kNo;
}

////////////////////////////////////////////////////////////////////////
// oracle
////////////////////////////////////////////////////////////////////////

int cmd_game(std::string const& variant, unsigned k, std::string const& s_file,
             std::string const& t_file, std::string const& algebra,
             std::size_t budget) {
  auto var = parse_variant(variant);
  if (!var) throw InputError("unknown variant '" + variant + "'");
  auto st = strip_comments(read_file(s_file));
  auto tt = strip_comments(read_file(t_file));
  Alphabet alpha = algebra.empty() ? infer_alphabet({st, tt})
                                   : load_algebra(algebra).alphabet;
  ForestTerm s, t;
  try {
    s = parse_forest(st, alpha);
    t = parse_forest(tt, alpha);
  } catch (TermError const& e) {
    throw InputError(e.what());
  }
  try {
    bool eq = forest_game_equiv(s, t, k, *var, budget);
    std::cout << (eq ? "duplicator wins" : "spoiler wins") << " (" << k
              << " rounds, " << variant_name(*var) << ")\n";
    return eq ? kOk : kNo;
  } catch (BudgetExceeded const& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  }
}

int cmd_eval(std::string const& formula, std::string const& forest_file,
             std::string const& algebra) {
  auto ft = strip_comments(read_file(forest_file));
  std::optional<ForestMorphism> m;
  if (!algebra.empty()) m = load_algebra(algebra);
  Alphabet alpha = m ? m->alphabet : infer_alphabet({ft});
  try {
    auto f = parse_forest(ft, alpha);
    if (!formula.empty()) {
      auto phi = parse_formula(formula, alpha);
      std::cout << "formula " << print(phi, alpha) << ": "
                << (eval_eff(phi, f) ? "true" : "false") << "\n";
    }
    if (m) {
      Elem h = eval_forest(*m, f);
      std::cout << "type " << m->algebra.H.name(h) << ", "
                << (m->accepting[h] ? "accepted" : "rejected") << "\n";
    }
  } catch (TermError const& e) {
    throw InputError(e.what());
  }
  return kOk;
}

int cmd_validate_profiles(std::string const& algebra, std::size_t max_len,
                          std::vector<std::string> const& letters,
                          bool complete, bool plugged) {
  auto m = load_algebra(algebra);
  if (complete) m = leaf_completion(m);
  std::optional<std::vector<LetterId>> ls;
  if (!letters.empty()) {
    ShalAlphabet la(m.alphabet);
    ls.emplace();
    for (auto const& n : letters) {
      auto c = la.find(n);
      if (!c) throw InputError("unknown shal letter '" + n + "'");
      ls->push_back(*c);
    }
  }
  auto r = validate_profiles(m, max_len, ls, plugged);
  std::cout << "positions checked: " << r.positions
            << ", mismatches: " << r.mismatches << "\n";
  for (auto const& c : r.counterexamples) std::cout << "  mismatch at " << c << "\n";
  std::cout << (r.ok() ? "pass" : "FAIL") << "\n";
  return r.ok() ? kOk : kNo;
}

int cmd_validate_prop_algo(std::string const& algebra, std::optional<unsigned> k,
                           std::size_t len, std::size_t budget, std::uint64_t seed) {
  auto m = load_algebra(algebra);
  SatOptions opts;
  opts.budget = budget;
  opts.seed = seed;
  auto r = validate_prop_algo(m, k, len, opts);
  std::cout << "rounds " << r.k << ", shal length <= " << r.len_bound << "\n";
  bool budget_hit = false;
  for (auto const& c : r.cases) {
    std::cout << "X=" << c.x_name << ": sat " << c.sat_elements
              << (c.sat_complete ? "" : " (incomplete)") << ", shals "
              << c.shals << ", not below Sat " << c.not_below
              << ", witnessed by derivation " << c.by_derivation
              << ", without witness " << c.unverified << "\n";
    for (auto const& s : c.counterexamples) std::cout << "  " << s << "\n";
    budget_hit = budget_hit || !c.sat_complete;
  }
  std::cout << (r.ok() ? "pass" : "FAIL") << "\n";
  if (budget_hit) return kBudget;
  return r.ok() ? kOk : kNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decides two-variable first-order definability of forest "
               "languages given by forest algebra morphisms"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::vector<std::string> argv_copy(argv, argv + argc);

  DecideArgs da;
  auto* decide_cmd = app.add_subcommand("decide", "decide definability");
  decide_cmd->add_option("algebra_pos", da.algebra, "algebra file");
  decide_cmd->add_option("--algebra", da.algebra, "algebra file");
  decide_cmd->add_option("--logic", da.logic, "fo2|efh|efhs|fo2succ")
      ->capture_default_str();
  decide_cmd->add_option("--budget", da.budget, "Sat elements per X")
      ->capture_default_str();
  decide_cmd->add_option("--max-union", da.max_union,
                         "seed size of the union search")
      ->capture_default_str();
  decide_cmd->add_option("--seed", da.seed, "worklist shuffle seed");
  decide_cmd->add_flag("--json", da.json, "JSON report");
  decide_cmd->add_flag("--timings", da.timings, "include timings in JSON");
  decide_cmd->add_flag("--prune-leq", da.prune_leq,
                       "drop preorder-equivalent Sat elements");
  decide_cmd->add_flag("--all-conditions", da.all_conditions,
                       "run the saturation check after a failed identity");
  decide_cmd->add_option("--manifest", da.manifest, "write a run manifest");
  decide_cmd->add_option("--save-verdict", da.save_verdict,
                         "write the JSON verdict to a file");

  std::string v_alg, v_verdict;
  auto* verify_cmd = app.add_subcommand("verify", "re-check a verdict");
  verify_cmd->add_option("--algebra", v_alg)->required();
  verify_cmd->add_option("--verdict", v_verdict)->required();

  std::string r_manifest;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a manifest");
  replay_cmd->add_option("manifest_pos", r_manifest);
  replay_cmd->add_option("--manifest", r_manifest);

  std::string s_alg, s_out;
  bool s_json = false;
  auto* syn_cmd = app.add_subcommand("syntactic", "syntactic quotient");
  syn_cmd->add_option("algebra_pos", s_alg);
  syn_cmd->add_option("--algebra", s_alg);
  syn_cmd->add_option("-o,--output", s_out, "write the quotient");
  syn_cmd->add_flag("--json", s_json);

  std::string i_alg, i_logic = "fo2";
  bool i_json = false;
  auto* id_cmd = app.add_subcommand("check-identities", "identity checks");
  id_cmd->add_option("algebra_pos", i_alg);
  id_cmd->add_option("--algebra", i_alg);
  id_cmd->add_option("--logic", i_logic)->capture_default_str();
  id_cmd->add_flag("--json", i_json);

  auto* oracle = app.add_subcommand("oracle", "term-level oracles");
  oracle->require_subcommand(1);

  std::string g_var = "fo2", g_s, g_t, g_alg;
  unsigned g_k = 2;
  std::size_t g_budget = std::size_t{1} << 20;
  auto* game_cmd = oracle->add_subcommand("game", "forest game");
  game_cmd->add_option("--variant", g_var)->capture_default_str();
  game_cmd->add_option("--k", g_k)->capture_default_str();
  game_cmd->add_option("--algebra", g_alg, "take the alphabet from here");
  game_cmd->add_option("--budget", g_budget)->capture_default_str();
  game_cmd->add_option("s", g_s)->required();
  game_cmd->add_option("t", g_t)->required();

  std::string e_formula, e_forest, e_alg;
  auto* eval_cmd = oracle->add_subcommand("eval", "evaluate a forest");
  eval_cmd->add_option("--formula", e_formula);
  eval_cmd->add_option("--algebra", e_alg);
  eval_cmd->add_option("forest", e_forest)->required();

  std::string p_alg;
  std::size_t p_len = 3;
  std::vector<std::string> p_letters;
  bool p_complete = false, p_no_plug = false;
  auto* vp_cmd = oracle->add_subcommand("validate-profiles",
                                        "folded vs semantic profiles");
  vp_cmd->add_option("--algebra", p_alg)->required();
  vp_cmd->add_option("--max-len", p_len)->capture_default_str();
  vp_cmd->add_option("--letters", p_letters, "restrict to these shal letters");
  vp_cmd->add_flag("--complete", p_complete, "leaf-complete first");
  vp_cmd->add_flag("--no-plug", p_no_plug, "skip the plug-in comparison");

  std::string a_alg;
  std::optional<unsigned> a_k;
  std::size_t a_len = 6, a_budget = SatOptions{}.budget;
  std::uint64_t a_seed = 0;
  auto* vpa_cmd = oracle->add_subcommand("validate-prop-algo",
                                         "Sat against game configurations");
  vpa_cmd->add_option("--algebra", a_alg)->required();
  vpa_cmd->add_option("--k", a_k, "rounds (default: derived, at most 6)");
  vpa_cmd->add_option("--max-len", a_len)->capture_default_str();
  vpa_cmd->add_option("--budget", a_budget)->capture_default_str();
  vpa_cmd->add_option("--seed", a_seed);

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*decide_cmd) {
      if (da.algebra.empty()) throw InputError("no algebra given");
      return cmd_decide(da, argv_copy);
    }
    if (*verify_cmd) return cmd_verify(v_alg, v_verdict);
    if (*replay_cmd) {
      if (r_manifest.empty()) throw InputError("no manifest given");
      return cmd_replay(r_manifest);
    }
    if (*syn_cmd) {
      if (s_alg.empty()) throw InputError("no algebra given");
      return cmd_syntactic(s_alg, s_out, s_json);
    }
    if (*id_cmd) {
      if (i_alg.empty()) throw InputError("no algebra given");
      return cmd_check_identities(i_alg, i_logic, i_json);
    }
    if (*game_cmd) return cmd_game(g_var, g_k, g_s, g_t, g_alg, g_budget);
    if (*eval_cmd) return cmd_eval(e_formula, e_forest, e_alg);
    if (*vp_cmd)
      return cmd_validate_profiles(p_alg, p_len, p_letters, p_complete,
                                   !p_no_plug);
    if (*vpa_cmd)
      return cmd_validate_prop_algo(a_alg, a_k, a_len, a_budget, a_seed);
  } catch (InputError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (BudgetExceeded const& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
