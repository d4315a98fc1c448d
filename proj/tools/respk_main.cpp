#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "respk/amalgam.hpp"
#include "respk/certificate.hpp"
#include "respk/config.hpp"
#include "respk/doublecoset.hpp"
#include "respk/filtration.hpp"
#include "respk/magnus.hpp"
#include "respk/separate_free.hpp"
#include "respk/words.hpp"

using namespace respk;

namespace {

const char* kUsage =
    "usage: respk <command> [options]\n"
    "\n"
    "commands:\n"
    "  free separate -g <word> -h <word> [-p P] [--rank N] [--out FILE]\n"
    "      decide conjugacy in the free group; emit a separation certificate\n"
    "  free residual -g <word> [-p P] [--rank N]\n"
    "      finite p-group image in which a nontrivial word survives\n"
    "  free order-witness -g <word> -e E [-p P] [--rank N]\n"
    "      image where the word has order exactly p^E\n"
    "  surface separate -g <word> -h <word> [-p P] [--genus1 N] [--genus2 M]\n"
    "                   [--out FILE]\n"
    "      separation over the genus N+M surface group amalgam\n"
    "  surface conjugate -g <word> -h <word> [--genus1 N] [--genus2 M]\n"
    "      conjugacy decision in the amalgam\n"
    "  lab series|aut|claims --group NAME [-p P] [--depth D]\n"
    "      finite-group filtration reports\n"
    "  verify <file> | verify --all <dir>\n"
    "      independently recheck emitted certificates\n"
    "\n"
    "rank 2 uses generators x y; higher ranks use x1..xN. Surface words mix\n"
    "the two factor alphabets x1,y1,.. and x'1,y'1,.. freely.\n"
    "RESPK_CONFIG may point to a key: value config file; flags win over it.\n";

struct Args {
  std::vector<std::string> positional;
  std::map<std::string, std::string> flags;
  bool has(const std::string& k) const { return flags.count(k) != 0; }
  std::string get(const std::string& k, const std::string& fallback) const {
    auto it = flags.find(k);
    return it == flags.end() ? fallback : it->second;
  }
  std::string need(const std::string& k) const {
    auto it = flags.find(k);
    if (it == flags.end())
      throw PreconditionError("missing required option " + k);
    return it->second;
  }
};

Args parse_args(int argc, char** argv, int from) {
  Args a;
  for (int i = from; i < argc; ++i) {
    std::string tok = argv[i];
    if (tok.size() > 1 && tok[0] == '-' && !std::isdigit(tok[1])) {
      if (tok == "--all") {
        a.flags["--all"] = "1";
        continue;
      }
      if (i + 1 >= argc)
        throw PreconditionError("option " + tok + " needs a value");
      a.flags[tok] = argv[++i];
    } else {
      a.positional.push_back(tok);
    }
  }
  return a;
}

long to_long_flag(const std::string& v, const std::string& flag) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size())
    throw PreconditionError("option " + flag + " needs an integer, got " + v);
  return out;
}

Config config_for(const Args& a) {
  Config cfg = Config::from_env();
  if (a.has("-p")) cfg.set("prime", a.flags.at("-p"));
  return cfg;
}

Alphabet free_alphabet(int rank) {
  if (rank < 1) throw PreconditionError("rank must be positive");
  if (rank == 2) return Alphabet::named({"x", "y"});
  std::vector<std::string> names;
  for (int i = 1; i <= rank; ++i) names.push_back("x" + std::to_string(i));
  return Alphabet::named(names);
}

void write_or_print(const std::string& text, const Args& a) {
  if (a.has("--out")) {
    std::string path = a.flags.at("--out");
    std::ofstream out(path);
    if (!out) throw PreconditionError("cannot write " + path);
    out << text;
    std::cout << "witness: " << path << "\n";
  } else {
    std::cout << text;
  }
}

int cmd_free_separate(const Args& a) {
  Config cfg = config_for(a);
  int rank = static_cast<int>(to_long_flag(a.get("--rank", "2"), "--rank"));
  Alphabet alph = free_alphabet(rank);
  Word g = parse_word(a.need("-g"), alph);
  Word h = parse_word(a.need("-h"), alph);
  ConjOutcome out = separate_conjugacy_free(g, h, alph, cfg);
  if (out.conjugator) {
    std::cout << "conjugate: " << print_word(*out.conjugator, alph) << "\n";
    return 2;
  }
  Certificate c =
      certificate_from_free(g, h, alph, std::move(out.witness), cfg);
  write_or_print(emit_certificate(c), a);
  return 0;
}

int cmd_free_residual(const Args& a) {
  Config cfg = config_for(a);
  int rank = static_cast<int>(to_long_flag(a.get("--rank", "2"), "--rank"));
  Alphabet alph = free_alphabet(rank);
  Word g = parse_word(a.need("-g"), alph);
  if (g.empty()) throw PreconditionError("the word must be nontrivial");
  MagnusWitness w = residual_p_witness(g, cfg.prime, rank, cfg);
  PElement image = w.hom.apply(g);
  std::cout << "word: " << print_word(g, alph) << "\n"
            << "target: " << w.hom.target->print() << "\n"
            << "degree: " << w.degree << "\n"
            << "image: " << image.print() << "\n"
            << "order: " << elem_order(image) << "\n";
  return 0;
}

int cmd_free_order_witness(const Args& a) {
  Config cfg = config_for(a);
  int rank = static_cast<int>(to_long_flag(a.get("--rank", "2"), "--rank"));
  int e = static_cast<int>(to_long_flag(a.need("-e"), "-e"));
  Alphabet alph = free_alphabet(rank);
  Word g = parse_word(a.need("-g"), alph);
  MagnusWitness w = order_exact_witness(g, cfg.prime, rank, e, cfg);
  PElement image = w.hom.apply(g);
  std::cout << "word: " << print_word(g, alph) << "\n"
            << "target: " << w.hom.target->print() << "\n"
            << "degree: " << w.degree << "\n"
            << "image: " << image.print() << "\n"
            << "order: " << elem_order(image) << "\n";
  return 0;
}

int cmd_surface_separate(const Args& a) {
  Config cfg = config_for(a);
  int n = static_cast<int>(to_long_flag(a.get("--genus1", "1"), "--genus1"));
  int m = static_cast<int>(to_long_flag(a.get("--genus2", "1"), "--genus2"));
  Amalgam amal = surface_amalgam(n, m);
  Alphabet comb = combined_alphabet(amal);
  AmalgamElement g = amalgam_from_word(amal, parse_word(a.need("-g"), comb));
  AmalgamElement h = amalgam_from_word(amal, parse_word(a.need("-h"), comb));
  SurfaceOutcome out = separate_conjugacy_surface(amal, g, h, cfg);
  if (out.conjugator) {
    std::cout << "conjugate: " << print_amalgam(amal, *out.conjugator) << "\n";
    return 2;
  }
  Certificate c = certificate_from_surface(amal, g, h, *out.witness, cfg);
  write_or_print(emit_certificate(c), a);
  return 0;
}

int cmd_surface_conjugate(const Args& a) {
  Config cfg = config_for(a);
  int n = static_cast<int>(to_long_flag(a.get("--genus1", "1"), "--genus1"));
  int m = static_cast<int>(to_long_flag(a.get("--genus2", "1"), "--genus2"));
  Amalgam amal = surface_amalgam(n, m);
  Alphabet comb = combined_alphabet(amal);
  AmalgamElement g = amalgam_from_word(amal, parse_word(a.need("-g"), comb));
  AmalgamElement h = amalgam_from_word(amal, parse_word(a.need("-h"), comb));
  AmalgamConjugacy res = amalgam_conjugacy(amal, g, h, cfg);
  if (res.conjugator) {
    std::cout << "conjugate: yes\n"
              << "conjugator: " << print_amalgam(amal, *res.conjugator)
              << "\n";
    return 2;
  }
  std::cout << "conjugate: no\n";
  return 0;
}

int cmd_lab(const Args& a) {
  if (a.positional.empty())
    throw PreconditionError("lab needs a subcommand: series, aut, or claims");
  std::string sub = a.positional[0];
  Config cfg = config_for(a);
  TableGroup g = table_group_by_name(a.need("--group"));
  long p = cfg.prime;
  int depth = static_cast<int>(to_long_flag(a.get("--depth", "3"), "--depth"));

  if (sub == "series") {
    SeriesChain s = lower_p_series(g, p);
    std::cout << "group: " << g.name << "\n"
              << "p: " << p << "\n"
              << "terms: " << s.terms.size() << "\n";
    for (std::size_t i = 0; i < s.terms.size(); ++i) {
      int count = 0;
      for (int e = 0; e < g.order; ++e)
        if (s.terms[i] >> e & 1) ++count;
      std::cout << "term" << (i + 1) << ": " << count << "\n";
    }
    std::cout << "reaches-trivial: "
              << (s.terms.back() == Mask{1} ? "yes" : "no") << "\n";
    return 0;
  }
  if (sub == "aut") {
    AutGroup auts = aut_group(g, 32, cfg.aut_candidate_cap);
    std::cout << "group: " << g.name << "\n"
              << "p: " << p << "\n"
              << "aut-order: " << auts.maps.size() << "\n"
              << "inn-order: " << inn_subgroup(g).size() << "\n"
              << "ip-order: " << ip_kernel(g, p, auts).size() << "\n";
    return 0;
  }
  if (sub == "claims") {
    ClaimReport an = an_filtration_checks(g, p, depth, 32,
                                          cfg.aut_candidate_cap);
    ClaimReport bn = bn_filtration_checks(g, p, depth, 32,
                                          cfg.aut_candidate_cap);
    for (const auto& line : an.lines) std::cout << line << "\n";
    // the second report repeats the group and prime headers
    for (std::size_t i = 2; i < bn.lines.size(); ++i)
      std::cout << bn.lines[i] << "\n";
    std::cout << "ok: " << (an.ok && bn.ok ? "yes" : "no") << "\n";
    return an.ok && bn.ok ? 0 : 4;
  }
  throw PreconditionError("unknown lab subcommand: " + sub);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

int cmd_verify(const Args& a) {
  if (a.has("--all")) {
    if (a.positional.empty())
      throw PreconditionError("verify --all needs a directory");
    std::vector<std::string> files;
    for (const auto& entry :
         std::filesystem::directory_iterator(a.positional[0]))
      if (entry.is_regular_file()) files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    int worst = 0;
    for (const std::string& f : files) {
      try {
        verify_certificate(parse_certificate(read_file(f)));
        std::cout << f << ": pass\n";
      } catch (const CapExceeded& e) {
        std::cout << f << ": cap exceeded (" << e.what() << ")\n";
        worst = std::max(worst, 3);
      } catch (const VerificationError& e) {
        std::cout << f << ": FAIL (" << e.what() << ")\n";
        worst = 4;
      } catch (const std::exception& e) {
        std::cout << f << ": unreadable (" << e.what() << ")\n";
        worst = std::max(worst, 1);
      }
    }
    return worst;
  }
  if (a.positional.empty())
    throw PreconditionError("verify needs a certificate file");
  verify_certificate(parse_certificate(read_file(a.positional[0])));
  std::cout << a.positional[0] << ": pass\n";
  return 0;
}

int run(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return 1;
  }
  std::string cmd = argv[1];
  if (cmd == "--help" || cmd == "help") {
    std::cout << kUsage;
    return 0;
  }
  if (cmd == "free" || cmd == "surface") {
    if (argc < 3) throw PreconditionError(cmd + " needs a subcommand");
    std::string sub = argv[2];
    Args a = parse_args(argc, argv, 3);
    if (cmd == "free" && sub == "separate") return cmd_free_separate(a);
    if (cmd == "free" && sub == "residual") return cmd_free_residual(a);
    if (cmd == "free" && sub == "order-witness")
      return cmd_free_order_witness(a);
    if (cmd == "surface" && sub == "separate") return cmd_surface_separate(a);
    if (cmd == "surface" && sub == "conjugate")
      return cmd_surface_conjugate(a);
    throw PreconditionError("unknown subcommand: " + cmd + " " + sub);
  }
  if (cmd == "lab") return cmd_lab(parse_args(argc, argv, 2));
  if (cmd == "verify") return cmd_verify(parse_args(argc, argv, 2));
  std::cerr << kUsage;
  throw PreconditionError("unknown command: " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const NormalizationFailed& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const VerificationError& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
