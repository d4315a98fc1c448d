#include "respk/certificate.hpp"

#include <map>
#include <sstream>
#include <vector>

namespace respk {

namespace {

const char* kMagic = "respk certificate";

std::string mode_name(CertMode m) {
  switch (m) {
    case CertMode::FreeSeparation:
      return "free-separation";
    case CertMode::DoubleCoset:
      return "double-coset";
    case CertMode::SurfaceSeparation:
      return "surface-separation";
  }
  throw PreconditionError("corrupt certificate mode");
}

CertMode mode_from(const std::string& s, int line) {
  if (s == "free-separation") return CertMode::FreeSeparation;
  if (s == "double-coset") return CertMode::DoubleCoset;
  if (s == "surface-separation") return CertMode::SurfaceSeparation;
  throw ParseError("unknown certificate mode: " + s, line);
}

std::string kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Residual:
      return "residual";
    case NodeKind::Cyclic:
      return "cyclic";
    case NodeKind::Wreath:
      return "wreath";
  }
  throw PreconditionError("corrupt node kind");
}

NodeKind kind_from(const std::string& s, int line) {
  if (s == "residual") return NodeKind::Residual;
  if (s == "cyclic") return NodeKind::Cyclic;
  if (s == "wreath") return NodeKind::Wreath;
  throw ParseError("unknown node kind: " + s, line);
}

std::string check_name(VerifyMode v) {
  switch (v) {
    case VerifyMode::Nontrivial:
      return "nontrivial";
    case VerifyMode::AbelianDistinct:
      return "abelian-distinct";
    case VerifyMode::Enumeration:
      return "enumeration";
    case VerifyMode::Compositional:
      return "compositional";
  }
  throw PreconditionError("corrupt verification mode");
}

VerifyMode check_from(const std::string& s, int line) {
  if (s == "nontrivial") return VerifyMode::Nontrivial;
  if (s == "abelian-distinct") return VerifyMode::AbelianDistinct;
  if (s == "enumeration") return VerifyMode::Enumeration;
  if (s == "compositional") return VerifyMode::Compositional;
  throw ParseError("unknown check mode: " + s, line);
}

// The record-level verification mode implied by a witness tree root.
std::string tree_verification(const SeparationNode& root) {
  return root.verify == VerifyMode::Compositional ? "compositional"
                                                  : "full-enumeration";
}

std::string join_names(const Alphabet& a) {
  std::string s;
  for (int i = 0; i < a.rank(); ++i) {
    if (i) s += ' ';
    s += a.names[static_cast<std::size_t>(i)];
  }
  return s;
}

void emit_hom(std::string& out, const PHom& hom, const std::string& target_key) {
  out += target_key + ": " + hom.target->print() + "\n";
  for (int i = 0; i < hom.domain.rank(); ++i)
    out += "image " + hom.domain.names[static_cast<std::size_t>(i)] + ": " +
           hom.images[static_cast<std::size_t>(i)].print() + "\n";
}

void collect_nodes(const SeparationNode* n,
                   std::vector<const SeparationNode*>& flat) {
  flat.push_back(n);
  for (const auto& c : n->children)
    if (c) collect_nodes(c.get(), flat);
}

// Line cursor that remembers positions for error messages.
struct LineReader {
  std::vector<std::string> lines;
  std::size_t pos = 0;

  explicit LineReader(std::string_view text) {
    std::string cur;
    for (char ch : text) {
      if (ch == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }

  int here() const { return static_cast<int>(pos); }

  std::string next() {
    if (pos >= lines.size())
      throw ParseError("unexpected end of certificate",
                       static_cast<int>(lines.size()) + 1);
    return lines[pos++];
  }

  std::string expect(const std::string& key) {
    std::string line = next();
    std::string prefix = key + ": ";
    if (line.rfind(prefix, 0) != 0) {
      if (line == key + ":") return "";
      throw ParseError("expected '" + key + ": ...'", here());
    }
    return line.substr(prefix.size());
  }

  void literal(const std::string& want) {
    std::string line = next();
    if (line != want) throw ParseError("expected '" + want + "'", here());
  }
};

long to_long(const std::string& s, int line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    throw ParseError("not an integer: " + s, line);
  }
  if (used != s.size()) throw ParseError("not an integer: " + s, line);
  return v;
}

std::vector<long> to_longs(const std::string& s, int line) {
  std::vector<long> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(to_long(tok, line));
  return out;
}

Alphabet to_alphabet(const std::string& s, int line) {
  std::vector<std::string> names;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) names.push_back(tok);
  if (names.empty()) throw ParseError("empty alphabet", line);
  try {
    return Alphabet::named(names);
  } catch (const std::exception& e) {
    throw ParseError(e.what(), line);
  }
}

Word to_word(const std::string& s, const Alphabet& a, int line) {
  try {
    return parse_word(s, a);
  } catch (const ParseError& e) {
    throw ParseError(e.what(), line);
  }
}

PGroupExprPtr to_expr(const std::string& s, long p, int line) {
  try {
    return PGroupExpr::parse(s, p);
  } catch (const ParseError& e) {
    throw ParseError(e.what(), line);
  }
}

PHom read_hom(LineReader& r, const Alphabet& a, long p,
              const std::string& target_key) {
  PHom hom;
  hom.domain = a;
  std::string target_text = r.expect(target_key);
  hom.target = to_expr(target_text, p, r.here());
  for (int i = 0; i < a.rank(); ++i) {
    std::string value =
        r.expect("image " + a.names[static_cast<std::size_t>(i)]);
    try {
      hom.images.push_back(parse_element(value, hom.target));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), r.here());
    }
  }
  return hom;
}

}  // namespace

Certificate certificate_from_free(const Word& g, const Word& h,
                                  const Alphabet& a,
                                  std::unique_ptr<SeparationNode> tree,
                                  const Config& cfg) {
  if (!tree) throw PreconditionError("certificate needs a witness tree");
  Certificate c;
  c.mode = CertMode::FreeSeparation;
  c.prime = cfg.prime;
  c.enum_cap = cfg.enum_cap;
  c.trunc_cap = cfg.trunc_degree_cap;
  c.g = g;
  c.h = h;
  c.alphabet = a;
  c.tree = std::move(tree);
  c.verification = tree_verification(*c.tree);
  return c;
}

Certificate certificate_from_double_coset(const Word& g, const Word& h,
                                          int genus,
                                          const DoubleCosetWitness& w,
                                          const Config& cfg) {
  Certificate c;
  c.mode = CertMode::DoubleCoset;
  c.prime = cfg.prime;
  c.enum_cap = cfg.enum_cap;
  c.trunc_cap = cfg.trunc_degree_cap;
  c.verification = "table";
  c.g = g;
  c.h = h;
  c.genus = genus;
  c.phi = w.phi;
  c.modulus = w.modulus;
  c.early = w.early;
  c.q = w.q;
  c.degree = w.degree;
  return c;
}

Certificate certificate_from_surface(const Amalgam& a, const AmalgamElement& g,
                                     const AmalgamElement& h,
                                     const SurfaceWitness& w,
                                     const Config& cfg) {
  if (a.f1.finite || a.f2.finite)
    throw PreconditionError("surface certificates need free factors");
  Certificate c;
  c.mode = CertMode::SurfaceSeparation;
  c.prime = cfg.prime;
  c.enum_cap = cfg.enum_cap;
  c.trunc_cap = cfg.trunc_degree_cap;
  c.verification = "table";
  c.g = amalgam_to_word(a, g);
  c.h = amalgam_to_word(a, h);
  c.genus1 = a.f1.free_part.genus;
  c.genus2 = a.f2.free_part.genus;
  c.phi1 = w.hom.phi1;
  c.phi2 = w.hom.phi2;
  c.q = w.hom.q;
  c.step = w.step;
  c.swapped = w.swapped;
  return c;
}

std::string emit_certificate(const Certificate& c) {
  std::string out;
  out += std::string(kMagic) + "\n";
  out += "mode: " + mode_name(c.mode) + "\n";
  out += "prime: " + std::to_string(c.prime) + "\n";
  out += "enum-cap: " + std::to_string(c.enum_cap) + "\n";
  out += "trunc-cap: " + std::to_string(c.trunc_cap) + "\n";
  out += "verification: " + c.verification + "\n";
  switch (c.mode) {
    case CertMode::FreeSeparation: {
      if (!c.tree) throw PreconditionError("certificate lacks a witness tree");
      out += "alphabet: " + join_names(c.alphabet) + "\n";
      out += "g: " + print_word(c.g, c.alphabet) + "\n";
      out += "h: " + print_word(c.h, c.alphabet) + "\n";
      std::vector<const SeparationNode*> flat;
      collect_nodes(c.tree.get(), flat);
      std::map<const SeparationNode*, std::size_t> index;
      for (std::size_t i = 0; i < flat.size(); ++i) index[flat[i]] = i;
      out += "nodes: " + std::to_string(flat.size()) + "\n";
      for (std::size_t i = 0; i < flat.size(); ++i) {
        const SeparationNode& n = *flat[i];
        out += "[node " + std::to_string(i) + "]\n";
        out += "kind: " + kind_name(n.kind) + "\n";
        out += "check: " + check_name(n.verify) + "\n";
        out += "alphabet: " + join_names(n.hom.domain) + "\n";
        out += "g: " + print_word(n.g, n.hom.domain) + "\n";
        out += "h: " + print_word(n.h, n.hom.domain) + "\n";
        emit_hom(out, n.hom, "target");
        if (n.kind == NodeKind::Wreath) {
          std::string vals;
          for (std::size_t j = 0; j < n.mu.values.size(); ++j) {
            if (j) vals += ' ';
            vals += std::to_string(n.mu.values[j]);
          }
          out += "mu: " + vals + "\n";
          out += "mu-modulus: " + std::to_string(n.mu.modulus) + "\n";
          out += "mu-designated: " + std::to_string(n.mu.designated) + "\n";
          out += "i0: " + std::to_string(n.i0) + "\n";
          std::string kids;
          for (std::size_t j = 0; j < n.children.size(); ++j) {
            if (j) kids += ' ';
            kids += std::to_string(index.at(n.children[j].get()));
          }
          out += "children: " + kids + "\n";
        }
        out += "[end]\n";
      }
      break;
    }
    case CertMode::DoubleCoset: {
      out += "genus: " + std::to_string(c.genus) + "\n";
      out += "g: " + print_word(c.g, c.phi.domain) + "\n";
      out += "h: " + print_word(c.h, c.phi.domain) + "\n";
      emit_hom(out, c.phi, "target");
      out += "modulus: " + std::to_string(c.modulus) + "\n";
      out += "early: " + std::to_string(c.early ? 1 : 0) + "\n";
      out += "q: " + std::to_string(c.q) + "\n";
      out += "degree: " + std::to_string(c.degree) + "\n";
      break;
    }
    case CertMode::SurfaceSeparation: {
      Amalgam a = surface_amalgam(c.genus1, c.genus2);
      Alphabet combined = combined_alphabet(a);
      out += "genus1: " + std::to_string(c.genus1) + "\n";
      out += "genus2: " + std::to_string(c.genus2) + "\n";
      out += "g: " + print_word(c.g, combined) + "\n";
      out += "h: " + print_word(c.h, combined) + "\n";
      out += "step: " + std::to_string(c.step) + "\n";
      out += "swapped: " + std::to_string(c.swapped ? 1 : 0) + "\n";
      out += "q: " + std::to_string(c.q) + "\n";
      emit_hom(out, c.phi1, "target1");
      emit_hom(out, c.phi2, "target2");
      break;
    }
  }
  out += "outcome: " + c.outcome + "\n";
  return out;
}

Certificate parse_certificate(std::string_view text) {
  LineReader r(text);
  {
    std::string line = r.next();
    if (line != kMagic) throw ParseError("not a respk certificate", r.here());
  }
  // expect() must run before here() reads the position, so every field goes
  // through one of these sequenced helpers
  auto num = [&r](const std::string& key) {
    std::string v = r.expect(key);
    return to_long(v, r.here());
  };
  auto nums = [&r](const std::string& key) {
    std::string v = r.expect(key);
    return to_longs(v, r.here());
  };
  auto alpha = [&r](const std::string& key) {
    std::string v = r.expect(key);
    return to_alphabet(v, r.here());
  };
  auto word = [&r](const std::string& key, const Alphabet& a) {
    std::string v = r.expect(key);
    return to_word(v, a, r.here());
  };

  Certificate c;
  {
    std::string v = r.expect("mode");
    c.mode = mode_from(v, r.here());
  }
  c.prime = num("prime");
  if (!is_prime(c.prime)) throw ParseError("prime is not prime", r.here());
  long cap = num("enum-cap");
  if (cap < 0) throw ParseError("enum-cap must not be negative", r.here());
  c.enum_cap = static_cast<std::size_t>(cap);
  c.trunc_cap = static_cast<int>(num("trunc-cap"));
  c.verification = r.expect("verification");

  switch (c.mode) {
    case CertMode::FreeSeparation: {
      c.alphabet = alpha("alphabet");
      c.g = word("g", c.alphabet);
      c.h = word("h", c.alphabet);
      long count = num("nodes");
      if (count < 1) throw ParseError("certificate needs nodes", r.here());
      std::vector<std::unique_ptr<SeparationNode>> nodes;
      std::vector<std::vector<long>> kid_lists(
          static_cast<std::size_t>(count));
      std::vector<int> header_lines(static_cast<std::size_t>(count));
      for (long k = 0; k < count; ++k) {
        r.literal("[node " + std::to_string(k) + "]");
        header_lines[static_cast<std::size_t>(k)] = r.here();
        auto n = std::make_unique<SeparationNode>();
        {
          std::string v = r.expect("kind");
          n->kind = kind_from(v, r.here());
        }
        {
          std::string v = r.expect("check");
          n->verify = check_from(v, r.here());
        }
        Alphabet a = alpha("alphabet");
        n->g = word("g", a);
        n->h = word("h", a);
        n->hom = read_hom(r, a, c.prime, "target");
        if (n->kind == NodeKind::Wreath) {
          std::vector<long> vals = nums("mu");
          if (static_cast<int>(vals.size()) != a.rank())
            throw ParseError("mu value count does not match the alphabet",
                             r.here());
          n->mu.domain = a;
          n->mu.values = vals;
          long m = num("mu-modulus");
          if (m < 2) throw ParseError("mu-modulus must be at least 2", r.here());
          n->mu.modulus = static_cast<unsigned long>(m);
          n->mu.designated = static_cast<int>(num("mu-designated"));
          n->i0 = num("i0");
          kid_lists[static_cast<std::size_t>(k)] = nums("children");
        }
        r.literal("[end]");
        nodes.push_back(std::move(n));
      }
      // preorder means children always sit at larger indices
      for (long k = count - 1; k >= 0; --k) {
        for (long idx : kid_lists[static_cast<std::size_t>(k)]) {
          if (idx <= k || idx >= count ||
              !nodes[static_cast<std::size_t>(idx)])
            throw ParseError("bad child index " + std::to_string(idx),
                             header_lines[static_cast<std::size_t>(k)]);
          nodes[static_cast<std::size_t>(k)]->children.push_back(
              std::move(nodes[static_cast<std::size_t>(idx)]));
        }
      }
      for (long k = 1; k < count; ++k)
        if (nodes[static_cast<std::size_t>(k)])
          throw ParseError("node " + std::to_string(k) + " is unreachable",
                           header_lines[static_cast<std::size_t>(k)]);
      c.tree = std::move(nodes[0]);
      break;
    }
    case CertMode::DoubleCoset: {
      c.genus = static_cast<int>(num("genus"));
      if (c.genus < 1) throw ParseError("genus must be positive", r.here());
      Alphabet a = Alphabet::surface(c.genus);
      c.g = word("g", a);
      c.h = word("h", a);
      c.phi = read_hom(r, a, c.prime, "target");
      long m = num("modulus");
      if (m < 1) throw ParseError("modulus must be positive", r.here());
      c.modulus = static_cast<unsigned long>(m);
      c.early = num("early") != 0;
      c.q = static_cast<unsigned long>(num("q"));
      c.degree = static_cast<int>(num("degree"));
      break;
    }
    case CertMode::SurfaceSeparation: {
      c.genus1 = static_cast<int>(num("genus1"));
      c.genus2 = static_cast<int>(num("genus2"));
      if (c.genus1 < 1 || c.genus2 < 1)
        throw ParseError("genus must be positive", r.here());
      Amalgam a = surface_amalgam(c.genus1, c.genus2);
      Alphabet combined = combined_alphabet(a);
      c.g = word("g", combined);
      c.h = word("h", combined);
      c.step = static_cast<int>(num("step"));
      c.swapped = num("swapped") != 0;
      c.q = static_cast<unsigned long>(num("q"));
      c.phi1 = read_hom(r, a.f1.free_part.alphabet, c.prime, "target1");
      c.phi2 = read_hom(r, a.f2.free_part.alphabet, c.prime, "target2");
      break;
    }
  }
  c.outcome = r.expect("outcome");
  if (r.pos != r.lines.size())
    throw ParseError("trailing content after certificate", r.here() + 1);
  return c;
}

void verify_certificate(const Certificate& c) {
  if (!is_prime(c.prime)) throw VerificationError("prime is not prime");
  if (c.outcome != "pass")
    throw VerificationError("recorded outcome is not pass");
  Config cfg;
  cfg.prime = c.prime;
  if (c.enum_cap) cfg.enum_cap = c.enum_cap;
  if (c.trunc_cap) cfg.trunc_degree_cap = c.trunc_cap;

  switch (c.mode) {
    case CertMode::FreeSeparation: {
      if (!c.tree) throw VerificationError("missing witness tree");
      if (c.verification != tree_verification(*c.tree))
        throw VerificationError(
            "verification mode does not match the witness tree");
      verify_separation(*c.tree, c.g, c.h, cfg);
      break;
    }
    case CertMode::DoubleCoset: {
      if (c.verification != "table")
        throw VerificationError("double coset certificates verify by table");
      Word gamma = surface_relator(c.genus);
      if (!(c.phi.domain == Alphabet::surface(c.genus)))
        throw VerificationError("domain does not match the genus");
      if (elem_order(c.phi.apply(gamma)) != c.modulus)
        throw VerificationError(
            "recorded modulus differs from the recomputed edge order");
      verify_double_coset(c.phi, c.g, c.h, gamma);
      break;
    }
    case CertMode::SurfaceSeparation: {
      if (c.verification != "table")
        throw VerificationError("surface certificates verify by table");
      Amalgam a = surface_amalgam(c.genus1, c.genus2);
      AmalgamHom hom;
      hom.phi1 = c.phi1;
      hom.phi2 = c.phi2;
      hom.q = c.q;
      try {
        hom.target = finite_amalgam(c.phi1, a.f1.free_part.gamma, c.phi2,
                                    a.f2.free_part.gamma);
      } catch (const PreconditionError& e) {
        throw VerificationError(std::string("factor images are inconsistent: ") +
                                e.what());
      }
      AmalgamElement g = amalgam_from_word(a, c.g);
      AmalgamElement h = amalgam_from_word(a, c.h);
      if (c.swapped)
        verify_surface_witness(a, hom, h, g, cfg);
      else
        verify_surface_witness(a, hom, g, h, cfg);
      break;
    }
  }
}

}  // namespace respk
