#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <string>
#include <vector>

#include "respk/certificate.hpp"
#include "respk/separate_free.hpp"

using namespace respk;

namespace {

// Test-local serializer oracle: a flat key scan over the emitted text that
// shares nothing with the library parser.
std::map<std::string, std::string> first_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    std::size_t colon = line.find(": ");
    if (colon != std::string::npos)
      out.try_emplace(line.substr(0, colon), line.substr(colon + 2));
    start = end + 1;
  }
  return out;
}

std::string replace_line(const std::string& text, const std::string& from,
                         const std::string& to) {
  std::size_t p = text.find(from);
  REQUIRE(p != std::string::npos);
  std::string out = text;
  out.replace(p, from.size(), to);
  return out;
}

Certificate free_cert(const std::string& gs, const std::string& hs,
                      const Config& cfg) {
  Alphabet a = Alphabet::named({"x", "y"});
  Word g = parse_word(gs, a), h = parse_word(hs, a);
  ConjOutcome out = separate_conjugacy_free(g, h, a, cfg);
  REQUIRE(out.witness);
  return certificate_from_free(g, h, a, std::move(out.witness), cfg);
}

Certificate surface_cert(const std::string& gs, const std::string& hs,
                         const Config& cfg) {
  Amalgam a = surface_amalgam(1, 1);
  Alphabet comb = combined_alphabet(a);
  AmalgamElement g = amalgam_from_word(a, parse_word(gs, comb));
  AmalgamElement h = amalgam_from_word(a, parse_word(hs, comb));
  SurfaceOutcome out = separate_conjugacy_surface(a, g, h, cfg);
  REQUIRE(out.witness);
  return certificate_from_surface(a, g, h, *out.witness, cfg);
}

const char* kStep2Text =
    "respk certificate\n"
    "mode: free-separation\n"
    "prime: 2\n"
    "enum-cap: 1000000\n"
    "trunc-cap: 24\n"
    "verification: full-enumeration\n"
    "alphabet: x y\n"
    "g: x\n"
    "h: y\n"
    "nodes: 1\n"
    "[node 0]\n"
    "kind: cyclic\n"
    "check: abelian-distinct\n"
    "alphabet: x y\n"
    "g: x\n"
    "h: y\n"
    "target: C(4)\n"
    "image x: 1\n"
    "image y: 0\n"
    "[end]\n"
    "outcome: pass\n";

}  // namespace

TEST_CASE("generator pair certificate is byte stable") {
  Config cfg;
  Certificate c = free_cert("x", "y", cfg);
  CHECK(emit_certificate(c) == kStep2Text);

  // determinism: a fresh run of the whole pipeline emits identical bytes
  Certificate again = free_cert("x", "y", cfg);
  CHECK(emit_certificate(again) == emit_certificate(c));

  verify_certificate(c);
  verify_certificate(parse_certificate(kStep2Text));
}

TEST_CASE("round trips are exact and verified in every mode") {
  Config cfg;

  SUBCASE("cyclic witness") {
    Certificate c = free_cert("x*y", "x^-1*y", cfg);
    std::string text = emit_certificate(c);
    Certificate back = parse_certificate(text);
    CHECK(emit_certificate(back) == text);
    verify_certificate(back);
    CHECK(back.prime == 2);
    CHECK(back.tree != nullptr);
  }

  SUBCASE("wreath witness tree") {
    Certificate c = free_cert("x^-1*y^-1*x*y", "y^-1*x^-1*y*x", cfg);
    std::string text = emit_certificate(c);
    Certificate back = parse_certificate(text);
    CHECK(emit_certificate(back) == text);
    verify_certificate(back);

    auto keys = first_values(text);
    CHECK(keys.at("mode") == "free-separation");
    CHECK(keys.at("prime") == "2");
    CHECK(keys.at("g") == "x^-1*y^-1*x*y");
    CHECK(keys.at("h") == "y^-1*x^-1*y*x");
    CHECK(keys.at("nodes") == "5");
    CHECK(keys.at("kind") == "wreath");
    CHECK(keys.at("outcome") == "pass");
  }

  SUBCASE("double coset table") {
    Word g = Word::generator(0), h = Word::generator(1);
    Word gamma = surface_relator(1);
    DoubleCosetWitness w = double_coset_witness(g, h, gamma, cfg);
    Certificate c = certificate_from_double_coset(g, h, 1, w, cfg);
    std::string text = emit_certificate(c);
    Certificate back = parse_certificate(text);
    CHECK(emit_certificate(back) == text);
    verify_certificate(back);

    auto keys = first_values(text);
    CHECK(keys.at("mode") == "double-coset");
    CHECK(keys.at("verification") == "table");
    CHECK(keys.at("genus") == "1");
  }

  SUBCASE("surface witness, plain and swapped") {
    Certificate c = surface_cert("x1*x'1", "x1", cfg);
    std::string text = emit_certificate(c);
    CHECK(parse_certificate(text).step == 1);
    CHECK(emit_certificate(parse_certificate(text)) == text);
    verify_certificate(parse_certificate(text));

    Certificate s = surface_cert("x1", "x1*x'1", cfg);
    CHECK(s.swapped);
    std::string stext = emit_certificate(s);
    CHECK(emit_certificate(parse_certificate(stext)) == stext);
    verify_certificate(parse_certificate(stext));
  }
}

TEST_CASE("parse rejects malformed certificates with line numbers") {
  Config cfg;
  Certificate c = free_cert("x", "y", cfg);
  std::string text = emit_certificate(c);

  SUBCASE("wrong magic") {
    try {
      parse_certificate("respk sertificate\n" + text.substr(18));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 1);
    }
  }

  SUBCASE("unknown mode") {
    try {
      parse_certificate(replace_line(text, "mode: free-separation",
                                     "mode: telepathy"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }

  SUBCASE("truncation") {
    try {
      parse_certificate(text.substr(0, text.size() / 2));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line > 0);
    }
  }

  SUBCASE("missing node") {
    CHECK_THROWS_AS(parse_certificate(replace_line(text, "nodes: 1", "nodes: 2")),
                    ParseError);
  }

  SUBCASE("trailing content") {
    CHECK_THROWS_AS(parse_certificate(text + "extra: line\n"), ParseError);
  }

  SUBCASE("composite prime") {
    CHECK_THROWS_AS(parse_certificate(replace_line(text, "prime: 2", "prime: 6")),
                    ParseError);
  }

  SUBCASE("bad child index") {
    Certificate w = free_cert("x^-1*y^-1*x*y", "y^-1*x^-1*y*x", cfg);
    std::string wt = emit_certificate(w);
    std::size_t p = wt.find("children: ");
    REQUIRE(p != std::string::npos);
    std::size_t end = wt.find('\n', p);
    wt.replace(p, end - p, "children: 0 2");
    CHECK_THROWS_AS(parse_certificate(wt), ParseError);
  }
}

TEST_CASE("verification rejects tampered certificates") {
  Config cfg;

  SUBCASE("corrupted image element is pinpointed") {
    std::string bad =
        replace_line(kStep2Text, "image y: 0", "image y: 1");
    try {
      verify_certificate(parse_certificate(bad));
      FAIL("expected VerificationError");
    } catch (const VerificationError& e) {
      CHECK(std::string(e.what()).find("coincide") != std::string::npos);
    }
  }

  SUBCASE("verification mode mismatch") {
    std::string bad = replace_line(kStep2Text, "verification: full-enumeration",
                                   "verification: compositional");
    CHECK_THROWS_AS(verify_certificate(parse_certificate(bad)),
                    VerificationError);
  }

  SUBCASE("outcome tampered") {
    std::string bad = replace_line(kStep2Text, "outcome: pass", "outcome: fail");
    CHECK_THROWS_AS(verify_certificate(parse_certificate(bad)),
                    VerificationError);
  }

  SUBCASE("double coset modulus tampered") {
    Word g = Word::generator(0), h = Word::generator(1);
    Word gamma = surface_relator(1);
    DoubleCosetWitness w = double_coset_witness(g, h, gamma, cfg);
    Certificate c = certificate_from_double_coset(g, h, 1, w, cfg);
    std::string bad =
        replace_line(emit_certificate(c), "modulus: 1", "modulus: 8");
    try {
      verify_certificate(parse_certificate(bad));
      FAIL("expected VerificationError");
    } catch (const VerificationError& e) {
      CHECK(std::string(e.what()).find("modulus") != std::string::npos);
    }
  }

  SUBCASE("surface q tampered") {
    Certificate c = surface_cert("x1*x'1", "x1", cfg);
    std::string bad = replace_line(emit_certificate(c), "q: 4", "q: 8");
    CHECK_THROWS_AS(verify_certificate(parse_certificate(bad)),
                    VerificationError);
  }

  SUBCASE("surface swap flag tampered") {
    Certificate c = surface_cert("x1", "x1*x'1", cfg);
    std::string bad =
        replace_line(emit_certificate(c), "swapped: 1", "swapped: 0");
    CHECK_THROWS_AS(verify_certificate(parse_certificate(bad)),
                    VerificationError);
  }
}

TEST_CASE("a certificate claiming conjugate images fails with the conjugator") {
  // Handcrafted wreath certificate: mu(x)=1 sends both words into the kernel,
  // and the recorded images of g and h are conjugate by the image of x.
  std::string crafted =
      "respk certificate\n"
      "mode: free-separation\n"
      "prime: 2\n"
      "enum-cap: 1000000\n"
      "trunc-cap: 24\n"
      "verification: full-enumeration\n"
      "alphabet: x y\n"
      "g: y\n"
      "h: x*y*x\n"
      "nodes: 1\n"
      "[node 0]\n"
      "kind: wreath\n"
      "check: enumeration\n"
      "alphabet: x y\n"
      "g: y\n"
      "h: x*y*x\n"
      "target: W(C(4),2)\n"
      "image x: (0,0;1)\n"
      "image y: (1,0;0)\n"
      "mu: 1 0\n"
      "mu-modulus: 2\n"
      "mu-designated: 0\n"
      "i0: 0\n"
      "children:\n"
      "[end]\n"
      "outcome: pass\n";
  Certificate c = parse_certificate(crafted);
  try {
    verify_certificate(c);
    FAIL("expected VerificationError");
  } catch (const VerificationError& e) {
    std::string msg = e.what();
    CHECK(msg.find("conjugate") != std::string::npos);
    // the exhibited conjugating element follows "by"
    CHECK(msg.find(" by ") != std::string::npos);
  }
}
