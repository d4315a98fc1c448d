#pragma once

#include <memory>
#include <string>

#include "respk/amalgam.hpp"
#include "respk/config.hpp"
#include "respk/doublecoset.hpp"
#include "respk/pgroup.hpp"
#include "respk/separate_free.hpp"
#include "respk/words.hpp"

namespace respk {

// What a certificate claims: a finite p-group (or finite quotient amalgam)
// homomorphism whose images keep the recorded pair apart.
enum class CertMode { FreeSeparation, DoubleCoset, SurfaceSeparation };

// Self-contained, line-oriented record of a separation witness. Everything a
// verifier needs is in the file: the pair, the target group expression, and
// the generator images. Recorded image data is advisory; verification
// recomputes it and fails on any disagreement.
struct Certificate {
  CertMode mode = CertMode::FreeSeparation;
  long prime = 2;
  std::size_t enum_cap = 0;  // caps the verifier must honour
  int trunc_cap = 0;
  std::string verification;  // full-enumeration | compositional | table
  std::string outcome = "pass";

  // the separated pair; combined single-word form for surface mode
  Word g, h;

  // free-separation payload
  Alphabet alphabet;
  std::unique_ptr<SeparationNode> tree;

  // double-coset payload; the edge word is the genus relator
  int genus = 1;
  PHom phi;
  unsigned long modulus = 1;
  bool early = false;
  unsigned long q = 0;  // construction provenance (free-product stage)
  int degree = 0;

  // surface-separation payload
  int genus1 = 1;
  int genus2 = 1;
  PHom phi1, phi2;
  int step = 0;
  bool swapped = false;
};

Certificate certificate_from_free(const Word& g, const Word& h,
                                  const Alphabet& a,
                                  std::unique_ptr<SeparationNode> tree,
                                  const Config& cfg);
Certificate certificate_from_double_coset(const Word& g, const Word& h,
                                          int genus,
                                          const DoubleCosetWitness& w,
                                          const Config& cfg);
Certificate certificate_from_surface(const Amalgam& a, const AmalgamElement& g,
                                     const AmalgamElement& h,
                                     const SurfaceWitness& w,
                                     const Config& cfg);

// Canonical text form; emit(parse(emit(c))) == emit(c) byte for byte.
std::string emit_certificate(const Certificate& c);

// Throws ParseError with the offending line number on malformed input.
Certificate parse_certificate(std::string_view text);

// Recomputes every image from the generator images under the certificate's
// own caps and reruns the recorded verification mode. Throws
// VerificationError on failure or on recorded/recomputed mismatch;
// CapExceeded propagates separately.
void verify_certificate(const Certificate& c);

}  // namespace respk
