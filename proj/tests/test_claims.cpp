#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>

#include "ttclab/claims.hpp"

using namespace ttclab;

TEST_CASE("registry: ids are unique and lookup works") {
  std::set<std::string> ids;
  for (const Claim& c : claim_registry()) {
    CHECK(ids.insert(c.id).second);
    CHECK_FALSE(c.title.empty());
    CHECK(find_claim(c.id) == &c);
  }
  CHECK(ids.size() == 19);
  CHECK(find_claim("no-such-claim") == nullptr);
}

TEST_CASE("every claim reproduces") {
  for (const Claim& c : claim_registry()) {
    CAPTURE(c.id);
    ClaimResult r = c.run(Caps{});
    CHECK(r.id == c.id);
    CHECK_FALSE(r.expected.empty());
    if (!r.pass) {
      for (const std::string& l : r.lines) MESSAGE(l);
    }
    CHECK(r.pass);
    CHECK(r.observed == "confirmed");
  }
}

TEST_CASE("claim transcripts are thread-count invariant") {
  const Claim* c = find_claim("ttc-axioms-three");
  REQUIRE(c != nullptr);
  Caps serial;
  serial.threads = 1;
  Caps wide;
  wide.threads = 8;
  ClaimResult a = c->run(serial);
  ClaimResult b = c->run(wide);
  CHECK(a.lines == b.lines);
  CHECK(a.observed == b.observed);
}
