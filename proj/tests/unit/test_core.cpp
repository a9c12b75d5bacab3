#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "../oracles/ledger_oracle.hpp"
#include "../support/properties.hpp"
#include "pimhub/core/element_path.hpp"
#include "pimhub/core/error.hpp"
#include "pimhub/core/model.hpp"
#include "pimhub/core/presence.hpp"
#include "pimhub/core/url.hpp"

using namespace pimhub;

namespace {

const Locator kIndex{"https://en.wikipedia.org/wiki/*", "#mw-panel/0"};

UIObject wiki_index() {
  IdSequence ids("o");
  return collect_object({UserId("u1"), kIndex, Stereotype::Container, "Wikipedia Index", {}},
                        ids, 1);
}

Errc code_of(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected pimhub::Error");
  return Errc::ScenarioError;
}

PresenceLedger two_sessions() {
  PresenceLedger l;
  const DeviceInfo d{DeviceId("d1"), DeviceKind::Desktop, "laptop"};
  l.upsert_session({SessionId("sA"), UserId("u1"), d, "https://en.wikipedia.org/wiki/Toulouse", true});
  l.upsert_session({SessionId("sB"), UserId("u1"), d, "https://vimeo.com/", true});
  return l;
}

} // namespace

TEST_SUITE("core") {

TEST_CASE("collecting the wikipedia index keeps stereotype and name") {
  const UIObject o = wiki_index();
  CHECK(o.stereotype == Stereotype::Container);
  CHECK(o.name == "Wikipedia Index");
  CHECK(o.owner == UserId("u1"));
  CHECK(o.enabledBehaviours.empty());
  CHECK(o.createdAt == 1);
  CHECK_FALSE(o.objectId.empty());
}

TEST_CASE("empty name and bad locators are rejected") {
  IdSequence ids("o");
  CHECK(code_of([&] {
          collect_object({UserId("u1"), kIndex, Stereotype::Generic, "", {}}, ids, 1);
        }) == Errc::EmptyName);
  CHECK(code_of([&] {
          collect_object({UserId("u1"), {"not a url", "/"}, Stereotype::Generic, "x", {}}, ids, 1);
        }) == Errc::MalformedLocator);
  CHECK(code_of([&] {
          collect_object({UserId("u1"), {"https://a.org/*", "/x/y"}, Stereotype::Generic, "x", {}},
                         ids, 1);
        }) == Errc::MalformedLocator);
  CHECK(ids.peek() == 1); // failures consume no ids
}

TEST_CASE("100 collected objects have 100 distinct ids") {
  IdSequence ids("o");
  std::set<ObjectId> seen;
  for (int i = 0; i < 100; ++i)
    seen.insert(collect_object({UserId("u1"), kIndex, Stereotype::Generic,
                                "o" + std::to_string(i), {}},
                               ids, static_cast<std::uint64_t>(i))
                    .objectId);
  CHECK(seen.size() == 100);
}

TEST_CASE("ids sort in issue order") {
  IdSequence ids("s", 9);
  const auto a = ids.next<SessionId>();
  const auto b = ids.next<SessionId>();
  CHECK(a.str() == "s000009");
  CHECK(a < b);
}

TEST_CASE("presence resolution needs both url match and element") {
  const UIObject o = wiki_index();
  CHECK(resolve_presence(o, "https://en.wikipedia.org/wiki/Toulouse", true) == PresenceState::Online);
  CHECK(resolve_presence(o, "https://vimeo.com", false) == PresenceState::Offline);
  CHECK(resolve_presence(o, "https://vimeo.com", true) == PresenceState::Offline);
  CHECK(resolve_presence(o, "https://en.wikipedia.org/wiki/Toulouse", false) == PresenceState::Offline);
}

TEST_CASE("url helpers") {
  CHECK(normalize_url("HTTPS://Vimeo.COM") == std::optional<std::string>("https://vimeo.com/"));
  CHECK(normalize_url("https://a.org/x?q=1#f") == std::optional<std::string>("https://a.org/x"));
  CHECK_FALSE(is_absolute_url("/relative/path"));
  CHECK(glob_match("https://a.org/*", "https://a.org/b/c"));
  CHECK_FALSE(glob_match("https://a.org/*/x", "https://a.org/b/y"));
  CHECK(url_pattern_matches("https://www.linguee.com/*", "https://www.linguee.com/english-french/search?query=x"));
  CHECK_FALSE(is_valid_url_pattern("https:///nohost"));
}

TEST_CASE("element paths round-trip and resolve") {
  for (const char *text : {"/", "/0/2", "#main", "#main/1/0"}) {
    auto p = parse_element_path(text);
    REQUIRE(p);
    CHECK(format_element_path(*p) == text);
  }
  CHECK_FALSE(parse_element_path(""));
  CHECK_FALSE(parse_element_path("/a"));
  CHECK_FALSE(parse_relative_path("#main"));

  struct N {
    std::string id;
    std::vector<N> children;
  };
  N root{"", {{"main", {{"", {}}, {"leaf", {}}}}, {"", {}}}};
  CHECK(resolve_path(*parse_element_path("#main/1"), root)->id == "leaf");
  CHECK(resolve_path(*parse_element_path("/0/1"), root)->id == "leaf");
  CHECK(resolve_path(*parse_element_path("/5"), root) == nullptr);
}

TEST_CASE("duplicate update is idempotent") {
  auto l = two_sessions();
  const PresenceRecord r{ObjectId("o1"), SessionId("sA"), PresenceState::Online, 5};
  CHECK(l.apply(r));
  const auto snapshot = l;
  CHECK_FALSE(l.apply(r));
  CHECK(l == snapshot);
}

TEST_CASE("stale update is dropped") {
  auto l = two_sessions();
  l.apply({ObjectId("o1"), SessionId("sA"), PresenceState::Online, 5});
  CHECK_FALSE(l.apply({ObjectId("o1"), SessionId("sA"), PresenceState::Offline, 4}));
  CHECK(l.state(ObjectId("o1"), SessionId("sA")) == PresenceState::Online);
}

TEST_CASE("updates for sessions outside the directory are refused") {
  auto l = two_sessions();
  CHECK(code_of([&] {
          l.apply({ObjectId("o1"), SessionId("nope"), PresenceState::Online, 1});
        }) == Errc::UnknownSession);
  CHECK(l.records().empty());
}

TEST_CASE("all 24 orders of 4 updates over 2 keys agree") {
  const auto base = two_sessions();
  const std::vector<PresenceRecord> updates{
      {ObjectId("o1"), SessionId("sA"), PresenceState::Online, 3},
      {ObjectId("o1"), SessionId("sA"), PresenceState::Offline, 7},
      {ObjectId("o1"), SessionId("sB"), PresenceState::Online, 2},
      {ObjectId("o1"), SessionId("sB"), PresenceState::Offline, 1}};
  std::vector<std::size_t> order{0, 1, 2, 3};
  const auto want = oracle::expected_records(updates);
  int n = 0, same = 0;
  do {
    same += oracle::fold(base, updates, order).records() == want;
    ++n;
  } while (std::next_permutation(order.begin(), order.end()));
  CHECK(n == 24);
  CHECK(same == 24);
}

TEST_CASE("random update sets are order independent") {
  const auto r = testsupport::ledger_permutations(11, 300);
  INFO(r.first);
  CHECK(r.ok());
}

TEST_CASE("closing a session turns its records offline") {
  auto l = two_sessions();
  l.apply({ObjectId("o1"), SessionId("sA"), PresenceState::Online, 4});
  l.apply({ObjectId("o2"), SessionId("sA"), PresenceState::Offline, 6});
  const auto changed = l.close_session(SessionId("sA"));
  REQUIRE(changed.size() == 1);
  CHECK(changed[0].seq == 7);
  CHECK(l.state(ObjectId("o1"), SessionId("sA")) == PresenceState::Offline);
  CHECK_FALSE(l.is_live(SessionId("sA")));
  CHECK(l.live_sessions(UserId("u1")) == std::vector<SessionId>{SessionId("sB")});
  for (const auto &[key, rec] : l.records())
    if (key.second == SessionId("sA"))
      CHECK(rec.state == PresenceState::Offline);
}

TEST_CASE("view_for hides other users") {
  auto l = two_sessions();
  l.upsert_session({SessionId("sX"), UserId("u2"), {DeviceId("d9"), DeviceKind::Mobile, ""}, "", true});
  l.apply({ObjectId("o1"), SessionId("sA"), PresenceState::Online, 1});
  l.apply({ObjectId("o9"), SessionId("sX"), PresenceState::Online, 1});
  const auto v = l.view_for(UserId("u1"));
  CHECK(v.directory().size() == 2);
  CHECK(v.records().size() == 1);
  CHECK(v.session(SessionId("sX")) == nullptr);
}

} // TEST_SUITE
