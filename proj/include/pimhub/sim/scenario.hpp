#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pimhub/core/model.hpp"
#include "pimhub/rules/rule.hpp"
#include "pimhub/sim/page.hpp"

namespace pimhub::sim {

// References inside steps stay symbolic until execution:
//   $A   the session started under alias A
//   @o   the object collected under alias o
// Anything else is a literal.

using Args = std::vector<std::pair<std::string, std::string>>;

struct PageDef {
  std::string pattern;
  PageNode root;
};

struct StartSession {
  std::string alias;
  std::string user;
  std::string password;
  std::string device;
  DeviceKind kind = DeviceKind::Desktop;
  std::string label;
};

struct Load {
  std::string session;
  std::string url;
};

struct Collect {
  std::string session;
  std::string object;
  std::string path;
  Stereotype stereotype = Stereotype::Generic;
  std::string name;
  std::optional<std::string> pattern;
  std::set<std::string> tags;
};

struct Attach {
  std::string session;
  std::string object;
  std::string behaviour;
};

struct DeleteObjectStep {
  std::string session;
  std::string object;
};

struct Invoke {
  std::string session;
  std::string behaviour;
  Args args;
};

struct SelectorSpec {
  std::string var;
  SelectorKind kind = SelectorKind::AnySessionOfUser;
  std::string arg; // may be a $ reference for Exact
};

struct PredicateSpec {
  PredicateKind kind = PredicateKind::ObjectOnlineIn;
  std::string object; // alias, unused for SessionsSameDevice
  SelectorSpec a;
  std::optional<SelectorSpec> b;
};

struct ActionSpec {
  std::string behaviour;
  Args args;
};

struct DefineRuleStep {
  std::string session;
  std::string rule;
  std::vector<PredicateSpec> when;
  std::vector<ActionSpec> actions;
};

struct DeleteRuleStep {
  std::string session;
  std::string rule;
};

struct Click {
  std::string session;
  std::string object;
  std::string path = "/";
  std::string type = "click";
};

struct Follow {
  std::string session;
  std::string object;
  std::string url;
};

struct Edit {
  std::string session;
  std::string object;
  std::string text;
  std::string path = "/";
};

struct CloseSession {
  std::string session;
};

struct Settle {};
struct Restart {};

enum class ExpectKind {
  Online,
  Offline,
  OnlineExactly,
  Applied,
  Url,
  Text,
  Hidden,
  Visible,
  Fired,
  ErrorCount,
  Objects,
  Converged,
};

struct Expect {
  ExpectKind kind = ExpectKind::Converged;
  std::string session;
  std::string subject; // object alias, rule alias, action or error code
  std::vector<std::string> list;
  std::string text;
  std::string path; // Text: node inside the object
  std::size_t count = 0;
};

using StepBody =
    std::variant<PageDef, StartSession, Load, Collect, Attach, DeleteObjectStep, Invoke,
                 DefineRuleStep, DeleteRuleStep, Click, Follow, Edit, CloseSession,
                 Settle, Restart, Expect>;

struct Step {
  std::size_t line = 0;
  std::string source;
  StepBody body;
};

struct Scenario {
  std::string name;
  std::vector<Step> steps;
};

/// Throws Error(ScenarioError) naming the line.
Scenario parse_scenario(std::string_view text, std::string name = "scenario");
Scenario load_scenario_file(const std::string &path);

/// Whitespace-separated words; double quotes group (with \" and \\ escapes)
/// and are dropped. Exposed for the CLI and tests.
std::vector<std::string> split_words(std::string_view line);

} // namespace pimhub::sim
