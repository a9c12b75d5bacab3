#include "pimhub/sim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pimhub/core/error.hpp"

namespace pimhub::sim {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string &why) {
  throw Error(Errc::ScenarioError, "line " + std::to_string(line) + ": " + why);
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_sigil(std::string s, char sigil) {
  if (!s.empty() && s.front() == sigil)
    s.erase(0, 1);
  return s;
}

std::size_t parse_count(std::size_t line, const std::string &s) {
  std::size_t n = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc{} || p != s.data() + s.size())
    fail(line, "expected a count, got '" + s + "'");
  return n;
}

// Positional words plus key=value options.
struct Parsed {
  std::vector<std::string> pos;
  Args opts;

  std::optional<std::string> opt(const std::string &k) const {
    for (const auto &[key, v] : opts)
      if (key == k)
        return v;
    return std::nullopt;
  }
};

Parsed split_opts(const std::vector<std::string> &words, std::size_t from) {
  Parsed p;
  for (std::size_t i = from; i < words.size(); ++i) {
    auto eq = words[i].find('=');
    bool ident = eq != std::string::npos && eq > 0 &&
                 std::all_of(words[i].begin(), words[i].begin() + eq, [](char c) {
                   return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                          c == '-';
                 });
    if (ident)
      p.opts.emplace_back(words[i].substr(0, eq), words[i].substr(eq + 1));
    else
      p.pos.push_back(words[i]);
  }
  return p;
}

void need(std::size_t line, const Parsed &p, std::size_t n, const char *usage) {
  if (p.pos.size() != n)
    fail(line, std::string("usage: ") + usage);
}

void only_opts(std::size_t line, const Parsed &p, std::initializer_list<const char *> ok) {
  for (const auto &[k, v] : p.opts) {
    bool known = false;
    for (const char *o : ok)
      known = known || k == o;
    if (!known)
      fail(line, "unknown option '" + k + "'");
  }
}

std::string require_opt(std::size_t line, const Parsed &p, const char *key) {
  auto v = p.opt(key);
  if (!v)
    fail(line, std::string("missing ") + key + "=");
  return *v;
}

SelectorSpec parse_selector(std::size_t line, const std::string &text) {
  SelectorSpec s;
  auto colon = text.find(':');
  s.var = text.substr(0, colon);
  if (s.var == "_")
    s.var.clear();
  if (colon == std::string::npos)
    return s;
  std::string spec = text.substr(colon + 1);
  auto eq = spec.find('=');
  std::string key = spec.substr(0, eq);
  std::string arg = eq == std::string::npos ? "" : spec.substr(eq + 1);
  if (key == "any" && eq == std::string::npos) {
    s.kind = SelectorKind::AnySessionOfUser;
  } else if (key == "device") {
    s.kind = SelectorKind::OnDevice;
  } else if (key == "kind") {
    s.kind = SelectorKind::DeviceKind;
  } else if (key == "session") {
    s.kind = SelectorKind::Exact;
  } else if (key == "second") {
    s.kind = SelectorKind::SecondSessionSameDevice;
  } else {
    fail(line, "bad selector '" + text + "'");
  }
  if (s.kind != SelectorKind::AnySessionOfUser && arg.empty())
    fail(line, "selector '" + text + "' needs an argument");
  s.arg = arg;
  return s;
}

// name(arg arg, arg) groups; commas and blanks both separate arguments.
std::vector<std::pair<std::string, std::vector<std::string>>>
parse_calls(std::size_t line, std::string_view s) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  std::size_t i = 0;
  while (true) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
      ++i;
    if (i == s.size())
      break;
    auto open = s.find('(', i);
    if (open == std::string_view::npos)
      fail(line, "expected name(...) near '" + std::string(s.substr(i)) + "'");
    auto close = s.find(')', open);
    if (close == std::string_view::npos)
      fail(line, "missing ')'");
    std::string name = trim(s.substr(i, open - i));
    if (name.empty() || name.find(' ') != std::string::npos)
      fail(line, "bad call name '" + name + "'");
    std::string inner(s.substr(open + 1, close - open - 1));
    for (auto &c : inner)
      if (c == ',')
        c = ' ';
    out.emplace_back(name, split_words(inner));
    i = close + 1;
  }
  return out;
}

DefineRuleStep parse_rule(std::size_t line, const std::vector<std::string> &head,
                          std::string_view rest) {
  DefineRuleStep r;
  r.session = strip_sigil(head.at(1), '$');
  r.rule = head.at(2);
  // rest: when <preds> do <actions>
  auto w = rest.find("when ");
  auto d = rest.find(" do ");
  if (w == std::string_view::npos || d == std::string_view::npos || d < w)
    fail(line, "usage: rule $A <name> when <predicates> do <actions>");
  for (auto &[name, args] : parse_calls(line, rest.substr(w + 5, d - w - 5))) {
    PredicateSpec p;
    if (name == "online" || name == "offline") {
      p.kind = name == "online" ? PredicateKind::ObjectOnlineIn
                                : PredicateKind::ObjectOfflineIn;
      if (args.size() != 2)
        fail(line, name + "(@object selector)");
      p.object = strip_sigil(args[0], '@');
      p.a = parse_selector(line, args[1]);
    } else if (name == "samedevice") {
      p.kind = PredicateKind::SessionsSameDevice;
      if (args.size() != 2)
        fail(line, "samedevice(selector selector)");
      p.a = parse_selector(line, args[0]);
      p.b = parse_selector(line, args[1]);
    } else {
      fail(line, "unknown predicate '" + name + "'");
    }
    r.when.push_back(std::move(p));
  }
  for (auto &[name, args] : parse_calls(line, rest.substr(d + 4))) {
    ActionSpec a;
    a.behaviour = name;
    auto p = split_opts(args, 0);
    if (!p.pos.empty())
      fail(line, "action arguments are key=value");
    a.args = std::move(p.opts);
    r.actions.push_back(std::move(a));
  }
  if (r.when.empty() || r.actions.empty())
    fail(line, "rule needs at least one predicate and one action");
  return r;
}

Expect parse_expect(std::size_t line, const std::vector<std::string> &words) {
  if (words.size() < 2)
    fail(line, "expect what?");
  const std::string &what = words[1];
  Expect e;
  auto arg = [&](std::size_t i) -> const std::string & {
    if (i >= words.size())
      fail(line, "expect " + what + ": missing argument");
    return words[i];
  };
  auto exact = [&](std::size_t n) {
    if (words.size() != n)
      fail(line, "expect " + what + ": wrong number of arguments");
  };
  if (what == "online" || what == "offline" || what == "hidden" || what == "visible") {
    exact(4);
    e.kind = what == "online"    ? ExpectKind::Online
             : what == "offline" ? ExpectKind::Offline
             : what == "hidden"  ? ExpectKind::Hidden
                                 : ExpectKind::Visible;
    e.session = strip_sigil(arg(2), '$');
    e.subject = strip_sigil(arg(3), '@');
  } else if (what == "online-exactly") {
    e.kind = ExpectKind::OnlineExactly;
    e.session = strip_sigil(arg(2), '$');
    for (std::size_t i = 3; i < words.size(); ++i)
      e.list.push_back(strip_sigil(words[i], '@'));
  } else if (what == "applied" || what == "error") {
    exact(5);
    e.kind = what == "applied" ? ExpectKind::Applied : ExpectKind::ErrorCount;
    e.session = strip_sigil(arg(2), '$');
    e.subject = arg(3);
    e.count = parse_count(line, arg(4));
  } else if (what == "url") {
    exact(4);
    e.kind = ExpectKind::Url;
    e.session = strip_sigil(arg(2), '$');
    e.text = arg(3);
  } else if (what == "text") {
    e.kind = ExpectKind::Text;
    e.session = strip_sigil(arg(2), '$');
    e.subject = strip_sigil(arg(3), '@');
    e.text = arg(4);
    e.path = "/";
    if (words.size() == 6 && words[5].rfind("path=", 0) == 0)
      e.path = words[5].substr(5);
    else
      exact(5);
  } else if (what == "fired") {
    exact(4);
    e.kind = ExpectKind::Fired;
    e.subject = arg(2);
    e.count = parse_count(line, arg(3));
  } else if (what == "objects") {
    exact(4);
    e.kind = ExpectKind::Objects;
    e.session = strip_sigil(arg(2), '$');
    e.count = parse_count(line, arg(3));
  } else if (what == "converged") {
    exact(2);
    e.kind = ExpectKind::Converged;
  } else {
    fail(line, "unknown expectation '" + what + "'");
  }
  return e;
}

StepBody parse_step(std::size_t line, const std::string &text) {
  auto words = split_words(text);
  const std::string &verb = words.front();

  if (verb == "page") {
    // the tree is the raw remainder so its quotes survive
    auto start = text.find_first_not_of(" \t", text.find("page") + 4);
    if (start == std::string::npos)
      fail(line, "usage: page <url-pattern> <tree>");
    auto end = text.find_first_of(" \t", start);
    if (end == std::string::npos)
      fail(line, "usage: page <url-pattern> <tree>");
    try {
      return PageDef{text.substr(start, end - start), parse_page_tree(text.substr(end))};
    } catch (const Error &e) {
      fail(line, e.what());
    }
  }
  if (verb == "rule") {
    if (words.size() < 4)
      fail(line, "usage: rule $A <name> when <predicates> do <actions>");
    return parse_rule(line, words, text);
  }
  if (verb == "expect")
    return parse_expect(line, words);

  auto p = split_opts(words, 1);
  if (verb == "session") {
    need(line, p, 1, "session <alias> user= password= device= [kind=] [label=]");
    only_opts(line, p, {"user", "password", "device", "kind", "label"});
    StartSession s;
    s.alias = strip_sigil(p.pos[0], '$');
    s.user = require_opt(line, p, "user");
    s.password = p.opt("password").value_or("");
    s.device = require_opt(line, p, "device");
    if (auto k = p.opt("kind")) {
      auto kind = parse_device_kind(*k);
      if (!kind)
        fail(line, "unknown device kind '" + *k + "'");
      s.kind = *kind;
    }
    s.label = p.opt("label").value_or(s.device);
    return s;
  }
  if (verb == "load") {
    need(line, p, 2, "load $A <url>");
    return Load{strip_sigil(p.pos[0], '$'), p.pos[1]};
  }
  if (verb == "collect") {
    need(line, p, 2, "collect $A @obj path= name= [stereotype=] [pattern=] [tags=a,b]");
    only_opts(line, p, {"path", "name", "stereotype", "pattern", "tags"});
    Collect c;
    c.session = strip_sigil(p.pos[0], '$');
    c.object = strip_sigil(p.pos[1], '@');
    c.path = require_opt(line, p, "path");
    c.name = require_opt(line, p, "name");
    if (auto st = p.opt("stereotype")) {
      auto s = parse_stereotype(*st);
      if (!s)
        fail(line, "unknown stereotype '" + *st + "'");
      c.stereotype = *s;
    }
    c.pattern = p.opt("pattern");
    if (auto tags = p.opt("tags")) {
      std::stringstream ss(*tags);
      for (std::string t; std::getline(ss, t, ',');)
        if (!t.empty())
          c.tags.insert(t);
    }
    return c;
  }
  if (verb == "attach") {
    need(line, p, 3, "attach $A @obj <Behaviour>");
    return Attach{strip_sigil(p.pos[0], '$'), strip_sigil(p.pos[1], '@'), p.pos[2]};
  }
  if (verb == "delete") {
    need(line, p, 2, "delete $A @obj");
    return DeleteObjectStep{strip_sigil(p.pos[0], '$'), strip_sigil(p.pos[1], '@')};
  }
  if (verb == "invoke") {
    need(line, p, 2, "invoke $A <Behaviour> [name=value ...]");
    return Invoke{strip_sigil(p.pos[0], '$'), p.pos[1], p.opts};
  }
  if (verb == "unrule") {
    need(line, p, 2, "unrule $A <rule>");
    return DeleteRuleStep{strip_sigil(p.pos[0], '$'), p.pos[1]};
  }
  if (verb == "click") {
    need(line, p, 2, "click $A @obj [path=] [type=]");
    only_opts(line, p, {"path", "type"});
    return Click{strip_sigil(p.pos[0], '$'), strip_sigil(p.pos[1], '@'),
                 p.opt("path").value_or("/"), p.opt("type").value_or("click")};
  }
  if (verb == "follow") {
    need(line, p, 3, "follow $A @obj <url>");
    return Follow{strip_sigil(p.pos[0], '$'), strip_sigil(p.pos[1], '@'), p.pos[2]};
  }
  if (verb == "edit") {
    need(line, p, 3, "edit $A @obj <text> [path=]");
    only_opts(line, p, {"path"});
    return Edit{strip_sigil(p.pos[0], '$'), strip_sigil(p.pos[1], '@'), p.pos[2],
                p.opt("path").value_or("/")};
  }
  if (verb == "close") {
    need(line, p, 1, "close $A");
    return CloseSession{strip_sigil(p.pos[0], '$')};
  }
  if (verb == "settle") {
    need(line, p, 0, "settle");
    return Settle{};
  }
  if (verb == "restart") {
    need(line, p, 0, "restart");
    return Restart{};
  }
  fail(line, "unknown step '" + verb + "'");
}

} // namespace

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_word = false, quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '\\' && i + 1 < line.size())
        cur += line[++i];
      else if (c == '"')
        quoted = false;
      else
        cur += c;
      continue;
    }
    if (c == '"') {
      quoted = in_word = true;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (in_word)
        out.push_back(std::move(cur));
      cur.clear();
      in_word = false;
    } else {
      cur += c;
      in_word = true;
    }
  }
  if (in_word)
    out.push_back(std::move(cur));
  return out;
}

Scenario parse_scenario(std::string_view text, std::string name) {
  Scenario sc{std::move(name), {}};
  std::size_t lineNo = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                             : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineNo;
    std::string line = trim(raw);
    if (line.empty() || line.front() == '#')
      continue;
    sc.steps.push_back(Step{lineNo, line, parse_step(lineNo, line)});
  }
  return sc;
}

Scenario load_scenario_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Errc::ScenarioError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  auto name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos)
    name = name.substr(slash + 1);
  return parse_scenario(ss.str(), name);
}

} // namespace pimhub::sim
