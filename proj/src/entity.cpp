#include "reprrec/entity.hpp"

#include "reprrec/error.hpp"

namespace reprrec {

std::optional<EntityKind> kind_from_prefix(char c) {
  switch (c) {
    case 'u': return EntityKind::User;
    case 'm': return EntityKind::Movie;
    case 'd': return EntityKind::Director;
    case 'a': return EntityKind::Actor;
    case 't': return EntityKind::Tag;
    default: return std::nullopt;
  }
}

std::string_view kind_name(EntityKind k) {
  switch (k) {
    case EntityKind::User: return "user";
    case EntityKind::Movie: return "movie";
    case EntityKind::Director: return "director";
    case EntityKind::Actor: return "actor";
    case EntityKind::Tag: return "tag";
  }
  return "?";
}

std::optional<EntityKind> kind_from_name(std::string_view name) {
  if (name == "user") return EntityKind::User;
  if (name == "movie") return EntityKind::Movie;
  if (name == "director") return EntityKind::Director;
  if (name == "actor") return EntityKind::Actor;
  if (name == "tag") return EntityKind::Tag;
  return std::nullopt;
}

std::string EntityToken::canonical() const {
  std::string s;
  s.reserve(raw.size() + 2);
  s.push_back(kind_prefix(kind));
  s.push_back(':');
  s.append(raw);
  return s;
}

EntityToken EntityToken::parse(std::string_view canonical) {
  if (canonical.size() < 3 || canonical[1] != ':') {
    throw Error("bad entity token '" + std::string(canonical) +
                "': expected <prefix>:<id> with non-empty id");
  }
  auto kind = kind_from_prefix(canonical[0]);
  if (!kind) {
    throw Error("bad entity token '" + std::string(canonical) +
                "': unknown namespace prefix '" + canonical[0] + "'");
  }
  return {*kind, std::string(canonical.substr(2))};
}

}  // namespace reprrec
