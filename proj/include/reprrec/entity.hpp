#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace reprrec {

// Users, movies, directors, actors and tags share one vocabulary; the
// namespace keeps a Tag "tom hanks" distinct from an Actor "Tom Hanks".
enum class EntityKind : std::uint8_t { User, Movie, Director, Actor, Tag };

constexpr char kind_prefix(EntityKind k) {
  switch (k) {
    case EntityKind::User: return 'u';
    case EntityKind::Movie: return 'm';
    case EntityKind::Director: return 'd';
    case EntityKind::Actor: return 'a';
    case EntityKind::Tag: return 't';
  }
  return '?';
}

std::optional<EntityKind> kind_from_prefix(char c);
std::string_view kind_name(EntityKind k);
std::optional<EntityKind> kind_from_name(std::string_view name);

struct EntityToken {
  EntityKind kind{};
  std::string raw;

  // canonical form "<prefix>:<raw>", prefixes u m d a t; round-trips losslessly
  std::string canonical() const;
  static EntityToken parse(std::string_view canonical);

  friend bool operator==(const EntityToken& a, const EntityToken& b) {
    return a.kind == b.kind && a.raw == b.raw;
  }
  // ordered by canonical string; every deterministic tie-break relies on this
  friend std::strong_ordering operator<=>(const EntityToken& a, const EntityToken& b) {
    if (auto c = kind_prefix(a.kind) <=> kind_prefix(b.kind); c != 0) return c;
    return a.raw <=> b.raw;
  }
};

inline EntityToken user_token(std::string id) { return {EntityKind::User, std::move(id)}; }
inline EntityToken movie_token(std::string id) { return {EntityKind::Movie, std::move(id)}; }
inline EntityToken director_token(std::string name) { return {EntityKind::Director, std::move(name)}; }
inline EntityToken actor_token(std::string name) { return {EntityKind::Actor, std::move(name)}; }
inline EntityToken tag_token(std::string text) { return {EntityKind::Tag, std::move(text)}; }

}  // namespace reprrec

template <>
struct std::hash<reprrec::EntityToken> {
  std::size_t operator()(const reprrec::EntityToken& t) const noexcept {
    std::size_t h = std::hash<std::string>{}(t.raw);
    return h ^ (static_cast<std::size_t>(t.kind) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
  }
};
