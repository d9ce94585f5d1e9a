#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

namespace txsc {

using Json = nlohmann::ordered_json;

/// Primitive types of the contract DSL.
enum class PrimType { Address, Bool, Uint, Bytes32, String };

std::string to_string(PrimType t);
std::optional<PrimType> prim_type_from_string(const std::string& s);

/// Opaque account/contract identity. Identities are plain strings; there is
/// no key material behind them.
struct Address {
    std::string id;
    auto operator<=>(const Address&) const = default;
};

/// 32-byte word, ordered lexicographically (matches digest comparisons).
struct Bytes32 {
    std::array<std::uint8_t, 32> bytes{};
    auto operator<=>(const Bytes32&) const = default;

    static Bytes32 from_hex(const std::string& hex);  // "0x" + 64 hex digits
    std::string to_hex() const;
};

/// Runtime value of any primitive type.
class Value {
public:
    using Repr = std::variant<Address, bool, std::uint64_t, Bytes32, std::string>;

    Value() : repr_(std::uint64_t{0}) {}
    explicit Value(Address a) : repr_(std::move(a)) {}
    explicit Value(bool b) : repr_(b) {}
    explicit Value(std::uint64_t u) : repr_(u) {}
    explicit Value(Bytes32 h) : repr_(h) {}
    explicit Value(std::string s) : repr_(std::move(s)) {}

    PrimType type() const;

    const Address& as_address() const { return std::get<Address>(repr_); }
    bool as_bool() const { return std::get<bool>(repr_); }
    std::uint64_t as_uint() const { return std::get<std::uint64_t>(repr_); }
    const Bytes32& as_bytes32() const { return std::get<Bytes32>(repr_); }
    const std::string& as_string() const { return std::get<std::string>(repr_); }

    bool is(PrimType t) const { return type() == t; }

    /// Zero value of a primitive type (attribute defaults at deployment).
    static Value default_of(PrimType t);

    /// Stable byte encoding used for hashing and block digests.
    std::string canonical_encoding() const;

    /// Tagged single-key JSON form, e.g. {"uint": 2} or {"address": "alice"}.
    Json to_json() const;
    static Value from_json(const Json& j);

    friend bool operator==(const Value& a, const Value& b) { return a.repr_ == b.repr_; }
    friend auto operator<=>(const Value& a, const Value& b) = default;

private:
    Repr repr_;
};

/// Renders a value the way the pretty-printer renders literals.
std::string to_display(const Value& v);

}  // namespace txsc
