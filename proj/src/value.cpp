#include "txsc/value.hpp"

#include <stdexcept>

#include "txsc/errors.hpp"

namespace txsc {

std::string to_string(PrimType t) {
    switch (t) {
        case PrimType::Address: return "address";
        case PrimType::Bool: return "bool";
        case PrimType::Uint: return "uint";
        case PrimType::Bytes32: return "bytes32";
        case PrimType::String: return "string";
    }
    return "?";
}

std::optional<PrimType> prim_type_from_string(const std::string& s) {
    if (s == "address") return PrimType::Address;
    if (s == "bool") return PrimType::Bool;
    if (s == "uint") return PrimType::Uint;
    if (s == "bytes32") return PrimType::Bytes32;
    if (s == "string") return PrimType::String;
    return std::nullopt;
}

static int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes32 Bytes32::from_hex(const std::string& hex) {
    std::string body = hex;
    if (body.rfind("0x", 0) == 0 || body.rfind("0X", 0) == 0) body = body.substr(2);
    if (body.size() != 64) throw TxscError("bytes32 literal must have 64 hex digits: " + hex);
    Bytes32 out;
    for (std::size_t i = 0; i < 32; ++i) {
        int hi = hex_digit(body[2 * i]);
        int lo = hex_digit(body[2 * i + 1]);
        if (hi < 0 || lo < 0) throw TxscError("invalid hex digit in bytes32 literal: " + hex);
        out.bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return out;
}

std::string Bytes32::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s = "0x";
    s.reserve(66);
    for (auto b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

PrimType Value::type() const {
    switch (repr_.index()) {
        case 0: return PrimType::Address;
        case 1: return PrimType::Bool;
        case 2: return PrimType::Uint;
        case 3: return PrimType::Bytes32;
        default: return PrimType::String;
    }
}

Value Value::default_of(PrimType t) {
    switch (t) {
        case PrimType::Address: return Value(Address{""});
        case PrimType::Bool: return Value(false);
        case PrimType::Uint: return Value(std::uint64_t{0});
        case PrimType::Bytes32: return Value(Bytes32{});
        case PrimType::String: return Value(std::string{});
    }
    return Value(std::uint64_t{0});
}

std::string Value::canonical_encoding() const {
    switch (type()) {
        case PrimType::Address: return "a:" + as_address().id;
        case PrimType::Bool: return as_bool() ? "b:1" : "b:0";
        case PrimType::Uint: return "u:" + std::to_string(as_uint());
        case PrimType::Bytes32: return "h:" + as_bytes32().to_hex();
        case PrimType::String: return "s:" + as_string();
    }
    return "";
}

Json Value::to_json() const {
    Json j = Json::object();
    switch (type()) {
        case PrimType::Address: j["address"] = as_address().id; break;
        case PrimType::Bool: j["bool"] = as_bool(); break;
        case PrimType::Uint: j["uint"] = as_uint(); break;
        case PrimType::Bytes32: j["bytes32"] = as_bytes32().to_hex(); break;
        case PrimType::String: j["string"] = as_string(); break;
    }
    return j;
}

Value Value::from_json(const Json& j) {
    if (!j.is_object() || j.size() != 1)
        throw TxscError("expected single-key typed value object, got " + j.dump());
    if (j.contains("address")) return Value(Address{j["address"].get<std::string>()});
    if (j.contains("bool")) return Value(j["bool"].get<bool>());
    if (j.contains("uint")) return Value(j["uint"].get<std::uint64_t>());
    if (j.contains("bytes32")) return Value(Bytes32::from_hex(j["bytes32"].get<std::string>()));
    if (j.contains("string")) return Value(j["string"].get<std::string>());
    throw TxscError("unknown value tag in " + j.dump());
}

std::string to_display(const Value& v) {
    switch (v.type()) {
        case PrimType::Address: return "address(\"" + v.as_address().id + "\")";
        case PrimType::Bool: return v.as_bool() ? "true" : "false";
        case PrimType::Uint: return std::to_string(v.as_uint());
        case PrimType::Bytes32: return v.as_bytes32().to_hex();
        case PrimType::String: return "\"" + v.as_string() + "\"";
    }
    return "?";
}

}  // namespace txsc
