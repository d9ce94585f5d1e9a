#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "txsc/value.hpp"

namespace txsc {

/// SHA-256 of arbitrary bytes.
Bytes32 sha256(std::string_view data);

/// SHA-256 rendered as "0x" + 64 lowercase hex digits.
std::string sha256_hex(std::string_view data);

}  // namespace txsc
