#include "txsc/digest.hpp"

#include <openssl/evp.h>

#include "txsc/errors.hpp"

namespace txsc {

Bytes32 sha256(std::string_view data) {
    Bytes32 out;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != 32) {
        throw TxscError("sha256 digest failed");
    }
    return out;
}

std::string sha256_hex(std::string_view data) { return sha256(data).to_hex(); }

}  // namespace txsc
