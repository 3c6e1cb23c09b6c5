#pragma once

#include <openssl/evp.h>

#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace sequent {

/// SHA-256 hex digest of the raw bytes of a flat parameter vector. Used to
/// prove that frozen parameters stay bit-identical across a training phase.
inline std::string sha256_hex(std::span<const double> values) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int md_len = 0;
  EVP_Digest(values.data(), values.size() * sizeof(double), md, &md_len, EVP_sha256(), nullptr);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(md_len * 2);
  for (unsigned int i = 0; i < md_len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

}  // namespace sequent
