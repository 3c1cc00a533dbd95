#include "tbx/hashing.hpp"

#include <array>

#include <openssl/evp.h>

#include "tbx/errors.hpp"

namespace tbx
{

namespace
{

std::array<unsigned char, 32> sha256(std::string_view data)
{
  std::array<unsigned char, 32> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32)
  {
    throw Error("SHA-256 digest failed");
  }
  return digest;
}

} // namespace

std::string sha256_hex(std::string_view data)
{
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (const unsigned char b : sha256(data))
  {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0x0f]);
  }
  return out;
}

std::uint64_t stable_seed(std::uint64_t seed, std::string_view key)
{
  std::string buf(8, '\0');
  for (int i = 0; i < 8; ++i)
  {
    buf[i] = static_cast<char>((seed >> (8 * i)) & 0xff);
  }
  buf.append(key);
  const auto d = sha256(buf);
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i)
  {
    out |= static_cast<std::uint64_t>(d[i]) << (8 * i);
  }
  return out;
}

} // namespace tbx
