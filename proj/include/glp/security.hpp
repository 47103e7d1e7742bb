#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace glp {

using Bytes = std::vector<uint8_t>;

Bytes to_bytes(const std::string& s);
std::string hex(const Bytes& b);

struct KeyPair {
  std::string provider;
  uint64_t seed = 0;
  Bytes pub;
  Bytes priv;
  // Agent identity atom derived from the public key.
  std::string identity() const;
};

class CryptoProvider {
public:
  virtual ~CryptoProvider() = default;
  virtual std::string name() const = 0;
  virtual KeyPair keypair(uint64_t seed) const = 0;
  virtual Bytes sign(const KeyPair& signer, const Bytes& msg) const = 0;
  virtual bool verify(const Bytes& pub, const Bytes& msg, const Bytes& sig) const = 0;
  virtual Bytes encrypt(const Bytes& recipient_pub, const Bytes& plaintext) const = 0;
  virtual std::optional<Bytes> decrypt(const KeyPair& recipient, const Bytes& ciphertext) const = 0;
};

// Deterministic stand-in: keyed hashing for signatures, keystream XOR plus an inner tag
// for encryption. Offers no secrecy against anyone who knows the public key.
std::unique_ptr<CryptoProvider> make_mock_provider();
// Ed25519 signatures and sealed boxes from libsodium.
std::unique_ptr<CryptoProvider> make_real_provider();
std::unique_ptr<CryptoProvider> make_provider(const std::string& name);

struct Envelope {
  Bytes sender;
  Bytes recipient;
  std::string module_hash;
  Bytes attestation;
  Bytes signature;
  Bytes ciphertext;
};

Bytes encode_envelope(const Envelope& e);
std::optional<Envelope> decode_envelope(const Bytes& wire);

// Attestation token: step followed by a hash over (payload, module hash, step).
Bytes attestation_token(const Bytes& payload, const std::string& module_hash, uint64_t step);

Bytes seal(const CryptoProvider& cp, const Bytes& payload, const std::string& module_hash, const KeyPair& sender,
           const Bytes& recipient_pub, uint64_t step);

struct Opened {
  bool ok = false;
  std::string stage;  // failing stage when !ok: decrypt, signature or attestation
  Bytes payload;
  Bytes sender;
  std::string module_hash;
};

Opened open_envelope(const CryptoProvider& cp, const Bytes& wire, const KeyPair& recipient,
                     const std::vector<Bytes>& known_keys);

// Number of known keys under which the envelope's signature verifies for `payload`.
size_t verifying_keys(const CryptoProvider& cp, const Envelope& e, const Bytes& payload,
                      const std::vector<Bytes>& known_keys);

}  // namespace glp
