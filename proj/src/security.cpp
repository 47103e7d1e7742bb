#include "glp/security.hpp"

#include <sodium.h>

#include <algorithm>
#include <stdexcept>

namespace glp {

namespace {

Bytes sha256(const Bytes& in) {
  Bytes out(crypto_hash_sha256_BYTES);
  crypto_hash_sha256(out.data(), in.data(), in.size());
  return out;
}

Bytes concat(std::initializer_list<const Bytes*> parts) {
  Bytes out;
  for (const Bytes* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

Bytes u64_bytes(uint64_t v) {
  Bytes out(8);
  for (int i = 7; i >= 0; --i) {
    out[i] = static_cast<uint8_t>(v & 0xff);
    v >>= 8;
  }
  return out;
}

void put_field(Bytes& out, const Bytes& field) {
  uint32_t n = static_cast<uint32_t>(field.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<uint8_t>((n >> shift) & 0xff));
  out.insert(out.end(), field.begin(), field.end());
}

bool get_field(const Bytes& in, size_t& pos, Bytes& field) {
  if (pos + 4 > in.size()) return false;
  uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n = (n << 8) | in[pos + i];
  pos += 4;
  if (n > in.size() - pos) return false;
  field.assign(in.begin() + static_cast<long>(pos), in.begin() + static_cast<long>(pos + n));
  pos += n;
  return true;
}

void ensure_sodium() {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw std::runtime_error("libsodium initialisation failed");
}

class MockProvider : public CryptoProvider {
public:
  std::string name() const override { return "mock"; }

  KeyPair keypair(uint64_t seed) const override {
    KeyPair kp;
    kp.provider = name();
    kp.seed = seed;
    Bytes s = kPrivLabel;
    Bytes sb = u64_bytes(seed);
    s.insert(s.end(), sb.begin(), sb.end());
    kp.priv = sha256(s);
    Bytes p = to_bytes("mock-pub");
    p.insert(p.end(), kp.priv.begin(), kp.priv.end());
    kp.pub = sha256(p);
    return kp;
  }

  Bytes sign(const KeyPair& signer, const Bytes& msg) const override { return sha256(concat({&signer.pub, &msg})); }

  bool verify(const Bytes& pub, const Bytes& msg, const Bytes& sig) const override {
    return sha256(concat({&pub, &msg})) == sig;
  }

  Bytes encrypt(const Bytes& recipient_pub, const Bytes& plaintext) const override {
    Bytes tag = sha256(concat({&kTagLabel, &recipient_pub, &plaintext}));
    tag.resize(16);
    Bytes body = concat({&tag, &plaintext});
    xor_stream(recipient_pub, body);
    return body;
  }

  std::optional<Bytes> decrypt(const KeyPair& recipient, const Bytes& ct) const override {
    if (ct.size() < 16) return std::nullopt;
    Bytes body = ct;
    xor_stream(recipient.pub, body);
    Bytes tag(body.begin(), body.begin() + 16);
    Bytes plain(body.begin() + 16, body.end());
    Bytes expect = sha256(concat({&kTagLabel, &recipient.pub, &plain}));
    expect.resize(16);
    if (expect != tag) return std::nullopt;
    return plain;
  }

private:
  static void xor_stream(const Bytes& key, Bytes& data) {
    Bytes block;
    for (size_t i = 0; i < data.size(); ++i) {
      if (i % 32 == 0) {
        Bytes ctr = u64_bytes(i / 32);
        block = sha256(concat({&kStreamLabel, &key, &ctr}));
      }
      data[i] ^= block[i % 32];
    }
  }

  inline static const Bytes kPrivLabel = to_bytes("mock-priv");
  inline static const Bytes kTagLabel = to_bytes("mock-tag");
  inline static const Bytes kStreamLabel = to_bytes("mock-stream");
};

class SodiumProvider : public CryptoProvider {
public:
  SodiumProvider() { ensure_sodium(); }
  std::string name() const override { return "real"; }

  KeyPair keypair(uint64_t seed) const override {
    KeyPair kp;
    kp.provider = name();
    kp.seed = seed;
    Bytes s = to_bytes("glp-seed");
    Bytes sb = u64_bytes(seed);
    s.insert(s.end(), sb.begin(), sb.end());
    Bytes seed32 = sha256(s);
    kp.pub.resize(crypto_sign_PUBLICKEYBYTES);
    kp.priv.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.pub.data(), kp.priv.data(), seed32.data());
    return kp;
  }

  Bytes sign(const KeyPair& signer, const Bytes& msg) const override {
    Bytes sig(crypto_sign_BYTES);
    crypto_sign_detached(sig.data(), nullptr, msg.data(), msg.size(), signer.priv.data());
    return sig;
  }

  bool verify(const Bytes& pub, const Bytes& msg, const Bytes& sig) const override {
    if (pub.size() != crypto_sign_PUBLICKEYBYTES || sig.size() != crypto_sign_BYTES) return false;
    return crypto_sign_verify_detached(sig.data(), msg.data(), msg.size(), pub.data()) == 0;
  }

  Bytes encrypt(const Bytes& recipient_pub, const Bytes& plaintext) const override {
    unsigned char curve_pk[crypto_box_PUBLICKEYBYTES];
    if (crypto_sign_ed25519_pk_to_curve25519(curve_pk, recipient_pub.data()) != 0)
      throw std::runtime_error("recipient key is not an Ed25519 public key");
    Bytes ct(plaintext.size() + crypto_box_SEALBYTES);
    crypto_box_seal(ct.data(), plaintext.data(), plaintext.size(), curve_pk);
    return ct;
  }

  std::optional<Bytes> decrypt(const KeyPair& recipient, const Bytes& ct) const override {
    if (ct.size() < crypto_box_SEALBYTES) return std::nullopt;
    unsigned char curve_pk[crypto_box_PUBLICKEYBYTES], curve_sk[crypto_box_SECRETKEYBYTES];
    if (crypto_sign_ed25519_pk_to_curve25519(curve_pk, recipient.pub.data()) != 0) return std::nullopt;
    if (crypto_sign_ed25519_sk_to_curve25519(curve_sk, recipient.priv.data()) != 0) return std::nullopt;
    Bytes plain(ct.size() - crypto_box_SEALBYTES);
    if (crypto_box_seal_open(plain.data(), ct.data(), ct.size(), curve_pk, curve_sk) != 0) return std::nullopt;
    return plain;
  }
};

Bytes signed_bytes(const Bytes& payload, const std::string& module_hash, const Bytes& recipient) {
  Bytes out;
  put_field(out, payload);
  put_field(out, to_bytes(module_hash));
  put_field(out, recipient);
  return out;
}

}  // namespace

Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

std::string hex(const Bytes& b) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (uint8_t c : b) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

std::string KeyPair::identity() const {
  Bytes head(pub.begin(), pub.begin() + std::min<size_t>(pub.size(), 8));
  return "pk_" + hex(head);
}

std::unique_ptr<CryptoProvider> make_mock_provider() { return std::make_unique<MockProvider>(); }
std::unique_ptr<CryptoProvider> make_real_provider() { return std::make_unique<SodiumProvider>(); }

std::unique_ptr<CryptoProvider> make_provider(const std::string& name) {
  if (name == "mock") return make_mock_provider();
  if (name == "real") return make_real_provider();
  throw std::invalid_argument("unknown crypto provider: " + name);
}

Bytes encode_envelope(const Envelope& e) {
  Bytes out;
  put_field(out, e.sender);
  put_field(out, e.recipient);
  put_field(out, to_bytes(e.module_hash));
  put_field(out, e.attestation);
  put_field(out, e.signature);
  put_field(out, e.ciphertext);
  return out;
}

std::optional<Envelope> decode_envelope(const Bytes& wire) {
  Envelope e;
  size_t pos = 0;
  Bytes mh;
  if (!get_field(wire, pos, e.sender) || !get_field(wire, pos, e.recipient) || !get_field(wire, pos, mh) ||
      !get_field(wire, pos, e.attestation) || !get_field(wire, pos, e.signature) ||
      !get_field(wire, pos, e.ciphertext) || pos != wire.size())
    return std::nullopt;
  e.module_hash.assign(mh.begin(), mh.end());
  return e;
}

Bytes attestation_token(const Bytes& payload, const std::string& module_hash, uint64_t step) {
  Bytes step_bytes = u64_bytes(step);
  Bytes mh = to_bytes(module_hash);
  Bytes h = sha256(concat({&payload, &mh, &step_bytes}));
  return concat({&step_bytes, &h});
}

Bytes seal(const CryptoProvider& cp, const Bytes& payload, const std::string& module_hash, const KeyPair& sender,
           const Bytes& recipient_pub, uint64_t step) {
  Envelope e;
  e.sender = sender.pub;
  e.recipient = recipient_pub;
  e.module_hash = module_hash;
  e.attestation = attestation_token(payload, module_hash, step);
  e.signature = cp.sign(sender, signed_bytes(payload, module_hash, recipient_pub));
  e.ciphertext = cp.encrypt(recipient_pub, payload);
  return encode_envelope(e);
}

Opened open_envelope(const CryptoProvider& cp, const Bytes& wire, const KeyPair& recipient,
                     const std::vector<Bytes>& known_keys) {
  Opened r;
  auto env = decode_envelope(wire);
  if (!env || env->recipient != recipient.pub) {
    r.stage = "decrypt";
    return r;
  }
  auto plain = cp.decrypt(recipient, env->ciphertext);
  if (!plain) {
    r.stage = "decrypt";
    return r;
  }
  bool known = std::find(known_keys.begin(), known_keys.end(), env->sender) != known_keys.end();
  if (!known || !cp.verify(env->sender, signed_bytes(*plain, env->module_hash, env->recipient), env->signature)) {
    r.stage = "signature";
    return r;
  }
  if (env->attestation.size() != 40) {
    r.stage = "attestation";
    return r;
  }
  uint64_t step = 0;
  for (int i = 0; i < 8; ++i) step = (step << 8) | env->attestation[i];
  if (attestation_token(*plain, env->module_hash, step) != env->attestation) {
    r.stage = "attestation";
    return r;
  }
  r.ok = true;
  r.payload = std::move(*plain);
  r.sender = env->sender;
  r.module_hash = env->module_hash;
  return r;
}

size_t verifying_keys(const CryptoProvider& cp, const Envelope& e, const Bytes& payload,
                      const std::vector<Bytes>& known_keys) {
  size_t n = 0;
  Bytes msg = signed_bytes(payload, e.module_hash, e.recipient);
  for (const auto& k : known_keys)
    if (cp.verify(k, msg, e.signature)) ++n;
  return n;
}

}  // namespace glp
