#include "zclaim/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

#include "zclaim/serialize.hpp"

namespace zclaim {

namespace {

class SodiumPrimitives final : public Primitives {
public:
  SodiumPrimitives() {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  }

  Bytes32 hash(std::span<const std::uint8_t> data) const override {
    Bytes32 out{};
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
  }

  std::vector<std::uint8_t> seal(const Bytes32& key, const Bytes32& nonce_seed,
                                 std::span<const std::uint8_t> plaintext) const override {
    std::vector<std::uint8_t> out(plaintext.size() + crypto_aead_chacha20poly1305_ietf_ABYTES);
    unsigned long long len = 0;
    crypto_aead_chacha20poly1305_ietf_encrypt(out.data(), &len, plaintext.data(), plaintext.size(),
                                              nullptr, 0, nullptr, nonce_seed.data(), key.data());
    out.resize(len);
    return out;
  }

  std::optional<std::vector<std::uint8_t>> open(const Bytes32& key, const Bytes32& nonce_seed,
                                                std::span<const std::uint8_t> ciphertext) const override {
    if (ciphertext.size() < crypto_aead_chacha20poly1305_ietf_ABYTES) return std::nullopt;
    std::vector<std::uint8_t> out(ciphertext.size());
    unsigned long long len = 0;
    if (crypto_aead_chacha20poly1305_ietf_decrypt(out.data(), &len, nullptr, ciphertext.data(),
                                                  ciphertext.size(), nullptr, 0, nonce_seed.data(),
                                                  key.data()) != 0) {
      return std::nullopt;
    }
    out.resize(len);
    return out;
  }
};

static_assert(crypto_aead_chacha20poly1305_ietf_KEYBYTES == 32);
static_assert(crypto_aead_chacha20poly1305_ietf_NPUBBYTES <= 32);

void write_address(ByteWriter& w, const Address& a) { w.fixed(a.diversifier).fixed(a.pk_d); }

}  // namespace

const Primitives& default_primitives() {
  static const SodiumPrimitives instance;
  return instance;
}

Bytes32 tagged_hash(const Primitives& p, std::string_view tag, std::span<const std::uint8_t> body) {
  ByteWriter w;
  w.str(tag);
  const auto& head = w.data();
  std::vector<std::uint8_t> buf;
  buf.reserve(head.size() + body.size());
  buf.insert(buf.end(), head.begin(), head.end());
  buf.insert(buf.end(), body.begin(), body.end());
  return p.hash(buf);
}

Bytes32 tagged_hash(std::string_view tag, std::span<const std::uint8_t> body) {
  return tagged_hash(default_primitives(), tag, body);
}

std::vector<std::uint8_t> serialize(const Note& note) {
  ByteWriter w;
  write_address(w, note.recipient);
  w.u64(note.value.units()).fixed(note.rcm);
  return w.take();
}

std::optional<Note> deserialize_note(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Note n;
  n.recipient.diversifier = r.fixed<11>();
  n.recipient.pk_d = r.fixed<32>();
  n.value = Amount{r.u64()};
  n.rcm = r.fixed<32>();
  if (!r.ok() || !r.at_end()) return std::nullopt;
  return n;
}

NoteCommitment commit_note(const Primitives& p, const Note& note) {
  return NoteCommitment{tagged_hash(p, "zclaim.cm", serialize(note))};
}

NoteCommitment commit_note(const Note& note) { return commit_note(default_primitives(), note); }

Bytes32 derive_rcm(const Bytes32& nonce) { return tagged_hash("zclaim.rcm", nonce); }

Nullifier derive_nullifier(const Note& note, const Bytes32& nullifier_key) {
  ByteWriter w;
  w.fixed(nullifier_key).bytes(serialize(note));
  return Nullifier{tagged_hash("zclaim.nf", w.data())};
}

SpendingKey make_spending_key(const Bytes32& nullifier_key, const Diversifier& diversifier) {
  ByteWriter w;
  w.fixed(nullifier_key).fixed(diversifier);
  return SpendingKey{nullifier_key, Address{diversifier, tagged_hash("zclaim.pkd", w.data())}};
}

bool controls(const SpendingKey& key, const Address& address) {
  return make_spending_key(key.nullifier_key, address.diversifier).address == address;
}

SharedSecret agree_secret(const Bytes32& esk, const Address& recipient) {
  ByteWriter w;
  w.fixed(esk);
  write_address(w, recipient);
  return SharedSecret{tagged_hash("zclaim.ka", w.data())};
}

Bytes32 ephemeral_public_for(const SharedSecret& secret, const Address& recipient) {
  ByteWriter w;
  w.fixed(secret.secret);
  write_address(w, recipient);
  return tagged_hash("zclaim.epk", w.data());
}

namespace {

Bytes32 symmetric_key(const SharedSecret& s) { return tagged_hash("zclaim.kdf", s.secret); }

}  // namespace

NoteCiphertext encrypt_note(const Note& note, const Address& recipient, const SharedSecret& secret) {
  NoteCiphertext ct;
  ct.ephemeral_public = ephemeral_public_for(secret, recipient);
  ct.payload = default_primitives().seal(symmetric_key(secret), ct.ephemeral_public, serialize(note));
  return ct;
}

std::optional<Note> decrypt_note(const NoteCiphertext& ct, const SharedSecret& secret) {
  auto plain = default_primitives().open(symmetric_key(secret), ct.ephemeral_public, ct.payload);
  if (!plain) return std::nullopt;
  return deserialize_note(*plain);
}

ChallengeVerdict verify_challenge(const NoteCiphertext& ct, const SharedSecret& revealed,
                                  const NoteCommitment& claimed_cm, const ChallengeWitness& witness) {
  // The witness must tie the revealed secret to this ciphertext; otherwise a
  // vault could "reveal" any secret and void honest transfers.
  if (ephemeral_public_for(revealed, witness.recipient) != ct.ephemeral_public) {
    return ChallengeVerdict::rejected;
  }
  const auto note = decrypt_note(ct, revealed);
  if (!note) return ChallengeVerdict::upheld;
  return commit_note(*note) == claimed_cm ? ChallengeVerdict::rejected : ChallengeVerdict::upheld;
}

}  // namespace zclaim
