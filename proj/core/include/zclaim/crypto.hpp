#pragma once

// Note model and simulated shielded-pool cryptography.
//
// Every zero-knowledge object in the simulator is a (statement, witness)
// pair: verifiers read the witness, the public trace records only the
// statement. Hash and authenticated encryption sit behind `Primitives` so a
// different backend can be swapped in without touching the ledgers.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "zclaim/types.hpp"

namespace zclaim {

using Diversifier = std::array<std::uint8_t, 11>;

/// Shielded payment address (d, pk_d). Both halves are opaque bytes here.
struct Address {
  Diversifier diversifier{};
  Bytes32 pk_d{};
  friend bool operator==(const Address&, const Address&) = default;
};

struct Note {
  Address recipient;
  Amount value;
  Bytes32 rcm{};
  friend bool operator==(const Note&, const Note&) = default;
};

struct NoteCommitment {
  Bytes32 digest{};
  friend auto operator<=>(const NoteCommitment&, const NoteCommitment&) = default;
};

struct Nullifier {
  Bytes32 digest{};
  friend auto operator<=>(const Nullifier&, const Nullifier&) = default;
};

struct SharedSecret {
  Bytes32 secret{};
  friend bool operator==(const SharedSecret&, const SharedSecret&) = default;
};

struct NoteCiphertext {
  std::vector<std::uint8_t> payload;
  Bytes32 ephemeral_public{};
  friend bool operator==(const NoteCiphertext&, const NoteCiphertext&) = default;
};

/// Simulated proof that a revealed secret is the one behind a ciphertext's
/// ephemeral key: it names the recipient the encryption was made for, so the
/// verifier can recompute the ephemeral key from (secret, recipient).
struct ChallengeWitness {
  Address recipient;
};

enum class ChallengeVerdict { upheld, rejected };

/// Spending authority for an address: the nullifier key, from which pk_d is
/// derived.
struct SpendingKey {
  Bytes32 nullifier_key{};
  Address address;
};

// ---------------------------------------------------------------------------
// Pluggable primitives

class Primitives {
public:
  virtual ~Primitives() = default;
  [[nodiscard]] virtual Bytes32 hash(std::span<const std::uint8_t> data) const = 0;
  [[nodiscard]] virtual std::vector<std::uint8_t> seal(const Bytes32& key,
                                                       const Bytes32& nonce_seed,
                                                       std::span<const std::uint8_t> plaintext) const = 0;
  [[nodiscard]] virtual std::optional<std::vector<std::uint8_t>> open(
      const Bytes32& key, const Bytes32& nonce_seed,
      std::span<const std::uint8_t> ciphertext) const = 0;
};

/// SHA-256 and ChaCha20-Poly1305 (IETF) from libsodium.
const Primitives& default_primitives();

/// Domain-separated digest: H(tag || parts...).
Bytes32 tagged_hash(const Primitives& p, std::string_view tag, std::span<const std::uint8_t> body);
Bytes32 tagged_hash(std::string_view tag, std::span<const std::uint8_t> body);

// ---------------------------------------------------------------------------
// Operations

std::vector<std::uint8_t> serialize(const Note& note);
std::optional<Note> deserialize_note(std::span<const std::uint8_t> bytes);

NoteCommitment commit_note(const Note& note);
NoteCommitment commit_note(const Primitives& p, const Note& note);

/// rcm = H("zclaim.rcm" || nonce): binds a lock note to its lock permit.
Bytes32 derive_rcm(const Bytes32& nonce);

Nullifier derive_nullifier(const Note& note, const Bytes32& nullifier_key);

SpendingKey make_spending_key(const Bytes32& nullifier_key, const Diversifier& diversifier);
/// True iff `key` controls `address`.
bool controls(const SpendingKey& key, const Address& address);

/// Simulated key agreement: the secret a sender with ephemeral seed `esk`
/// shares with `recipient`.
SharedSecret agree_secret(const Bytes32& esk, const Address& recipient);
Bytes32 ephemeral_public_for(const SharedSecret& secret, const Address& recipient);

NoteCiphertext encrypt_note(const Note& note, const Address& recipient, const SharedSecret& secret);
std::optional<Note> decrypt_note(const NoteCiphertext& ct, const SharedSecret& secret);

ChallengeVerdict verify_challenge(const NoteCiphertext& ct, const SharedSecret& revealed,
                                  const NoteCommitment& claimed_cm, const ChallengeWitness& witness);

}  // namespace zclaim
