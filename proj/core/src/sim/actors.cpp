#include "actors.hpp"

namespace zclaim::sim::detail {

namespace {

// Ticks to wait before repeating an operation the protocol turned down.
constexpr Tick kRetry = 5;

}  // namespace

// ---------------------------------------------------------------------------
// Vault

void VaultAgent::maintain_proofs(World& w) {
  auto& e = w.engine;
  const Tick now = e.now();
  const auto& params = e.params().registry;

  const auto* v = e.registry().find(id_);
  if (!v->issue_available(now + 1) && !v->active_issue && now >= next_poc_) {
    const Amount collateral = v->collateral;
    const Amount obligations = e.registry().obligations(id_);
    const auto rate = e.rates().get_rate(now);
    if (e.submit_poc(id_) && rate) {
      w.pocs.push_back({now, spec_.name, collateral, obligations, *rate});
    } else {
      next_poc_ = now + 2 * kRetry;
    }
  }

  // Keep the last statement fresh. A vault open for issues restates its
  // capacity; a balance proof would close it.
  v = e.registry().find(id_);
  if (now - v->last_statement_tick >= params.pob_period / 2 && now >= next_pob_) {
    if (v->issue_side == IssueSide::issue_start && !v->active_issue) {
      const Amount collateral = v->collateral;
      const Amount obligations = e.registry().obligations(id_);
      const auto rate = e.rates().get_rate(now);
      if (e.submit_poc(id_) && rate) {
        w.pocs.push_back({now, spec_.name, collateral, obligations, *rate});
      } else if (!e.submit_pob(id_)) {
        next_pob_ = now + 2 * kRetry;
      }
    } else if (!e.submit_pob(id_)) {
      next_pob_ = now + 2 * kRetry;
    }
  }

  v = e.registry().find(id_);
  if (spec_.poi && !v->redeem_exempt(now + 1) && !v->active_redeem && now >= next_poi_) {
    if (!e.submit_poi(id_)) next_poi_ = now + 2 * kRetry;
  }
}

void VaultAgent::step(World& w) {
  maintain_proofs(w);
  if (spec_.strategy == "silent") return;

  std::vector<RequestId> mine;
  for (const auto& [id, r] : w.engine.requests()) {
    if (r.vault == id_ && !done_.count(id) && !is_terminal(r.state)) mine.push_back(id);
  }
  for (const auto id : mine) {
    const auto& r = *w.engine.request(id);
    if (r.state == RequestState::await_issue_confirm) serve_issue(w, r);
    else if (r.state == RequestState::await_redeem_confirm) serve_redeem(w, r);
  }
}

void VaultAgent::serve_issue(World& w, const RequestRecord& r) {
  auto& e = w.engine;
  const RequestId id = r.id;
  done_.insert(id);
  if (spec_.strategy == "blind") {
    (void)e.confirm_issue(id_, id);
  } else if (spec_.strategy == "challenge_all") {
    if (!e.challenge_issue(id_, id)) (void)e.confirm_issue(id_, id);
  } else if (e.inspect_issue(id_, id) == Inspection::ok) {
    (void)e.confirm_issue(id_, id);
  } else {
    (void)e.challenge_issue(id_, id);
  }
}

void VaultAgent::serve_redeem(World& w, const RequestRecord& r) {
  auto& e = w.engine;
  const RequestId id = r.id;
  const Tick now = e.now();

  if (released_.count(id)) {
    const auto proof = e.release_proof(id_, id);
    if (!proof) return;  // release not final yet
    done_.insert(id);
    if (e.confirm_redeem(id_, id, *proof)) {
      last_proof_ = *proof;
    } else if (spec_.strategy == "wrong_note") {
      ++w.attacks_rejected;
    }
    return;
  }

  if (spec_.strategy == "replay_release" && last_proof_) {
    // Present the previous release instead of paying again.
    done_.insert(id);
    if (!e.confirm_redeem(id_, id, *last_proof_)) ++w.attacks_rejected;
    return;
  }

  if (spec_.strategy == "challenge_all") {
    if (e.challenge_redeem(id_, id)) {
      done_.insert(id);
      return;
    }
  } else if (spec_.strategy != "blind" && e.inspect_redeem(id_, id) != Inspection::ok) {
    done_.insert(id);
    (void)e.challenge_redeem(id_, id);
    return;
  }

  auto& retry = retry_[id];
  if (now < retry) return;
  ReleaseOptions opts;
  opts.wrong_value = spec_.strategy == "wrong_note";
  if (e.do_release(id_, id, opts)) {
    released_.insert(id);
  } else {
    retry = now + kRetry;
  }
}

// ---------------------------------------------------------------------------
// Issuer

void IssueAgent::step(World& w) {
  auto& e = w.engine;
  const Tick now = e.now();
  if (phase_ == Phase::done || now < spec_.at || now < next_try_) return;
  const ActorId user = w.people.at(spec_.user);
  const VaultId vault = w.vaults.at(spec_.vault);
  const auto& s = spec_.strategy;

  if (phase_ == Phase::waiting) {
    const auto id = e.request_lock(user, vault);
    if (!id) {
      next_try_ = now + kRetry;
      return;
    }
    request_ = *id;
    w.issues[spec_.label] = *id;
    phase_ = Phase::locking;
  }

  if (e.request(*request_)->state != RequestState::awaiting_mint) {
    phase_ = Phase::done;
    return;
  }

  if (phase_ == Phase::locking) {
    if (s == "no_lock") {
      phase_ = Phase::done;
      return;
    }
    if (s != "replay") {
      LockOptions opts;
      opts.derive_rcm = s != "random_rcm";
      opts.adversary_branch = s == "adversary_lock";
      if (!e.do_lock(user, *request_, spec_.amount, opts)) {
        next_try_ = now + kRetry;
        return;
      }
    }
    phase_ = Phase::minting;
    return;
  }
  try_mint(w, user);
}

void IssueAgent::try_mint(World& w, ActorId user) {
  auto& e = w.engine;
  const auto& s = spec_.strategy;
  MintOptions opts;
  if (s == "corrupt_ciphertext") opts.fault = CiphertextFault::corrupt;
  if (s == "wrong_ciphertext") opts.fault = CiphertextFault::wrong_note;
  if (s == "overclaim") opts.overclaim = true;
  if (s == "replay") {
    const auto it = w.issues.find(spec_.replay_of);
    if (it == w.issues.end()) return;
    opts.replay_lock_of = it->second;
  }
  const auto pkg = e.make_mint(user, *request_, opts);
  if (!pkg) return;  // lock not final yet

  if (e.do_mint(user, *request_, *pkg)) {
    phase_ = Phase::done;
  } else if (s == "replay" || s == "overclaim" || s == "random_rcm") {
    ++w.attacks_rejected;
    phase_ = Phase::done;
  } else {
    next_try_ = e.now() + kRetry;
  }
}

// ---------------------------------------------------------------------------
// Redeemer

void RedeemAgent::step(World& w) {
  auto& e = w.engine;
  const Tick now = e.now();
  if (done_ || now < spec_.at || now < next_try_) return;
  const ActorId user = w.people.at(spec_.user);
  const VaultId vault = w.vaults.at(spec_.vault);

  BurnOptions opts;
  if (spec_.strategy == "corrupt_ciphertext") opts.fault = CiphertextFault::corrupt;
  if (spec_.strategy == "reuse_note") {
    const auto it = w.redeems.find(spec_.reuse_of);
    if (it == w.redeems.end()) return;
    opts.reuse_release_of = it->second;
  }
  const auto pkg = e.make_burn(user, vault, spec_.amount, opts);
  if (!pkg) return;  // not enough wZEC yet
  const auto res = e.do_burn(user, vault, *pkg);
  if (!res) {
    next_try_ = now + kRetry;
    return;
  }
  w.redeems[spec_.label] = res->request;
  done_ = true;
}

// ---------------------------------------------------------------------------
// Adversary

void Adversary::step(World& w) {
  if (spec_.strategy == "eclipse") eclipse(w);
  else if (spec_.strategy == "reorg_race") race(w);
}

void Adversary::eclipse(World& w) {
  auto& e = w.engine;
  const Tick now = e.now();
  if (now < spec_.at) return;
  if (now == spec_.at) {
    e.set_relay_muted(true);
    e.adversary_fork();
    return;
  }
  if (mined_ < spec_.blocks) {
    e.adversary_mine(1);
    ++mined_;
  }
  if (mined_ == spec_.blocks && !published_) {
    e.adversary_publish_to_relay();
    published_ = true;
  }
}

void Adversary::race(World& w) {
  auto& e = w.engine;
  if (e.now() < spec_.at) return;
  const auto& chain = e.zcash();
  if (!chain.adversary_tip()) e.adversary_fork();

  // The honest network mines one block per tick; a geometric number of
  // adversary blocks in between gives the adversary a share alpha of blocks.
  const auto num = static_cast<std::uint64_t>(spec_.alpha.num);
  const auto den = static_cast<std::uint64_t>(spec_.alpha.den);
  while (bernoulli(rng_, num, den)) e.adversary_mine(1);
  const auto& tip = chain.block(*chain.adversary_tip())->header;
  if (tip.work > chain.tip().work) {
    if (e.adversary_publish_to_network()) ++reorgs_;
    e.adversary_fork();
  } else if (chain.tip().height > tip.height + k_) {
    e.adversary_fork();
  }
}

}  // namespace zclaim::sim::detail
