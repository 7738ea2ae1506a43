#include "zclaim/conformance.hpp"

#include <map>
#include <utility>

namespace zclaim {

namespace {

using Edge = std::pair<std::string, std::string>;  // (op, from)

const std::map<Edge, std::string>& edges() {
  static const std::map<Edge, std::string> table = {
      {{"request_lock", "IssueStart"}, "AwaitingMint"},
      {{"lock", "AwaitingMint"}, "AwaitingMint"},
      {{"mint", "AwaitingMint"}, "AwaitIssueConfirm"},
      {{"timeout_mint", "AwaitingMint"}, "IssueExpired"},
      {{"confirm_issue", "AwaitIssueConfirm"}, "IssueSuccess"},
      {{"timeout_confirm_issue", "AwaitIssueConfirm"}, "IssueSuccess"},
      {{"challenge_issue", "AwaitIssueConfirm"}, "IssueChallenged"},
      {{"burn", "RedeemStart"}, "AwaitRedeemConfirm"},
      {{"release", "AwaitRedeemConfirm"}, "AwaitRedeemConfirm"},
      {{"confirm_redeem", "AwaitRedeemConfirm"}, "RedeemSuccess"},
      {{"challenge_redeem", "AwaitRedeemConfirm"}, "RedeemChallenged"},
      {{"timeout_confirm_redeem", "AwaitRedeemConfirm"}, "RedeemExpired"},
  };
  return table;
}

bool terminal(const std::string& s) {
  return s == "IssueSuccess" || s == "IssueChallenged" || s == "IssueExpired" || s == "RedeemSuccess" ||
         s == "RedeemChallenged" || s == "RedeemExpired";
}

}  // namespace

ConformanceReport check_conformance(const std::vector<TraceRecord>& trace) {
  ConformanceReport report;
  struct Track {
    std::string state;
    bool released = false;
  };
  std::map<std::uint32_t, Track> tracks;

  for (std::size_t n = 0; n < trace.size(); ++n) {
    const auto& r = trace[n];
    const std::string where = "record " + std::to_string(n + 1) + " (" + r.op + "): ";
    const bool ok = r.outcome == "ok";
    if (!ok) {
      if (r.state_before != r.state_after) report.violations.push_back(where + "rejected operation changed state");
      continue;
    }

    // Vault availability proofs.
    if (r.op == "submit_poc" && r.state_after != "IssueStart") report.violations.push_back(where + "POC must end in IssueStart");
    if (r.op == "submit_pob" && r.state_after != "NotIssuing") report.violations.push_back(where + "POB must end in NotIssuing");
    if (r.op == "submit_poi" && r.state_after != "NotRedeeming") {
      report.violations.push_back(where + "POI must end in NotRedeeming");
    }
    if (!r.request) continue;

    const auto edge = edges().find({r.op, r.state_before});
    auto it = tracks.find(raw(*r.request));
    const bool opens = r.op == "request_lock" || r.op == "burn";
    if (it == tracks.end()) {
      if (!opens) {
        report.violations.push_back(where + "request " + std::to_string(raw(*r.request)) + " used before it was opened");
        continue;
      }
      it = tracks.emplace(raw(*r.request), Track{r.state_before, false}).first;
      ++report.requests;
    } else if (opens) {
      report.violations.push_back(where + "request opened twice");
      continue;
    }
    Track& track = it->second;
    if (terminal(track.state)) {
      report.violations.push_back(where + "operation after terminal state " + track.state);
      continue;
    }
    if (r.state_before != track.state) {
      report.violations.push_back(where + "state_before " + r.state_before + " but request is in " + track.state);
      continue;
    }
    if (edge == edges().end()) {
      report.violations.push_back(where + "no transition from " + r.state_before);
      continue;
    }
    if (edge->second != r.state_after) {
      report.violations.push_back(where + "expected " + edge->second + " but trace says " + r.state_after);
      continue;
    }
    if (r.op == "challenge_redeem" && track.released) {
      report.violations.push_back(where + "redeem challenged after the vault released");
    }
    if (r.op == "release") track.released = true;
    track.state = r.state_after;
  }
  for (const auto& [id, t] : tracks) {
    if (!terminal(t.state)) ++report.open;
  }
  return report;
}

}  // namespace zclaim
