#include <gtest/gtest.h>

#include "zclaim/conformance.hpp"

using namespace zclaim;

namespace {

TraceRecord rec(const char* op, std::uint32_t req, const char* before, const char* after, const char* outcome = "ok") {
  return TraceRecord{1, "a", op, RequestId{req}, before, after, outcome};
}

std::vector<TraceRecord> happy_issue() {
  return {rec("request_lock", 1, "IssueStart", "AwaitingMint"), rec("lock", 1, "AwaitingMint", "AwaitingMint"),
          rec("mint", 1, "AwaitingMint", "AwaitIssueConfirm"), rec("confirm_issue", 1, "AwaitIssueConfirm", "IssueSuccess")};
}

}  // namespace

TEST(Conformance, AcceptsHappyIssueAndRedeem) {
  auto t = happy_issue();
  t.push_back(rec("burn", 2, "RedeemStart", "AwaitRedeemConfirm"));
  t.push_back(rec("release", 2, "AwaitRedeemConfirm", "AwaitRedeemConfirm"));
  t.push_back(rec("confirm_redeem", 2, "AwaitRedeemConfirm", "RedeemSuccess"));
  const auto r = check_conformance(t);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.requests, 2u);
  EXPECT_EQ(r.open, 0u);
}

TEST(Conformance, RejectsSkippedStep) {
  auto t = happy_issue();
  t.erase(t.begin() + 2);
  EXPECT_FALSE(check_conformance(t).ok());
}

TEST(Conformance, RejectsOperationAfterTerminal) {
  auto t = happy_issue();
  t.push_back(rec("challenge_issue", 1, "IssueSuccess", "IssueChallenged"));
  EXPECT_FALSE(check_conformance(t).ok());
}

TEST(Conformance, RejectsDoubleResolution) {
  // confirm and timeout are exclusive
  auto t = happy_issue();
  t.push_back(rec("timeout_confirm_issue", 1, "AwaitIssueConfirm", "IssueSuccess"));
  EXPECT_FALSE(check_conformance(t).ok());
}

TEST(Conformance, RejectedRecordMustNotMoveState) {
  auto t = happy_issue();
  t.insert(t.begin() + 3, rec("challenge_issue", 1, "AwaitIssueConfirm", "AwaitIssueConfirm", "rejected:challenge_rejected"));
  EXPECT_TRUE(check_conformance(t).ok());
  t[3].state_after = "IssueChallenged";
  EXPECT_FALSE(check_conformance(t).ok());
}

TEST(Conformance, RedeemChallengeAfterReleaseIsViolation) {
  std::vector<TraceRecord> t = {rec("burn", 2, "RedeemStart", "AwaitRedeemConfirm"),
                                rec("release", 2, "AwaitRedeemConfirm", "AwaitRedeemConfirm"),
                                rec("challenge_redeem", 2, "AwaitRedeemConfirm", "RedeemChallenged")};
  EXPECT_FALSE(check_conformance(t).ok());
}

TEST(Conformance, CountsOpenRequests) {
  auto t = happy_issue();
  t.pop_back();
  const auto r = check_conformance(t);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.open, 1u);
}
