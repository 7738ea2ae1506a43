#include <gtest/gtest.h>

#include "zclaim/oracle.hpp"

using namespace zclaim;

TEST(RateFeed, LatestRateAtOrBeforeTick) {
  RateFeed feed;
  EXPECT_EQ(feed.get_rate(0).error().code, Reject::feed_unavailable);
  ASSERT_TRUE(feed.set_rate(0, Ratio{2, 1}));
  EXPECT_EQ(*feed.get_rate(5), (Ratio{2, 1}));
  ASSERT_TRUE(feed.set_rate(10, Ratio{3, 1}));
  EXPECT_EQ(*feed.get_rate(9), (Ratio{2, 1}));
  EXPECT_EQ(*feed.get_rate(10), (Ratio{3, 1}));
  EXPECT_FALSE(feed.set_rate(11, Ratio{0, 1}));
  EXPECT_EQ(*feed.get_rate(11), (Ratio{3, 1}));
}

TEST(RateFeed, FeedStartsLate) {
  RateFeed feed;
  ASSERT_TRUE(feed.set_rate(5, Ratio{1, 2}));
  EXPECT_FALSE(feed.get_rate(4));
  EXPECT_TRUE(feed.get_rate(5));
}
