#include <gtest/gtest.h>
TEST(Placeholder, synthdata) { GTEST_SKIP(); }
