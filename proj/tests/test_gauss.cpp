#include <catch2/catch_amalgamated.hpp>
TEST_CASE("pending test_gauss") { SUCCEED(); }
