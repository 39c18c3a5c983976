#include <catch2/catch_amalgamated.hpp>

#include "bogolab/bogolab.hpp"

TEST_CASE("placeholder excitation") { REQUIRE(true); }
