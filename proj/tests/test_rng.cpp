#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "magnet/rng.hpp"

using namespace magnet;

TEST_CASE("mix64 matches the reference splitmix64 sequence") {
    // first outputs of splitmix64 for states 0, 1, 42
    CHECK(mix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(mix64(1) == 0x910a2dec89025cc1ULL);
    CHECK(mix64(42) == 0xbdd732262feb6e95ULL);
}

TEST_CASE("xoshiro stream is reproducible and matches frozen values") {
    Rng rng(42);
    CHECK(rng.next_u64() == 0xd0764d4f4476689fULL);
    CHECK(rng.next_u64() == 0x519e4174576f3791ULL);
    CHECK(rng.next_u64() == 0xfbe07cfb0c24ed8cULL);
    CHECK(rng.next_u64() == 0xb37d9f600cd835b8ULL);

    Rng a(9001), b(9001);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("unit draws use 53 bits and stay in [0, 1)") {
    Rng probe(7);
    CHECK(probe.next_unit() == doctest::Approx(0.055360436478333108).epsilon(1e-15));
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("derived stream seeds are frozen and collision free across tags") {
    CHECK(derive_seed(1, Stream::graph_edges) == 0xd0f01c26641603efULL);
    CHECK(derive_seed(1, Stream::init) == 0x35b73d445b109490ULL);
    CHECK(derive_seed(1, Stream::graph_edges, 7) == 0x95abb42f9d996aa1ULL);

    std::set<std::uint64_t> seen;
    for (const Stream s : {Stream::graph_edges, Stream::features, Stream::init,
                           Stream::dropout, Stream::split, Stream::negatives,
                           Stream::shuffle, Stream::graph_topology})
        for (std::uint64_t master : {0ULL, 1ULL, 2ULL, 12345ULL})
            for (std::uint64_t key : {0ULL, 1ULL, 2ULL})
                seen.insert(derive_seed(master, s, key));
    CHECK(seen.size() == 8u * 4u * 3u);
}

TEST_CASE("next_below is in range and roughly uniform") {
    Rng rng(11);
    std::vector<int> counts(10, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const std::uint64_t x = rng.next_below(10);
        REQUIRE(x < 10);
        ++counts[static_cast<std::size_t>(x)];
    }
    // each bucket within 5 sigma of draws/10 (sigma ~ sqrt(n p (1-p)) = 94.9)
    for (int c : counts) CHECK(std::abs(c - draws / 10) < 475);
}

TEST_CASE("normal draws have the right first two moments") {
    Rng rng(13);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.next_normal();
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);        // se = 1/sqrt(n) ~ 0.0022
    CHECK(std::abs(var - 1.0) < 0.02);   // se ~ sqrt(2/n) ~ 0.0032
}

TEST_CASE("shuffle permutes without losing elements") {
    Rng rng(17);
    std::vector<int> v(257);
    std::iota(v.begin(), v.end(), 0);
    const std::vector<int> original = v;
    rng.shuffle(v);
    CHECK(v != original);  // astronomically unlikely to be identity
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == original);
}

TEST_CASE("bernoulli matches its probability within binomial error") {
    Rng rng(19);
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += rng.next_bernoulli(0.3) ? 1 : 0;
    // 5 sigma: sqrt(n * 0.3 * 0.7) ~ 145
    CHECK(std::abs(hits - 30000) < 725);
}
