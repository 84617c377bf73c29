/*
   Copyright 2026 The diophant authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "diophant/exact.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace diophant {
namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

TEST(Vec3, DotAndCross) {
    EXPECT_EQ(dot({1, 0, 0}, {0, 1, 0}), 0);
    EXPECT_EQ(dot({1, 2, 3}, {1, 2, 3}), 14);
    EXPECT_EQ(dot({2, -1, 1}, {1, 1, -1}), 0);

    EXPECT_EQ(cross({1, 0, 0}, {0, 1, 0}), IntVec3(0, 0, 1));
    EXPECT_EQ(cross({1, 1, 0}, {0, 0, 1}), IntVec3(1, -1, 0));
    EXPECT_TRUE(cross({2, 4, 6}, {1, 2, 3}).is_zero());
}

TEST(Vec3, DeterminantMatchesCofactorExpansion) {
    std::mt19937_64 rng(oracle::seed(7));
    std::uniform_int_distribution<long> d(-1000, 1000);
    for (int i = 0; i < 100000; ++i) {
        const oracle::V3 a{d(rng), d(rng), d(rng)}, b{d(rng), d(rng), d(rng)}, c{d(rng), d(rng), d(rng)};
        const auto ref = static_cast<long>(oracle::det3(a, b, c));
        ASSERT_EQ(det3(oracle::from_v3(a), oracle::from_v3(b), oracle::from_v3(c)), ref);
    }
}

TEST(Vec3, ContentAndPrimitivePart) {
    EXPECT_EQ(content({4, -6, 10}), 2);
    EXPECT_EQ(primitive_part({4, -6, 10}), IntVec3(2, -3, 5));
    EXPECT_TRUE(is_primitive({1, 1, 0}));
    EXPECT_FALSE(is_primitive({0, 0, 2}));
    EXPECT_EQ(canonical_direction({0, -2, 4}), canonical_direction({0, 1, -2}));
}

TEST(Rational, AdditionMatchesCrossMultiplication) {
    std::mt19937_64 rng(oracle::seed(11));
    std::uniform_int_distribution<long> num(-1000000, 1000000), den(1, 1000000);
    for (int i = 0; i < 1000; ++i) {
        const long a = num(rng), b = den(rng), c = num(rng), d = den(rng);
        const Rational sum = make_rational(a, b) + make_rational(c, d);
        const Integer n = Integer(a) * d + Integer(c) * b;
        const Integer m = Integer(b) * d;
        // reduced form is unique, so comparing cross products suffices
        EXPECT_EQ(sum.get_num() * m, n * sum.get_den());
        Integer g;
        mpz_gcd(g.get_mpz_t(), sum.get_num_mpz_t(), sum.get_den_mpz_t());
        EXPECT_EQ(g, 1);
        EXPECT_GT(sum.get_den(), 0);
    }
}

TEST(Rational, FloorCeilRound) {
    EXPECT_EQ(floor_of(q(-7, 2)), -4);
    EXPECT_EQ(ceil_of(q(-7, 2)), -3);
    EXPECT_EQ(round_of(q(5, 2)), 3);
    EXPECT_EQ(round_of(q(-5, 2)), -2);
    EXPECT_EQ(frac_of(q(-1, 3)), q(2, 3));
    EXPECT_THROW(make_rational(1, 0), Error);
}

TEST(Rational, IntegerSquareRoots) {
    for (long n = 0; n < 2000; ++n) {
        const Integer f = isqrt_floor(n), c = isqrt_ceil(n);
        EXPECT_LE(f * f, n);
        EXPECT_GT((f + 1) * (f + 1), n);
        EXPECT_GE(c * c, n);
        if (c > 0) {
            EXPECT_LT((c - 1) * (c - 1), n);
        }
    }
}

TEST(Rational, CertifiedSqrtBounds) {
    std::mt19937_64 rng(oracle::seed(3));
    std::uniform_int_distribution<long> d(1, 1000000);
    for (int i = 0; i < 500; ++i) {
        const Rational r = make_rational(d(rng), d(rng));
        const Rational lo = sqrt_lower(r), hi = sqrt_upper(r);
        EXPECT_LE(lo * lo, r);
        EXPECT_GE(hi * hi, r);
        // relative gap below 2^-60
        EXPECT_LT((hi - lo) * pow2(60), hi);
    }
    EXPECT_EQ(sqrt_upper(q(9, 4)), q(3, 2));
    EXPECT_EQ(sqrt_lower(q(9, 4)), q(3, 2));
    EXPECT_THROW(sqrt_lower(q(-1)), Error);
}

TEST(Rational, SqrtSum) {
    EXPECT_TRUE(sqrt_sum_le(q(1), q(4), q(9)));   // 1 + 2 = 3
    EXPECT_FALSE(sqrt_sum_le(q(1), q(4), q(8)));
    EXPECT_TRUE(sqrt_sum_le(q(1, 4), q(1, 4), q(1)));
    EXPECT_FALSE(sqrt_sum_le(q(1, 4), q(1, 4), q(99, 100)));
}

TEST(Interval, Arithmetic) {
    const RatInterval a(q(-1), q(2)), b(q(3), q(5));
    EXPECT_EQ(a + b, RatInterval(q(2), q(7)));
    EXPECT_EQ(a - b, RatInterval(q(-6), q(-1)));
    EXPECT_EQ(a * b, RatInterval(q(-5), q(10)));
    EXPECT_EQ(abs(a), RatInterval(q(0), q(2)));
    EXPECT_EQ(q(-2) * b, RatInterval(q(-10), q(-6)));
    EXPECT_TRUE(RatInterval(q(-2), q(3)).strictly_contains(a));
    EXPECT_FALSE(a.strictly_contains(a));
    EXPECT_THROW(RatInterval(q(1), q(0)), Error);

    const RatInterval r = round_outward(RatInterval(q(1, 3), q(2, 3)), 8);
    EXPECT_TRUE(r.contains(RatInterval(q(1, 3), q(2, 3))));
    EXPECT_EQ(r.lo.get_den(), 256);
}

TEST(Angles, BetweenLines) {
    EXPECT_EQ(sin_sq_between_lines({1, 0, 0}, {1, 1, 0}).value(), q(1, 2));
    EXPECT_EQ(sin_sq_between_lines({3, 1, 2}, {3, 1, 2}).value(), 0);
    EXPECT_EQ(sin_sq_between_lines({1, 0, 0}, {0, 5, 0}).value(), 1);
    EXPECT_THROW(sin_sq_between_lines({0, 0, 0}, {1, 0, 0}), Error);
}

TEST(Angles, LinePlane) {
    EXPECT_EQ(sin_sq_line_plane({0, 0, 1}, {0, 0, 1}).value(), 1);
    EXPECT_EQ(sin_sq_line_plane({1, 0, 0}, {0, 0, 1}).value(), 0);
    EXPECT_EQ(sin_sq_line_plane({1, 0, 1}, {0, 0, 1}).value(), q(1, 2));
    EXPECT_THROW(sin_sq_line_plane({1, 0, 1}, {0, 0, 0}), Error);
}

TEST(Angles, SymmetricScaleInvariantZeroIffCollinear) {
    std::mt19937_64 rng(oracle::seed(5));
    std::uniform_int_distribution<long> d(-50, 50);
    for (int i = 0; i < 2000; ++i) {
        const IntVec3 u(d(rng), d(rng), d(rng)), v(d(rng), d(rng), d(rng));
        if (u.is_zero() || v.is_zero()) continue;
        const SinSq s = sin_sq_between_lines(u, v);
        EXPECT_EQ(s, sin_sq_between_lines(v, u));
        EXPECT_EQ(s, sin_sq_between_lines(Integer(3) * u, v));
        EXPECT_EQ(s.value() == 0, cross(u, v).is_zero());
    }
}

// u = p + (u.n / |n|^2) n with p the projection onto the plane: the angle to
// the plane is the angle to p, and it is complementary to the angle to n.
TEST(Angles, PythagoreanWithProjection) {
    std::mt19937_64 rng(oracle::seed(9));
    std::uniform_int_distribution<long> d(-30, 30);
    int checked = 0;
    while (checked < 1000) {
        const IntVec3 u(d(rng), d(rng), d(rng)), n(d(rng), d(rng), d(rng));
        if (u.is_zero() || n.is_zero() || cross(u, n).is_zero()) continue;
        const Integer un = dot(u, n), nn = n.norm_sq();
        // scaled projection nn*u - un*n is an integer vector on the plane
        const IntVec3 proj = nn * u - un * n;
        ASSERT_EQ(dot(proj, n), 0);
        if (proj.is_zero()) continue;
        EXPECT_EQ(sin_sq_line_plane(u, n), sin_sq_between_lines(u, proj));
        EXPECT_EQ(sin_sq_line_plane(u, n).value() + sin_sq_between_lines(u, n).value(), 1);
        ++checked;
    }
}

TEST(Distance, PointLine) {
    EXPECT_EQ(dist_sq_point_line({0, 1, 0}, {1, 0, 0}), 1);
    EXPECT_EQ(dist_sq_point_line({5, 0, 0}, {1, 0, 0}), 0);
    // min over t of |x - t z|^2 is at t = x.z / |z|^2 = 1
    const IntVec3 x(1, 1, 1), z(1, 1, 0);
    const Rational t = make_rational(dot(x, z), z.norm_sq());
    Rational m(0);
    for (std::size_t i = 0; i < 3; ++i) {
        const Rational c = Rational(x[i]) - t * Rational(z[i]);
        m += c * c;
    }
    EXPECT_EQ(dist_sq_point_line(x, z), m);
    EXPECT_EQ(m, 1);
    EXPECT_THROW(dist_sq_point_line(x, {0, 0, 0}), Error);
}

TEST(SinSqType, RejectsOutOfRange) {
    EXPECT_THROW(SinSq(q(3, 2)), Error);
    EXPECT_THROW(SinSq(q(-1, 2)), Error);
    EXPECT_LT(SinSq(q(1, 4)), SinSq(q(1, 2)));
}

}  // namespace
}  // namespace diophant
