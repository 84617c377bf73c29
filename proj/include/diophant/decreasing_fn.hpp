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

#pragma once

#include "diophant/exact.hpp"

#include <utility>
#include <vector>

namespace diophant {

// Strictly decreasing phi: [0, inf) -> (0, inf) with phi(t) -> 0, exactly
// evaluable on rationals.
//
//   power:  A / (1 + t)^k
//   table:  piecewise linear through (t_i, v_i), t_0 = 0, then for t >= t_last
//           the power tail evaluated at t - t_last; the tail scale must equal
//           v_last so the function is continuous.
class DecreasingFn {
public:
    struct Row {
        Rational t, v;
    };

    static DecreasingFn power(const Rational& scale, unsigned k) {
        if (scale <= 0) throw Error(ErrorKind::InvalidArgument, "power law scale must be positive");
        if (k < 1) throw Error(ErrorKind::InvalidArgument, "power law exponent must be >= 1");
        DecreasingFn f;
        f.scale_ = scale;
        f.k_ = k;
        return f;
    }

    static DecreasingFn table(std::vector<Row> rows, const Rational& tail_scale, unsigned tail_k) {
        DecreasingFn f = power(tail_scale, tail_k);
        if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "empty table");
        if (rows.front().t != 0) throw Error(ErrorKind::InvalidArgument, "table must start at t = 0");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!(rows[i - 1].t < rows[i].t))
                throw Error(ErrorKind::InvalidArgument, "table thresholds must increase");
            if (!(rows[i - 1].v > rows[i].v))
                throw Error(ErrorKind::InvalidArgument, "table values must decrease");
        }
        if (rows.back().v != tail_scale)
            throw Error(ErrorKind::InvalidArgument, "tail scale must equal the last table value");
        f.rows_ = std::move(rows);
        return f;
    }

    bool is_table() const { return !rows_.empty(); }
    const Rational& scale() const { return scale_; }
    unsigned k() const { return k_; }
    const std::vector<Row>& rows() const { return rows_; }

    Rational operator()(const Rational& t) const { return eval(t); }

    Rational eval(const Rational& t) const {
        if (t < 0) throw Error(ErrorKind::NegativeArgument, "phi at negative t");
        if (rows_.empty()) return power_at(t);
        const Row& last = rows_.back();
        if (t >= last.t) return power_at(t - last.t);
        std::size_t i = 1;
        while (rows_[i].t <= t) ++i;
        const Row& a = rows_[i - 1];
        const Row& b = rows_[i];
        return a.v + (b.v - a.v) * (t - a.t) / (b.t - a.t);
    }

    friend bool operator==(const DecreasingFn& a, const DecreasingFn& b) {
        if (a.scale_ != b.scale_ || a.k_ != b.k_ || a.rows_.size() != b.rows_.size()) return false;
        for (std::size_t i = 0; i < a.rows_.size(); ++i) {
            if (a.rows_[i].t != b.rows_[i].t || a.rows_[i].v != b.rows_[i].v) return false;
        }
        return true;
    }

private:
    Rational power_at(const Rational& t) const {
        const Rational base = 1 + t;
        Rational d;
        mpz_pow_ui(d.get_num_mpz_t(), base.get_num_mpz_t(), k_);
        mpz_pow_ui(d.get_den_mpz_t(), base.get_den_mpz_t(), k_);
        return scale_ / d;
    }

    Rational scale_{1};
    unsigned k_ = 1;
    std::vector<Row> rows_;
};

// Smallest integer t >= 0 with f(t) <= y. Since f is strictly decreasing,
// f(t - 1) > y whenever the result is >= 1.
inline Integer inverse_upper(const DecreasingFn& f, const Rational& y) {
    if (y <= 0) throw Error(ErrorKind::OutOfRange, "inverse_upper needs y > 0");
    if (f.eval(Rational(0)) <= y) return Integer(0);
    Integer lo = 0;  // f(lo) > y
    Integer hi = 1;
    while (f.eval(Rational(hi)) > y) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const Integer mid = (lo + hi) / 2;
        if (f.eval(Rational(mid)) <= y)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace diophant
